"""Command line entry point: ``mapp {plan,gen,bench,validate,oracle}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import RunOptions, run_batch, run_instance
from .grid import load_instance, load_map, save_instance, save_map
from .progression import load_trajectories
from .scenario import GenConfig, gen_instance, gen_urban_map
from .search import PRIORITY_ORDERS
from .validator import OracleRefused, format_report, hard_violations, joint_oracle, validate


def _read(path: str) -> str:
    return Path(path).read_text()


def cmd_plan(args) -> int:
    grid = load_map(_read(args.map))
    inst = load_instance(_read(args.scen), grid)
    res = run_instance(
        inst,
        RunOptions(step_budget=args.budget, priority_order=args.priority_order, omega_radius=args.omega_radius),
    )
    text = res.trajectory_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    m = res.metrics
    print(
        f"status={m.status} time_s={m.time_seconds:.3f} memory_nodes={m.memory_nodes} "
        f"path_length={m.path_length_avg:.3f} conflicts={m.conflicts} "
        f"conflict_agents={m.conflict_agents} success_pct={m.success_pct:.2f}",
        file=sys.stderr,
    )
    if res.violations:
        sys.stderr.write(res.violation_text())
    return 0 if m.status == "ok" else 1


def cmd_gen(args) -> int:
    cfg = GenConfig(
        width=args.width,
        height=args.height,
        block_density_range=(args.density_min, args.density_max),
        agent_count=args.agents,
        zone_size=args.zone,
        seed=args.seed,
        instance_type=args.type,
    )
    grid = gen_urban_map(cfg)
    inst = gen_instance(grid, cfg)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    map_path = prefix.with_suffix(".map")
    scen_path = prefix.with_suffix(".scen")
    map_path.write_text(save_map(grid))
    scen_path.write_text(save_instance(inst, [f"map {map_path.name}"] + cfg.comment_lines()))
    print(f"wrote {map_path} and {scen_path}")
    return 0


def cmd_bench(args) -> int:
    report = run_batch(args.config, args.out, jobs=args.jobs)
    sys.stdout.write(report.table())
    bad = [name for name, _, m in report.rows if m.status != "ok"]
    for name, _, m in report.rows:
        if m.status != "ok":
            print(f"{name}: {m.status} {m.error}".rstrip(), file=sys.stderr)
    return 0 if not bad else 1


def cmd_validate(args) -> int:
    grid = load_map(_read(args.map))
    trajs, statuses = load_trajectories(_read(args.traj))
    # without a scenario only the trajectories themselves can be checked
    target = load_instance(_read(args.scen), grid) if args.scen else grid
    violations = validate(target, trajs, statuses, pad=True)
    sys.stdout.write(format_report(violations))
    return 1 if hard_violations(violations) else 0


def cmd_oracle(args) -> int:
    grid = load_map(_read(args.map))
    inst = load_instance(_read(args.scen), grid)
    try:
        res = joint_oracle(inst, args.max_makespan)
    except OracleRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    if res.status == "unsat":
        print("unsat")
        return 1
    print(f"makespan {res.makespan}")
    for aid, traj in enumerate(res.trajectories):
        print(aid, " ".join(f"{r} {c}" for r, c in traj))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mapp", description="Slidable multi-agent path finding on 4-connected grids")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="plan and simulate one instance")
    sp.add_argument("--map", required=True)
    sp.add_argument("--scen", required=True)
    sp.add_argument("--out", help="trajectory dump path (default: stdout)")
    sp.add_argument("--budget", type=int, default=None, help="step budget (default: 10x longest path)")
    sp.add_argument("--priority-order", choices=PRIORITY_ORDERS, default="priority")
    sp.add_argument("--omega-radius", type=int, default=None)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("gen", help="generate a synthetic urban map and instance")
    sp.add_argument("--width", type=int, default=101)
    sp.add_argument("--height", type=int, default=101)
    sp.add_argument("--density-min", type=float, default=0.20)
    sp.add_argument("--density-max", type=float, default=0.25)
    sp.add_argument("--agents", type=int, default=20)
    sp.add_argument("--type", choices=("type1", "type2"), default="type1")
    sp.add_argument("--zone", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output prefix; writes PREFIX.map and PREFIX.scen")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="run a batch config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None, help="output directory for report.csv, averages.csv, table.md")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("validate", help="check a trajectory dump")
    sp.add_argument("--map", required=True)
    sp.add_argument("--traj", required=True)
    sp.add_argument("--scen", default=None, help="scenario for start/goal checks")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("oracle", help="solve a tiny instance exactly")
    sp.add_argument("--map", required=True)
    sp.add_argument("--scen", required=True)
    sp.add_argument("--max-makespan", type=int, default=None)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
