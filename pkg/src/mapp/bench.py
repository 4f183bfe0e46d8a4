"""Experiment runner: per-instance metrics and batch reports.

Batch configs are JSON::

    {
      "options": {"step_budget": null, "priority_order": "priority", "omega_radius": null},
      "instances": [
        {"name": "city-1", "type": "type1", "map": "city-1.map", "scen": "city-1.scen"},
        {"name": "synthetic", "gen": {"width": 101, "height": 101, "seed": 3, "instance_type": "type2"}}
      ],
      "generate": [
        {"count": 100, "seed_start": 0, "width": 101, "height": 101, "agent_count": 20, "instance_type": "type1"}
      ]
    }

Relative ``map``/``scen`` paths resolve against the config file's directory.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .grid import Instance, load_instance, load_map
from .progression import RunResult, default_budget, dump_trajectories, run
from .scenario import GenConfig, generate
from .search import Plans, plan_all
from .validator import Violation, format_report, hard_violations, validate

REPORT_HEADER = (
    "instance",
    "type",
    "time_s",
    "plan_time_s",
    "progress_time_s",
    "memory_nodes",
    "path_length",
    "conflicts",
    "conflict_agents",
    "success_pct",
    "status",
)
METRIC_COLUMNS = REPORT_HEADER[2:10]


@dataclass
class RunOptions:
    step_budget: Optional[int] = None
    priority_order: str = "priority"
    omega_radius: Optional[int] = None
    avoid_stuck_starts: bool = True


@dataclass
class RunMetrics:
    time_seconds: float
    plan_time_s: float
    progress_time_s: float
    memory_nodes: int
    path_length_avg: float
    conflicts: int
    conflict_agents: int
    success_pct: float
    status: str
    agents: int = 0
    error: str = ""

    @classmethod
    def failed(cls, message: str) -> RunMetrics:
        """Row for an instance that raised before producing metrics."""
        nan = float("nan")
        return cls(nan, nan, nan, 0, nan, 0, 0, 0.0, "error", 0, message)

    def row(self, name: str, kind: str) -> list:
        return [
            name,
            kind,
            self.time_seconds,
            self.plan_time_s,
            self.progress_time_s,
            self.memory_nodes,
            self.path_length_avg,
            self.conflicts,
            self.conflict_agents,
            self.success_pct,
            self.status,
        ]

    def deterministic(self) -> tuple:
        """Every metric except the wall-clock timings."""
        return (self.memory_nodes, self.path_length_avg, self.conflicts, self.conflict_agents, self.success_pct, self.status)


@dataclass
class InstanceRun:
    metrics: RunMetrics
    plans: Plans
    result: RunResult
    violations: list[Violation]

    def trajectory_text(self) -> str:
        return dump_trajectories(self.result)

    def violation_text(self) -> str:
        return format_report(self.violations)


def compute_metrics(instance: Instance, plans: Plans, result: RunResult, plan_s: float, prog_s: float, violations) -> RunMetrics:
    n = len(instance.agents)
    solved = [t for t, st in zip(result.arrivals, result.statuses) if st == "solved"]
    if hard_violations(violations):
        status = "invalid"
    elif result.status != "all_solved":
        status = result.status
    else:
        status = "ok"
    return RunMetrics(
        time_seconds=plan_s + prog_s,
        plan_time_s=plan_s,
        progress_time_s=prog_s,
        memory_nodes=plans.stats.nodes_stored_max,
        path_length_avg=sum(solved) / len(solved) if solved else 0.0,
        conflicts=len(result.conflicts),
        conflict_agents=len({e.blocked_agent for e in result.conflicts}),
        success_pct=100.0 * len(solved) / n if n else 100.0,
        status=status,
        agents=n,
    )


def run_instance(instance: Instance, options: Optional[RunOptions] = None) -> InstanceRun:
    """Plan, progress and validate one instance."""
    options = options or RunOptions()
    t0 = time.perf_counter()
    plans = plan_all(
        instance,
        omega_radius=options.omega_radius,
        order=options.priority_order,
        avoid_stuck_starts=options.avoid_stuck_starts,
    )
    t1 = time.perf_counter()
    budget = options.step_budget or default_budget(plans)
    result = run(instance, plans, budget)
    t2 = time.perf_counter()
    violations = validate(instance, result.trajectories, result.statuses)
    metrics = compute_metrics(instance, plans, result, t1 - t0, t2 - t1, violations)
    return InstanceRun(metrics, plans, result, violations)


# -- batches -----------------------------------------------------------------

@dataclass
class BatchEntry:
    name: str
    type: str
    map_path: Optional[Path] = None
    scen_path: Optional[Path] = None
    gen: Optional[dict] = None

    def load(self) -> Instance:
        if self.gen is not None:
            return generate(GenConfig(**self.gen))
        grid = load_map(Path(self.map_path).read_text())
        return load_instance(Path(self.scen_path).read_text(), grid)


@dataclass
class BatchReport:
    rows: list[tuple[str, str, RunMetrics]]
    averages: dict[str, dict[str, float]] = field(default_factory=dict)

    @classmethod
    def from_rows(cls, rows) -> BatchReport:
        rep = cls(list(rows))
        rep.averages = average_rows(rep.rows)
        return rep

    def by_type(self, kind: str) -> list[RunMetrics]:
        return [m for _, t, m in self.rows if t == kind]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for name, kind, m in self.rows:
            w.writerow(m.row(name, kind))
        return buf.getvalue()

    def averages_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("type", "instances") + METRIC_COLUMNS)
        for kind, avg in self.averages.items():
            w.writerow([kind, avg["instances"]] + [avg[c] for c in METRIC_COLUMNS])
        return buf.getvalue()

    def table(self) -> str:
        """Averages in the column layout Time(s), Memory(nodes), Pathlength, Conflicts, Success."""
        lines = [
            "| # | Time(s) | Memory(nodes) | Pathlength | Conflicts | Success |",
            "|---|---|---|---|---|---|",
        ]
        for kind, a in self.averages.items():
            lines.append(
                f"| {kind} | {a['time_s']:.3f} | {a['memory_nodes']:.0f} | {a['path_length']:.3f} "
                f"| {a['conflicts']:.3f} | {a['success_pct']:.2f}% |"
            )
        return "\n".join(lines) + "\n"


def average_rows(rows) -> dict[str, dict[str, float]]:
    """Arithmetic mean of every metric column, grouped by instance type in first-seen order.

    Rows with status ``error`` have no metrics and are left out.
    """
    groups: dict[str, list[RunMetrics]] = {}
    for _, kind, m in rows:
        groups.setdefault(kind, [])
        if m.status != "error":
            groups[kind].append(m)
    out = {}
    for kind, ms in groups.items():
        cols = {
            "time_s": [m.time_seconds for m in ms],
            "plan_time_s": [m.plan_time_s for m in ms],
            "progress_time_s": [m.progress_time_s for m in ms],
            "memory_nodes": [m.memory_nodes for m in ms],
            "path_length": [m.path_length_avg for m in ms],
            "conflicts": [m.conflicts for m in ms],
            "conflict_agents": [m.conflict_agents for m in ms],
            "success_pct": [m.success_pct for m in ms],
        }
        avg = {k: math.fsum(v) / len(v) if v else float("nan") for k, v in cols.items()}
        avg["instances"] = len(ms)
        out[kind] = avg
    return out


def read_report(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def expand_config(config: dict, base: Path = Path(".")) -> tuple[list[BatchEntry], RunOptions]:
    options = RunOptions(**config.get("options", {}))
    entries = []
    for i, item in enumerate(config.get("instances", [])):
        if "gen" in item:
            gen = dict(item["gen"])
            kind = item.get("type", gen.get("instance_type", "type1"))
            entries.append(BatchEntry(item.get("name", f"gen-{i}"), kind, gen=_gen_fields(gen)))
        else:
            entries.append(
                BatchEntry(
                    item.get("name", Path(item["scen"]).stem),
                    item.get("type", "custom"),
                    base / item["map"],
                    base / item["scen"],
                )
            )
    for block in config.get("generate", []):
        block = dict(block)
        count = block.pop("count")
        seed0 = block.pop("seed_start", 0)
        gen = _gen_fields(block)
        kind = gen.get("instance_type", "type1")
        for k in range(count):
            g = dict(gen, seed=seed0 + k)
            entries.append(BatchEntry(f"{kind}-{g['height']}x{g['width']}-s{seed0 + k}", kind, gen=g))
    return entries, options


def _gen_fields(gen: dict) -> dict:
    gen = dict(gen)
    for k in ("block_density_range", "building_side_range"):
        if k in gen:
            gen[k] = tuple(gen[k])
    GenConfig(**gen)  # validate early
    defaults = asdict(GenConfig())
    return {**defaults, **gen}


def _run_entry(args):
    entry, options = args
    try:
        return run_instance(entry.load(), options).metrics
    except Exception as exc:  # recorded in the report; the batch goes on
        return RunMetrics.failed(f"{type(exc).__name__}: {exc}")


def run_entries(entries: Sequence[BatchEntry], options: RunOptions, jobs: int = 1) -> BatchReport:
    if not entries:
        raise ValueError("batch has no instances to run")
    work = [(e, options) for e in entries]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            metrics = list(pool.map(_run_entry, work))
    else:
        metrics = [_run_entry(w) for w in work]
    return BatchReport.from_rows((e.name, e.type, m) for e, m in zip(entries, metrics))


def run_batch(config, out_dir=None, jobs: int = 1) -> BatchReport:
    """Run every instance of a batch config (dict or JSON file path)."""
    base = Path(".")
    if not isinstance(config, dict):
        base = Path(config).parent
        config = json.loads(Path(config).read_text())
    entries, options = expand_config(config, base)
    report = run_entries(entries, options, jobs)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(report.to_csv())
        (out / "averages.csv").write_text(report.averages_csv())
        (out / "table.md").write_text(report.table())
    return report
