"""Search-free solution checks and a brute-force joint-space oracle.

Nothing here calls into the planner: :func:`verify_slidable` re-derives every
alternative path with its own breadth-first search, and :func:`joint_oracle`
solves tiny instances exactly over the joint configuration space.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .grid import Coord, Grid, Instance
from .search import Plans, SlidablePath

VIOLATION_KINDS = ("vertex_conflict", "discontinuous_move", "blocked_cell", "wrong_endpoint", "swap")
HARD_KINDS = frozenset(VIOLATION_KINDS[:4])


@dataclass(frozen=True)
class Violation:
    kind: str
    timestep: int
    agents: tuple[int, ...]
    cells: tuple[Coord, ...]

    @property
    def hard(self) -> bool:
        return self.kind in HARD_KINDS

    def format(self) -> str:
        agents = ",".join(map(str, self.agents))
        cells = ",".join(f"{r}:{c}" for r, c in self.cells)
        return f"{self.kind} {self.timestep} {agents} {cells}"


def format_report(violations: Sequence[Violation]) -> str:
    return "".join(v.format() + "\n" for v in violations)


def hard_violations(violations: Sequence[Violation]) -> list[Violation]:
    return [v for v in violations if v.hard]


def validate(
    instance: Instance | Grid,
    trajectories: Sequence[Sequence[Coord]],
    statuses: Optional[Sequence[str]] = None,
    pad: bool = False,
) -> list[Violation]:
    """Check trajectories against the instance; an empty list means valid.

    Swaps are reported with kind ``swap`` but are advisory: only same-cell,
    same-timestep occupancy counts as a collision. Passing a bare :class:`Grid`
    skips the start/goal checks.
    """
    if isinstance(instance, Grid):
        grid, agents = instance, ()
        n = len(trajectories)
    else:
        grid, agents = instance.grid, instance.agents
        n = len(agents)
    if len(trajectories) != n:
        raise ValueError(f"expected {n} trajectories, got {len(trajectories)}")
    if any(len(t) == 0 for t in trajectories):
        raise ValueError("empty trajectory")
    horizon = max(len(t) for t in trajectories)
    trajs = [list(t) for t in trajectories]
    if any(len(t) != horizon for t in trajs):
        if not pad:
            raise ValueError("trajectories differ in length; pass pad=True to extend with final cells")
        trajs = [t + [t[-1]] * (horizon - len(t)) for t in trajs]

    out: list[Violation] = []
    for a in agents:
        if trajs[a.id][0] != a.start:
            out.append(Violation("wrong_endpoint", 0, (a.id,), (trajs[a.id][0], a.start)))
        if statuses is not None and statuses[a.id] == "solved" and trajs[a.id][-1] != a.goal:
            out.append(Violation("wrong_endpoint", horizon - 1, (a.id,), (trajs[a.id][-1], a.goal)))

    for t in range(horizon):
        at = defaultdict(list)
        for aid, tr in enumerate(trajs):
            c = tr[t]
            at[c].append(aid)
            if not grid.is_free(c):
                out.append(Violation("blocked_cell", t, (aid,), (c,)))
            if t and abs(c[0] - tr[t - 1][0]) + abs(c[1] - tr[t - 1][1]) > 1:
                out.append(Violation("discontinuous_move", t, (aid,), (tr[t - 1], c)))
        for c, ids in at.items():
            if len(ids) > 1:
                out.append(Violation("vertex_conflict", t, tuple(ids), (c,)))
        if t:
            moved = {(trajs[aid][t - 1], trajs[aid][t]): aid for aid in range(n) if trajs[aid][t - 1] != trajs[aid][t]}
            for (frm, to), aid in moved.items():
                other = moved.get((to, frm))
                if other is not None and aid < other:
                    out.append(Violation("swap", t, (aid, other), (frm, to)))
    return out


# -- Slidable conditions ----------------------------------------------------

def _free(grid: Grid, c: Coord) -> bool:
    return 0 <= c[0] < grid.height and 0 <= c[1] < grid.width and not grid.blocked[c[0], c[1]]


def _adjacent(a: Coord, b: Coord) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def bypass_length(grid: Grid, frm: Coord, excluded: Coord, to: Coord, forbidden) -> Optional[int]:
    """Length of the shortest ``frm``->``to`` walk avoiding ``excluded`` and ``forbidden``."""
    if frm == to:
        return 0
    dist = {frm: 0}
    q = deque([frm])
    while q:
        c = q.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            n = (c[0] + dr, c[1] + dc)
            if n in dist or n == excluded or n in forbidden or not _free(grid, n):
                continue
            dist[n] = dist[c] + 1
            if n == to:
                return dist[n]
            q.append(n)
    return None


@dataclass
class SlidableReport:
    agent_id: int
    slidable: bool
    path_valid: bool = False
    alternative_connectivity: bool = False
    initial_blank: bool = False
    goal_isolation: bool = False
    omegas_valid: bool = False
    problems: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.slidable and not self.problems


def _check_walk(grid, cells, first, last) -> Optional[str]:
    if not cells:
        return "empty"
    if cells[0] != first or cells[-1] != last:
        return f"endpoints {cells[0]}->{cells[-1]}, expected {first}->{last}"
    for a, b in zip(cells, cells[1:]):
        if not _adjacent(a, b):
            return f"non-adjacent step {a}->{b}"
    for c in cells:
        if not _free(grid, c):
            return f"untraversable cell {c}"
    return None


def verify_slidable(instance: Instance, plans: Plans) -> list[SlidableReport]:
    """Re-check the three Slidable conditions for every agent with a path."""
    grid = instance.grid
    agents = instance.agents
    reports = []
    for a in agents:
        res = plans.results[a.id]
        if not isinstance(res, SlidablePath):
            reports.append(SlidableReport(a.id, False, problems=["no path"]))
            continue
        rep = SlidableReport(a.id, True)
        others_goals = {b.goal for b in agents if b.id != a.id}
        others_starts = {b.start for b in agents if b.id != a.id}
        cells = list(res.cells)

        err = _check_walk(grid, cells, a.start, a.goal)
        rep.path_valid = err is None
        if err:
            rep.problems.append(f"path: {err}")

        rep.initial_blank = len(cells) < 2 or cells[1] not in others_starts
        if not rep.initial_blank:
            rep.problems.append(f"initial blank: first step {cells[1]} is another start")

        on_goal = [c for c in cells if c in others_goals]
        omega_on_goal = []
        rep.omegas_valid = True
        rep.alternative_connectivity = True
        for i in range(1, len(cells) - 1):
            prev, mid, nxt = cells[i - 1], cells[i], cells[i + 1]
            if bypass_length(grid, prev, mid, nxt, others_goals) is None:
                rep.alternative_connectivity = False
                rep.problems.append(f"alternative connectivity: no bypass around index {i} {mid}")
            om = res.omegas.get(i)
            if om is None:
                rep.omegas_valid = False
                rep.problems.append(f"omega {i}: missing")
                continue
            err = _check_walk(grid, om, prev, nxt)
            if err is None and mid in om:
                err = f"passes through excluded cell {mid}"
            if err:
                rep.omegas_valid = False
                rep.problems.append(f"omega {i}: {err}")
            omega_on_goal += [c for c in om if c in others_goals]
        rep.goal_isolation = not on_goal and not omega_on_goal
        if on_goal:
            rep.problems.append(f"goal isolation: path crosses other goals {sorted(set(on_goal))}")
        if omega_on_goal:
            rep.problems.append(f"goal isolation: omegas cross other goals {sorted(set(omega_on_goal))}")
        reports.append(rep)
    return reports


def problem_is_slidable(reports: Sequence[SlidableReport]) -> bool:
    return all(r.passed for r in reports)


# -- joint-space oracle ------------------------------------------------------

MAX_ORACLE_AGENTS = 3
MAX_ORACLE_SIDE = 6


class OracleRefused(ValueError):
    """Instance is larger than the oracle's state-space guard allows."""


@dataclass
class OracleResult:
    status: str  # "solved" or "unsat"
    makespan: Optional[int] = None
    trajectories: Optional[list[list[Coord]]] = None
    states: int = 0


def joint_oracle(instance: Instance, max_makespan: Optional[int] = None) -> OracleResult:
    """Minimum-makespan conflict-free plan by BFS over joint configurations.

    Each agent waits or moves to a free neighbour per timestep; vertex conflicts
    and swaps are both excluded. ``unsat`` means no plan exists within
    ``max_makespan`` (or at all, when no bound is given).
    """
    grid = instance.grid
    n = len(instance.agents)
    if n > MAX_ORACLE_AGENTS or grid.height > MAX_ORACLE_SIDE or grid.width > MAX_ORACLE_SIDE:
        raise OracleRefused(
            f"oracle handles at most {MAX_ORACLE_AGENTS} agents on "
            f"{MAX_ORACLE_SIDE}x{MAX_ORACLE_SIDE}; got {n} agents on {grid.height}x{grid.width}"
        )
    moves = {}
    for c in grid.free_cells():
        opts = [c]
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            m = (c[0] + dr, c[1] + dc)
            if _free(grid, m):
                opts.append(m)
        moves[c] = opts

    start = tuple(a.start for a in instance.agents)
    goal = tuple(a.goal for a in instance.agents)
    parent: dict[tuple, Optional[tuple]] = {start: None}
    depth = {start: 0}
    q = deque([start])
    found = start if start == goal else None
    while q and found is None:
        s = q.popleft()
        if max_makespan is not None and depth[s] >= max_makespan:
            continue
        for nxt in itertools.product(*(moves[c] for c in s)):
            if nxt in parent or len(set(nxt)) < n:
                continue
            if any(nxt[i] == s[j] and nxt[j] == s[i] for i in range(n) for j in range(i + 1, n) if s[i] != nxt[i]):
                continue
            parent[nxt] = s
            depth[nxt] = depth[s] + 1
            if nxt == goal:
                found = nxt
                break
            q.append(nxt)
    if found is None:
        return OracleResult("unsat", states=len(parent))
    seq = [found]
    while parent[seq[-1]] is not None:
        seq.append(parent[seq[-1]])
    seq.reverse()
    trajs = [[state[i] for state in seq] for i in range(n)]
    return OracleResult("solved", len(seq) - 1, trajs, len(parent))
