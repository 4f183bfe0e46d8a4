"""Priority-ordered progression of Slidable agents along their paths.

One call to :func:`progression_step` advances the world by one timestep. Agents
act from highest to lowest priority and each moves at most one cell per step:

* an agent whose next path cell holds a higher-priority agent, or was just
  vacated by one moving along its path (private zone), waits;
* a free next cell is entered directly;
* a next cell held by a lower-priority agent is cleared first by blank travel
  (:func:`bring_blank`), which shifts a chain of lower-priority agents one cell
  each towards the nearest empty cell.

Agents pushed off their path by blank travel walk back to the nearest cell of
their own path on later steps, using the same wait/move/blank-travel rules.
Agents without a Slidable path never move and are treated as fixed obstacles,
as are agents that reached their goal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .grid import Coord, Grid, Instance
from .search import Plans, SlidablePath

STATUSES = ("solved", "non_slidable", "unsolved")


class Blocked(Exception):
    """No blank can be brought to the target cell this timestep."""


class EngineFault(RuntimeError):
    """Internal consistency violation in the progression engine."""


@dataclass
class AgentRuntime:
    agent_id: int
    start: Coord
    goal: Coord
    path: Optional[SlidablePath] = None
    index: int = 0
    current: Coord = (0, 0)
    prev: Optional[Coord] = None
    off_path: bool = False
    visited_this_step: set = field(default_factory=set)
    solved: bool = False
    moved: bool = False
    arrival: Optional[int] = None
    _where: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.current = self.start
        if self.path is not None:
            for i, c in enumerate(self.path.cells):
                self._where.setdefault(c, i)
            if self.start == self.goal:
                self.solved = True
                self.arrival = 0

    @property
    def slidable(self) -> bool:
        return self.path is not None

    def path_index(self, c: Coord) -> Optional[int]:
        """Smallest index of ``c`` on the agent's path."""
        return self._where.get(c)


@dataclass
class ConflictEvent:
    timestep: int
    blocked_agent: int
    blocking_agent: int
    cell: Coord
    resolved: bool = True


@dataclass
class ProgressionState:
    grid: Grid
    runtimes: list[AgentRuntime]
    order: list[int]
    occupancy: dict[Coord, int]
    active: list[int]
    solved: set[int]
    rank: dict[int, int]
    goal_cells: dict[Coord, int]
    timestep: int = 0
    conflicts: list[ConflictEvent] = field(default_factory=list)
    trajectories: list[list[Coord]] = field(default_factory=list)

    @classmethod
    def initial(cls, instance: Instance, plans: Plans) -> ProgressionState:
        order = list(plans.order)
        rank = {aid: r for r, aid in enumerate(order)}
        rts = []
        for a in instance.agents:
            res = plans.results[a.id]
            path = res if isinstance(res, SlidablePath) else None
            rts.append(AgentRuntime(a.id, a.start, a.goal, path))
        occupancy = {rt.current: rt.agent_id for rt in rts}
        if len(occupancy) != len(rts):
            raise EngineFault("agents share a start cell")
        active = [aid for aid in order if rts[aid].slidable and not rts[aid].solved]
        solved = {rt.agent_id for rt in rts if rt.solved}
        return cls(
            grid=instance.grid,
            runtimes=rts,
            order=order,
            occupancy=occupancy,
            active=active,
            solved=solved,
            rank=rank,
            goal_cells={a.goal: a.id for a in instance.agents},
            trajectories=[[rt.current] for rt in rts],
        )

    def is_fixed(self, aid: int) -> bool:
        rt = self.runtimes[aid]
        return rt.solved or not rt.slidable

    def check(self) -> None:
        """Raise :class:`EngineFault` if the state invariants are broken."""
        if len(self.occupancy) != len(self.runtimes):
            raise EngineFault(f"t={self.timestep}: occupancy has {len(self.occupancy)} cells")
        for rt in self.runtimes:
            if self.occupancy.get(rt.current) != rt.agent_id:
                raise EngineFault(f"t={self.timestep}: agent {rt.agent_id} not at {rt.current}")
            if not self.grid.is_free(rt.current):
                raise EngineFault(f"t={self.timestep}: agent {rt.agent_id} on blocked cell")
            if rt.solved and (rt.current != rt.goal or rt.agent_id not in self.solved):
                raise EngineFault(f"agent {rt.agent_id} solved away from goal")
            if rt.path is not None and not rt.off_path and rt.path.cells[rt.index] != rt.current:
                raise EngineFault(f"agent {rt.agent_id} on path but not at index {rt.index}")
            if rt.path is None and rt.current != rt.start:
                raise EngineFault(f"non-Slidable agent {rt.agent_id} left its start")
        if set(self.active) & self.solved:
            raise EngineFault("active and solved sets overlap")


def private_zone(rt: AgentRuntime) -> set[Coord]:
    """Current cell, plus the cell just left if the last move was along the path."""
    zone = {rt.current}
    if rt.prev is not None:
        zone.add(rt.prev)
    return zone


def bring_blank(state: ProgressionState, u: AgentRuntime, target: Coord) -> list[tuple[int, Coord, Coord]]:
    """Moves that empty ``target`` by shifting lower-priority agents towards the nearest blank.

    Blanks are searched breadth-first from ``target``; among equally near blanks the
    first one found that is not on ``u``'s remaining path wins. Returns
    ``(agent_id, from, to)`` moves, farthest agent first. The route never
    enters ``u``'s cell or a higher-priority agent's private zone, and only agents
    ranked below ``u`` that are still active and have not moved this step are
    shifted. Appends one event to ``state.conflicts``; raises :class:`Blocked` when
    no route exists.
    """
    occ = state.occupancy
    rts = state.runtimes
    rank = state.rank
    my_rank = rank[u.agent_id]
    event = ConflictEvent(state.timestep, u.agent_id, occ.get(target, -1), target)
    state.conflicts.append(event)

    shielded = {u.current}
    for rt in rts:
        if rank[rt.agent_id] < my_rank:
            shielded |= private_zone(rt)

    def pushable(aid):
        return rank[aid] > my_rank and not rts[aid].moved and not state.is_fixed(aid)

    first = occ.get(target)
    if first is None or target in shielded or not pushable(first):
        event.resolved = False
        raise Blocked(target)

    grid = state.grid
    adj = grid.adjacency
    w = grid.width
    t0 = grid.index(target)
    ahead = set(u.path.cells[u.index + 1 :]) if u.path is not None and not u.off_path else set()
    parent = {t0: -1}
    frontier = [t0]
    blank = -1
    while frontier and blank < 0:
        nxt_layer = []
        blanks = []
        for v in frontier:
            for n in adj[v]:
                if n in parent:
                    continue
                c = divmod(n, w)
                if c in shielded:
                    continue
                aid = occ.get(c)
                if aid is not None and not pushable(aid):
                    continue
                parent[n] = v
                if aid is None:
                    blanks.append(n)
                else:
                    nxt_layer.append(n)
        if blanks:
            # equally near blanks: prefer one off u's remaining path
            blank = next((b for b in blanks if divmod(b, w) not in ahead), blanks[0])
        frontier = nxt_layer
    if blank < 0:
        event.resolved = False
        raise Blocked(target)

    route = [blank]
    while parent[route[-1]] != -1:
        route.append(parent[route[-1]])
    route.reverse()  # target ... blank
    cells = [divmod(i, w) for i in route]
    moves = []
    for k in range(len(cells) - 2, -1, -1):
        moves.append((occ[cells[k]], cells[k], cells[k + 1]))
    return moves


def _in_higher_zone(state: ProgressionState, aid: int, cell: Coord) -> bool:
    my_rank = state.rank[aid]
    for rt in state.runtimes:
        if rt.prev == cell and state.rank[rt.agent_id] < my_rank:
            return True
    return False


def _return_step(state: ProgressionState, rt: AgentRuntime) -> Optional[Coord]:
    """First cell of a shortest walk from an off-path agent back onto its own path."""
    grid = state.grid
    adj = grid.adjacency
    w = grid.width
    occ = state.occupancy
    src = grid.index(rt.current)
    parent = {src: -1}
    q = deque((src,))
    while q:
        v = q.popleft()
        for n in adj[v]:
            if n in parent:
                continue
            c = divmod(n, w)
            other = occ.get(c)
            if other is not None and state.is_fixed(other):
                continue
            owner = state.goal_cells.get(c)
            if owner is not None and owner != rt.agent_id:
                continue
            parent[n] = v
            if rt.path_index(c) is not None:
                while parent[n] != src:
                    n = parent[n]
                return divmod(n, w)
            q.append(n)
    return None


def _relocate(state: ProgressionState, rt: AgentRuntime, to: Coord) -> None:
    occ = state.occupancy
    if occ.get(to) is not None:
        raise EngineFault(f"t={state.timestep}: agent {rt.agent_id} moving into occupied {to}")
    if abs(to[0] - rt.current[0]) + abs(to[1] - rt.current[1]) != 1:
        raise EngineFault(f"t={state.timestep}: agent {rt.agent_id} jumping {rt.current}->{to}")
    del occ[rt.current]
    occ[to] = rt.agent_id
    rt.current = to
    rt.moved = True


def _mark_solved(state: ProgressionState, rt: AgentRuntime) -> None:
    rt.solved = True
    rt.arrival = state.timestep + 1
    state.active.remove(rt.agent_id)
    state.solved.add(rt.agent_id)


def _land(state: ProgressionState, rt: AgentRuntime) -> None:
    # path bookkeeping after any move that did not simply advance along the path
    j = rt.path_index(rt.current)
    if j is None:
        rt.off_path = True
        return
    rt.off_path = False
    rt.index = j
    rt.visited_this_step.add(j)
    if j == rt.path.length:
        _mark_solved(state, rt)


def progression_step(state: ProgressionState) -> list[tuple[int, Coord, Coord]]:
    """Advance every active agent by at most one cell; returns the executed moves."""
    executed: list[tuple[int, Coord, Coord]] = []
    for rt in state.runtimes:
        rt.moved = False
        rt.prev = None
        rt.visited_this_step = set() if rt.off_path or rt.path is None else {rt.index}

    for aid in list(state.active):
        rt = state.runtimes[aid]
        if rt.solved or rt.moved:
            continue
        if rt.off_path:
            nxt = _return_step(state, rt)
            if nxt is None:
                continue
        else:
            nxt = rt.path.cells[rt.index + 1]
        if _in_higher_zone(state, aid, nxt):
            continue
        holder = state.occupancy.get(nxt)
        if holder is not None:
            if state.rank[holder] < state.rank[aid]:
                continue
            try:
                shifts = bring_blank(state, rt, nxt)
            except Blocked:
                continue
            for other, frm, to in shifts:
                ort = state.runtimes[other]
                _relocate(state, ort, to)
                executed.append((other, frm, to))
                _land(state, ort)
        frm = rt.current
        _relocate(state, rt, nxt)
        executed.append((aid, frm, nxt))
        if rt.off_path:
            _land(state, rt)
        else:
            rt.prev = frm
            rt.index += 1
            rt.visited_this_step.add(rt.index)
            if rt.index == rt.path.length:
                _mark_solved(state, rt)

    state.timestep += 1
    for rt in state.runtimes:
        state.trajectories[rt.agent_id].append(rt.current)
    return executed


@dataclass
class RunResult:
    trajectories: list[list[Coord]]
    statuses: list[str]
    arrivals: list[Optional[int]]
    conflicts: list[ConflictEvent]
    status: str
    timesteps: int

    @property
    def makespan(self) -> int:
        return max((t for t in self.arrivals if t is not None), default=0)


def run(
    instance: Instance,
    plans: Plans,
    step_budget: int,
    check: bool = False,
) -> RunResult:
    """Step until every Slidable agent is solved (``all_solved``) or the budget runs out."""
    if step_budget <= 0:
        raise ValueError("step_budget must be positive")
    state = ProgressionState.initial(instance, plans)
    while state.active and state.timestep < step_budget:
        progression_step(state)
        if check:
            state.check()
    status = "all_solved" if not state.active else "budget_exhausted"
    statuses = []
    for rt in state.runtimes:
        if rt.path is None:
            statuses.append("non_slidable")
        elif rt.solved:
            statuses.append("solved")
        else:
            statuses.append("unsolved")
    return RunResult(
        trajectories=state.trajectories,
        statuses=statuses,
        arrivals=[rt.arrival for rt in state.runtimes],
        conflicts=state.conflicts,
        status=status,
        timesteps=state.timestep,
    )


def default_budget(plans: Plans) -> int:
    longest = max((r.length for r in plans.results if isinstance(r, SlidablePath)), default=1)
    return 10 * max(longest, 1) + 10 * len(plans.results)


def dump_trajectories(result: RunResult) -> str:
    """One line per agent: ``id status r c r c ...`` over timesteps 0..T."""
    lines = []
    for aid, (traj, st) in enumerate(zip(result.trajectories, result.statuses)):
        cells = " ".join(f"{r} {c}" for r, c in traj)
        lines.append(f"{aid} {st} {cells}")
    return "\n".join(lines) + "\n"


def load_trajectories(text: str) -> tuple[list[list[Coord]], list[str]]:
    trajs, statuses = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) < 4 or len(parts) % 2:
            raise ValueError(f"line {lineno}: malformed trajectory record")
        aid, st = int(parts[0]), parts[1]
        if aid != len(trajs):
            raise ValueError(f"line {lineno}: expected agent {len(trajs)}, got {aid}")
        if st not in STATUSES:
            raise ValueError(f"line {lineno}: unknown status {st!r}")
        nums = [int(p) for p in parts[2:]]
        trajs.append(list(zip(nums[0::2], nums[1::2])))
        statuses.append(st)
    return trajs, statuses
