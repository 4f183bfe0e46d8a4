"""Single-agent Slidable path search.

A* over grid cells with three extra admission rules on successors:

* the first step away from the start must not land on another agent's start
  (those cells are occupied at time 0);
* no generated cell may be another agent's goal;
* a successor ``n`` of ``x'`` (whose parent is ``x``) is generated only if an
  alternative path from ``x`` to ``n`` avoiding ``x'`` exists.

The alternative paths (omegas) are found by breadth-first search and kept on the
resulting :class:`SlidablePath`.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .grid import Agent, Coord, Grid, Instance, manhattan

__all__ = [
    "SearchStats",
    "SlidablePath",
    "NotSlidable",
    "Plans",
    "OmegaCache",
    "omega_search",
    "find_slidable_path",
    "plan_all",
    "PRIORITY_ORDERS",
    "priority_order",
    "manhattan",
]

REASONS = ("initial_blank", "goal_isolation", "alternative_connectivity", "disconnected")

# forward BFS size before the reverse exhaustion probe starts
_PROBE_AFTER = 48


@dataclass
class SearchStats:
    nodes_stored_max: int = 0
    expansions: int = 0


@dataclass
class SlidablePath:
    agent_id: int
    cells: list[Coord]
    omegas: dict[int, list[Coord]]
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def length(self) -> int:
        """Number of moves, ``k``."""
        return len(self.cells) - 1

    @property
    def start(self) -> Coord:
        return self.cells[0]

    @property
    def goal(self) -> Coord:
        return self.cells[-1]


@dataclass
class NotSlidable:
    agent_id: int
    reason: str
    stats: SearchStats = field(default_factory=SearchStats)

    def __post_init__(self):
        if self.reason not in REASONS:
            raise ValueError(f"unknown reason {self.reason!r}")


def _bypass(adj, src, excluded, dst, forbidden, allowed=-1, center=None, radius=None, width=0):
    """BFS from ``src`` to ``dst`` avoiding ``excluded`` and ``forbidden`` (except ``allowed``).

    Returns ``(path or None, touched)`` where ``touched`` is the set of forbidden cells
    the search ran into. Once the forward search grows past a small size a reverse
    BFS from ``dst`` runs in lockstep purely to detect an exhausted component early;
    the forward tree alone decides the returned path.
    """
    touched = set()
    if src == dst:
        return [src], touched

    def ok(n):
        if n == excluded:
            return False
        if n in forbidden and n != allowed:
            touched.add(n)
            return False
        if radius is not None:
            r, c = divmod(n, width)
            if abs(r - center[0]) + abs(c - center[1]) > radius:
                return False
        return True

    parent = {src: -1}
    q = deque((src,))
    rev_seen = None
    rq = None
    while q:
        v = q.popleft()
        for n in adj[v]:
            if n in parent or not ok(n):
                continue
            parent[n] = v
            if n == dst:
                path = [n]
                while v != -1:
                    path.append(v)
                    v = parent[v]
                path.reverse()
                return path, touched
            q.append(n)
        if rq is None:
            if len(parent) > _PROBE_AFTER:
                rev_seen = {dst}
                rq = deque((dst,))
        elif rq:
            w = rq.popleft()
            for n in adj[w]:
                if n not in rev_seen and ok(n):
                    rev_seen.add(n)
                    rq.append(n)
            if not rq:
                if src not in rev_seen:
                    return None, touched
                rq = deque()  # component confirmed; stop probing
                rev_seen = ()
    return None, touched


class OmegaCache:
    """Memoised alternative-path queries on one grid.

    Results are computed against ``base_forbidden``. A query may re-admit one cell
    (an agent's own goal); a cached answer is reused when the original search never
    ran into that cell, since it would then have behaved identically.
    """

    def __init__(self, grid: Grid, base_forbidden: Iterable[int] = (), radius: Optional[int] = None):
        self.grid = grid
        self.adj = grid.adjacency
        self.forbidden = frozenset(base_forbidden)
        self.radius = radius
        self._shared: dict[tuple[int, int, int], tuple] = {}
        self._own: dict[tuple[int, int, int, int], Optional[list[int]]] = {}
        self.queries = 0
        self.searches = 0

    def _run(self, a, x, b, allowed):
        self.searches += 1
        center = divmod(x, self.grid.width) if self.radius is not None else None
        return _bypass(self.adj, a, x, b, self.forbidden, allowed, center, self.radius, self.grid.width)

    def get(self, a: int, x: int, b: int, allowed: int = -1) -> Optional[list[int]]:
        self.queries += 1
        key = (a, x, b)
        hit = self._shared.get(key)
        if hit is None:
            hit = self._run(a, x, b, -1)
            self._shared[key] = hit
        path, touched = hit
        if allowed < 0 or allowed not in touched:
            return path
        okey = (a, x, b, allowed)
        if okey not in self._own:
            self._own[okey] = self._run(a, x, b, allowed)[0]
        return self._own[okey]


def omega_search(
    grid: Grid,
    frm: Coord,
    excluded: Coord,
    to: Coord,
    forbidden: Iterable[Coord] = (),
    radius: Optional[int] = None,
) -> Optional[list[Coord]]:
    """Shortest path ``frm`` -> ``to`` that avoids ``excluded`` and every ``forbidden`` cell.

    ``None`` when no such path exists. ``radius`` optionally confines the search to
    cells within that Manhattan distance of ``excluded``.
    """
    for c, name in ((frm, "from"), (to, "to")):
        if not grid.is_free(c):
            raise ValueError(f"{name} cell {c} is blocked or out of bounds")
    if not grid.in_bounds(excluded):
        raise ValueError(f"excluded cell {excluded} is out of bounds")
    if excluded == frm or excluded == to:
        raise ValueError("excluded cell must differ from both endpoints")
    forb = {grid.index(c) for c in forbidden if grid.in_bounds(c)}
    center = excluded if radius is not None else None
    path, _ = _bypass(
        grid.adjacency, grid.index(frm), grid.index(excluded), grid.index(to), forb, -1, center, radius, grid.width
    )
    return None if path is None else [grid.coord(i) for i in path]


def _reachable(adj, s, g, blocked, first_blocked=frozenset()) -> bool:
    if s == g:
        return True
    seen = {s}
    q = deque((s,))
    while q:
        v = q.popleft()
        for n in adj[v]:
            if n in seen or n in blocked or (v == s and n in first_blocked):
                continue
            if n == g:
                return True
            seen.add(n)
            q.append(n)
    return False


def _classify(adj, s, g, forbidden, starts) -> str:
    if not _reachable(adj, s, g, ()):
        return "disconnected"
    if s in forbidden or not _reachable(adj, s, g, forbidden):
        return "goal_isolation"
    if not _reachable(adj, s, g, forbidden, starts):
        return "initial_blank"
    return "alternative_connectivity"


def _astar(grid: Grid, aid: int, s: int, g: int, forbidden, starts, omegas: OmegaCache, allowed: int):
    adj = grid.adjacency
    w = grid.width
    gr, gc = divmod(g, w)
    stats = SearchStats()

    def h(i):
        r, c = divmod(i, w)
        return abs(r - gr) + abs(c - gc)

    if s in forbidden:
        return None, stats
    gscore = {s: 0}
    parent = {s: -1}
    closed = set()
    open_cells = {s}
    heap = [(h(s), 0, s)]
    stats.nodes_stored_max = 1
    while heap:
        f, neg_g, v = heapq.heappop(heap)
        if v in closed or -neg_g != gscore[v]:
            continue
        open_cells.discard(v)
        closed.add(v)
        stats.expansions += 1
        if v == g:
            path = [v]
            while parent[v] != -1:
                v = parent[v]
                path.append(v)
            path.reverse()
            return path, stats
        gv = -neg_g
        pv = parent[v]
        for n in adj[v]:
            if n in closed or n in forbidden:
                continue
            if pv == -1:
                if n in starts:
                    continue
            elif n == pv or omegas.get(pv, v, n, allowed) is None:
                continue
            ng = gv + 1
            old = gscore.get(n)
            if old is not None and old <= ng:
                continue
            gscore[n] = ng
            parent[n] = v
            open_cells.add(n)
            heapq.heappush(heap, (ng + h(n), -ng, n))
        stored = len(open_cells) + len(closed)
        if stored > stats.nodes_stored_max:
            stats.nodes_stored_max = stored
    return None, stats


def find_slidable_path(
    grid: Grid,
    agent: Agent,
    other_goals: Iterable[Coord],
    other_starts: Iterable[Coord],
    omega_radius: Optional[int] = None,
    cache: Optional[OmegaCache] = None,
) -> SlidablePath | NotSlidable:
    """Search a Slidable path for ``agent``.

    ``cache`` may be shared between agents of one instance; its base forbidden set
    must equal ``other_goals`` plus (at most) the agent's own goal.
    """
    if not grid.is_free(agent.start) or not grid.is_free(agent.goal):
        raise ValueError(f"agent {agent.id}: start and goal must be traversable")
    forbidden = {grid.index(c) for c in other_goals}
    s, g = grid.index(agent.start), grid.index(agent.goal)
    if g in forbidden:
        raise ValueError(f"agent {agent.id}: goal {agent.goal} is listed among other goals")
    starts = {grid.index(c) for c in other_starts} - {s}
    if cache is None:
        cache = OmegaCache(grid, forbidden, omega_radius)
    elif not forbidden <= cache.forbidden or cache.forbidden - forbidden - {g}:
        raise ValueError("omega cache forbids a different cell set")
    allowed = g if g in cache.forbidden else -1

    path, stats = _astar(grid, agent.id, s, g, forbidden, starts, cache, allowed)
    if path is None:
        return NotSlidable(agent.id, _classify(grid.adjacency, s, g, forbidden, starts), stats)
    omegas = {}
    for i in range(1, len(path) - 1):
        om = cache.get(path[i - 1], path[i], path[i + 1], allowed)
        omegas[i] = [grid.coord(j) for j in om]
    return SlidablePath(agent.id, [grid.coord(j) for j in path], omegas, stats)


PRIORITY_ORDERS = ("priority", "id", "longest", "shortest")


@dataclass
class Plans:
    """Per-agent planning results indexed by agent id, plus run ordering."""

    results: list[SlidablePath | NotSlidable]
    order: list[int]
    stats: SearchStats
    rounds: int = 1

    @property
    def slidable_ids(self) -> list[int]:
        return [r.agent_id for r in self.results if isinstance(r, SlidablePath)]

    def is_slidable(self, aid: int) -> bool:
        return isinstance(self.results[aid], SlidablePath)


def priority_order(instance: Instance, results, how: str = "priority") -> list[int]:
    """Agent ids from highest to lowest priority.

    ``priority`` uses the instance's declared priorities, ``id`` ascending ids;
    ``longest``/``shortest`` sort Slidable agents by path length (declared priority
    breaks ties) and put non-Slidable agents last.
    """
    agents = instance.agents
    if how == "priority":
        return sorted(range(len(agents)), key=lambda i: agents[i].priority)
    if how == "id":
        return list(range(len(agents)))
    if how in ("longest", "shortest"):
        sign = -1 if how == "longest" else 1

        def key(i):
            r = results[i]
            if isinstance(r, SlidablePath):
                return (0, sign * r.length, agents[i].priority)
            return (1, 0, agents[i].priority)

        return sorted(range(len(agents)), key=key)
    raise ValueError(f"unknown priority order {how!r}; expected one of {PRIORITY_ORDERS}")


def plan_all(
    instance: Instance,
    omega_radius: Optional[int] = None,
    order: str = "priority",
    avoid_stuck_starts: bool = True,
) -> Plans:
    """Find a Slidable path (or the reason there is none) for every agent.

    Agents without a Slidable path never leave their start. With
    ``avoid_stuck_starts`` those start cells are then treated like goals (forbidden
    to every other path and alternative path) and the remaining agents are
    re-planned until no new failures appear.
    """
    grid = instance.grid
    agents = instance.agents
    goal_idx = [grid.index(a.goal) for a in agents]
    start_cells = [a.start for a in agents]
    stuck: set[int] = set()
    results: list = [None] * len(agents)
    rounds = 0
    while True:
        rounds += 1
        extra = {grid.index(agents[i].start) for i in stuck}
        cache = OmegaCache(grid, set(goal_idx) | extra, omega_radius)
        for a in sorted(agents, key=lambda a: a.priority):
            if a.id in stuck and results[a.id] is not None:
                continue
            if goal_idx[a.id] in extra:
                # another agent never leaves this goal
                results[a.id] = NotSlidable(a.id, "goal_isolation")
                continue
            other_goals = [grid.coord(i) for i in goal_idx if i != goal_idx[a.id]]
            other_goals += [grid.coord(i) for i in extra]
            other_starts = start_cells[: a.id] + start_cells[a.id + 1 :]
            res = find_slidable_path(grid, a, other_goals, other_starts, omega_radius, cache)
            results[a.id] = res
        new_stuck = {r.agent_id for r in results if isinstance(r, NotSlidable)}
        if not avoid_stuck_starts or new_stuck <= stuck:
            break
        stuck |= new_stuck
    stats = SearchStats(
        max((r.stats.nodes_stored_max for r in results), default=0),
        sum(r.stats.expansions for r in results),
    )
    return Plans(results, priority_order(instance, results, order), stats, rounds)
