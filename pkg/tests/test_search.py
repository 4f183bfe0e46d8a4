from collections import deque

import numpy as np
import pytest

from helpers import make_instance, open_rows
from mapp.grid import Agent, Grid, manhattan, neighbors
from mapp.search import (
    NotSlidable,
    OmegaCache,
    SlidablePath,
    find_slidable_path,
    omega_search,
    plan_all,
    priority_order,
)
from mapp.validator import bypass_length, verify_slidable


def bfs_dist(grid, a, b, avoid=frozenset()):
    dist = {a: 0}
    q = deque([a])
    while q:
        c = q.popleft()
        if c == b:
            return dist[c]
        for n in neighbors(grid, c):
            if n not in dist and n not in avoid:
                dist[n] = dist[c] + 1
                q.append(n)
    return None


def simple_paths(grid, a, b, avoid=frozenset()):
    """Every simple path from a to b, by depth-first enumeration."""
    out = []
    stack = [(a, [a])]
    while stack:
        c, path = stack.pop()
        if c == b:
            out.append(path)
            continue
        for n in neighbors(grid, c):
            if n not in path and n not in avoid:
                stack.append((n, path + [n]))
    return out


# -- omega_search ----------------------------------------------------------------

def test_omega_corridor_has_no_bypass():
    assert omega_search(Grid.empty(1, 5), (0, 1), (0, 2), (0, 3)) is None


def test_omega_open_3x3():
    got = omega_search(Grid.empty(3, 3), (0, 0), (0, 1), (0, 2))
    assert got == [(0, 0), (1, 0), (1, 1), (1, 2), (0, 2)]


def test_omega_open_3x3_with_forbidden_centre():
    g = Grid.empty(3, 3)
    got = omega_search(g, (0, 0), (0, 1), (0, 2), {(1, 1)})
    assert got == [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2)]
    # brute force: shortest legal simple path has the same length
    legal = simple_paths(g, (0, 0), (0, 2), {(0, 1), (1, 1)})
    assert min(len(p) for p in legal) == len(got)


@pytest.mark.parametrize(
    "frm,excl,to",
    [((0, 0), (0, 0), (0, 2)), ((0, 0), (0, 2), (0, 2)), ((0, 0), (5, 5), (0, 2))],
)
def test_omega_preconditions(frm, excl, to):
    with pytest.raises(ValueError):
        omega_search(Grid.empty(3, 3), frm, excl, to)


def test_omega_blocked_endpoint():
    g = Grid.from_rows(["..@", "...", "..."])
    with pytest.raises(ValueError):
        omega_search(g, (0, 0), (0, 1), (0, 2))


def test_omega_matches_bfs_on_random_grids():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(40):
        g = Grid(rng.random((7, 7)) < 0.25)
        free = g.free_cells()
        for _ in range(20):
            x = free[rng.integers(len(free))]
            nb = neighbors(g, x)
            if len(nb) < 2:
                continue
            i, j = rng.choice(len(nb), size=2, replace=False)
            forb = {free[k] for k in rng.choice(len(free), size=2)} - {nb[i], nb[j], x}
            got = omega_search(g, nb[i], x, nb[j], forb)
            want = bypass_length(g, nb[i], x, nb[j], forb)
            if want is None:
                assert got is None
            else:
                assert got is not None and len(got) - 1 == want
                assert x not in got and not set(got) & forb
                assert all(manhattan(a, b) == 1 for a, b in zip(got, got[1:]))
            checked += 1
    assert checked > 300


def test_omega_radius_limits_search():
    g = Grid.from_rows(["...", ".@.", "...", "...", "..."])
    # the only bypass around (0,1) goes down to row 2 and back
    assert omega_search(g, (0, 0), (0, 1), (0, 2)) is not None
    assert omega_search(g, (0, 0), (0, 1), (0, 2), radius=1) is None


def test_omega_cache_reuses_and_readmits_own_goal():
    g = Grid.empty(3, 3)
    idx = g.index
    cache = OmegaCache(g, {idx((1, 1))})
    a, x, b = idx((0, 0)), idx((0, 1)), idx((0, 2))
    long_way = cache.get(a, x, b)
    assert len(long_way) == 7
    # an agent whose own goal is (1,1) may use it
    assert len(cache.get(a, x, b, allowed=idx((1, 1)))) == 5
    # a cell the first search never ran into does not trigger another search
    before = cache.searches
    assert len(cache.get(a, x, b, allowed=idx((2, 2)))) == 7
    assert cache.searches == before


# -- find_slidable_path ----------------------------------------------------------

def test_slidable_straight_line():
    res = find_slidable_path(Grid.empty(5, 5), Agent(0, (2, 0), (2, 4), 0), (), ())
    assert isinstance(res, SlidablePath)
    assert res.cells == [(2, c) for c in range(5)]
    assert res.length == 4
    assert sorted(res.omegas) == [1, 2, 3]
    for i, om in res.omegas.items():
        assert om[0] == res.cells[i - 1] and om[-1] == res.cells[i + 1]
        assert res.cells[i] not in om
    assert res.stats.nodes_stored_max >= 5


def test_slidable_corridor_fails_alternative_connectivity():
    res = find_slidable_path(Grid.empty(1, 5), Agent(0, (0, 0), (0, 4), 0), (), ())
    assert isinstance(res, NotSlidable)
    assert res.reason == "alternative_connectivity"


def test_slidable_initial_blank():
    res = find_slidable_path(Grid.empty(5, 5), Agent(0, (0, 0), (4, 4), 0), (), {(0, 1), (1, 0)})
    assert isinstance(res, NotSlidable)
    assert res.reason == "initial_blank"


def test_slidable_disconnected():
    g = Grid.from_rows(["..@..", "..@..", "..@.."])
    res = find_slidable_path(g, Agent(0, (0, 0), (0, 4), 0), (), ())
    assert isinstance(res, NotSlidable) and res.reason == "disconnected"
    assert res.stats.expansions > 0


def test_slidable_avoids_other_goals():
    res = find_slidable_path(Grid.empty(5, 5), Agent(0, (2, 0), (2, 4), 0), {(2, 2)}, ())
    assert isinstance(res, SlidablePath)
    assert (2, 2) not in res.cells
    for om in res.omegas.values():
        assert (2, 2) not in om


def test_slidable_start_equals_goal():
    res = find_slidable_path(Grid.empty(2, 2), Agent(0, (1, 1), (1, 1), 0), (), ())
    assert isinstance(res, SlidablePath) and res.cells == [(1, 1)] and res.omegas == {}


def test_slidable_goal_in_other_goals_rejected():
    with pytest.raises(ValueError):
        find_slidable_path(Grid.empty(3, 3), Agent(0, (0, 0), (2, 2), 0), {(2, 2)}, ())


def test_slidable_deterministic():
    rng = np.random.default_rng(3)
    g = Grid(rng.random((15, 15)) < 0.2)
    free = g.free_cells()
    a = Agent(0, free[0], free[-1], 0)
    r1 = find_slidable_path(g, a, {free[40]}, {free[1]})
    r2 = find_slidable_path(g, a, {free[40]}, {free[1]})
    assert r1 == r2


def _bypass_ok(grid, cells):
    return all(
        bypass_length(grid, cells[i - 1], cells[i], cells[i + 1], set()) is not None
        for i in range(1, len(cells) - 1)
    )


def _plain_astar(grid, s, g):
    # reference A* with the same tie-breaking, no Slidable constraints
    import heapq

    best = {s: 0}
    parent = {s: None}
    heap = [(manhattan(s, g), 0, s)]
    closed = set()
    while heap:
        _, negg, c = heapq.heappop(heap)
        if c in closed:
            continue
        closed.add(c)
        if c == g:
            path = [c]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for n in neighbors(grid, c):
            ng = -negg + 1
            if n not in closed and ng < best.get(n, 1 << 30):
                best[n] = ng
                parent[n] = c
                heapq.heappush(heap, (ng + manhattan(n, g), -ng, n))
    return None


@pytest.mark.parametrize("seed", range(100))
def test_slidable_matches_plain_astar(seed):
    rng = np.random.default_rng(seed)
    g = Grid(rng.random((7, 7)) < 0.2)
    free = g.free_cells()
    i, j = rng.choice(len(free), size=2, replace=False)
    s, t = free[i], free[j]
    plain = _plain_astar(g, s, t)
    res = find_slidable_path(g, Agent(0, s, t, 0), (), ())
    if plain is None:
        assert isinstance(res, NotSlidable) and res.reason == "disconnected"
        return
    if isinstance(res, SlidablePath):
        assert res.length >= len(plain) - 1 >= manhattan(s, t)
    if _bypass_ok(g, plain):
        assert isinstance(res, SlidablePath)
        assert res.length == len(plain) - 1


# -- plan_all --------------------------------------------------------------------

def test_plan_all_crossing_pair():
    inst = make_instance(open_rows(5, 5), [((2, 0), (2, 4)), ((0, 2), (4, 2))])
    plans = plan_all(inst)
    assert plans.slidable_ids == [0, 1]
    assert all(r.passed for r in verify_slidable(inst, plans))


GOAL_CHOKE = ["...@...", ".......", "...@..."]


def test_plan_all_goal_isolation():
    inst = make_instance(GOAL_CHOKE, [((1, 0), (1, 6)), ((1, 4), (1, 3))])
    # every route for agent 0 crosses agent 1's goal
    routes = simple_paths(inst.grid, (1, 0), (1, 6))
    assert routes and all((1, 3) in p for p in routes)
    plans = plan_all(inst)
    assert isinstance(plans.results[0], NotSlidable)
    assert plans.results[0].reason == "goal_isolation"
    assert isinstance(plans.results[1], SlidablePath)


def test_plan_all_corridor_maze_is_total():
    rows = [
        ".......",
        "@@@@@@.",
        ".......",
        ".@@@@@@",
        ".......",
    ]
    inst = make_instance(rows, [((0, 0), (2, 3)), ((4, 6), (2, 1)), ((4, 0), (0, 4))])
    plans = plan_all(inst)
    assert len(plans.results) == 3
    assert plans.slidable_ids == []
    assert {r.reason for r in plans.results} <= {"alternative_connectivity", "goal_isolation", "initial_blank"}


def test_plan_all_stuck_start_is_avoided():
    # agent 1 can never reach its goal below the wall, so it sits on (1,2) forever
    rows = open_rows(3, 5) + ["@@@@@", "....."]
    inst = make_instance(rows, [((1, 0), (1, 4)), ((1, 2), (4, 0))])
    plans = plan_all(inst)
    assert plans.results[1].reason == "disconnected"
    assert plans.rounds == 2
    path = plans.results[0]
    assert path.length == 6 and (1, 2) not in path.cells
    assert all((1, 2) not in om for om in path.omegas.values())
    naive = plan_all(inst, avoid_stuck_starts=False)
    assert naive.results[0].cells == [(1, c) for c in range(5)]


def test_plan_all_priority_orders():
    inst = make_instance(open_rows(6, 6), [((0, 0), (5, 5)), ((5, 0), (0, 3)), ((3, 0), (3, 2))], [2, 0, 1])
    plans = plan_all(inst)
    assert plans.order == [1, 2, 0]
    assert priority_order(inst, plans.results, "id") == [0, 1, 2]
    assert priority_order(inst, plans.results, "longest")[0] == 0
    assert priority_order(inst, plans.results, "shortest")[0] == 2
    with pytest.raises(ValueError):
        priority_order(inst, plans.results, "random")


def test_plan_all_stats_are_max_over_agents():
    inst = make_instance(open_rows(6, 6), [((0, 0), (5, 5)), ((5, 0), (0, 5))])
    plans = plan_all(inst)
    assert plans.stats.nodes_stored_max == max(r.stats.nodes_stored_max for r in plans.results)
    assert plans.stats.expansions == sum(r.stats.expansions for r in plans.results)
