"""Slidable paths and their alternative paths.

A path is Slidable when every interior cell can be bypassed, the first step is not
another agent's start, and neither the path nor any bypass touches another agent's
goal. This demo shows each failure mode on a small map.
"""

from mapp import Agent, Grid, find_slidable_path, omega_search, plan_all
from mapp.grid import Instance


def show(grid, cells, mark="*"):
    rows = [["@" if b else "." for b in row] for row in grid.blocked.tolist()]
    for r, c in cells:
        rows[r][c] = mark
    print("\n".join("".join(r) for r in rows))


grid = Grid.empty(5, 7)
res = find_slidable_path(grid, Agent(0, (2, 0), (2, 6), 0), other_goals={(2, 3)}, other_starts=())
print("path around a goal at (2,3):", res.cells)
show(grid, res.cells)
print("bypass for interior cell 2:", res.omegas[2])
print("search stats:", res.stats)

# The bypass search on its own: shortest detour that skips one cell.
print(omega_search(Grid.empty(3, 3), (0, 0), (0, 1), (0, 2)))
print(omega_search(Grid.empty(3, 3), (0, 0), (0, 1), (0, 2), forbidden={(1, 1)}))

# A width-1 corridor offers no bypass at all.
corridor = Grid.empty(1, 6)
print(find_slidable_path(corridor, Agent(0, (0, 0), (0, 5), 0), (), ()))

# Both first steps are occupied by other agents at time 0.
print(find_slidable_path(Grid.empty(5, 5), Agent(0, (0, 0), (4, 4), 0), (), {(0, 1), (1, 0)}))

# plan_all runs one search per agent. An agent that cannot move keeps its start
# cell for the whole run, so the others are re-planned around it.
rows = ["...@...", ".......", "...@..."]
inst = Instance(Grid.from_rows(rows), (Agent(0, (1, 0), (1, 6), 0), Agent(1, (1, 4), (1, 3), 1)))
plans = plan_all(inst)
for r in plans.results:
    print(r.agent_id, type(r).__name__, getattr(r, "reason", getattr(r, "cells", None)))
