"""Grids, neighbours and the text formats.

Run with ``python3 demos/01_grids_and_files.py``.
"""

from mapp import Agent, Grid, Instance, load_instance, load_map, neighbors, save_instance, save_map

# A map file has a four-line header followed by one text row per grid row.
# '@' and 'T' are blocked, '.' and 'G' are free.
text = """type octile
height 4
width 6
map
......
.@@.T.
.@....
......
"""
grid = load_map(text)
print(grid)
print("free cells:", len(grid.free_cells()), "of", grid.size)

# Coordinates are (row, col) with row 0 at the top. Neighbours always come back
# in up, down, left, right order, so every search built on them is repeatable.
print("neighbours of (0, 1):", neighbors(grid, (0, 1)))
print("neighbours of (2, 3):", neighbors(grid, (2, 3)))

# Saving writes '@' for every blocked cell, so 'T' comes back as '@'.
print(save_map(grid))

# A scenario lists one agent per line: id, start row/col, goal row/col, priority.
agents = (Agent(0, (0, 0), (3, 5), 0), Agent(1, (3, 0), (0, 5), 1))
inst = Instance(grid, agents)
scen = save_instance(inst, ["two agents crossing the block"])
print(scen)
assert load_instance(scen, grid) == inst

# Instances reject bad input up front, naming the offending agents.
try:
    Instance(grid, (Agent(0, (0, 0), (1, 1), 0),))
except ValueError as exc:
    print("rejected:", exc)
