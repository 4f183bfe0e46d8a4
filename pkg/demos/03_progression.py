"""Running agents forward in time.

Agents act in priority order once per timestep. A higher-priority agent that
finds a lower-priority one in its way brings a blank to that cell: the agents
between it and the nearest empty cell all shift one step. Each such event is
logged as a conflict.
"""

from mapp import ProgressionState, plan_all, progression_step, run
from mapp.grid import Agent, Grid, Instance
from mapp.progression import dump_trajectories

grid = Grid.empty(3, 5)
inst = Instance(grid, (Agent(0, (1, 0), (1, 4), 0), Agent(1, (1, 2), (2, 1), 1)))
plans = plan_all(inst)
for r in plans.results:
    print("agent", r.agent_id, "path", r.cells)


def picture(state):
    rows = [["." for _ in range(grid.width)] for _ in range(grid.height)]
    for rt in state.runtimes:
        rows[rt.current[0]][rt.current[1]] = str(rt.agent_id)
    return "\n".join("".join(r) for r in rows)


state = ProgressionState.initial(inst, plans)
print(f"t={state.timestep}\n{picture(state)}")
while state.active:
    moves = progression_step(state)
    print(f"\nt={state.timestep} moves={moves}\n{picture(state)}")
for ev in state.conflicts:
    print("conflict:", ev)

# run() wraps the loop and adds statuses and arrival times.
result = run(inst, plans, step_budget=50)
print(result.status, result.arrivals, "makespan", result.makespan)
print(dump_trajectories(result))
