"""Checking solutions without trusting the planner.

``validate`` reads trajectories only. ``verify_slidable`` re-derives every bypass
with its own search. ``joint_oracle`` solves tiny instances exactly, which gives a
lower bound on makespan to compare against.
"""

from mapp import joint_oracle, plan_all, run, validate, verify_slidable
from mapp.grid import Agent, Grid, Instance
from mapp.validator import format_report

inst = Instance(Grid.empty(4, 4), (Agent(0, (0, 0), (3, 3), 0), Agent(1, (3, 0), (0, 3), 1)))
plans = plan_all(inst)
for rep in verify_slidable(inst, plans):
    print(rep)

res = run(inst, plans, 40)
print("violations:", validate(inst, res.trajectories, res.statuses))

orc = joint_oracle(inst)
print(f"planner makespan {res.makespan}, optimum {orc.makespan} ({orc.states} joint states explored)")

# Two agents swapping ends of a 1x3 corridor cannot be solved at all.
swap = Instance(Grid.empty(1, 3), (Agent(0, (0, 0), (0, 2), 0), Agent(1, (0, 2), (0, 0), 1)))
print("corridor exchange:", joint_oracle(swap).status)

# Broken trajectories produce one report line per problem.
bad = [[(0, 0), (0, 1), (1, 1)], [(3, 0), (2, 0), (1, 1)]]
print(format_report(validate(inst, bad)))
