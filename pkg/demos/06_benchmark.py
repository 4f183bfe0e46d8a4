"""A small two-type batch, summarised as a per-type results table.

The full-size version of this comparison (100 instances per type) takes a couple
of minutes; this one uses 10 per type.
"""

import tempfile
from pathlib import Path

from mapp import run_batch

config = {
    "options": {"priority_order": "priority"},
    "generate": [
        {"count": 10, "seed_start": 0, "width": 101, "height": 101, "agent_count": 20, "instance_type": "type1"},
        {"count": 10, "seed_start": 0, "width": 101, "height": 101, "agent_count": 20,
         "instance_type": "type2", "zone_size": 16},
    ],
}

out = Path(tempfile.mkdtemp(prefix="mapp-bench-"))
report = run_batch(config, out)
print(report.table())
for kind in ("type1", "type2"):
    ms = report.by_type(kind)
    share = sum(m.conflict_agents / m.agents for m in ms) / len(ms)
    print(f"{kind}: {100 * share:.0f}% of agents blocked at least once")
print("rows written to", out / "report.csv")
