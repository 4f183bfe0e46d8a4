"""Cooperative path finding with MAPP on 4-connected grids."""

from .bench import BatchReport, RunMetrics, RunOptions, run_batch, run_instance
from .grid import (
    Agent,
    Coord,
    Grid,
    Instance,
    InstanceError,
    MapParseError,
    load_instance,
    load_map,
    manhattan,
    neighbors,
    save_instance,
    save_map,
)
from .progression import (
    AgentRuntime,
    Blocked,
    ConflictEvent,
    ProgressionState,
    RunResult,
    bring_blank,
    private_zone,
    progression_step,
    run,
)
from .scenario import GenConfig, GenerationError, gen_instance, gen_urban_map, generate
from .search import NotSlidable, Plans, SearchStats, SlidablePath, find_slidable_path, omega_search, plan_all
from .validator import Violation, joint_oracle, validate, verify_slidable

__version__ = "0.1.0"
