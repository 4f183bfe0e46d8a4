"""Synthetic urban maps and border-to-border instances.

Maps are built from axis-aligned rectangular buildings separated by streets at
least ``min_gap`` cells wide, with a free ring road ``border_margin`` cells wide
along the map edge. Instances follow two layouts:

``type1``
    starts sampled from a thin band on the left border, goals from the right one.
``type2``
    starts confined to a ``zone_size`` square flush to the left border, goals to an
    equal square flush to the right border, both vertically centred.

With ``spread`` set, no two starts (and no two goals) are sampled on cardinally
adjacent cells. All randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence([seed, stream])``, stream 0 for maps and 1 for instances.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .grid import Agent, Grid, Instance

INSTANCE_TYPES = ("type1", "type2")


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    width: int = 101
    height: int = 101
    block_density_range: tuple[float, float] = (0.20, 0.25)
    agent_count: int = 20
    zone_size: int = 10
    seed: int = 0
    instance_type: str = "type1"
    band: int = 3
    building_side_range: tuple[float, float] = (0.02, 0.08)
    min_gap: int = 2
    border_margin: int = 3
    spread: bool = True
    min_component: float = 0.95
    max_retries: int = 20

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")
        lo, hi = self.block_density_range
        if not (0 < lo <= hi < 1):
            raise ValueError(f"density range must lie inside (0, 1), got {self.block_density_range}")
        if self.agent_count < 1:
            raise ValueError("agent_count must be positive")
        if self.zone_size < 1 or self.zone_size > min(self.width, self.height) / 2:
            raise ValueError("zone_size must be in [1, min(width, height) / 2]")
        if self.instance_type not in INSTANCE_TYPES:
            raise ValueError(f"instance_type must be one of {INSTANCE_TYPES}")
        if self.band < 1 or 2 * self.band > self.width:
            raise ValueError("band must be in [1, width / 2]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def comment_lines(self) -> list[str]:
        d = asdict(self)
        return ["generated by mapp.scenario"] + [f"{k} = {v}" for k, v in d.items()]


def rng_for(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def components(grid: Grid) -> tuple[np.ndarray, int]:
    """4-connected component labels of the free cells (0 = blocked) and the largest label."""
    labels, n = ndimage.label(~grid.blocked)
    if n == 0:
        return labels, 0
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    return labels, int(sizes.argmax())


def largest_component_fraction(grid: Grid) -> float:
    labels, big = components(grid)
    free = int((~grid.blocked).sum())
    if free == 0:
        return 0.0
    return float((labels == big).sum()) / free


def _snap(lo: int, hi: int, size: int, gap: int) -> tuple[int, int]:
    # no street narrower than the gap between a building and the border
    if 0 < lo < gap:
        lo = 0
    if 0 < size - hi < gap:
        hi = size
    return lo, hi


def _try_map(cfg: GenConfig, rng: np.random.Generator) -> np.ndarray | None:
    h, w = cfg.height, cfg.width
    total = h * w
    lo_d, hi_d = cfg.block_density_range
    target = int(np.ceil(rng.uniform(lo_d, hi_d) * total))
    cap = int(np.floor(hi_d * total))
    side = min(h, w)
    smin = max(2, int(round(cfg.building_side_range[0] * side)))
    smax = max(smin, int(round(cfg.building_side_range[1] * side)))
    gap = cfg.min_gap

    blocked = np.zeros((h, w), dtype=bool)
    reserved = np.zeros((h, w), dtype=bool)
    count = 0
    misses = 0
    max_misses = 2000
    while count < target and misses < max_misses:
        bh, bw = (int(v) for v in rng.integers(smin, smax + 1, size=2))
        if bh > h or bw > w:
            misses += 1
            continue
        r0 = int(rng.integers(0, h - bh + 1))
        c0 = int(rng.integers(0, w - bw + 1))
        r0, r1 = _snap(r0, r0 + bh, h, gap)
        c0, c1 = _snap(c0, c0 + bw, w, gap)
        m = cfg.border_margin
        if m and (r0 < m or c0 < m or r1 > h - m or c1 > w - m):
            misses += 1
            continue
        area = (r1 - r0) * (c1 - c0)
        if count + area > cap or reserved[r0:r1, c0:c1].any():
            misses += 1
            continue
        blocked[r0:r1, c0:c1] = True
        if gap < 2:
            g = Grid(blocked)
            if largest_component_fraction(g) < cfg.min_component:
                blocked[r0:r1, c0:c1] = False
                misses += 1
                continue
        reserved[max(0, r0 - gap) : r1 + gap, max(0, c0 - gap) : c1 + gap] = True
        count += area
        misses = 0
    if count < int(np.ceil(lo_d * total)):
        return None
    return blocked


def gen_urban_map(cfg: GenConfig) -> Grid:
    """Place rectangular buildings until the blocked fraction is inside the configured range."""
    rng = rng_for(cfg.seed, 0)
    for _ in range(cfg.max_retries):
        blocked = _try_map(cfg, rng)
        if blocked is None:
            continue
        grid = Grid(blocked)
        if largest_component_fraction(grid) >= cfg.min_component:
            return grid
    raise GenerationError(
        f"could not reach density {cfg.block_density_range} on a {cfg.height}x{cfg.width} map "
        f"with connected streets after {cfg.max_retries} attempts"
    )


def _pick(rng, cells: np.ndarray, n: int, what: str, spread: bool) -> list[tuple[int, int]]:
    if len(cells) < n:
        raise GenerationError(f"not enough {what} cells: need {n}, have {len(cells)} (short by {n - len(cells)})")
    if not spread:
        idx = rng.choice(len(cells), size=n, replace=False)
        return [(int(cells[i][0]), int(cells[i][1])) for i in idx]
    taken: set[tuple[int, int]] = set()
    out = []
    for i in rng.permutation(len(cells)):
        r, c = int(cells[i][0]), int(cells[i][1])
        if {(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)} & taken:
            continue
        taken.add((r, c))
        out.append((r, c))
        if len(out) == n:
            return out
    raise GenerationError(
        f"not enough pairwise non-adjacent {what} cells: need {n}, found {len(out)} (short by {n - len(out)})"
    )


def gen_instance(grid: Grid, cfg: GenConfig) -> Instance:
    """Sample distinct starts and goals on opposite borders inside the main component."""
    rng = rng_for(cfg.seed, 1)
    labels, big = components(grid)
    main = labels == big
    h, w = grid.height, grid.width
    start_mask = np.zeros_like(main)
    goal_mask = np.zeros_like(main)
    if cfg.instance_type == "type1":
        start_mask[:, : cfg.band] = True
        goal_mask[:, w - cfg.band :] = True
    else:
        z = cfg.zone_size
        r0 = (h - z) // 2
        start_mask[r0 : r0 + z, :z] = True
        goal_mask[r0 : r0 + z, w - z :] = True
    starts = _pick(rng, np.argwhere(start_mask & main), cfg.agent_count, "start", cfg.spread)
    goals = _pick(rng, np.argwhere(goal_mask & main), cfg.agent_count, "goal", cfg.spread)
    agents = tuple(Agent(i, s, g, i) for i, (s, g) in enumerate(zip(starts, goals)))
    return Instance(grid, agents)


def generate(cfg: GenConfig) -> Instance:
    return gen_instance(gen_urban_map(cfg), cfg)
