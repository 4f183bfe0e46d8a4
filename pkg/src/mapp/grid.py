"""Grid, agent and instance types plus map/scenario text I/O.

Coordinates are ``(row, col)`` tuples with row 0 at the top. Internally the
planners work on flat cell indices ``row * width + col`` for speed; :class:`Grid`
converts between the two and caches adjacency lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Coord = tuple[int, int]

# up, down, left, right
DIRECTIONS: tuple[Coord, ...] = ((-1, 0), (1, 0), (0, -1), (0, 1))

BLOCKED_CHARS = frozenset("@T")
FREE_CHARS = frozenset(".G")


class MapParseError(ValueError):
    """Raised for malformed map or scenario text. Carries 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class InstanceError(ValueError):
    """Raised when agents violate instance invariants. ``agent_ids`` lists offenders."""

    def __init__(self, message: str, agent_ids: Iterable[int] = ()):
        self.agent_ids = sorted(set(agent_ids))
        if self.agent_ids:
            message = f"{message} (agents {', '.join(map(str, self.agent_ids))})"
        super().__init__(message)


class Grid:
    """Immutable 4-connected occupancy grid."""

    __slots__ = ("height", "width", "blocked", "_free", "_adj")

    def __init__(self, blocked):
        arr = np.array(blocked, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"grid must be a non-empty 2-D table, got shape {arr.shape}")
        arr.flags.writeable = False
        self.height, self.width = (int(s) for s in arr.shape)
        self.blocked = arr
        self._free: list[bool] = (~arr).ravel().tolist()
        self._adj: list[list[int]] | None = None

    @classmethod
    def empty(cls, height: int, width: int) -> Grid:
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> Grid:
        """Build from map-style character rows (``'.'``/``'G'`` free, ``'@'``/``'T'`` blocked)."""
        return cls([[ch in BLOCKED_CHARS for ch in row] for row in rows])

    def __setattr__(self, name, value):
        if hasattr(self, "_adj") and name != "_adj":
            raise AttributeError("Grid is immutable")
        object.__setattr__(self, name, value)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.blocked.shape == other.blocked.shape and bool(
            np.array_equal(self.blocked, other.blocked)
        )

    def __hash__(self):
        return hash((self.height, self.width, self.blocked.tobytes()))

    def __repr__(self):
        return f"Grid(height={self.height}, width={self.width}, blocked={int(self.blocked.sum())})"

    @property
    def size(self) -> int:
        return self.height * self.width

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c[0] < self.height and 0 <= c[1] < self.width

    def is_free(self, c: Coord) -> bool:
        return self.in_bounds(c) and self._free[c[0] * self.width + c[1]]

    def index(self, c: Coord) -> int:
        return c[0] * self.width + c[1]

    def coord(self, i: int) -> Coord:
        return divmod(i, self.width)

    @property
    def free_flat(self) -> list[bool]:
        return self._free

    @property
    def adjacency(self) -> list[list[int]]:
        """Flat-index adjacency lists in (up, down, left, right) order; blocked cells get ``[]``."""
        if self._adj is None:
            h, w, free = self.height, self.width, self._free
            adj: list[list[int]] = []
            for i in range(h * w):
                if not free[i]:
                    adj.append([])
                    continue
                r, c = divmod(i, w)
                nb = []
                if r > 0 and free[i - w]:
                    nb.append(i - w)
                if r < h - 1 and free[i + w]:
                    nb.append(i + w)
                if c > 0 and free[i - 1]:
                    nb.append(i - 1)
                if c < w - 1 and free[i + 1]:
                    nb.append(i + 1)
                adj.append(nb)
            object.__setattr__(self, "_adj", adj)
        return self._adj

    def free_cells(self) -> list[Coord]:
        return [tuple(map(int, rc)) for rc in np.argwhere(~self.blocked)]


def neighbors(grid: Grid, c: Coord) -> list[Coord]:
    """Traversable cardinal neighbours of ``c`` in up, down, left, right order."""
    if not grid.in_bounds(c):
        raise ValueError(f"cell {c} is outside the {grid.height}x{grid.width} grid")
    if not grid.is_free(c):
        raise ValueError(f"cell {c} is blocked")
    return [grid.coord(j) for j in grid.adjacency[grid.index(c)]]


def manhattan(a: Coord, b: Coord) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


@dataclass(frozen=True)
class Agent:
    id: int
    start: Coord
    goal: Coord
    priority: int


@dataclass(frozen=True)
class Instance:
    grid: Grid
    agents: tuple[Agent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        check_agents(self.grid, self.agents)

    def __len__(self):
        return len(self.agents)

    @property
    def starts(self) -> list[Coord]:
        return [a.start for a in self.agents]

    @property
    def goals(self) -> list[Coord]:
        return [a.goal for a in self.agents]


def check_agents(grid: Grid, agents: Sequence[Agent]) -> None:
    """Raise :class:`InstanceError` if ``agents`` break the instance invariants."""
    bad_ids = [a.id for i, a in enumerate(agents) if a.id != i]
    if bad_ids:
        raise InstanceError("agent ids must be 0..n-1 in list order", bad_ids)
    if sorted(a.priority for a in agents) != list(range(len(agents))):
        raise InstanceError("agent priorities must be a permutation of 0..n-1")
    bad = [a.id for a in agents if not grid.is_free(a.start)]
    if bad:
        raise InstanceError("start cell blocked or out of bounds", bad)
    bad = [a.id for a in agents if not grid.is_free(a.goal)]
    if bad:
        raise InstanceError("goal cell blocked or out of bounds", bad)
    for attr in ("start", "goal"):
        seen: dict[Coord, int] = {}
        dup: list[int] = []
        for a in agents:
            c = getattr(a, attr)
            if c in seen:
                dup += [seen[c], a.id]
            seen.setdefault(c, a.id)
        if dup:
            raise InstanceError(f"duplicate {attr} cells", dup)


# -- map files ---------------------------------------------------------------

def load_map(text: str) -> Grid:
    lines = text.splitlines()

    def header(lineno: int, key: str) -> str:
        if len(lines) < lineno:
            raise MapParseError(f"missing '{key}' header", lineno)
        parts = lines[lineno - 1].split()
        if not parts or parts[0] != key:
            raise MapParseError(f"expected '{key}' header, got {lines[lineno - 1]!r}", lineno)
        if key == "map":
            if len(parts) != 1:
                raise MapParseError("unexpected tokens after 'map'", lineno)
            return ""
        if len(parts) != 2:
            raise MapParseError(f"'{key}' header needs exactly one value", lineno)
        return parts[1]

    header(1, "type")
    dims = {}
    for lineno, key in ((2, "height"), (3, "width")):
        raw = header(lineno, key)
        try:
            dims[key] = int(raw)
        except ValueError:
            raise MapParseError(f"{key} must be an integer, got {raw!r}", lineno) from None
        if dims[key] <= 0:
            raise MapParseError(f"{key} must be positive, got {dims[key]}", lineno)
    header(4, "map")
    h, w = dims["height"], dims["width"]

    body = lines[4:]
    while len(body) > h and body[-1].strip() == "":
        body.pop()
    if len(body) < h:
        raise MapParseError(f"truncated map: expected {h} rows, found {len(body)}", 5 + len(body))
    if len(body) > h:
        raise MapParseError(f"expected {h} rows, found extra content", 5 + h)

    blocked = np.zeros((h, w), dtype=bool)
    for r, row in enumerate(body):
        lineno = 5 + r
        row = row.rstrip("\r")
        if len(row) != w:
            raise MapParseError(f"row has {len(row)} cells, expected {w}", lineno, min(len(row), w) + 1)
        for c, ch in enumerate(row):
            if ch in BLOCKED_CHARS:
                blocked[r, c] = True
            elif ch not in FREE_CHARS:
                raise MapParseError(f"unknown map character {ch!r}", lineno, c + 1)
    return Grid(blocked)


def save_map(grid: Grid) -> str:
    rows = ["".join("@" if b else "." for b in row) for row in grid.blocked.tolist()]
    head = ["type octile", f"height {grid.height}", f"width {grid.width}", "map"]
    return "\n".join(head + rows) + "\n"


# -- scenario files ----------------------------------------------------------

def load_instance(text: str, grid: Grid) -> Instance:
    """Parse ``id sr sc gr gc priority`` lines; ``#`` lines are comments."""
    agents = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 6:
            raise MapParseError(f"expected 6 fields, got {len(parts)}", lineno)
        try:
            aid, sr, sc, gr, gc, pr = (int(p) for p in parts)
        except ValueError:
            raise MapParseError(f"non-integer field in {s!r}", lineno) from None
        agents.append(Agent(aid, (sr, sc), (gr, gc), pr))
    return Instance(grid, tuple(agents))


def save_instance(instance: Instance, comments: Sequence[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    for a in instance.agents:
        out.append(f"{a.id} {a.start[0]} {a.start[1]} {a.goal[0]} {a.goal[1]} {a.priority}")
    return "\n".join(out) + "\n"
