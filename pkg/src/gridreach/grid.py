"""Directed grid graphs: storage, canonical text format, generators, views,
and the brute-force reachability oracle.

Vertices of an ``m``-grid are the lattice points ``(x, y)`` with
``0 <= x, y <= m``.  Internally a vertex is the integer ``y * (m + 1) + x``,
so integer order is row-major ``(y, x)`` order and the lowest-indexed vertex
of any window is its bottom-left corner.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

# direction bits of the per-vertex outgoing-edge nibble
EAST, NORTH, WEST, SOUTH = 1, 2, 4, 8
DIRECTIONS = ((EAST, 1, 0), (NORTH, 0, 1), (WEST, -1, 0), (SOUTH, 0, -1))
_DIR_BY_DELTA = {(dx, dy): bit for bit, dx, dy in DIRECTIONS}
_DIR_ORDER = {EAST: 0, NORTH: 1, WEST: 2, SOUTH: 3}


class GridError(ValueError):
    pass


class GridParseError(GridError):
    def __init__(self, lineno: int, msg: str) -> None:
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class VertexId:
    x: int
    y: int


class GridGraph:
    """An ``m x m`` directed grid graph with ``(m+1)**2`` vertices.

    Outgoing edges are stored as four flag bits per vertex, two vertices per
    byte.  Instances are immutable once built.
    """

    __slots__ = ("m", "side", "_flags", "_n_edges")

    def __init__(self, m: int, flags: bytes | bytearray | None = None) -> None:
        if m < 0:
            raise GridError("side length must be non-negative")
        self.m = m
        self.side = m + 1
        n = self.side * self.side
        if flags is None:
            flags = bytes((n + 1) // 2)
        if len(flags) != (n + 1) // 2:
            raise GridError("flag buffer has the wrong length")
        self._flags = bytes(flags)
        self._check_unit_edges()
        self._n_edges = sum(bin(b).count("1") for b in self._flags)

    @classmethod
    def from_edges(cls, m: int, edges) -> "GridGraph":
        """Build from ``((x1, y1), (x2, y2))`` pairs; duplicates are rejected."""
        side = m + 1
        buf = bytearray((side * side + 1) // 2)
        for (x1, y1), (x2, y2) in edges:
            bit = _edge_bit(m, x1, y1, x2, y2)
            v = y1 * side + x1
            shift = (v & 1) * 4
            if (buf[v >> 1] >> shift) & bit:
                raise GridError(f"duplicate edge ({x1},{y1})->({x2},{y2})")
            buf[v >> 1] |= bit << shift
        return cls(m, buf)

    def _check_unit_edges(self) -> None:
        m, side = self.m, self.side
        for v in range(side * side):
            f = self.out_flags(v)
            if not f:
                continue
            x, y = v % side, v // side
            for bit, dx, dy in DIRECTIONS:
                if f & bit and not (0 <= x + dx <= m and 0 <= y + dy <= m):
                    raise GridError(f"edge leaves the lattice at ({x},{y})")

    # --- vertex helpers -------------------------------------------------
    def vid(self, x: int, y: int) -> int:
        return y * self.side + x

    def xy(self, v: int) -> tuple[int, int]:
        return v % self.side, v // self.side

    @property
    def n(self) -> int:
        return self.side * self.side

    @property
    def n_edges(self) -> int:
        return self._n_edges

    def out_flags(self, v: int) -> int:
        return (self._flags[v >> 1] >> ((v & 1) * 4)) & 0xF

    def has_edge(self, u: int, v: int) -> bool:
        ux, uy = u % self.side, u // self.side
        vx, vy = v % self.side, v // self.side
        bit = _DIR_BY_DELTA.get((vx - ux, vy - uy))
        return bit is not None and bool(self.out_flags(u) & bit)

    def edges(self) -> Iterator[tuple[tuple[int, int], tuple[int, int]]]:
        """Edges sorted by (x, y, direction)."""
        side = self.side
        for x in range(side):
            for y in range(side):
                f = self.out_flags(y * side + x)
                for bit, dx, dy in DIRECTIONS:
                    if f & bit:
                        yield (x, y), (x + dx, y + dy)

    def view(self) -> "GridView":
        return GridView(self, 0, 0, self.m, self.m)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridGraph)
            and self.m == other.m
            and self._flags == other._flags
        )

    def __hash__(self) -> int:
        return hash((self.m, self._flags))

    def __repr__(self) -> str:
        return f"GridGraph(m={self.m}, edges={self._n_edges})"


def _edge_bit(m: int, x1: int, y1: int, x2: int, y2: int) -> int:
    for c in (x1, y1, x2, y2):
        if not 0 <= c <= m:
            raise GridError(f"coordinate {c} outside [0, {m}]")
    bit = _DIR_BY_DELTA.get((x2 - x1, y2 - y1))
    if bit is None:
        raise GridError(f"non-unit edge ({x1},{y1})->({x2},{y2})")
    return bit


class GridView:
    """Read-only window ``[x0, x1] x [y0, y1]`` of a grid.

    Exposes the vertices inside the window and the edges of the parent grid
    with both endpoints inside it.  No edge data is copied.
    """

    __slots__ = ("grid", "x0", "y0", "x1", "y1")

    def __init__(self, grid: GridGraph, x0: int, y0: int, x1: int, y1: int) -> None:
        if not (0 <= x0 <= x1 <= grid.m and 0 <= y0 <= y1 <= grid.m):
            raise GridError(f"window [{x0},{x1}]x[{y0},{y1}] outside grid m={grid.m}")
        self.grid = grid
        self.x0, self.y0, self.x1, self.y1 = x0, y0, x1, y1

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def n(self) -> int:
        return (self.width + 1) * (self.height + 1)

    def key(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)

    def contains(self, v: int) -> bool:
        side = self.grid.side
        x, y = v % side, v // side
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def vertices(self) -> Iterator[int]:
        side = self.grid.side
        for y in range(self.y0, self.y1 + 1):
            base = y * side
            for x in range(self.x0, self.x1 + 1):
                yield base + x

    def out_neighbors(self, v: int) -> Iterator[int]:
        g = self.grid
        side = g.side
        f = g.out_flags(v)
        if not f:
            return
        x, y = v % side, v // side
        if f & EAST and x < self.x1:
            yield v + 1
        if f & NORTH and y < self.y1:
            yield v + side
        if f & WEST and x > self.x0:
            yield v - 1
        if f & SOUTH and y > self.y0:
            yield v - side

    def edges(self) -> Iterator[tuple[tuple[int, int], tuple[int, int]]]:
        for a, b in self.grid.edges():
            if (
                self.x0 <= a[0] <= self.x1
                and self.y0 <= a[1] <= self.y1
                and self.x0 <= b[0] <= self.x1
                and self.y0 <= b[1] <= self.y1
            ):
                yield a, b

    def __repr__(self) -> str:
        return f"GridView([{self.x0},{self.x1}]x[{self.y0},{self.y1}])"


@dataclass(frozen=True)
class SubgridRef:
    """Block ``(i, j)`` of side ``t``: window ``[i*t, (i+1)*t] x [j*t, (j+1)*t]``,
    clipped to the grid so the last row/column of blocks may be ragged."""

    i: int
    j: int
    t: int

    def window(self, m: int) -> tuple[int, int, int, int]:
        if self.t < 1 or self.i < 0 or self.j < 0:
            raise GridError(f"invalid subgrid {self}")
        x0, y0 = self.i * self.t, self.j * self.t
        if (m > 0 and (x0 >= m or y0 >= m)) or (m == 0 and (x0 or y0)):
            raise GridError(f"subgrid {self} outside grid m={m}")
        return x0, y0, min(x0 + self.t, m), min(y0 + self.t, m)


def subgrid_view(g: GridGraph | GridView, ref: SubgridRef) -> GridView:
    if isinstance(g, GridGraph):
        g = g.view()
    if g.width != g.height:
        raise GridError("subgrid references need a square parent window")
    x0, y0, x1, y1 = ref.window(g.width)
    return GridView(g.grid, g.x0 + x0, g.y0 + y0, g.x0 + x1, g.y0 + y1)


# --- canonical text format ---------------------------------------------

def parse_grid(text: str) -> GridGraph:
    """Parse ``grid <m>`` followed by ``x1 y1 x2 y2`` edge lines."""
    m = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if m is None:
            if len(parts) != 2 or parts[0] != "grid":
                raise GridParseError(lineno, "expected header 'grid <m>'")
            try:
                m = int(parts[1])
            except ValueError:
                raise GridParseError(lineno, f"bad side length {parts[1]!r}") from None
            if m < 0:
                raise GridParseError(lineno, "side length must be non-negative")
            continue
        if len(parts) != 4:
            raise GridParseError(lineno, "expected 'x1 y1 x2 y2'")
        try:
            x1, y1, x2, y2 = (int(p) for p in parts)
        except ValueError:
            raise GridParseError(lineno, "coordinates must be integers") from None
        try:
            _edge_bit(m, x1, y1, x2, y2)
        except GridError as exc:
            raise GridParseError(lineno, str(exc)) from None
        key = (x1, y1, x2, y2)
        if key in seen:
            raise GridParseError(lineno, f"duplicate edge {x1} {y1} {x2} {y2}")
        seen.add(key)
        edges.append(((x1, y1), (x2, y2)))
    if m is None:
        raise GridParseError(1, "missing header 'grid <m>'")
    return GridGraph.from_edges(m, edges)


def serialize_grid(g: GridGraph) -> str:
    lines = [f"grid {g.m}"]
    lines.extend(f"{a[0]} {a[1]} {b[0]} {b[1]}" for a, b in g.edges())
    return "\n".join(lines) + "\n"


def read_grid(path) -> GridGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_grid(fh.read())


def generate_random(m: int, p: float, seed: int) -> GridGraph:
    """Each candidate unit edge is present independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise GridError(f"edge probability {p} outside [0, 1]")
    rng = random.Random(seed)
    side = m + 1
    buf = bytearray((side * side + 1) // 2)
    for y in range(side):
        for x in range(side):
            f = 0
            for bit, dx, dy in DIRECTIONS:
                if 0 <= x + dx <= m and 0 <= y + dy <= m and rng.random() < p:
                    f |= bit
            if f:
                v = y * side + x
                buf[v >> 1] |= f << ((v & 1) * 4)
    return GridGraph(m, buf)


# --- brute-force oracle --------------------------------------------------

def as_view(g: GridGraph | GridView) -> GridView:
    return g.view() if isinstance(g, GridGraph) else g


def oracle_reach(g: GridGraph | GridView, s, t, ws=None) -> bool:
    """Depth-first search inside ``g``.  ``s``/``t`` are ``(x, y)`` pairs,
    :class:`VertexId` or internal integer ids."""
    view = as_view(g)
    s, t = _to_vid(view, s), _to_vid(view, t)
    return t in dfs_reach_set(view, s, {t}, ws)


def dfs_reach_set(view: GridView, s: int, targets, ws=None) -> set[int]:
    """Targets reachable from ``s`` inside ``view``.

    Charged to the core channel of ``ws``: one visited cell per window vertex
    plus the stack high-water mark.
    """
    remaining = set(targets)
    found = set()
    if s in remaining:
        found.add(s)
        remaining.discard(s)
    seen = {s}
    stack = [s]
    high = 1
    while stack and remaining:
        u = stack.pop()
        for v in view.out_neighbors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
                if v in remaining:
                    remaining.discard(v)
                    found.add(v)
        if len(stack) > high:
            high = len(stack)
    if ws is not None:
        ws.spike(view.n + high)
    return found


def _to_vid(view: GridView, v) -> int:
    if isinstance(v, VertexId):
        v = (v.x, v.y)
    if isinstance(v, tuple):
        x, y = v
        if not (view.x0 <= x <= view.x1 and view.y0 <= y <= view.y1):
            raise GridError(f"vertex {v} outside {view!r}")
        return view.grid.vid(x, y)
    if not view.contains(v):
        raise GridError(f"vertex {view.grid.xy(v)} outside {view!r}")
    return v
