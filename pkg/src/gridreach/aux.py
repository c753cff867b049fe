"""The auxiliary graph of a decomposed grid.

A window of the grid is cut by vertical and horizontal lines into blocks.
The auxiliary vertices are the grid vertices lying on a cut line; inside
each block there is an auxiliary edge ``u -> v`` between two perimeter
vertices whenever the block's subgrid has a directed ``u -> v`` path.  The
edge relation is never stored: it is answered on demand by a reachability
backend, one perimeter bitmap per ``(block, source)`` query.

Perimeter vertices are addressed by their counter-clockwise position from
the block anchor (bottom-left corner, position 0).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Iterator

from .grid import GridError, GridGraph, GridView, dfs_reach_set
from .instrument import CACHE, CONN, Workspace, words_for_bits


class Block:
    """A rectangular block ``[x0, x1] x [y0, y1]`` with ``x0 < x1``, ``y0 < y1``."""

    __slots__ = ("x0", "y0", "x1", "y1", "w", "h", "P", "side", "key")

    def __init__(self, x0: int, y0: int, x1: int, y1: int, side: int) -> None:
        if not (x0 < x1 and y0 < y1):
            raise GridError(f"degenerate block [{x0},{x1}]x[{y0},{y1}]")
        self.x0, self.y0, self.x1, self.y1 = x0, y0, x1, y1
        self.w, self.h = x1 - x0, y1 - y0
        self.P = 2 * (self.w + self.h)
        self.side = side
        self.key = (x0, y0, x1, y1)

    @classmethod
    def square(cls, i: int, j: int, t: int, side: int) -> "Block":
        return cls(i * t, j * t, (i + 1) * t, (j + 1) * t, side)

    @property
    def anchor(self) -> int:
        return self.y0 * self.side + self.x0

    def on_perimeter(self, v: int) -> bool:
        x, y = v % self.side, v // self.side
        if not (self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1):
            return False
        return x in (self.x0, self.x1) or y in (self.y0, self.y1)

    def pos(self, v: int) -> int:
        """Counter-clockwise position of perimeter vertex ``v`` from the anchor."""
        x, y = v % self.side, v // self.side
        if y == self.y0 and self.x0 <= x < self.x1:
            return x - self.x0
        if x == self.x1 and self.y0 <= y < self.y1:
            return self.w + (y - self.y0)
        if y == self.y1 and self.x0 < x <= self.x1:
            return self.w + self.h + (self.x1 - x)
        if x == self.x0 and self.y0 < y <= self.y1:
            return 2 * self.w + self.h + (self.y1 - y)
        raise GridError(f"vertex ({x},{y}) is not on the perimeter of {self!r}")

    def vertex_at(self, k: int) -> int:
        w, h = self.w, self.h
        k %= self.P
        if k < w:
            x, y = self.x0 + k, self.y0
        elif k < w + h:
            x, y = self.x1, self.y0 + (k - w)
        elif k < 2 * w + h:
            x, y = self.x1 - (k - w - h), self.y1
        else:
            x, y = self.x0, self.y1 - (k - 2 * w - h)
        return y * self.side + x

    def perimeter(self) -> Iterator[int]:
        for k in range(self.P):
            yield self.vertex_at(k)

    def view(self, grid: GridGraph) -> GridView:
        return GridView(grid, self.x0, self.y0, self.x1, self.y1)

    def __eq__(self, other) -> bool:
        return isinstance(other, Block) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Block([{self.x0},{self.x1}]x[{self.y0},{self.y1}])"


def ccw_next(block: Block, v: int) -> int:
    """Next perimeter vertex counter-clockwise, by the four-case rule."""
    side = block.side
    x, y = v % side, v // side
    if not block.on_perimeter(v):
        raise GridError(f"vertex ({x},{y}) is not on the perimeter of {block!r}")
    if x < block.x1 and y == block.y0:
        x += 1
    elif x == block.x1 and y < block.y1:
        y += 1
    elif x > block.x0 and y == block.y1:
        x -= 1
    else:  # x == x0 and y > y0
        y -= 1
    return y * side + x


def ccw_index(block: Block, w: int, v: int) -> int:
    """Smallest ``p >= 0`` with ``ccw_next^p(w) == v``."""
    return (block.pos(v) - block.pos(w)) % block.P


@dataclass(frozen=True)
class AuxEdge:
    block: Block
    u: int
    v: int

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise GridError("auxiliary edges join distinct vertices")

    @property
    def p(self) -> int:
        return self.block.pos(self.u)

    @property
    def q(self) -> int:
        return self.block.pos(self.v)

    def reverse(self) -> "AuxEdge":
        return AuxEdge(self.block, self.v, self.u)


def interleaved(p: int, q: int, r: int, s: int) -> bool:
    """Strict interleaving of the position pairs ``{p, q}`` and ``{r, s}``."""
    a, b = (p, q) if p < q else (q, p)
    c, d = (r, s) if r < s else (s, r)
    return a < c < b < d or c < a < d < b


def crosses(e: AuxEdge, f: AuxEdge) -> bool:
    if e.block != f.block:
        raise GridError("crossing is only defined for edges of one block")
    return interleaved(e.p, e.q, f.p, f.q)


def closer(anchor: int, f: AuxEdge, g: AuxEdge) -> bool:
    """True when ``f``'s nearer endpoint precedes ``g``'s, counting from ``anchor``."""
    if f.block != g.block:
        raise GridError("closer compares edges of one block")
    b = f.block
    if not b.on_perimeter(anchor):
        raise GridError("anchor is not on the block perimeter")
    return min(ccw_index(b, anchor, f.u), ccw_index(b, anchor, f.v)) < min(
        ccw_index(b, anchor, g.u), ccw_index(b, anchor, g.v)
    )


class Decomposition:
    """Cut lines of a window; block ``(i, j)`` spans consecutive cuts."""

    def __init__(self, view: GridView, xcuts, ycuts) -> None:
        self.view = view
        self.side = view.grid.side
        self.xcuts = tuple(sorted(set(xcuts)))
        self.ycuts = tuple(sorted(set(ycuts)))
        if self.xcuts[0] != view.x0 or self.xcuts[-1] != view.x1:
            raise GridError("x cuts must include the window sides")
        if self.ycuts[0] != view.y0 or self.ycuts[-1] != view.y1:
            raise GridError("y cuts must include the window sides")
        self._xset = frozenset(self.xcuts)
        self._yset = frozenset(self.ycuts)
        self._blocks: dict[tuple[int, int], Block] = {}

    @classmethod
    def uniform(cls, view: GridView, t: int, extra=()) -> "Decomposition":
        """Cuts every ``t`` columns/rows from the window corner; ``extra``
        vertices get a vertical cut through them so they become auxiliary."""
        xs = list(range(view.x0, view.x1, t)) + [view.x1]
        ys = list(range(view.y0, view.y1, t)) + [view.y1]
        side = view.grid.side
        yset = set(ys)
        xs.extend(v % side for v in extra if v // side not in yset)
        return cls(view, xs, ys)

    @property
    def nx(self) -> int:
        return len(self.xcuts) - 1

    @property
    def ny(self) -> int:
        return len(self.ycuts) - 1

    def block(self, i: int, j: int) -> Block:
        b = self._blocks.get((i, j))
        if b is None:
            b = Block(self.xcuts[i], self.ycuts[j], self.xcuts[i + 1], self.ycuts[j + 1], self.side)
            self._blocks[(i, j)] = b
        return b

    def blocks(self) -> Iterator[Block]:
        for j in range(self.ny):
            for i in range(self.nx):
                yield self.block(i, j)

    def is_aux(self, v: int) -> bool:
        x, y = v % self.side, v // self.side
        vw = self.view
        if not (vw.x0 <= x <= vw.x1 and vw.y0 <= y <= vw.y1):
            return False
        return x in self._xset or y in self._yset

    def _spans(self, cuts, c: int) -> list[int]:
        k = bisect_left(cuts, c)
        if k < len(cuts) and cuts[k] == c:
            return [i for i in (k - 1, k) if 0 <= i < len(cuts) - 1]
        return [k - 1]

    def blocks_of(self, v: int) -> list[Block]:
        """Blocks whose perimeter holds the auxiliary vertex ``v``."""
        x, y = v % self.side, v // self.side
        return [self.block(i, j) for j in self._spans(self.ycuts, y) for i in self._spans(self.xcuts, x)]

    def aux_vertices(self) -> Iterator[int]:
        vw, side = self.view, self.side
        for y in range(vw.y0, vw.y1 + 1):
            if y in self._yset:
                for x in range(vw.x0, vw.x1 + 1):
                    yield y * side + x
            else:
                for x in self.xcuts:
                    yield y * side + x

    def n_aux(self) -> int:
        w, h = self.view.width + 1, self.view.height + 1
        nx, ny = len(self.xcuts), len(self.ycuts)
        return nx * h + ny * w - nx * ny


def decomposition_side(side_len: int, alpha: float) -> int:
    """Block side ``ceil(side_len ** (1 - alpha))`` (at least 1)."""
    if side_len <= 1:
        return 1
    return max(1, math.ceil(side_len ** (1.0 - alpha) - 1e-9))


# --- reachability backends for the implicit edge relation ---------------

class OracleBackend:
    """Answers block queries with a DFS over the block's subgrid."""

    name = "oracle"

    def __init__(self, grid: GridGraph) -> None:
        self.grid = grid

    def reach_mask(self, block: Block, src: int, ws: Workspace | None = None) -> int:
        targets = set(block.perimeter())
        found = dfs_reach_set(block.view(self.grid), src, targets, ws)
        mask = 0
        for v in found:
            mask |= 1 << block.pos(v)
        return mask


class AuxContext:
    """A decomposed window plus the backend answering its edge queries.

    Perimeter bitmaps are memoised per ``(block, source)`` on the cache
    channel; a hit replays the high-water mark of the original computation,
    so core/conn peaks are exactly those of an uncached run.  ``memo=False``
    disables the table.
    """

    def __init__(self, dec: Decomposition, backend, ws: Workspace | None = None,
                 metrics=None, memo: dict | bool | None = None) -> None:
        self.dec = dec
        self.grid = dec.view.grid
        self.side = dec.side
        self.backend = backend
        self.ws = ws if ws is not None else Workspace()
        self.metrics = metrics
        if memo is False:
            self.memo = None
        else:
            self.memo = memo if memo is not None else {}

    def reach(self, block: Block, src: int) -> int:
        """Perimeter positions reachable from ``src`` inside ``block`` (incl. itself)."""
        if self.metrics is not None:
            self.metrics.queries += 1
        ws = self.ws
        if self.memo is None:
            ws.alloc(words_for_bits(block.P))
            mask = self.backend.reach_mask(block, src, ws)
            ws.free(words_for_bits(block.P))
            return mask
        key = (block.key, src)
        hit = self.memo.get(key)
        if hit is not None:
            mask, rel = hit
            ws.replay(rel)
            return mask
        saved = ws.probe_begin()
        ws.alloc(words_for_bits(block.P))
        mask = self.backend.reach_mask(block, src, ws)
        ws.free(words_for_bits(block.P))
        rel = ws.probe_end(saved)
        self.memo[key] = (mask, rel)
        ws.alloc(words_for_bits(block.P) + 3, CACHE)
        return mask

    def edge(self, block: Block, u: int, v: int) -> bool:
        return u == v or bool(self.reach(block, u) >> block.pos(v) & 1)


def aux_edge_exists(block: Block, u: int, v: int, backend, ws: Workspace | None = None) -> bool:
    """``u -> v`` path inside the block's subgrid, asked fresh of ``backend``."""
    if not (block.on_perimeter(u) and block.on_perimeter(v)):
        raise GridError("auxiliary edge endpoints must lie on the block perimeter")
    if u == v:
        return True
    return bool(backend.reach_mask(block, u, ws) >> block.pos(v) & 1)


class AuxSubgraph:
    """A vertex-induced subgraph ``H`` of the auxiliary graph.

    The top-level graph holds every auxiliary vertex of the context.  A child
    is ``H[U + {w, s}]`` for a component label ``U`` of a parent frame; its
    membership is answered from the parent's component labels.
    """

    def __init__(self, ctx: AuxContext, member: Callable[[int], bool] | None = None,
                 vertex_source: Callable[[], Iterator[int]] | None = None,
                 h: int | None = None) -> None:
        self.ctx = ctx
        self._member = member
        self._source = vertex_source
        if h is None:
            h = ctx.dec.n_aux() if member is None else sum(1 for _ in self.vertices())
        self.h = h
        self._masks: dict[Block, int] | None = None

    def __contains__(self, v: int) -> bool:
        if self._member is None:
            return self.ctx.dec.is_aux(v)
        return self._member(v)

    def vertices(self) -> Iterator[int]:
        if self._source is not None:
            return self._source()
        if self._member is None:
            return self.ctx.dec.aux_vertices()
        return (v for v in self.ctx.dec.aux_vertices() if self._member(v))

    def block_masks(self) -> dict[Block, int]:
        """Member bitmap per block (perimeter positions); charged to conn."""
        if self._masks is None:
            dec = self.ctx.dec
            masks: dict[Block, int] = {}
            for v in self.vertices():
                for b in dec.blocks_of(v):
                    masks[b] = masks.get(b, 0) | (1 << b.pos(v))
            self._masks = masks
            self._mask_words = sum(words_for_bits(b.P) + 1 for b in masks)
            self.ctx.ws.alloc(self._mask_words, CONN)
        return self._masks

    def release(self) -> None:
        if self._masks is not None:
            self.ctx.ws.free(self._mask_words, CONN)
            self._masks = None

    def out_mask(self, block: Block, v: int) -> int:
        """Member positions of ``block`` reachable from ``v`` by one edge."""
        m = self.block_masks().get(block, 0)
        return self.ctx.reach(block, v) & m & ~(1 << block.pos(v))


def enumerate_block_edges(H: AuxSubgraph, block: Block) -> Iterator[AuxEdge]:
    """All edges of ``H`` inside ``block``, sources then targets in ccw order."""
    members = H.block_masks().get(block, 0)
    k = 0
    while members >> k:
        if members >> k & 1:
            u = block.vertex_at(k)
            out = H.out_mask(block, u)
            j = 0
            while out >> j:
                if out >> j & 1:
                    yield AuxEdge(block, u, block.vertex_at(j))
                j += 1
        k += 1


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
