"""Reachability by pseudoseparator marking over the auxiliary graph.

``aux_reach`` decides reachability in an auxiliary subgraph ``H``: it builds a
pseudoseparator ``C``, then repeatedly marks separator vertices and crossing
witnesses that are provably reachable from the source, asking recursive
questions only on subgraphs ``H[U + {w, s}]`` where ``U`` is one component
of the strip.  ``grid_reach`` wraps it: a grid window is decomposed into
blocks, and the auxiliary edge relation inside each block is answered either
by a DFS (oracle backend) or by recursing on the block (recursive backend).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

from .aux import (
    AuxContext,
    AuxSubgraph,
    Block,
    Decomposition,
    OracleBackend,
    decomposition_side,
    iter_bits,
)
from .grid import GridGraph, GridView, _to_vid, as_view, dfs_reach_set
from .instrument import CACHE, CONN, CORE, Metrics, Workspace
from .pseudosep import (
    CEdge,
    Pseudoseparator,
    Stripped,
    build_pseudoseparator,
    components,
    strip,
)

FRAME_WORDS = 8


class RecursionDepthError(RuntimeError):
    """Marking recursion went deeper than the configured guard."""


def default_max_depth(beta: float) -> int:
    return math.ceil(3.0 / math.log2(1.0 / (1.0 - beta)))


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.2
    beta: float = 0.2
    base_exponent: float = 1 / 8
    base_floor_h: int = 24
    base_floor_side: int = 8
    backend: str = "recursive"
    mode: str = "auto"
    early_exit: bool = True
    max_depth: int | None = None
    verify_psep: bool = False
    cache: bool = True

    def __post_init__(self) -> None:
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("alpha and beta must lie in (0, 1)")
        if self.base_exponent <= 0:
            raise ValueError("base_exponent must be positive")
        if self.backend not in ("oracle", "recursive"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.mode not in ("auto", "aux", "dfs"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_depth is None:
            object.__setattr__(self, "max_depth", default_max_depth(self.beta))
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")

    def with_(self, **kw) -> "EngineConfig":
        return replace(self, **kw)


# --- visited table ----------------------------------------------------------

@dataclass
class VisitedTable:
    """One boolean per separator vertex, one optional witness per separator
    edge (with its closeness to the edge's source)."""

    vertex_cells: dict[int, bool]
    edge_cells: list[tuple[int, int] | None]
    _witnesses: dict[int, int] = field(default_factory=dict)
    version: int = 0

    @classmethod
    def fresh(cls, vertices, n_edges: int, x: int) -> "VisitedTable":
        cells = {v: False for v in vertices}
        cells[x] = True
        return cls(cells, [None] * n_edges)

    def words(self) -> int:
        return len(self.vertex_cells) + 2 * len(self.edge_cells)

    def set_vertex(self, v: int) -> None:
        self.vertex_cells[v] = True
        self.version += 1

    def set_edge(self, k: int, witness: int, closeness: int) -> None:
        old = self.edge_cells[k]
        if old is not None and old[1] <= closeness:
            raise ValueError("edge cells only move to strictly closer witnesses")
        if old is not None:
            self._witnesses[old[0]] -= 1
            if not self._witnesses[old[0]]:
                del self._witnesses[old[0]]
        self.edge_cells[k] = (witness, closeness)
        self._witnesses[witness] = self._witnesses.get(witness, 0) + 1
        self.version += 1

    def is_marked(self, v: int) -> bool:
        return self.vertex_cells.get(v, False) or v in self._witnesses

    def marked(self) -> list[int]:
        out = {v for v, on in self.vertex_cells.items() if on}
        out.update(self._witnesses)
        return sorted(out)


def is_marked(T: VisitedTable, v: int) -> bool:
    return T.is_marked(v)


def component_of(stripped: Stripped, v: int) -> int:
    """Lowest vertex of ``v``'s undirected component in the strip (by BFS)."""
    if v not in stripped:
        raise ValueError(f"vertex {v} does not survive the strip")
    adj: dict[int, set[int]] = {}
    for _, a, b in stripped.edges():
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    seen = {v}
    dq = deque([v])
    while dq:
        u = dq.popleft()
        for z in adj.get(u, ()):
            if z not in seen:
                seen.add(z)
                dq.append(z)
    return min(seen)


# --- the engine ---------------------------------------------------------------

class RecursiveBackend:
    """Block queries answered by reachability on the block's own subgrid."""

    name = "recursive"

    def __init__(self, engine: "Engine", grid_depth: int) -> None:
        self.engine = engine
        self.grid = engine.grid
        self.grid_depth = grid_depth

    def reach_mask(self, block: Block, src: int, ws: Workspace | None = None) -> int:
        eng = self.engine
        eng.metrics.subgrid_solves += 1
        found = eng.reach_many(block.view(self.grid), src, list(block.perimeter()),
                               self.grid_depth)
        mask = 0
        for v in found:
            mask |= 1 << block.pos(v)
        return mask


class Engine:
    """One query's worth of state: config, workspace, metrics, block memo."""

    def __init__(self, grid: GridGraph, cfg: EngineConfig | None = None,
                 ws: Workspace | None = None, metrics: Metrics | None = None) -> None:
        self.grid = grid
        self.cfg = cfg or EngineConfig()
        self.ws = ws if ws is not None else Workspace()
        self.metrics = metrics if metrics is not None else Metrics()
        self.memo: dict | bool = {} if self.cfg.cache else False
        m = max(grid.m, 1)
        self.base_side = max(m ** self.cfg.base_exponent, self.cfg.base_floor_side)
        self.base_h = max(m ** self.cfg.base_exponent, self.cfg.base_floor_h)

    # grid level

    def context(self, view: GridView, extra, grid_depth: int) -> AuxContext | None:
        side = max(view.width, view.height)
        t = decomposition_side(side, self.cfg.alpha)
        dec = Decomposition.uniform(view, t, extra)
        if dec.nx == 1 and dec.ny == 1:
            return None
        if self.cfg.backend == "oracle":
            backend = OracleBackend(self.grid)
        else:
            backend = RecursiveBackend(self, grid_depth + 1)
        return AuxContext(dec, backend, self.ws, self.metrics, self.memo)

    def reach_many(self, view: GridView, s: int, targets, grid_depth: int = 0,
                   force_aux: bool = False) -> set[int]:
        """Targets reachable from ``s`` inside ``view``."""
        targets = list(dict.fromkeys(targets))
        if grid_depth > self.metrics.grid_depth:
            self.metrics.grid_depth = grid_depth
        side = max(view.width, view.height)
        small = side <= self.base_side
        if self.cfg.mode == "dfs" or (small and not force_aux):
            return dfs_reach_set(view, s, targets, self.ws)
        ctx = self.context(view, [s, *targets], grid_depth)
        if ctx is None:
            return dfs_reach_set(view, s, targets, self.ws)
        self.ws.alloc(FRAME_WORDS)
        H = AuxSubgraph(ctx)
        try:
            found = self.aux_reach_many(H, s, targets, 0)
        finally:
            H.release()
            self.ws.free(FRAME_WORDS)
        return found

    def grid_reach(self, s, t) -> bool:
        view = self.grid.view()
        s, t = _to_vid(view, s), _to_vid(view, t)
        if s == t:
            return True
        return t in self.reach_many(view, s, [t], 0, force_aux=self.cfg.mode == "aux")

    # auxiliary level

    def _dfs_over(self, H: AuxSubgraph, x: int, targets) -> set[int]:
        dec = H.ctx.dec
        remaining = set(targets)
        found = {x} & remaining
        remaining.discard(x)
        seen = {x}
        stack = [x]
        high = 1
        while stack and remaining:
            u = stack.pop()
            for b in dec.blocks_of(u):
                for k in iter_bits(H.out_mask(b, u)):
                    v = b.vertex_at(k)
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
                        if v in remaining:
                            remaining.discard(v)
                            found.add(v)
            high = max(high, len(seen) + len(stack))
        self.ws.spike(high)
        return found

    def aux_reach_many(self, H: AuxSubgraph, x: int, targets, depth: int) -> set[int]:
        """Members of ``targets`` reachable from ``x`` in ``H``."""
        if depth > self.metrics.depth:
            self.metrics.depth = depth
        if depth > self.cfg.max_depth:
            raise RecursionDepthError(f"depth {depth} exceeds guard {self.cfg.max_depth}")
        if H.h <= self.base_h:
            return self._dfs_over(H, x, targets)
        frame = _Frame(self, H, x, targets, depth)
        try:
            return frame.run()
        finally:
            frame.close()


class _Frame:
    """One activation of the marking loop."""

    def __init__(self, eng: Engine, H: AuxSubgraph, x: int, targets, depth: int) -> None:
        self.eng, self.H, self.x, self.depth = eng, H, x, depth
        self.ctx = H.ctx
        self.ws = eng.ws
        self.targets = list(targets)
        self._core = FRAME_WORDS
        self._conn = 0
        self._cache = 0
        self.ws.alloc(FRAME_WORDS)
        psep = build_pseudoseparator(H, eng.cfg.beta, verify=eng.cfg.verify_psep, ws=self.ws)
        cverts = set(psep.vertices) | {x} | set(self.targets)
        self.C = Pseudoseparator(cverts, psep.edges, psep.source_sep)
        self._charge(CORE, self.C.words())
        self.comps = components(strip(H, self.C))
        self.label = self.comps.component_id
        self._charge(CONN, self.comps.words())
        self.T = VisitedTable.fresh(sorted(cverts), len(self.C.edges), x)
        self._charge(CORE, self.T.words())
        self.sub_memo: dict = {}
        self.out_lab: dict[int, frozenset] = {}
        self.in_lab: dict[int, frozenset] = {}
        self.preds: dict[int, list[int]] = {}
        self.conf_cache: dict[int, tuple[int, bool]] = {}
        self._index: dict[int, list[int]] = {}
        self._index_version = -1
        # version of the table at the last fruitless scan of each cell; a
        # cell is rescanned only after the marked set has changed
        self.edge_stamp = [-1] * len(self.C.edges)
        self.vertex_stamp = {v: -1 for v in cverts}
        self._charge(CACHE, len(self.edge_stamp) + len(self.vertex_stamp))

    def _charge(self, ch: str, words: int) -> None:
        self.ws.alloc(words, ch)
        if ch == CORE:
            self._core += words
        elif ch == CONN:
            self._conn += words
        else:
            self._cache += words

    def close(self) -> None:
        self.ws.free(self._core, CORE)
        self.ws.free(self._conn, CONN)
        self.ws.free(self._cache, CACHE)

    # component bookkeeping

    def _labels(self, v: int, out: bool) -> frozenset:
        """Strip components holding ``v`` or an H-neighbour of ``v`` (out- or
        in-neighbours).  In-neighbours of ``v`` are recorded on the way."""
        table = self.out_lab if out else self.in_lab
        hit = table.get(v)
        if hit is not None and (self.eng.cfg.cache or out):
            return hit
        H, label = self.H, self.label
        acc = set()
        if v in label:
            acc.add(label[v])
        preds = []
        for b in self.ctx.dec.blocks_of(v):
            if out:
                for k in iter_bits(H.out_mask(b, v)):
                    z = b.vertex_at(k)
                    if z in label:
                        acc.add(label[z])
            else:
                members = H.block_masks().get(b, 0)
                pv = b.pos(v)
                for k in iter_bits(members & ~(1 << pv)):
                    z = b.vertex_at(k)
                    if self.ctx.reach(b, z) >> pv & 1:
                        preds.append(z)
                        if z in label:
                            acc.add(label[z])
        res = frozenset(acc)
        table[v] = res
        words = 1 + len(res)
        if not out:
            self.preds[v] = preds
            words += len(preds)
        self._charge(CACHE, words)
        return res

    def _marked_by_label(self) -> dict[int, list[int]]:
        """Marked vertices grouped by the components they have out-edges into."""
        if self._index_version != self.T.version:
            index: dict[int, list[int]] = {}
            for w in self.T.marked():
                for U in self._labels(w, out=True):
                    index.setdefault(U, []).append(w)
            self._index = index
            self._index_version = self.T.version
        return self._index

    def _sub(self, U: int, w: int, s: int) -> bool:
        key = (U, w, s)
        hit = self.sub_memo.get(key) if self.eng.cfg.cache else None
        ws = self.ws
        if hit is not None:
            ans, rel = hit
            ws.replay(rel)
            return ans
        members = self.comps.members[U]
        extra = [v for v in (w, s) if self.label.get(v) != U]
        label = self.label

        def member(v: int, U=U, w=w, s=s) -> bool:
            return v == w or v == s or label.get(v) == U

        def source(members=members, extra=extra):
            return iter(members + extra)

        child = AuxSubgraph(self.ctx, member=member, vertex_source=source,
                            h=len(members) + len(extra))
        saved = ws.probe_begin()
        try:
            if child.h >= self.H.h:
                ans = s in self.eng._dfs_over(child, w, [s])
            else:
                ans = s in self.eng.aux_reach_many(child, w, [s], self.depth + 1)
        finally:
            child.release()
        rel = ws.probe_end(saved)
        self.sub_memo[key] = (ans, rel)
        self._charge(CACHE, 5)
        return ans

    def confirmed(self, s: int) -> bool:
        """``s`` is marked, or some marked ``w`` reaches it by one edge or
        through a single strip component."""
        T = self.T
        if T.is_marked(s):
            return True
        # same table state gives the same answer and the same replayed peaks
        hit = self.conf_cache.get(s) if self.eng.cfg.cache else None
        if hit is not None and hit[0] == T.version:
            return hit[1]
        ans = self._confirm(s)
        if hit is None:
            self._charge(CACHE, 2)
        self.conf_cache[s] = (T.version, ans)
        return ans

    def _confirm(self, s: int) -> bool:
        T = self.T
        ins = self._labels(s, out=False)
        for w in self.preds[s]:
            if T.is_marked(w):
                return True
        index = self._marked_by_label()
        for U in sorted(ins):
            for w in index.get(U, ()):
                if w != s and self._sub(U, w, s):
                    return True
        return False

    # the marking loop

    def _edge_step(self, k: int, e: CEdge) -> bool:
        b = e.block
        P = b.P
        members = self.H.block_masks().get(b, 0)
        pu = b.pos(e.u)
        p = (b.pos(e.v) - pu) % P
        cell = self.T.edge_cells[k]
        limit = cell[1] if cell is not None else P
        near = []
        far = []
        for i in iter_bits(members):
            r = (i - pu) % P
            if 0 < r < p:
                near.append((r, i))
            elif r > p:
                far.append((r, i))
        near.sort()
        far.sort()
        reach = self.ctx.reach
        far_mask = 0
        far_src = []
        for _, j in far:
            far_mask |= 1 << j
            c = b.vertex_at(j)
            far_src.append((c, reach(b, c)))
        for r, i in near:
            if r >= limit:
                break
            a = b.vertex_at(i)
            if reach(b, a) & far_mask and self.confirmed(a):
                self.T.set_edge(k, a, r)
                return True
            for c, cmask in far_src:
                if cmask >> i & 1 and self.confirmed(c):
                    self.T.set_edge(k, c, r)
                    return True
        return False

    def _targets_done(self) -> bool:
        cells = self.T.vertex_cells
        return all(cells[t] for t in self.targets)

    def run(self) -> set[int]:
        h = self.H.h
        early = self.eng.cfg.early_exit
        T = self.T
        for _ in range(h):
            if early and self._targets_done():
                break
            changed = False
            for k, e in enumerate(self.C.edges):
                if self.edge_stamp[k] == T.version:
                    continue
                if self._edge_step(k, e):
                    changed = True
                else:
                    self.edge_stamp[k] = T.version
            for v in sorted(T.vertex_cells):
                if T.vertex_cells[v] or self.vertex_stamp[v] == T.version:
                    continue
                if self.confirmed(v):
                    T.set_vertex(v)
                    changed = True
                else:
                    self.vertex_stamp[v] = T.version
            if early and not changed:
                break
        return {t for t in self.targets if T.vertex_cells[t]}


# --- module-level entry points ----------------------------------------------

def aux_reach(H: AuxSubgraph, x: int, y: int, cfg: EngineConfig | None = None,
              metrics: Metrics | None = None) -> bool:
    """Reachability ``x -> y`` inside the auxiliary subgraph ``H``."""
    if x not in H or y not in H:
        raise ValueError("both endpoints must belong to H")
    if x == y:
        return True
    ctx = H.ctx
    eng = Engine(ctx.grid, cfg, ctx.ws, metrics if metrics is not None else ctx.metrics or Metrics())
    return y in eng.aux_reach_many(H, x, [y], 0)


def grid_reach(G: GridGraph, s, t, cfg: EngineConfig | None = None,
               metrics: Metrics | None = None, ws: Workspace | None = None) -> bool:
    """Reachability ``s -> t`` in the grid ``G``."""
    eng = Engine(G, cfg, ws, metrics)
    eng.metrics.start()
    try:
        return eng.grid_reach(s, t)
    finally:
        eng.metrics.stop(eng.ws)


def grid_reach_many(G: GridGraph | GridView, s, targets, cfg: EngineConfig | None = None,
                    metrics: Metrics | None = None) -> set[int]:
    view = as_view(G)
    eng = Engine(view.grid, cfg, None, metrics)
    s = _to_vid(view, s)
    return eng.reach_many(view, s, [_to_vid(view, t) for t in targets], 0)


def implicit_aux_reach(G: GridGraph, s, t, cfg: EngineConfig | None = None,
                       metrics: Metrics | None = None) -> bool:
    """Marking-loop reachability over the decomposition of ``G`` with block
    edges answered by recursive grid reachability; ``s`` and ``t`` become
    auxiliary vertices by extra cut lines."""
    cfg = (cfg or EngineConfig()).with_(backend="recursive", mode="aux")
    return grid_reach(G, s, t, cfg, metrics)
