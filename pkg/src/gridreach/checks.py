"""Executable property checks over real auxiliary graphs.

Each check returns a list of counterexamples (empty means the property
held).  They back the ``selftest`` command and the acceptance suite.  The
crossing predicate is a parameter so a corrupted one can be injected.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass

import numpy as np

from .aux import (
    AuxContext,
    AuxSubgraph,
    Block,
    Decomposition,
    OracleBackend,
    decomposition_side,
    interleaved,
    iter_bits,
)
from .grid import GridGraph, generate_random, oracle_reach
from .pseudosep import (
    build_pseudoseparator,
    component_bound,
    kept_pairs,
    verify_pseudoseparator,
)


def position_crosses(p: int, q: int, r: int, s: int) -> bool:
    return interleaved(p, q, r, s)


@dataclass
class BlockEdges:
    """All real auxiliary edges of one block, materialised for checking."""

    block: Block
    reach: dict[int, int]          # source vertex -> perimeter reach mask
    edges: list[tuple[int, int]]   # (u, v) vertex pairs, u != v
    pu: np.ndarray                 # source positions, one per edge
    pv: np.ndarray                 # target positions
    adj: np.ndarray                # adj[i, j]: an edge (or i == j) from position i to j

    def has(self, u: int, v: int) -> bool:
        return u == v or bool(self.reach[u] >> self.block.pos(v) & 1)


def block_edges(grid: GridGraph, block: Block) -> BlockEdges:
    be = OracleBackend(grid)
    per = list(block.perimeter())
    reach = {u: be.reach_mask(block, u) for u in per}
    edges = [
        (u, block.vertex_at(k))
        for u in per
        for k in iter_bits(reach[u] & ~(1 << block.pos(u)))
    ]
    P = block.P
    adj = np.zeros((P, P), dtype=bool)
    for u in per:
        adj[block.pos(u), list(iter_bits(reach[u]))] = True
    pu = np.array([block.pos(u) for u, _ in edges], dtype=np.intp)
    pv = np.array([block.pos(v) for _, v in edges], dtype=np.intp)
    return BlockEdges(block, reach, edges, pu, pv, adj)


def small_blocks(grid: GridGraph, t: int):
    dec = Decomposition.uniform(grid.view(), t)
    for b in dec.blocks():
        yield block_edges(grid, b)


@functools.lru_cache(maxsize=64)
def crossing_table(crosses, P: int) -> np.ndarray:
    """``crosses`` evaluated on every position quadruple of a ``P``-cycle."""
    table = np.zeros((P, P, P, P), dtype=bool)
    rng = range(P)
    for p, q, r in itertools.product(rng, rng, rng):
        row = table[p, q, r]
        for s in rng:
            row[s] = crosses(p, q, r, s)
    return table


def _cross_matrix(be: BlockEdges, crosses) -> np.ndarray:
    """``X[a, b]``: edge ``a`` crosses edge ``b`` (in that argument order)."""
    T = crossing_table(crosses, be.block.P)
    pu, pv = be.pu, be.pv
    return T[pu[:, None], pv[:, None], pu[None, :], pv[None, :]]


def _pairs(mask: np.ndarray):
    return [tuple(map(int, ab)) for ab in np.argwhere(np.triu(mask, 1))]


def check_crossing_symmetry(be: BlockEdges, crosses=position_crosses) -> list:
    if not be.edges:
        return []
    T = crossing_table(crosses, be.block.P)
    pu, pv = be.pu, be.pv
    X = _cross_matrix(be, crosses)
    rev = T[pu[:, None], pv[:, None], pv[None, :], pu[None, :]]
    back = T[pv[:, None], pu[:, None], pu[None, :], pv[None, :]]
    bad = (X != X.T) | (X != rev) | (X != back)
    return [("symmetry", be.block, be.edges[a], be.edges[b]) for a, b in _pairs(bad)]


def check_crossing_implies_swaps(be: BlockEdges, crosses=position_crosses) -> list:
    """Crossing edges ``(u1, v1)``, ``(u2, v2)`` imply ``(u1, v2)`` and ``(u2, v1)``."""
    if not be.edges:
        return []
    X = _cross_matrix(be, crosses)
    M = be.adj[be.pu[:, None], be.pv[None, :]]
    bad = X & ~(M & M.T)
    return [("swap", be.block, be.edges[a], be.edges[b]) for a, b in _pairs(bad)]


def check_closer_implication(be: BlockEdges, crosses=position_crosses) -> list:
    """For edges ``e1``, ``e2`` crossing ``f = (x, y)`` with ``e1`` closer to
    ``x``, the edge ``(source(e1), target(e2))`` exists.

    Edges crossing ``f`` are sorted by closeness; a running AND of their
    sources' reach rows gives, for each ``e2``, the targets every strictly
    closer source reaches."""
    if not be.edges:
        return []
    b = be.block
    P = b.P
    X = _cross_matrix(be, crosses)
    pu, pv = be.pu, be.pv
    bad = []
    for k in range(len(be.edges)):
        idx = np.flatnonzero(X[:, k])
        if len(idx) < 2:
            continue
        px = pu[k]
        d = np.minimum((pu[idx] - px) % P, (pv[idx] - px) % P)
        order = np.argsort(d, kind="stable")
        idx, d = idx[order], d[order]
        common = np.logical_and.accumulate(be.adj[pu[idx]], axis=0)
        closer_count = np.searchsorted(d, d, side="left")
        for j in np.flatnonzero(closer_count):
            if not common[closer_count[j] - 1, pv[idx[j]]]:
                e2 = be.edges[idx[j]]
                u1 = next(be.edges[i][0] for i in idx[: closer_count[j]]
                          if not be.adj[pu[i], pv[idx[j]]])
                bad.append(("closer", b, be.edges[k], u1, e2))
    return bad


def check_mxplanar(be: BlockEdges, crosses=position_crosses) -> list:
    """No two kept pairs cross; every dropped pair is crossed by a kept one."""
    b = be.block
    pairs = {tuple(sorted((b.pos(u), b.pos(v)))) for u, v in be.edges}
    kept = kept_pairs(pairs, b.P)
    bad = []
    for e, f in itertools.combinations(sorted(kept), 2):
        if crosses(*e, *f):
            bad.append(("mxplanar-cross", b, e, f))
    for e in sorted(pairs - kept):
        if not any(crosses(*e, *f) for f in kept):
            bad.append(("mxplanar-maximal", b, e))
    return bad


def property_corpus(n_grids: int, seed: int = 0, max_t: int = 8):
    """``(grid, t)`` pairs: random grids cut into blocks of side ``<= max_t``."""
    rng = random.Random(seed)
    for k in range(n_grids):
        t = rng.randint(1, max_t)
        m = rng.randint(t, 2 * max_t)
        p = rng.choice((0.3, 0.5, 0.7, 0.9))
        yield generate_random(m, p, rng.randrange(1 << 30)), t


def top_level_subgraph(grid: GridGraph, alpha: float = 0.2) -> AuxSubgraph:
    dec = Decomposition.uniform(grid.view(), decomposition_side(grid.m, alpha))
    return AuxSubgraph(AuxContext(dec, OracleBackend(grid)))


def check_pseudoseparator(H: AuxSubgraph, beta: float) -> tuple[list, object]:
    C = build_pseudoseparator(H, beta, verify=False)
    report = verify_pseudoseparator(H, C, component_bound(H.h, beta))
    return ([] if report.ok else [("psep", report)]), C


# Labels used in selftest output and fault reports.
PROPERTIES = {
    "symmetry": "crossing symmetry and reverse invariance",
    "swap": "crossing edges imply the swapped edges",
    "closer": "closer crossing edge implies the mixed edge",
    "mxplanar": "maximal non-crossing subgraph two-part property",
    "psep": "pseudoseparator verifier",
    "backend": "backend-swap equivalence",
}


def run_selftest(crosses=position_crosses, n_grids: int = 40, seed: int = 7, log=print) -> bool:
    """Small-scale run of every property suite; returns overall pass."""
    from .engine import EngineConfig, grid_reach

    failures: dict[str, int] = {k: 0 for k in PROPERTIES}
    for grid, t in property_corpus(n_grids, seed, max_t=6):
        for be in small_blocks(grid, t):
            failures["symmetry"] += len(check_crossing_symmetry(be, crosses))
            failures["swap"] += len(check_crossing_implies_swaps(be, crosses))
            failures["closer"] += len(check_closer_implication(be, crosses))
            failures["mxplanar"] += len(check_mxplanar(be, crosses))
    rng = random.Random(seed)
    for k in range(8):
        g = generate_random(rng.randint(8, 20), rng.choice((0.5, 0.7, 0.9)), k)
        bad, _ = check_pseudoseparator(top_level_subgraph(g), 0.2)
        failures["psep"] += len(bad)
    for k in range(12):
        m = rng.randint(6, 14)
        g = generate_random(m, rng.choice((0.3, 0.5, 0.7, 0.9)), 100 + k)
        s = (rng.randint(0, m), rng.randint(0, m))
        t = (rng.randint(0, m), rng.randint(0, m))
        small = dict(mode="aux", base_floor_h=6, base_floor_side=3)
        a = grid_reach(g, s, t, EngineConfig(backend="oracle", **small))
        b = grid_reach(g, s, t, EngineConfig(backend="recursive", **small))
        if not (a == b == oracle_reach(g, s, t)):
            failures["backend"] += 1
    ok = True
    for key, name in PROPERTIES.items():
        status = "pass" if failures[key] == 0 else f"FAIL ({failures[key]} counterexamples)"
        ok &= failures[key] == 0
        log(f"{name}: {status}")
    return ok
