"""Pseudoseparators of auxiliary subgraphs.

Construction: keep a maximal set of pairwise non-crossing edges (the
minimal-index filter), close each block's member polygon with its boundary
cycle, fan-triangulate the remaining faces, cut the resulting planar
skeleton with a vertex separator, and finally recruit up to four real
"shadow" edges around every skeleton-only edge between separator vertices.

Stripping removes the pseudoseparator's vertices together with every edge
crossing one of its edges; the components of what remains are what the
reachability engine recurses on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

from .aux import AuxEdge, AuxSubgraph, Block, interleaved, iter_bits
from .instrument import CONN


class PseudoseparatorError(RuntimeError):
    """The constructed set leaves a component above the bound."""

    def __init__(self, msg: str, witness=None) -> None:
        super().__init__(msg)
        self.witness = witness


# --- edges of H per block ------------------------------------------------

def block_pairs(H: AuxSubgraph, block: Block) -> set[tuple[int, int]]:
    """Undirected position pairs ``(i, j)``, ``i < j``, joined by an H-edge."""
    pairs = set()
    members = H.block_masks().get(block, 0)
    for i in iter_bits(members):
        out = H.out_mask(block, block.vertex_at(i))
        for j in iter_bits(out):
            pairs.add((i, j) if i < j else (j, i))
    return pairs


def in_mask(H: AuxSubgraph, block: Block, v: int) -> int:
    """Member positions with an edge into ``v`` inside ``block``."""
    members = H.block_masks().get(block, 0)
    pv = block.pos(v)
    ctx = H.ctx
    acc = 0
    for i in iter_bits(members & ~(1 << pv)):
        if ctx.reach(block, block.vertex_at(i)) >> pv & 1:
            acc |= 1 << i
    return acc


class _Fenwick:
    def __init__(self, n: int) -> None:
        self.n = n
        self.tree = [0] * (n + 1)

    def add(self, i: int) -> None:
        i += 1
        while i <= self.n:
            self.tree[i] += 1
            i += i & -i

    def prefix(self, i: int) -> int:
        """Count of inserted positions ``< i``."""
        s = 0
        while i > 0:
            s += self.tree[i]
            i -= i & -i
        return s


def min_index_filter(pairs, P: int) -> set[tuple[int, int]]:
    """Pairs ``(i, j)`` for which no pair ``(x, y)`` has ``x < i < y < j``.

    Sweep over ``i`` with a Fenwick tree on ``y``.  The survivors never
    cross, but a dropped pair may be crossed only by other dropped pairs.
    """
    ordered = sorted(pairs)
    fw = _Fenwick(P)
    kept = set()
    k = 0
    while k < len(ordered):
        i = ordered[k][0]
        group = []
        while k < len(ordered) and ordered[k][0] == i:
            group.append(ordered[k])
            k += 1
        for _, j in group:
            if fw.prefix(j) - fw.prefix(i + 1) == 0:
                kept.add((i, j))
        for _, j in group:
            fw.add(j)
    return kept


def kept_pairs(pairs, P: int) -> set[tuple[int, int]]:
    """Maximal non-crossing subset: the min-index survivors, then every other
    pair in ``(min, max)`` order that crosses nothing kept so far."""
    kept = min_index_filter(pairs, P)
    partners = [0] * P
    for i, j in kept:
        partners[i] |= 1 << j
        partners[j] |= 1 << i
    full = (1 << P) - 1
    for i, j in sorted(set(pairs) - kept):
        outside = full & ~(((1 << (j + 1)) - 1) & ~((1 << i) - 1))
        if any(partners[x] & outside for x in range(i + 1, j)):
            continue
        kept.add((i, j))
        partners[i] |= 1 << j
        partners[j] |= 1 << i
    return kept


def max_noncrossing_subgraph(H: AuxSubgraph):
    """Membership predicate for the maximal non-crossing subgraph of ``H``.

    The kept set of a block is computed on first use and reused.
    """
    cache: dict[Block, set[tuple[int, int]]] = {}

    def keep(e: AuxEdge) -> bool:
        b = e.block
        if b not in cache:
            cache[b] = kept_pairs(block_pairs(H, b), b.P)
        i, j = sorted((b.pos(e.u), b.pos(e.v)))
        return (i, j) in cache[b]

    return keep


# --- planar skeleton -----------------------------------------------------

@dataclass
class BlockSkeleton:
    members: list[int]                 # perimeter positions, ccw order
    real: set[tuple[int, int]]         # kept H-pairs (positions)
    tri: set[tuple[int, int]]          # added boundary/fan pairs (positions)


@dataclass
class PlanarSkeleton:
    vertices: list[int]
    blocks: dict[Block, BlockSkeleton] = field(default_factory=dict)

    @property
    def real_edges(self) -> Iterator[tuple[Block, int, int]]:
        for b, sk in self.blocks.items():
            for i, j in sk.real:
                yield b, b.vertex_at(i), b.vertex_at(j)

    @property
    def tri_edges(self) -> Iterator[tuple[Block, int, int]]:
        for b, sk in self.blocks.items():
            for i, j in sk.tri:
                yield b, b.vertex_at(i), b.vertex_at(j)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for b, sk in self.blocks.items():
            for i, j in sk.real | sk.tri:
                u, v = b.vertex_at(i), b.vertex_at(j)
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def n_edges(self) -> int:
        return sum(len(sk.real) + len(sk.tri) for sk in self.blocks.values())


def polygon_faces(k: int, chords) -> list[list[int]]:
    """Faces of a convex ``k``-gon (vertices ``0..k-1``) cut by non-crossing
    chords given as index pairs ``(i, j)``, ``i < j``."""
    if k < 3:
        return []
    ending: dict[int, list[int]] = {}
    for i, j in chords:
        if j - i >= 2 and not (i == 0 and j == k - 1):
            ending.setdefault(j, []).append(i)
    faces = []
    stack: list[int] = []
    for j in range(k):
        for i in sorted(ending.get(j, ()), reverse=True):
            face = []
            while stack[-1] != i:
                face.append(stack.pop())
            faces.append([i] + face[::-1] + [j])
        stack.append(j)
    faces.append(stack)
    return faces


def triangulate(H: AuxSubgraph, planar=None, ws=None) -> PlanarSkeleton:
    """Planar skeleton of ``H``: kept edges, each block's boundary cycle
    through its members, then a fan triangulation of every interior face
    from the face's lowest-indexed vertex.

    ``planar`` may be a per-edge keep predicate; by default the sweep filter
    is used (they agree, see the test-suite).
    """
    masks = H.block_masks()
    sk = PlanarSkeleton(vertices=list(H.vertices()))
    words = 0
    for b, mmask in masks.items():
        members = list(iter_bits(mmask))
        pairs = block_pairs(H, b)
        if planar is None:
            real = kept_pairs(pairs, b.P)
        else:
            real = {p for p in pairs if planar(AuxEdge(b, b.vertex_at(p[0]), b.vertex_at(p[1])))}
        tri = set()
        k = len(members)
        if k >= 2:
            for a in range(k):
                p, q = members[a], members[(a + 1) % k]
                pr = (p, q) if p < q else (q, p)
                if p != q and pr not in real:
                    tri.add(pr)
        if k >= 4:
            index = {p: a for a, p in enumerate(members)}
            chords = sorted(tuple(sorted((index[i], index[j]))) for i, j in real)
            for face in polygon_faces(k, chords):
                if len(face) < 4:
                    continue
                ids = [b.vertex_at(members[a]) for a in face]
                r = min(range(len(face)), key=ids.__getitem__)
                L = len(face)
                for d in range(2, L - 1):
                    q = face[(r + d) % L]
                    i, j = members[face[r]], members[q]
                    tri.add((i, j) if i < j else (j, i))
        sk.blocks[b] = BlockSkeleton(members, real, tri)
        words += len(members) + 2 * (len(real) + len(tri)) + 2 * len(pairs)
    if ws is not None:
        ws.spike(words, CONN)
    return sk


# --- planar separator ----------------------------------------------------

def _components(adj: dict[int, set[int]], alive) -> list[list[int]]:
    seen = set()
    comps = []
    for s in sorted(alive):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v in adj[u]:
                if v in alive and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    dq.append(v)
        comps.append(comp)
    return comps


def _bfs_levels(adj, root: int, alive) -> list[list[int]]:
    levels = [[root]]
    seen = {root}
    while True:
        nxt = []
        for u in levels[-1]:
            for v in sorted(adj[u]):
                if v in alive and v not in seen:
                    seen.add(v)
                    nxt.append(v)
        if not nxt:
            return levels
        levels.append(nxt)


def _level_key(rule: int, n: int, below: int, size: int, above: int):
    worst = max(below, above)
    if rule == 0:
        # thinnest level leaving both sides within two thirds
        return (0, size, worst) if worst <= (2 * n) // 3 else (1, worst, size)
    small = min(below, above)
    return (size / small if small > 0 else float("inf"), worst)


def _separate(adj, target: int, peripheral: bool, rule: int) -> tuple[set[int], int]:
    alive = set(adj)
    S: set[int] = set()
    pending = [c for c in _components(adj, alive) if len(c) > target]
    peak = 0
    while pending:
        comp = pending.pop()
        n = len(comp)
        cset = set(comp)
        root = min(comp)
        if peripheral:
            root = min(_bfs_levels(adj, root, cset)[-1])
        levels = _bfs_levels(adj, root, cset)
        peak = max(peak, 2 * n + len(S))
        best, best_key = 0, None
        below = 0
        for li, level in enumerate(levels):
            above = n - below - len(level)
            key = _level_key(rule, n, below, len(level), above)
            if best_key is None or key < best_key:
                best, best_key = li, key
            below += len(level)
        cut = levels[best]
        S.update(cut)
        rest = cset - set(cut)
        pending.extend(c for c in _components(adj, rest) if len(c) > target)
    return S, peak


def planar_separator(skeleton, target: int, ws=None) -> set[int]:
    """Vertex set whose removal leaves components of size ``<= target``.

    ``skeleton`` is a :class:`PlanarSkeleton` or an undirected adjacency map.
    Each oversized component is cut at one breadth-first level and the pieces
    are processed again.  Four level rules are tried (root at the lowest
    vertex or at a far vertex; thinnest two-thirds-balanced level or the
    sparsest level relative to the smaller side) and the smallest result is
    kept.
    """
    if target < 1:
        raise ValueError("component bound must be at least 1")
    adj = skeleton.adjacency() if isinstance(skeleton, PlanarSkeleton) else skeleton
    best = None
    peak = 0
    for peripheral in (False, True):
        for rule in (0, 1):
            S, pk = _separate(adj, target, peripheral, rule)
            peak = max(peak, pk)
            if best is None or len(S) < len(best):
                best = S
    if ws is not None:
        ws.spike(peak + len(adj), CONN)
    return best


# --- pseudoseparator -------------------------------------------------------

@dataclass(frozen=True)
class CEdge:
    block: Block
    u: int
    v: int
    shadow: bool = False


@dataclass
class Pseudoseparator:
    vertices: set[int]
    edges: list[CEdge]
    source_sep: set[int]
    repairs: set[int] = field(default_factory=set)

    @property
    def size(self) -> int:
        return len(self.vertices) + len(self.edges)

    @property
    def n_shadows(self) -> int:
        return sum(1 for e in self.edges if e.shadow)

    def words(self) -> int:
        return len(self.vertices) + 3 * len(self.edges)


def component_bound(h: int, beta: float) -> int:
    return max(1, int(h ** (1.0 - beta) + 1e-9))


def _neighbour_positions(H: AuxSubgraph, block: Block, v: int) -> int:
    return H.out_mask(block, v) | in_mask(H, block, v)


def _shadows(H: AuxSubgraph, block: Block, v: int, w: int) -> list[tuple[int, int]]:
    """Up to two shadow endpoints around ``w`` as seen from ``v``: the H-neighbours
    of ``v`` immediately before and after ``w`` in ccw order."""
    P = block.P
    pv = block.pos(v)
    p = (block.pos(w) - pv) % P
    before = after = None
    for k in iter_bits(_neighbour_positions(H, block, v)):
        r = (k - pv) % P
        if 0 < r < p and (before is None or r > before):
            before = r
        elif r > p and (after is None or r < after):
            after = r
    return [(v, block.vertex_at(pv + r)) for r in (before, after) if r is not None]


def build_pseudoseparator(H: AuxSubgraph, beta: float, verify: bool = True,
                          ws=None) -> Pseudoseparator:
    """Pseudoseparator of ``H`` whose strip components have at most
    ``floor(h ** (1 - beta))`` vertices."""
    if H.h < 2:
        raise ValueError("pseudoseparators need at least two vertices")
    bound = component_bound(H.h, beta)
    if H.h <= bound:
        return Pseudoseparator(set(), [], set())
    sk = triangulate(H, ws=ws)
    adj = sk.adjacency()
    if ws is not None:
        ws.alloc(len(adj) + 2 * sk.n_edges(), CONN)
    try:
        S = planar_separator(adj, bound, ws)
    finally:
        if ws is not None:
            ws.free(len(adj) + 2 * sk.n_edges(), CONN)
    ctx = H.ctx
    vertices = set(S)
    edges: dict[tuple, CEdge] = {}

    def add_real(b: Block, a: int, c: int, shadow: bool) -> None:
        # crossing depends on positions only, so one direction per pair
        u, v = (a, c) if ctx.edge(b, a, c) else (c, a)
        key = (b.key, min(a, c), max(a, c))
        if key not in edges:
            edges[key] = CEdge(b, u, v, shadow)

    for b, bs in sk.blocks.items():
        for i, j in sorted(bs.real | bs.tri):
            u, v = b.vertex_at(i), b.vertex_at(j)
            if u not in S or v not in S:
                continue
            if ctx.edge(b, u, v) or ctx.edge(b, v, u):
                add_real(b, u, v, False)
                continue
            for a, z in _shadows(H, b, u, v) + _shadows(H, b, v, u):
                vertices.add(z)
                add_real(b, a, z, True)
    C = Pseudoseparator(vertices, list(edges.values()), set(S))
    # Shadows can miss an H-edge that crosses a skeleton-only edge without
    # crossing any shadow.  Removing the lower endpoint of every such
    # surviving edge keeps each strip component inside one component of
    # the skeleton minus S, which meets the bound.
    skel_label: dict[int, int] = {}
    for comp in _components(adj, set(adj) - S):
        low = min(comp)
        for v in comp:
            skel_label[v] = low
    if ws is not None:
        ws.alloc(len(skel_label), CONN)
    repairs = {
        min(u, v)
        for _, u, v in strip(H, C).edges()
        if skel_label[u] != skel_label[v]
    }
    if ws is not None:
        ws.free(len(skel_label), CONN)
    C.vertices |= repairs
    C.repairs = repairs
    if verify:
        report = verify_pseudoseparator(H, C, bound)
        if not report.ok:
            raise PseudoseparatorError(
                f"component of size {report.max_component} exceeds bound {bound}",
                report.witness,
            )
    return C


# --- strip and components --------------------------------------------------

class Stripped:
    """``H`` minus the vertices of ``C`` and every edge crossing a ``C``-edge."""

    def __init__(self, H: AuxSubgraph, C: Pseudoseparator) -> None:
        self.H = H
        self.C = C
        self.cverts = C.vertices
        self.by_block: dict[Block, list[tuple[int, int]]] = {}
        for e in C.edges:
            pu, pv = e.block.pos(e.u), e.block.pos(e.v)
            self.by_block.setdefault(e.block, []).append((pu, pv) if pu < pv else (pv, pu))

    def __contains__(self, v: int) -> bool:
        return v in self.H and v not in self.cverts

    def vertices(self) -> Iterator[int]:
        return (v for v in self.H.vertices() if v not in self.cverts)

    def _forbidden(self, block: Block, a: int) -> int:
        """Positions ``b`` such that ``(a, b)`` crosses a C-edge of ``block``."""
        P = block.P
        full = (1 << P) - 1
        acc = 0
        for c, d in self.by_block.get(block, ()):
            if a == c or a == d:
                continue
            inside = ((1 << d) - 1) & ~((1 << (c + 1)) - 1)
            if c < a < d:
                acc |= full & ~inside & ~(1 << c) & ~(1 << d)
            else:
                acc |= inside
        return acc

    def out_mask(self, block: Block, v: int) -> int:
        cmask = 0
        for u in self.cverts:
            if block.on_perimeter(u):
                cmask |= 1 << block.pos(u)
        return self.H.out_mask(block, v) & ~cmask & ~self._forbidden(block, block.pos(v))

    def edges(self) -> Iterator[tuple[Block, int, int]]:
        masks = self.H.block_masks()
        for b, mm in masks.items():
            cmask = 0
            for k in iter_bits(mm):
                if b.vertex_at(k) in self.cverts:
                    cmask |= 1 << k
            for i in iter_bits(mm & ~cmask):
                u = b.vertex_at(i)
                out = self.H.out_mask(b, u) & ~cmask & ~self._forbidden(b, i)
                for j in iter_bits(out):
                    yield b, u, b.vertex_at(j)


def strip(H: AuxSubgraph, C: Pseudoseparator) -> Stripped:
    return Stripped(H, C)


@dataclass
class StripComponents:
    component_id: dict[int, int]
    sizes: dict[int, int]
    members: dict[int, list[int]]

    def words(self) -> int:
        return 2 * len(self.component_id) + 2 * len(self.sizes)


def components(stripped: Stripped) -> StripComponents:
    """Connected components of the underlying undirected graph, each named by
    its lowest-indexed vertex."""
    parent: dict[int, int] = {v: v for v in stripped.vertices()}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for _, u, v in stripped.edges():
        ru, rv = find(u), find(v)
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    ids = {v: find(v) for v in parent}
    sizes: dict[int, int] = {}
    members: dict[int, list[int]] = {}
    for v, r in ids.items():
        sizes[r] = sizes.get(r, 0) + 1
        members.setdefault(r, []).append(v)
    return StripComponents(ids, sizes, members)


@dataclass
class VerifyReport:
    ok: bool
    bound: int
    max_component: int
    n_components: int
    witness: list[int] | None = None
    bad_edges: list = field(default_factory=list)


def verify_pseudoseparator(H: AuxSubgraph, C: Pseudoseparator, bound: int,
                           comps: StripComponents | None = None) -> VerifyReport:
    """(a) every strip component has at most ``bound`` vertices; (b) every
    H-edge between two different components touches or crosses ``C``.
    Part (b) is checked pairwise against every C-edge."""
    if comps is None:
        comps = components(strip(H, C))
    max_comp = max(comps.sizes.values(), default=0)
    witness = None
    if max_comp > bound:
        big = max(comps.sizes, key=lambda r: (comps.sizes[r], -r))
        witness = sorted(comps.members[big])
    bad = []
    cby: dict[Block, list[CEdge]] = {}
    for e in C.edges:
        cby.setdefault(e.block, []).append(e)
    for b, mm in H.block_masks().items():
        for i in iter_bits(mm):
            u = b.vertex_at(i)
            if u in C.vertices:
                continue
            for j in iter_bits(H.out_mask(b, u)):
                v = b.vertex_at(j)
                if v in C.vertices or comps.component_id[u] == comps.component_id[v]:
                    continue
                if not any(interleaved(i, j, b.pos(f.u), b.pos(f.v)) for f in cby.get(b, ())):
                    bad.append((b, u, v))
    return VerifyReport(
        ok=max_comp <= bound and not bad,
        bound=bound,
        max_component=max_comp,
        n_components=len(comps.sizes),
        witness=witness,
        bad_edges=bad,
    )
