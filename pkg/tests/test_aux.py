import itertools
import random

import pytest
from hypothesis import given, strategies as st

from gridreach import (
    AuxContext,
    AuxEdge,
    AuxSubgraph,
    Block,
    Decomposition,
    GridError,
    OracleBackend,
    aux_edge_exists,
    ccw_index,
    ccw_next,
    closer,
    crosses,
    decomposition_side,
    generate_random,
)
from gridreach.aux import enumerate_block_edges

from conftest import nx_aux, nx_grid
import networkx as nx

SIDE = 33  # lattice side used for standalone blocks (m = 32)


def blk(x0, y0, x1, y1):
    return Block(x0, y0, x1, y1, SIDE)


def vid(x, y):
    return y * SIDE + x


def xy(v):
    return v % SIDE, v // SIDE


blocks = st.builds(
    lambda x0, y0, w, h: blk(x0, y0, x0 + w, y0 + h),
    st.integers(0, 16), st.integers(0, 16), st.integers(1, 16), st.integers(1, 16),
)


def test_ccw_walk_on_small_square():
    b = blk(0, 0, 2, 2)
    walk = [(0, 0)]
    for _ in range(8):
        walk.append(xy(ccw_next(b, vid(*walk[-1]))))
    assert walk == [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1), (0, 0)]


def test_ccw_next_rejects_interior():
    with pytest.raises(GridError):
        ccw_next(blk(0, 0, 2, 2), vid(1, 1))


@given(blocks, st.data())
def test_cycle_closure(b, data):
    k = data.draw(st.integers(0, b.P - 1))
    v = b.vertex_at(k)
    w = v
    for _ in range(b.P):
        w = ccw_next(b, w)
    assert w == v


def test_ccw_next_unit_steps_exhaustive():
    for t in range(1, 17):
        b = blk(0, 0, t, t)
        assert b.P == 4 * t
        for v in b.perimeter():
            (x, y), (a, c) = xy(v), xy(ccw_next(b, v))
            assert abs(x - a) + abs(y - c) == 1


def test_ccw_index_examples():
    b = blk(0, 0, 4, 4)
    assert ccw_index(b, b.anchor, vid(4, 0)) == 4
    assert ccw_index(b, b.anchor, vid(4, 4)) == 8
    assert ccw_index(b, vid(2, 4), vid(2, 4)) == 0


@given(blocks, st.data())
def test_ccw_index_matches_iteration(b, data):
    w = b.vertex_at(data.draw(st.integers(0, b.P - 1)))
    v = w
    for k in range(2 * b.P):
        assert ccw_index(b, w, v) == k % b.P
        v = ccw_next(b, v)


def edge_at(b, p, q):
    return AuxEdge(b, b.vertex_at(p), b.vertex_at(q))


def test_crosses_examples():
    b = blk(0, 0, 4, 4)
    assert crosses(edge_at(b, 0, 5), edge_at(b, 3, 7))
    assert not crosses(edge_at(b, 0, 5), edge_at(b, 1, 4))
    assert not crosses(edge_at(b, 0, 5), edge_at(b, 5, 9))
    with pytest.raises(GridError):
        crosses(edge_at(b, 0, 5), edge_at(blk(4, 0, 8, 4), 0, 3))


def test_crosses_symmetric_and_reverse_invariant():
    b = blk(0, 0, 3, 2)
    edges = [edge_at(b, p, q) for p, q in itertools.permutations(range(b.P), 2)]
    for e, f in itertools.product(edges, repeat=2):
        c = crosses(e, f)
        assert c == crosses(f, e) == crosses(e, f.reverse()) == crosses(e.reverse(), f)


def test_closer_examples():
    b = blk(0, 0, 4, 4)
    a = b.anchor
    assert closer(a, edge_at(b, 1, 6), edge_at(b, 2, 5))
    assert not closer(a, edge_at(b, 2, 5), edge_at(b, 1, 6))
    f, g = edge_at(b, 3, 6), edge_at(b, 7, 3)
    assert not closer(a, f, g) and not closer(a, g, f)
    with pytest.raises(GridError):
        closer(vid(2, 2), f, g)


def test_closer_strict_weak_order():
    b = blk(0, 0, 2, 1)
    edges = [edge_at(b, p, q) for p, q in itertools.permutations(range(b.P), 2)]
    for anchor in b.perimeter():
        for f, g, h in itertools.product(edges, repeat=3):
            assert not (closer(anchor, f, g) and closer(anchor, g, f))
            if closer(anchor, f, g) and closer(anchor, g, h):
                assert closer(anchor, f, h)


def test_aux_vertex_membership_and_count():
    for m in (4, 9, 16, 25, 40):
        g = generate_random(m, 0.5, m)
        t = decomposition_side(m, 0.2)
        dec = Decomposition.uniform(g.view(), t)
        verts = set(dec.aux_vertices())
        expect = {g.vid(x, y) for x in range(m + 1) for y in range(m + 1)
                  if x % t == 0 or y % t == 0 or x == m or y == m}
        assert verts == expect
        assert dec.n_aux() == len(verts) <= 4 * m ** 1.2 + 4 * (m + 1)


def test_endpoint_promotion_adds_column():
    g = generate_random(10, 0.5, 0)
    s = g.vid(3, 5)
    dec = Decomposition.uniform(g.view(), 4, extra=[s, g.vid(6, 8)])
    assert dec.is_aux(s) and 3 in dec.xcuts
    assert 6 not in dec.xcuts  # (6, 8) already lies on a horizontal cut


def test_worked_example_edge_and_parallel_pair(example12):
    be = OracleBackend(example12)
    v = example12.vid
    b00 = Block(0, 0, 4, 4, example12.side)
    assert aux_edge_exists(b00, v(0, 1), v(4, 3), be)
    assert aux_edge_exists(b00, v(2, 0), v(2, 0), be)
    left, right = Block(4, 8, 8, 12, example12.side), Block(8, 8, 12, 12, example12.side)
    assert aux_edge_exists(left, v(8, 9), v(8, 11), be)
    assert aux_edge_exists(right, v(8, 9), v(8, 11), be)
    with pytest.raises(GridError):
        aux_edge_exists(b00, v(1, 1), v(4, 3), be)


def materialise(g, t):
    dec = Decomposition.uniform(g.view(), t)
    H = AuxSubgraph(AuxContext(dec, OracleBackend(g)))
    return dec, H


def test_enumeration_matches_all_pairs():
    rng = random.Random(5)
    for k in range(60):
        t = rng.randint(1, 8)
        g = generate_random(rng.randint(t, 16), rng.choice((0.3, 0.6, 0.9)), k)
        dec, H = materialise(g, t)
        for b in dec.blocks():
            D = nx_grid(b.view(g))
            expect = [(u, v) for u in b.perimeter() for v in b.perimeter()
                      if u != v and nx.has_path(D, g.xy(u), g.xy(v))]
            got = [(e.u, e.v) for e in enumerate_block_edges(H, b)]
            assert sorted(got) == sorted(expect)
            assert got == [(e.u, e.v) for e in enumerate_block_edges(H, b)]


def test_enumeration_on_edgeless_grid():
    dec, H = materialise(generate_random(8, 0.0, 0), 3)
    assert all(not list(enumerate_block_edges(H, b)) for b in dec.blocks())


def test_materialised_aux_has_parallel_edges(example12):
    A = nx_aux(Decomposition.uniform(example12.view(), 4))
    assert A.number_of_edges((8, 9), (8, 11)) == 2


def test_context_memo_is_transparent():
    g = generate_random(12, 0.6, 9)
    dec = Decomposition.uniform(g.view(), 4)
    a = AuxContext(dec, OracleBackend(g))
    b = AuxContext(dec, OracleBackend(g), memo=False)
    for blk_ in dec.blocks():
        for u in blk_.perimeter():
            assert a.reach(blk_, u) == a.reach(blk_, u) == b.reach(blk_, u)
    assert a.ws.peak["core"] == b.ws.peak["core"]
