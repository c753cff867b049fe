import random

import networkx as nx
import pytest

from gridreach import (
    AuxContext,
    AuxSubgraph,
    Decomposition,
    Engine,
    EngineConfig,
    Metrics,
    OracleBackend,
    RecursionDepthError,
    VisitedTable,
    Workspace,
    aux_reach,
    component_of,
    components,
    generate_random,
    grid_reach,
    grid_reach_many,
    implicit_aux_reach,
    is_marked,
    oracle_reach,
    strip,
)
from gridreach.engine import _Frame, default_max_depth
from gridreach.pseudosep import Pseudoseparator, build_pseudoseparator

from conftest import nx_aux, nx_reach

SMALL = EngineConfig(base_floor_h=4, base_floor_side=2)


def aux_graph(g, t):
    dec = Decomposition.uniform(g.view(), t)
    return dec, AuxSubgraph(AuxContext(dec, OracleBackend(g)))


def random_instances(n, seed, lo=4, hi=16):
    rng = random.Random(seed)
    for k in range(n):
        m = rng.randint(lo, hi)
        g = generate_random(m, rng.choice((0.3, 0.5, 0.7, 0.9)), rng.randrange(1 << 30))
        s = (rng.randint(0, m), rng.randint(0, m))
        t = (rng.randint(0, m), rng.randint(0, m))
        yield g, s, t


# --- config and table ---------------------------------------------------------

def test_config_validation_and_depth_guard():
    assert default_max_depth(0.2) == 10
    assert EngineConfig().max_depth == 10
    for bad in (dict(alpha=0), dict(beta=1), dict(backend="x"), dict(mode="y"),
                dict(max_depth=0), dict(base_exponent=0)):
        with pytest.raises(ValueError):
            EngineConfig(**bad)


def test_visited_table_marking():
    T = VisitedTable.fresh([1, 2, 3], 2, 1)
    assert is_marked(T, 1) and not is_marked(T, 2) and not is_marked(T, 99)
    T.set_edge(0, 42, 5)
    assert is_marked(T, 42)
    T.set_edge(0, 43, 3)
    assert is_marked(T, 43) and not is_marked(T, 42)
    with pytest.raises(ValueError):
        T.set_edge(0, 44, 3)
    T.set_vertex(3)
    assert T.marked() == [1, 3, 43]


# --- components ---------------------------------------------------------------

def test_component_of_matches_labels():
    rng = random.Random(2)
    for k in range(25):
        g = generate_random(rng.randint(6, 16), rng.choice((0.3, 0.6, 0.9)), k)
        dec, H = aux_graph(g, rng.randint(2, 5))
        C = build_pseudoseparator(H, 0.2, verify=False)
        st = strip(H, C)
        labels = components(st).component_id
        for v in rng.sample(sorted(labels), min(8, len(labels))):
            assert component_of(st, v) == labels[v]
        if C.vertices:
            with pytest.raises(ValueError):
                component_of(st, next(iter(C.vertices)))


def test_component_of_small_cases():
    g = generate_random(4, 0.0, 0)
    dec, H = aux_graph(g, 2)
    st = strip(H, Pseudoseparator(set(), [], set()))
    assert component_of(st, g.vid(2, 0)) == g.vid(2, 0)
    g = generate_random(1, 1.0, 0)
    dec, H = aux_graph(g, 1)
    st = strip(H, Pseudoseparator(set(), [], set()))
    assert component_of(st, g.vid(1, 1)) == g.vid(0, 0)


# --- aux_reach ----------------------------------------------------------------

def test_aux_reach_trivial():
    g = generate_random(12, 0.0, 0)
    dec, H = aux_graph(g, 4)
    v = g.vid
    assert aux_reach(H, v(4, 4), v(4, 4), SMALL)
    assert not aux_reach(H, v(0, 0), v(12, 12), SMALL)
    with pytest.raises(ValueError):
        aux_reach(H, v(1, 1), v(4, 4), SMALL)


def test_aux_reach_matches_materialised_graph():
    rng = random.Random(8)
    for k in range(100):
        m = rng.randint(6, 12)
        g = generate_random(m, rng.choice((0.3, 0.5, 0.7, 0.9)), k)
        t = rng.randint(2, 5)
        dec, H = aux_graph(g, t)
        A = nx_aux(dec)
        verts = sorted(H.vertices())
        for _ in range(3):
            x, y = rng.choice(verts), rng.choice(verts)
            expect = nx.has_path(A, g.xy(x), g.xy(y))
            assert aux_reach(H, x, y, SMALL) == expect, (k, g.xy(x), g.xy(y))


def test_marking_is_sound():
    rng = random.Random(9)
    for k in range(30):
        m = rng.randint(8, 13)
        g = generate_random(m, rng.choice((0.5, 0.7, 0.9)), k)
        dec, H = aux_graph(g, 3)
        A = nx_aux(dec)
        x = rng.choice(sorted(H.vertices()))
        y = rng.choice(sorted(H.vertices()))
        if x == y:
            continue
        eng = Engine(g, SMALL.with_(early_exit=False))
        frame = _Frame(eng, H, x, [y], 0)
        frame.run()
        reach = nx.descendants(A, g.xy(x)) | {g.xy(x)}
        assert {g.xy(v) for v in frame.T.marked()} <= reach
        frame.close()


def test_early_exit_does_not_change_answers():
    for g, s, t in random_instances(40, 10, 6, 14):
        full = grid_reach(g, s, t, SMALL.with_(mode="aux", early_exit=False, backend="oracle"))
        assert full == grid_reach(g, s, t, SMALL.with_(mode="aux", backend="oracle"))
        assert full == oracle_reach(g, s, t)


# --- grid_reach ---------------------------------------------------------------

def test_grid_reach_dfs_branch():
    g = generate_random(1, 0.0, 0)
    assert not grid_reach(g, (0, 0), (1, 0))
    from gridreach import GridGraph
    g = GridGraph.from_edges(1, [((0, 0), (1, 0))])
    met = Metrics()
    assert grid_reach(g, (0, 0), (1, 0), EngineConfig(), met)
    assert met.depth == 0 and met.queries == 0


@pytest.mark.parametrize("backend", ["oracle", "recursive"])
def test_grid_reach_matches_networkx(backend):
    cfg = SMALL.with_(backend=backend, mode="aux")
    for g, s, t in random_instances(150, 11 if backend == "oracle" else 12, 4, 14):
        assert grid_reach(g, s, t, cfg) == nx_reach(g, s, t), (g.m, s, t)


def test_default_config_matches_oracle():
    for g, s, t in random_instances(20, 13, 8, 24):
        assert grid_reach(g, s, t) == oracle_reach(g, s, t)


def test_backend_swap_equivalence():
    for g, s, t in random_instances(40, 14, 6, 14):
        a = grid_reach(g, s, t, SMALL.with_(backend="oracle", mode="aux"))
        b = implicit_aux_reach(g, s, t, SMALL)
        assert a == b


def test_grid_reach_many():
    g = generate_random(10, 0.6, 3)
    targets = [(x, y) for x in range(0, 11, 3) for y in range(0, 11, 5)]
    got = grid_reach_many(g, (5, 5), targets, SMALL.with_(mode="aux"))
    expect = {g.vid(*t) for t in targets if oracle_reach(g, (5, 5), t)}
    assert got == expect


def test_recursion_depth_guard():
    g = generate_random(24, 0.8, 1)
    cfg = EngineConfig(base_floor_h=4, base_floor_side=2, mode="aux", backend="oracle")
    met = Metrics()
    assert grid_reach(g, (0, 0), (24, 24), cfg, met) == oracle_reach(g, (0, 0), (24, 24))
    assert 2 <= met.depth <= cfg.max_depth
    with pytest.raises(RecursionDepthError):
        grid_reach(g, (0, 0), (24, 24), cfg.with_(max_depth=met.depth - 1))


def test_worked_example_instance(example12):
    for cfg in (EngineConfig(), SMALL.with_(mode="aux"), SMALL.with_(mode="aux", backend="oracle")):
        assert grid_reach(example12, (0, 1), (12, 11), cfg)
        assert not grid_reach(example12, (0, 1), (0, 12), cfg)
    dec, H = aux_graph(example12, 4)
    v = example12.vid
    chain = [(0, 1), (4, 3), (8, 1), (11, 4), (10, 8), (12, 11)]
    for a, b in zip(chain, chain[1:]):
        assert aux_reach(H, v(*a), v(*b), SMALL)
    assert aux_reach(H, v(0, 1), v(12, 11), SMALL)


def test_cache_is_transparent_for_space():
    rng = random.Random(15)
    for k in range(8):
        m = rng.randint(4, 7)
        g = generate_random(m, rng.choice((0.5, 0.7, 0.9)), k)
        s = (rng.randint(0, m), rng.randint(0, m))
        t = (rng.randint(0, m), rng.randint(0, m))
        runs = []
        for cache in (True, False):
            met = Metrics()
            cfg = EngineConfig(mode="aux", backend="oracle", cache=cache,
                               base_floor_h=5, base_floor_side=3)
            ans = grid_reach(g, s, t, cfg, met)
            runs.append((ans, met.peak_core, met.peak_conn))
        assert runs[0] == runs[1]


def test_workspace_balances():
    for g, s, t in random_instances(10, 16, 6, 14):
        ws = Workspace()
        grid_reach(g, s, t, SMALL.with_(mode="aux"), ws=ws)
        assert ws.live["core"] == 0 and ws.live["conn"] == 0
        assert ws.peak["core"] > 0
