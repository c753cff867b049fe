import os

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from gridreach import Decomposition, GridGraph, GridView

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def nx_grid(g: GridGraph | GridView) -> nx.DiGraph:
    """Independent digraph copy of a grid or window (edges by coordinates)."""
    view = g.view() if isinstance(g, GridGraph) else g
    D = nx.DiGraph()
    for x in range(view.x0, view.x1 + 1):
        for y in range(view.y0, view.y1 + 1):
            D.add_node((x, y))
    for a, b in view.edges():
        D.add_edge(a, b)
    return D


def nx_reach(g, s, t) -> bool:
    return nx.has_path(nx_grid(g), s, t)


def nx_aux(dec: Decomposition) -> nx.MultiDiGraph:
    """Materialised auxiliary graph: per block, an edge u -> v for every pair
    of perimeter vertices joined by a path inside the block window."""
    grid = dec.view.grid
    A = nx.MultiDiGraph()
    for v in dec.aux_vertices():
        A.add_node(grid.xy(v))
    for b in dec.blocks():
        D = nx_grid(b.view(grid))
        per = [grid.xy(v) for v in b.perimeter()]
        for u in per:
            reach = nx.descendants(D, u)
            for v in per:
                if v != u and v in reach:
                    A.add_edge(u, v, key=b.key)
    return A


@pytest.fixture(scope="session")
def example12():
    from gridreach import read_grid

    return read_grid(os.path.join(FIXTURES, "example12.grid"))


ACCEPTANCE: dict[int, str] = {}


def record_criterion(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE[k] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
