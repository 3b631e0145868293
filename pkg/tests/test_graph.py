import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from nodalsurplus.errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    SelfLoopError,
    VertexRangeError,
)
from nodalsurplus.graph import (
    analyze_cycles,
    biconnected_blocks,
    bridge_sides,
    bridges,
    build_graph,
    has_disjoint_cycles,
)
from nodalsurplus.instances import (
    path_graph,
    theta_graph,
    three_cycles_graph,
    triangle_pendant,
    two_triangles_bridge,
)


def test_triangle():
    g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert g.edges == ((0, 1), (0, 2), (1, 2))
    assert g.beta == 1


def test_edges_canonicalized():
    g = build_graph(3, [(2, 1), (1, 0)])
    assert g.edges == ((0, 1), (1, 2))


@pytest.mark.parametrize("n, edges, err", [
    (3, [(0, 1), (0, 1)], DuplicateEdgeError),
    (3, [(0, 1), (1, 0)], DuplicateEdgeError),
    (4, [(0, 1), (2, 3)], DisconnectedGraphError),
    (2, [(0, 0), (0, 1)], SelfLoopError),
    (2, [(0, 2)], VertexRangeError),
    (65, [(i, i + 1) for i in range(64)], VertexRangeError),
])
def test_build_errors(n, edges, err):
    with pytest.raises(err):
        build_graph(n, edges)


def test_single_vertex():
    g = build_graph(1, [])
    cs = analyze_cycles(g)
    assert cs.beta == 0 and cs.disjoint and bridges(g) == []


def test_path_has_no_cycles():
    cs = analyze_cycles(path_graph(4))
    assert cs.beta == 0
    assert cs.fundamental_cycles == ()
    assert bridges(path_graph(4)) == [(0, 1), (1, 2), (2, 3)]


def test_triangle_pendant_tree():
    cs = analyze_cycles(triangle_pendant())
    assert cs.beta == 1
    assert set(cs.tree_edges) == {(0, 1), (0, 2), (0, 3)}
    assert cs.representative_edges == ((1, 2),)
    assert cs.fundamental_cycles[0][:2] == (1, 2)


def test_two_triangles():
    g = two_triangles_bridge()
    cs = analyze_cycles(g)
    assert cs.beta == 2 and cs.disjoint
    assert bridges(g) == [(2, 3)]
    left, right = bridge_sides(g, (2, 3))
    assert left == {0, 1, 2} and right == {3, 4, 5}


def test_theta_not_disjoint():
    assert not has_disjoint_cycles(theta_graph())
    assert not analyze_cycles(theta_graph()).disjoint


def test_cactus_with_shared_vertex_not_disjoint():
    # triangles {0, 1, 3} and {1, 2, 4} share vertex 1 but no edge
    g = build_graph(5, [(0, 1), (0, 3), (1, 2), (1, 3), (1, 4), (2, 4)])
    assert not has_disjoint_cycles(g)
    assert bridges(g) == []


def test_triangle_has_no_bridges():
    assert bridges(build_graph(3, [(0, 1), (1, 2), (0, 2)])) == []


def test_three_cycles_graph():
    g = three_cycles_graph()
    cs = analyze_cycles(g)
    assert (g.n, g.m, cs.beta, cs.disjoint) == (10, 12, 3, True)
    assert sorted(len(c) for c in cs.fundamental_cycles) == [3, 3, 4]


def test_bridge_sides_rejects_cycle_edge():
    with pytest.raises(ValueError):
        bridge_sides(triangle_pendant(), (1, 2))


# --- properties over random cactus-like and general graphs ------------------------

@st.composite
def connected_graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    # random spanning tree, then extra edges
    edges = set()
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.add((u, v))
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in edges]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=4, unique=True)) if pairs else []
    edges |= set(extra)
    perm = draw(st.permutations(range(n)))
    return build_graph(n, [(perm[a], perm[b]) for a, b in edges])


def _nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return G


@given(connected_graphs())
@settings(max_examples=150, deadline=None)
def test_bridges_match_networkx(g):
    expected = sorted(tuple(sorted(e)) for e in nx.bridges(_nx(g)))
    assert bridges(g) == expected


@given(connected_graphs())
@settings(max_examples=150, deadline=None)
def test_blocks_match_networkx(g):
    ours = sorted(tuple(b) for b in biconnected_blocks(g))
    theirs = sorted(tuple(sorted(tuple(sorted(e)) for e in comp))
                    for comp in nx.biconnected_component_edges(_nx(g)))
    assert ours == theirs


@given(connected_graphs())
@settings(max_examples=150, deadline=None)
def test_cycle_structure_invariants(g):
    cs = analyze_cycles(g)
    assert cs.beta == g.m - g.n + 1
    assert len(cs.tree_edges) == g.n - 1
    assert list(cs.representative_edges) == sorted(cs.representative_edges)
    G = _nx(g)
    for j, (r, s) in enumerate(cs.representative_edges):
        # representative edge is on its own cycle only
        owners = [i for i in range(cs.beta) if (r, s) in cs.cycle_edges(i)]
        assert owners == [j]
        cyc_edges = cs.cycle_edges(j)
        assert all(g.has_edge(*e) for e in cyc_edges)
        assert len(set(cs.fundamental_cycles[j])) == len(cs.fundamental_cycles[j])
        G2 = G.copy()
        G2.remove_edge(r, s)
        assert nx.is_connected(G2)
    assert analyze_cycles(g) == cs


@given(connected_graphs())
@settings(max_examples=150, deadline=None)
def test_disjointness_against_simple_cycles(g):
    cycles = [set(c) for c in nx.simple_cycles(_nx(g))]
    oracle = all(not (a & b) for a, b in itertools.combinations(cycles, 2))
    assert has_disjoint_cycles(g) == oracle
    if oracle:
        cs = analyze_cycles(g)
        # edge count identity: bridges plus cycle lengths
        assert len(bridges(g)) + sum(len(c) for c in cs.fundamental_cycles) == g.m
        assert sorted(map(frozenset, cycles)) == sorted(map(frozenset, map(set, cs.fundamental_cycles)))


def test_to_json_roundtrip():
    g = two_triangles_bridge()
    d = g.to_json()
    assert build_graph(d["n"], d["edges"]) == g
