import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.exactlin import determinant
from artifact.graphs import (
    Subgraph,
    WeightedGraph,
    automorphisms,
    bridges,
    canonical_label,
    contract_edge,
    cycle_rank,
    enumerate_stable_graphs,
    enumerate_trivalent,
    fundamental_cycle_basis,
    graph_laplacian,
    graph_polynomial,
    has_odd_automorphism,
    is_3_edge_connected,
    is_stable,
    max_core,
    named_graph,
    permutation_sign,
)


def _random_graph(rng, n, m):
    return WeightedGraph.make([(rng.randrange(n), rng.randrange(n)) for _ in range(m)], nverts=n)


def _relabel(G, vperm, eperm):
    edges = [None] * G.num_edges
    for e, (a, b) in enumerate(G.edges):
        edges[eperm[e]] = (vperm[a], vperm[b])
    weights = [0] * G.num_vertices
    for v, w in enumerate(G.weights):
        weights[vperm[v]] = w
    return WeightedGraph.make(edges, weights)


def _tree_poly_oracle(G):
    """Spanning trees by brute force over edge subsets (networkx connectivity)."""
    n, m = G.num_vertices, G.num_edges
    terms = {}
    for T in itertools.combinations(range(m), n - 1):
        H = nx.MultiGraph()
        H.add_nodes_from(range(n))
        H.add_edges_from(G.edges[e] for e in T)
        if nx.is_connected(H) and not any(a == b for a, b in (G.edges[e] for e in T)):
            key = tuple(0 if e in T else 1 for e in range(m))
            terms[key] = terms.get(key, 0) + 1
    return terms


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph((0, 0), ((0, 2),))
    with pytest.raises(ValueError):
        WeightedGraph((-1,), ())
    G = named_graph("dumbbell")
    assert G.genus == 2 and G.loop_number == 2 and G.is_connected
    assert WeightedGraph.from_json(G.to_json()) == G


def test_stable_graph_counts():
    assert len(enumerate_stable_graphs(2)) == 6
    assert len(enumerate_stable_graphs(2, weight_zero_only=True)) == 3
    assert len(enumerate_stable_graphs(3)) == 41
    assert len(enumerate_stable_graphs(3, weight_zero_only=True)) == 15
    assert len(enumerate_trivalent(3)) == 5
    with pytest.raises(ValueError):
        enumerate_stable_graphs(1)


def test_enumerated_graphs_are_stable_and_distinct():
    for g in (2, 3):
        found = enumerate_stable_graphs(g)
        assert all(is_stable(G) and G.genus == g and G.is_connected for G in found)
        assert len({canonical_label(G).key for G in found}) == len(found)


def test_contraction_keeps_genus():
    G = named_graph("dumbbell")
    H = contract_edge(G, 0)
    assert H.weights == (1, 0) and H.genus == 2
    with pytest.raises(IndexError):
        contract_edge(G, 7)


def test_wheel_automorphisms_match_networkx():
    W = named_graph("w3")
    auts = automorphisms(W)
    nxg = nx.Graph(list(W.edges))
    iso = list(nx.algorithms.isomorphism.GraphMatcher(nxg, nxg).isomorphisms_iter())
    assert len(auts) == len(iso) == 24
    # a vertex transposition swaps two pairs of edges, so the wheel survives in GC_0
    assert not has_odd_automorphism(W)


def test_parallel_edges_give_odd_automorphism():
    assert has_odd_automorphism(named_graph("theta"))


def test_sunrise_automorphisms():
    # all edge permutations, each with or without the vertex swap
    auts = automorphisms(named_graph("sunrise"))
    assert len(auts) == 12
    assert len({ep for _, ep in auts}) == 6


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_label_invariant_under_relabelling(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    G = _random_graph(rng, n, rng.randint(1, 7))
    G = WeightedGraph.make(G.edges, [rng.randint(0, 1) for _ in range(n)])
    vperm = list(range(n))
    eperm = list(range(G.num_edges))
    rng.shuffle(vperm)
    rng.shuffle(eperm)
    H = _relabel(G, vperm, eperm)
    assert canonical_label(G).key == canonical_label(H).key
    lab = canonical_label(G)
    assert canonical_label(lab.graph()).key == lab.key


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_graph_polynomial_against_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    G = _random_graph(rng, n, rng.randint(n - 1, 7))
    P = graph_polynomial(G)
    if G.is_connected:
        assert P.as_dict() == _tree_poly_oracle(G)
        assert graph_polynomial(G, method="determinant").as_dict() == P.as_dict()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_matrix_tree_theorem(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    G = _random_graph(rng, n, rng.randint(n, 8))
    if not G.is_connected:
        return
    L = graph_laplacian(G)
    x = [rng.randint(1, 9) for _ in range(G.num_edges)]
    expected = graph_polynomial(G).evaluate(x)
    assert determinant(L.evaluate(x)) == expected
    # any other cycle basis changes the determinant by det(change)^2 = 1
    assert len(fundamental_cycle_basis(G)) == G.loop_number


def test_laplacian_rejects_weights_and_bad_basis():
    with pytest.raises(ValueError):
        graph_laplacian(WeightedGraph.make([(0, 1), (0, 1)], [1, 0]))
    with pytest.raises(ValueError):
        graph_laplacian(named_graph("theta"), [[1, 1, 0], [1, 0, 0]])


def test_bridges_and_cores():
    D = named_graph("dumbbell")
    assert bridges(D) == {1}
    assert max_core(Subgraph(D, frozenset(range(3)))).edge_set == {0, 2}
    assert cycle_rank(D, [0, 2]) == 2
    assert not is_3_edge_connected(D)
    assert is_3_edge_connected(named_graph("theta"))
    assert is_3_edge_connected(named_graph("w3"))


@settings(max_examples=100)
@given(st.permutations(range(6)))
def test_permutation_sign_against_sympy(p):
    from sympy.combinatorics import Permutation

    assert permutation_sign(p) == Permutation(list(p)).signature()
