import random
from dataclasses import dataclass, field

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from artifact.complexes import (
    ChainComplex,
    D2Error,
    _oriented,
    betti,
    betti_csv,
    boundary_subcomplex_ids,
    face_complex,
    gc0B_complex,
    gc0_complex,
    long_exact_check,
    perfect_face_complex,
    relative_graph_face_complex,
)
from artifact.graphs import WeightedGraph, canonical_label, enumerate_stable_graphs, has_odd_automorphism


@dataclass
class Cell:
    id: int
    dim: int
    orientable: bool = True
    facets: list = field(default_factory=list)


def test_point():
    C = face_complex([Cell(0, 0)])
    assert betti(C) == {0: 1}


def test_circle_from_two_cells():
    # two vertices joined by two edges
    cells = [Cell(0, 0), Cell(1, 0), Cell(2, 1, facets=[(1, 1), (0, -1)]), Cell(3, 1, facets=[(1, 1), (0, -1)])]
    assert betti(face_complex(cells)) == {0: 1, 1: 1}


def test_non_orientable_and_relative_cells_are_dropped():
    cells = [Cell(0, 0), Cell(1, 1, orientable=False, facets=[(0, 1)]), Cell(2, 1, facets=[(0, 1)])]
    C = face_complex(cells, relative_to=[2])
    assert C.generators == {0: [0]}


def test_missing_automorphism_data():
    @dataclass
    class Bare:
        id: int
        dim: int

    with pytest.raises(ValueError, match="missing automorphism data"):
        face_complex([Bare(0, 0)])


def test_d_squared_failure_names_generator():
    C = ChainComplex({0: ["p"], 1: ["e"], 2: ["f"]}, {1: {(0, 0): 1}, 2: {(0, 0): 1}})
    with pytest.raises(D2Error, match="'f'"):
        betti(C)


def test_betti_csv():
    assert betti_csv({5: 0, 6: 1}) == "degree,rank\n5,0\n6,1\n"


def test_perfect_complex_genus_two_is_acyclic_reduced():
    assert betti(perfect_face_complex(2)) == {0: 1}


def test_gc0_genus_two_is_empty_and_genus_three():
    assert gc0_complex(2).generators == {}
    C = gc0_complex(3)
    assert betti(C) == {5: 0, 6: 1}


def test_rational_and_modular_ranks_agree_for_large_prime():
    for C in (gc0_complex(3), gc0B_complex(3), relative_graph_face_complex(3)):
        assert betti(C, 1_000_003) == betti(C)


def test_integral_homology_is_consistent_with_mod_p():
    C = gc0_complex(3)
    H = C.integral_homology()
    assert {k: r for k, (r, _) in H.items()} == C.betti()
    for k, (_, torsion) in H.items():
        for d in torsion:
            p = min(q for q in range(2, d + 1) if d % q == 0)
            assert betti(C, p)[k] > C.betti()[k]


@pytest.mark.parametrize("C", [gc0_complex(3), gc0B_complex(3), relative_graph_face_complex(3)], ids=["gc0", "gc0B", "rel"])
def test_euler_characteristic_consistency(C):
    b = betti(C)
    assert C.euler_characteristic() == sum((-1) ** k * v for k, v in b.items())


def test_relative_face_complex_equals_gc0_with_shift():
    g = 3
    rel = relative_graph_face_complex(g)
    gc = gc0_complex(g)
    graphs = enumerate_stable_graphs(g, weight_zero_only=True)
    keys = {i: canonical_label(G).key for i, G in enumerate(graphs)}
    shifted = rel.shifted(1)
    assert {k: [keys[i] for i in v] for k, v in shifted.generators.items()} == gc.generators
    for k in gc.degrees:
        a = {ij: v for ij, v in shifted.boundary.get(k, {}).items() if v}
        b = {ij: v for ij, v in gc.boundary.get(k, {}).items() if v}
        assert a == b


@pytest.mark.parametrize("g", [2, 3])
def test_single_block_generators_are_the_graph_complex(g):
    C = gc0B_complex(g)
    sub = boundary_subcomplex_ids(C)
    single = {k: C.size(k) - len(sub.get(k, [])) for k in C.degrees}
    gc = gc0_complex(g)
    assert {k: v for k, v in single.items() if v} == {k: gc.size(k) for k in gc.degrees}


def test_boundary_subcomplex_is_closed_under_d():
    C = gc0B_complex(3)
    sub = boundary_subcomplex_ids(C)
    for k in C.degrees:
        inside = set(sub.get(k, []))
        below = set(sub.get(k - 1, []))
        for (i, j), v in C.boundary.get(k, {}).items():
            if v and j in inside:
                assert i in below


@pytest.mark.parametrize("g", [2, 3])
def test_long_exact_sequence(g):
    rep = long_exact_check(g)
    assert rep.exact, rep.failures
    assert rep.quotient_matches_gc0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_orientation_sign_is_coherent_under_relabelling(seed):
    rng = random.Random(seed)
    G = rng.choice(enumerate_stable_graphs(3, weight_zero_only=True))
    m = G.num_edges
    colors = [rng.randrange(2) for _ in range(m)]
    # orientations are only defined without an odd automorphism
    assume(not has_odd_automorphism(G, colors))
    order = list(range(m))
    rng.shuffle(order)
    eperm = list(range(m))
    rng.shuffle(eperm)
    edges = [None] * m
    new_colors = [None] * m
    for e in range(m):
        edges[eperm[e]] = G.edges[e]
        new_colors[eperm[e]] = colors[e]
    H = WeightedGraph.make(edges, G.weights)
    # the same geometric ordering, written in the new labels, has the same sign
    assert _oriented(G, colors, order) == _oriented(H, new_colors, [eperm[e] for e in order])
    # swapping two edges in the ordering flips it
    if m >= 2:
        swapped = order[:]
        swapped[0], swapped[1] = swapped[1], swapped[0]
        key, s = _oriented(G, colors, order)
        assert _oriented(G, colors, swapped) == (key, -s)
