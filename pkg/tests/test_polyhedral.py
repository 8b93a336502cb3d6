import pytest

from artifact.graphs import bridges, named_graph
from artifact.polyhedral import (
    BlowupSet,
    InadmissibleEdgeError,
    NestedSequence,
    PolyConfig,
    blown_faces,
    check_blowup_axioms,
    cone_is_pointed,
    core_subsets,
    face_lattice,
    graph_blown_face_count,
    graph_blowup_set,
    graph_simplex,
    minimal_blowup_set,
    nested_sequences,
    sequence_contract,
    sequence_refine,
)


def _members(sigma, B):
    return [sigma.trace(W) for W in B.members]


def test_simplex_faces():
    sigma = PolyConfig.of([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert len(face_lattice(sigma.generators)) == 7
    assert sigma.dim == 2
    assert sigma.is_face((0, 1)) and sigma.is_face(())


def test_square_cone_faces():
    # cone over a square: four rays, four facets, diagonals are not faces
    sq = PolyConfig.of([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])
    assert len(sq.facets()) == 4
    assert sq.is_face((0, 1)) and not sq.is_face((0, 2))
    assert len(sq.faces()) == 4 + 4 + 1


def test_pointedness():
    assert cone_is_pointed([[1, 0], [0, 1]])
    assert not cone_is_pointed([[1, 0], [-1, 0]])


def test_meets_in_face():
    sigma = graph_simplex(named_graph("theta"))
    ok, face = sigma.meets_in_face([[1, 0, 0], [0, 1, 0]])
    assert ok and face == (0, 1)
    # a line outside the orthant meets it in the empty face
    ok, face = sigma.meets_in_face([[1, 1, -1]])
    assert ok and face == ()
    # a ray through the interior of an edge-face is not a face
    ok, _ = sigma.meets_in_face([[1, 1, 0]])
    assert not ok


def test_wheel_blown_face_counts():
    W = named_graph("w3")
    sigma = graph_simplex(W)
    B = graph_blowup_set(W)
    check_blowup_axioms(B, sigma)
    faces = blown_faces(sigma, _members(sigma, B))
    counts = [sum(f.codim == k for f in faces) for k in range(6)]
    assert counts == [graph_blown_face_count(W, k) for k in range(6)]
    # facets: one per non-self edge and one per proper core subgraph
    assert counts[0] == 1
    assert counts[1] == W.num_edges + len(core_subsets(W))


@pytest.mark.parametrize("name", ["theta", "dumbbell", "k4"])
def test_blown_face_counts_agree(name):
    G = named_graph(name)
    sigma = graph_simplex(G)
    faces = blown_faces(sigma, _members(sigma, graph_blowup_set(G)))
    for k in range(G.num_edges):
        assert sum(f.codim == k for f in faces) == graph_blown_face_count(G, k)


def test_blown_faces_without_members_are_faces():
    sigma = graph_simplex(named_graph("theta"))
    faces = blown_faces(sigma, [])
    assert len(faces) == 7
    assert not any(f.is_exceptional for f in faces)


def test_blowup_axioms_violation():
    sigma = graph_simplex(named_graph("theta"))
    # a subspace cutting the interior of the simplex breaks the face condition
    with pytest.raises(ValueError):
        check_blowup_axioms(BlowupSet.of([[[1, 1, 0]]]), sigma)
    # two coordinate planes without their common line are not closed under intersection
    B = BlowupSet.of([[[1, 0, 0], [0, 1, 0]], [[1, 0, 0], [0, 0, 1]]])
    with pytest.raises(ValueError):
        check_blowup_axioms(B, sigma)


def test_minimal_blowup_set_is_closed():
    G = named_graph("w3")
    sigma = graph_simplex(G)
    B = minimal_blowup_set(graph_blowup_set(G, kind="core"), sigma)
    check_blowup_axioms(B, sigma)
    assert len(B) == len(graph_blowup_set(G, kind="core"))


def test_core_subsets_are_bridgeless():
    G = named_graph("dumbbell")
    subs = core_subsets(G)
    assert set(subs) == {frozenset({0}), frozenset({2}), frozenset({0, 2})}
    assert all(not bridges(G, S) for S in subs)


def test_nested_sequence_validation():
    G = named_graph("dumbbell")
    with pytest.raises(ValueError):
        NestedSequence(G, (frozenset({0, 1}),))
    with pytest.raises(ValueError):
        NestedSequence(G, (frozenset({1}), frozenset({0, 1, 2})))
    s = NestedSequence(G, (frozenset({0}), frozenset({0, 1, 2})))
    assert s.blocks() == [[0], [1, 2]] and s.edge_degree == 2
    assert s.colors() == (0, 1, 1)


def test_sequence_contract_and_refine():
    G = named_graph("dumbbell")
    s = NestedSequence(G, (frozenset({0}), frozenset({0, 1, 2})))
    assert s.is_admissible(1) and not s.is_admissible(0) and not s.is_admissible(2)
    t, emap = sequence_contract(s, 1)
    assert t.graph.num_edges == 2 and t.chain[0] == frozenset({emap[0]})
    with pytest.raises(InadmissibleEdgeError):
        sequence_contract(s, 0)
    with pytest.raises(IndexError):
        sequence_contract(s, 9)
    r = sequence_refine(NestedSequence(G, (frozenset({0, 1, 2}),)), {2})
    assert r.chain[0] == frozenset({2})
    with pytest.raises(ValueError):
        sequence_refine(s, {1})


def test_nested_sequence_count_of_theta():
    # theta: cores are the three two-edge cycles; chains end at the whole graph
    assert len(nested_sequences(named_graph("theta"))) == 4
