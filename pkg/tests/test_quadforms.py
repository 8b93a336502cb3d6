import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.exactlin import determinant
from artifact.quadforms import (
    Cone,
    KernelFlag,
    PosDefForm,
    apply_to_vectors,
    cone_automorphisms,
    cone_equivalent,
    cone_facets,
    cone_faces,
    cone_null_space,
    cone_of_form,
    d4_form,
    essential_envelope,
    form_value,
    is_perfect,
    lll_basis,
    minimal_vectors,
    named_cone,
    oriented_sign,
    principal_form,
    sym_vec,
)


def _brute_minimal_vectors(Q, bound=3):
    g = len(Q)
    vals = {}
    for x in itertools.product(range(-bound, bound + 1), repeat=g):
        if any(x):
            vals[x] = form_value(Q, x)
    m = min(vals.values())
    return m, {x for x, v in vals.items() if v == m}


def _brute_facets(vectors):
    """Facets of a pointed cone by checking every rank-deficient subset (sympy nullspaces)."""
    M = sympy.Matrix(vectors)
    r = M.rank()
    n = len(vectors)
    found = set()
    for size in range(r - 1, n):
        for S in itertools.combinations(range(n), size):
            sub = M.extract(list(S), list(range(M.cols)))
            if sub.rank() != r - 1:
                continue
            # normals within the span of all vectors
            ns = sympy.Matrix.vstack(sub, sympy.zeros(0, M.cols)).nullspace()
            for nvec in ns:
                vals = [int(sympy.sign((M.row(i) * nvec)[0])) for i in range(n)]
                rest = [vals[i] for i in range(n) if i not in S]
                if rest and (all(v > 0 for v in rest) or all(v < 0 for v in rest)):
                    if all(vals[i] == 0 for i in S):
                        found.add(tuple(i for i in range(n) if vals[i] == 0))
    return found


def _random_unimodular(rng, g):
    A = [[int(i == j) for j in range(g)] for i in range(g)]
    for _ in range(6):
        i, j = rng.sample(range(g), 2)
        c = rng.choice([-1, 1])
        for row in A:
            row[i] += c * row[j]
    return A


@pytest.mark.parametrize("Q", [principal_form(2), principal_form(3), d4_form(), [[2, 1], [1, 3]]])
def test_minimal_vectors_against_brute_force(Q):
    m, vecs = minimal_vectors(Q)
    bm, bvecs = _brute_minimal_vectors(Q)
    assert m == bm
    assert {v for v in vecs} | {tuple(-x for x in v) for v in vecs} == bvecs


def test_lll_basis_is_unimodular():
    Q = [[10, 7, 3], [7, 6, 2], [3, 2, 5]]
    B = lll_basis(Q)
    assert abs(determinant(B)) == 1


def test_perfection():
    assert is_perfect(principal_form(2))
    assert is_perfect(principal_form(3))
    assert is_perfect(d4_form())
    assert not is_perfect([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        PosDefForm.of([[1, 2], [2, 1]])


def test_named_cones():
    assert named_cone("q3").dim == 5 and len(named_cone("q3").generators) == 6
    d4 = named_cone("d4")
    assert len(d4.generators) == 12 and d4.dim == 9
    assert len(cone_facets(d4)) == 64
    with pytest.raises(KeyError):
        named_cone("e8")


@pytest.mark.parametrize("name", ["a2", "q3"])
def test_facets_against_brute_force(name):
    c = named_cone(name)
    vecs = [sym_vec(v) for v in c.generators]
    assert {f for f, _ in cone_facets(c)} == _brute_facets(vecs)
    for f, fn in cone_facets(c):
        for i, v in enumerate(vecs):
            val = sum(Fraction(a) * b for a, b in zip(fn, v))
            assert (val == 0) if i in f else (val > 0)


def test_faces_and_envelopes_of_principal_cone():
    c = named_cone("q3")
    faces = cone_faces(c)
    # the principal cone in genus 3 is simplicial with six rays
    assert len(faces) == 2**6 - 1
    assert essential_envelope(c, ()) == tuple(range(6))
    for f in faces:
        env = essential_envelope(c, f)
        assert set(f) <= set(env)
        assert essential_envelope(c, env) == env


def test_null_space():
    assert cone_null_space([(1, 0, 0), (0, 1, 0), (1, 1, 0)]) == [[0, 0, 1]]
    assert cone_null_space([(1, 0), (0, 1)]) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_cone_equivalence_under_unimodular_maps(seed):
    rng = random.Random(seed)
    c = named_cone("q3")
    A = _random_unimodular(rng, 3)
    image = Cone.of(3, apply_to_vectors(A, c.generators))
    M = cone_equivalent(c, image)
    assert M is not None and abs(determinant(M)) == 1
    assert sorted(apply_to_vectors(M, c.generators)) == sorted(image.generators)


def test_inequivalent_cones():
    assert cone_equivalent(named_cone("a2"), Cone.of(2, [(1, 0), (0, 1)])) is None


def test_automorphism_group_orders():
    # GL_2(Z) stabilizer of the A2 perfect cone modulo ±1
    assert len(cone_automorphisms(named_cone("a2"))) == 6
    assert len(cone_automorphisms(named_cone("q3"))) == 24


def test_cone_json_roundtrip():
    c = named_cone("d4")
    assert Cone.from_json(c.to_json()) == c
    assert cone_of_form(principal_form(2)) == named_cone("a2")


def test_oriented_sign():
    frame = [(1, 0), (0, 1)]
    assert oriented_sign(frame, [(1, 0), (0, 1)]) == 1
    assert oriented_sign(frame, [(0, 1), (1, 0)]) == -1
    with pytest.raises(ValueError):
        oriented_sign(frame, [(1, 1), (2, 2)])


def test_kernel_flag_validation():
    KernelFlag(3, (((1, 0, 0),), ((1, 0, 0), (0, 1, 0))))
    with pytest.raises(ValueError):
        KernelFlag(3, (((1, 0, 0),), ((0, 1, 0),)))
    with pytest.raises(ValueError):
        KernelFlag(3, (((1, 0, 0),), ((1, 0, 0),)))
