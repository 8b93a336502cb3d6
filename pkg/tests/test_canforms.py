import itertools
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from artifact.canforms import (
    BoundaryEvaluationError,
    CanonicalForm,
    ConePatch,
    StokesReport,
    coproduct,
    evaluate_pullback,
    genus_split,
    hodge_star,
    integrate_cone,
    parse_form,
    pullback_density,
    strictly_positive_faces,
    triangulate,
    volume_form,
    zeta,
)
from artifact.graphs import permutation_sign
from artifact.quadforms import Cone, named_cone, sym_vec


def _permutation_sum_density(A):
    """Coefficient of dt_1..dt_k in tr((X^-1 dX)^k): signed sum over orderings of the tangents."""
    B, k = A.shape[:2]
    out = np.zeros(B)
    for perm in itertools.permutations(range(k)):
        M = A[:, perm[0]]
        for i in perm[1:]:
            M = M @ A[:, i]
        out += permutation_sign(perm) * np.trace(M, axis1=1, axis2=2)
    return out


def test_parse_and_print():
    f = parse_form("w5^1*w9^1")
    assert str(f) == "w5^1*w9^1"
    assert parse_form("w9*w5") == -f
    assert parse_form("w5*w5").is_zero()
    assert parse_form("2*w5 + -1/3*w9").as_dict() == {(5,): 2, (9,): Fraction(-1, 3)}
    with pytest.raises(ValueError):
        parse_form("x5")


def test_wedge_is_graded_commutative():
    a, b = CanonicalForm.generator(5), CanonicalForm.generator(9)
    assert a.wedge(b) == -(b.wedge(a))
    assert a.wedge(a).is_zero()
    assert (a ^ b).degree == 14


def test_coproduct_of_generator_and_product():
    cop = {(str(l), str(r)): c for l, r, c in coproduct(parse_form("w5"))}
    assert cop == {("1", "w5^1"): 1, ("w5^1", "1"): 1}
    cop = {(str(l), str(r)): c for l, r, c in coproduct(parse_form("w5*w9"))}
    assert cop == {
        ("1", "w5^1*w9^1"): 1,
        ("w5^1", "w9^1"): 1,
        ("w9^1", "w5^1"): -1,
        ("w5^1*w9^1", "1"): 1,
    }


def test_coproduct_is_coassociative():
    f = parse_form("w5*w9*w13")

    def left_then(cop_side):
        acc = {}
        for l, r, c in coproduct(f):
            if cop_side == "left":
                for ll, lr, c2 in coproduct(l):
                    key = (str(ll), str(lr), str(r))
                    acc[key] = acc.get(key, 0) + c * c2
            else:
                for rl, rr, c2 in coproduct(r):
                    key = (str(l), str(rl), str(rr))
                    acc[key] = acc.get(key, 0) + c * c2
        return {k: v for k, v in acc.items() if v}

    assert left_then("left") == left_then("right")


def test_hodge_star_genus_seven():
    g = 7
    vol = volume_form(g)
    assert str(vol) == "w5^1*w9^1*w13^1"
    assert hodge_star(CanonicalForm.one(), g) == vol
    assert hodge_star(parse_form("w9"), g) == -parse_form("w5*w13")
    for mono in [(), (5,), (9,), (13,), (5, 9), (5, 13), (9, 13), (5, 9, 13)]:
        w = CanonicalForm.of({mono: 1})
        star = hodge_star(w, g)
        assert w.wedge(star) == vol
        # the star is an involution up to sign
        assert hodge_star(star, g) in (w, -w)


def test_genus_split_and_errors():
    compact, noncompact = genus_split(parse_form("w5 + w5*w9"), 5)
    assert compact == parse_form("w5*w9") and noncompact == parse_form("w5")
    with pytest.raises(ValueError, match="not in Omega"):
        hodge_star(parse_form("w13"), 5)
    with pytest.raises(ValueError, match="odd"):
        volume_form(4)


@pytest.mark.parametrize("g", [3, 4])
def test_density_against_permutation_sum(g):
    rng = np.random.default_rng(g)
    A = rng.normal(size=(7, 5, g, g))
    assert np.allclose(pullback_density(parse_form("w5"), A), _permutation_sum_density(A), rtol=1e-10, atol=1e-10)


def test_density_degree_mismatch():
    with pytest.raises(ValueError):
        pullback_density(parse_form("w5"), np.zeros((1, 4, 3, 3)))


def test_evaluate_pullback_errors():
    patch = ConePatch.from_vectors([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1)])
    with pytest.raises(ValueError):
        evaluate_pullback(parse_form("w5"), patch, [0.1] * 4)
    with pytest.raises(BoundaryEvaluationError):
        evaluate_pullback(parse_form("w5"), patch, [1.0, 0, 0, 0, 0])
    assert np.isfinite(evaluate_pullback(parse_form("w5"), patch, [0.15] * 5))


@pytest.mark.parametrize("name", ["q3", "d4"])
def test_triangulation_covers_cone_once(name):
    cone = named_cone(name)
    pts = [sym_vec(v) for v in cone.generators]
    r = len(pts[0])
    simplices = triangulate(pts)
    P = np.array(pts, dtype=float)
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.exponential(size=len(pts)) @ P
        hits = 0
        for s in simplices:
            coef = np.linalg.solve(P[list(s)].T, x)
            hits += bool(np.all(coef > 1e-9))
        assert hits == 1
    assert all(len(s) == r for s in simplices)


def test_integration_is_thread_invariant():
    f, q3 = parse_form("w5"), named_cone("q3")
    a = integrate_cone(f, q3, 20000, 11, threads=1)
    b = integrate_cone(f, q3, 20000, 11, threads=4)
    assert (a.value, a.stderr) == (b.value, b.stderr)
    c = integrate_cone(f, q3, 20000, 12, threads=1)
    assert c.value != a.value


def test_wheel_integral_moderate_sample():
    est = integrate_cone(parse_form("w5"), named_cone("q3"), 200_000, 5, threads=4)
    assert est.stderr < 1.0
    assert abs(est.value - 60 * float(mpmath.zeta(3))) < 4 * est.stderr


def test_integration_input_errors():
    with pytest.raises(ValueError):
        integrate_cone(parse_form("w9"), named_cone("q3"), 100, 1)
    degenerate = Cone.of(3, [(1, 0, 0), (0, 1, 0), (1, 1, 0), (1, -1, 0)])
    with pytest.raises(ValueError):
        integrate_cone(parse_form("w5"), degenerate, 100, 1)


def test_strictly_positive_faces_of_d4():
    cone = named_cone("d4")
    faces = strictly_positive_faces(cone, 6)
    assert faces
    for f in faces[:50]:
        gens = np.array([cone.generators[i] for i in f], dtype=float)
        sym = np.array([sym_vec(cone.generators[i]) for i in f], dtype=float)
        assert np.linalg.matrix_rank(sym) == 7
        # no common kernel vector: the generators span Q^4
        assert np.linalg.matrix_rank(gens) == 4


def test_stokes_report_threshold():
    assert StokesReport((0,), [], 0.5, 0.2).within
    assert not StokesReport((0,), [], 0.7, 0.2).within


@pytest.mark.parametrize("s", [2, 3, 5, 9])
def test_zeta_against_mpmath(s):
    assert abs(zeta(s) - float(mpmath.zeta(s))) < 1e-15
    with pytest.raises(ValueError):
        zeta(1)


def test_stderr_scales_with_inverse_square_root():
    f, q3 = parse_form("w5"), named_cone("q3")

    def median_stderr(n):
        return float(np.median([integrate_cone(f, q3, n, seed, threads=8).stderr for seed in (1, 2, 3)]))

    # two decades of n: ideal ratio 10
    ratio = median_stderr(10**4) / median_stderr(10**6)
    assert 5 < ratio < 20
