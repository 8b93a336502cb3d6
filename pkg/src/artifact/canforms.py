"""Canonical forms tr((X^-1 dX)^(4k+1)): algebra, pullback densities and cone integrals.

A form is a rational combination of monomials; a monomial is a strictly
increasing tuple of degrees from 5, 9, 13, ...  The generators are odd,
so reordering a wedge product costs the sign of the sorting permutation.

Numerics are double precision.  Cones are triangulated exactly; each
simplex is sampled uniformly with Dirichlet draws, one RNG stream per
(seed, term, patch, chunk), and chunk results are reduced in a fixed
order so the thread count never changes the output.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactlin import determinant, rational_rank
from .graphs import permutation_sign
from .quadforms import (
    Cone,
    _basis_indices,
    _coords_in,
    cone_faces,
    cone_facets,
    cone_null_space,
    essential_envelope,
    named_cone,
    oriented_sign,
    sym_vec,
)
from .exactlin import complete_basis, saturate

__all__ = [
    "CanonicalForm",
    "parse_form",
    "coproduct",
    "genus_split",
    "hodge_star",
    "volume_form",
    "ConePatch",
    "IntegralEstimate",
    "evaluate_pullback",
    "pullback_density",
    "triangulate",
    "integrate_cone",
    "stokes_residual",
    "StokesReport",
    "strictly_positive_faces",
    "zeta",
    "BoundaryEvaluationError",
    "ORIENTATION_SIGN",
    "CHUNK",
]

CHUNK = 8192
PIVOT_TOL = 1e-12
# Dirichlet concentration of the importance sampler; below 1 it oversamples
# the faces where the density is singular and keeps the variance finite
DIRICHLET_ALPHA = 0.4


class BoundaryEvaluationError(ArithmeticError):
    pass


# ------------------------------------------------------------------ algebra


def _sort_sign(degs: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    if len(set(degs)) != len(degs):
        return 0, ()
    order = sorted(range(len(degs)), key=lambda i: degs[i])
    return permutation_sign(order), tuple(degs[i] for i in order)


def _check_degree(k: int) -> None:
    if k < 5 or (k - 5) % 4:
        raise ValueError(f"no canonical generator of degree {k}")


@dataclass(frozen=True)
class CanonicalForm:
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    @classmethod
    def of(cls, data: Mapping[Sequence[int], object] | Iterable) -> "CanonicalForm":
        items = data.items() if isinstance(data, Mapping) else data
        acc: dict[tuple[int, ...], Fraction] = {}
        for mono, c in items:
            mono = tuple(int(x) for x in mono)
            for k in mono:
                _check_degree(k)
            s, key = _sort_sign(mono)
            if s:
                acc[key] = acc.get(key, Fraction(0)) + s * Fraction(c)
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def one(cls) -> "CanonicalForm":
        return cls.of({(): 1})

    @classmethod
    def generator(cls, k: int) -> "CanonicalForm":
        return cls.of({(k,): 1})

    def as_dict(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self.terms)

    def __add__(self, other: "CanonicalForm") -> "CanonicalForm":
        return CanonicalForm.of(list(self.terms) + list(other.terms))

    def __neg__(self) -> "CanonicalForm":
        return CanonicalForm(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: "CanonicalForm") -> "CanonicalForm":
        return self + (-other)

    def scale(self, c) -> "CanonicalForm":
        return CanonicalForm.of([(k, v * Fraction(c)) for k, v in self.terms])

    def wedge(self, other: "CanonicalForm") -> "CanonicalForm":
        return CanonicalForm.of([(a + b, x * y) for a, x in self.terms for b, y in other.terms])

    __xor__ = wedge

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> set[int]:
        return {sum(k) for k, _ in self.terms}

    @property
    def degree(self) -> int:
        ds = self.degrees
        if len(ds) != 1:
            raise ValueError("form is not homogeneous")
        return ds.pop()

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.terms:
            body = "*".join(f"w{k}^1" for k in mono) or "1"
            parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)


_TERM = re.compile(r"^(?:(-?\d+(?:/\d+)?)\*)?(.*)$")


def parse_form(text: str) -> CanonicalForm:
    """Parse strings like ``w5``, ``w5^1*w9^1`` or ``2*w5*w9 + -1/3*w13``."""
    items = []
    for raw in text.replace(" ", "").split("+"):
        if not raw:
            raise ValueError(f"cannot parse form {text!r}")
        m = _TERM.match(raw)
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        mono: list[int] = []
        body = m.group(2)
        if body not in ("", "1"):
            for f in body.split("*"):
                fm = re.fullmatch(r"w(\d+)(?:\^(\d+))?", f)
                if not fm:
                    raise ValueError(f"cannot parse factor {f!r}")
                mono += [int(fm.group(1))] * int(fm.group(2) or 1)
        items.append((tuple(mono), coeff))
    return CanonicalForm.of(items)


def _shuffle_sign(left: Sequence[int], right: Sequence[int]) -> int:
    return _sort_sign(tuple(left) + tuple(right))[0]


def coproduct(form: CanonicalForm) -> list[tuple[CanonicalForm, CanonicalForm, Fraction]]:
    """Shuffle expansion: list of (left, right, coefficient) with monomial left and right factors."""
    acc: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
    for mono, c in form.terms:
        n = len(mono)
        for r in range(n + 1):
            for S in combinations(range(n), r):
                left = tuple(mono[i] for i in S)
                right = tuple(mono[i] for i in range(n) if i not in S)
                key = (left, right)
                acc[key] = acc.get(key, Fraction(0)) + c * _shuffle_sign(left, right)
    return [
        (CanonicalForm.of({a: 1}), CanonicalForm.of({b: 1}), v) for (a, b), v in sorted(acc.items()) if v
    ]


def _genus_degrees(g: int) -> tuple[int, ...]:
    if g < 3 or g % 2 == 0:
        raise ValueError("genus must be odd and greater than 1")
    return tuple(range(5, 2 * g, 4))


def volume_form(g: int) -> CanonicalForm:
    return CanonicalForm.of({_genus_degrees(g): 1})


def _check_in_genus(form: CanonicalForm, g: int) -> tuple[int, ...]:
    degs = _genus_degrees(g)
    for mono, _ in form.terms:
        if any(k > 2 * g - 1 for k in mono):
            raise ValueError("not in Omega(g)")
    return degs


def genus_split(form: CanonicalForm, g: int) -> tuple[CanonicalForm, CanonicalForm]:
    """(compact part, non-compact part): compact monomials are divisible by the top generator."""
    _check_in_genus(form, g)
    top = 2 * g - 1
    comp = CanonicalForm(tuple(t for t in form.terms if top in t[0]))
    nonc = CanonicalForm(tuple(t for t in form.terms if top not in t[0]))
    return comp, nonc


def hodge_star(form: CanonicalForm, g: int) -> CanonicalForm:
    """Linear extension of star(w_S) = sign * w_(complement of S) with w_S ^ star(w_S) = vol_g."""
    degs = _check_in_genus(form, g)
    items = []
    for mono, c in form.terms:
        rest = tuple(k for k in degs if k not in mono)
        items.append((rest, c * _shuffle_sign(mono, rest)))
    return CanonicalForm.of(items)


# ---------------------------------------------------------------- densities


def _ldl_inverse(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched inverse through LDL^T; returns (inverse, ok mask) where ok rejects tiny pivots."""
    B, g, _ = X.shape
    L = np.zeros_like(X)
    D = np.zeros((B, g))
    scale = np.max(np.abs(np.diagonal(X, axis1=1, axis2=2)), axis=1)
    ok = np.isfinite(scale) & (scale > 0)
    for j in range(g):
        D[:, j] = X[:, j, j] - np.einsum("bk,bk,bk->b", L[:, j, :j], L[:, j, :j], D[:, :j])
        ok &= D[:, j] > PIVOT_TOL * scale
        Dj = np.where(ok, D[:, j], 1.0)
        L[:, j, j] = 1.0
        for i in range(j + 1, g):
            L[:, i, j] = (X[:, i, j] - np.einsum("bk,bk,bk->b", L[:, i, :j], L[:, j, :j], D[:, :j])) / Dj
    # invert the unit lower-triangular factor by forward substitution
    Linv = np.zeros_like(X)
    for i in range(g):
        Linv[:, i, i] = 1.0
        for j in range(i):
            Linv[:, i, j] = -np.einsum("bk,bk->b", L[:, i, j:i], Linv[:, j:i, j])
    Dinv = 1.0 / np.where(ok[:, None], D, 1.0)
    inv = np.einsum("bki,bk,bkj->bij", Linv, Dinv, Linv)
    return inv, ok


def _popcount_above(mask: int, i: int) -> int:
    return bin(mask >> (i + 1)).count("1")


def _cross_sign(m1: int, m2: int) -> int:
    """Sign of reordering theta_m1 theta_m2 into increasing order."""
    n = 0
    b = m2
    while b:
        low = b & -b
        n += bin(m1 & ~((low << 1) - 1)).count("1")
        b ^= low
    return -1 if n % 2 else 1


def _trace_powers(A: np.ndarray, wanted: set[int]) -> dict[int, dict[int, np.ndarray]]:
    """Grassmann expansion of tr(M^a), M = sum_i A_i theta_i, for each a in ``wanted``.

    Returns a -> {mask: (B,) coefficients} over masks of popcount a.
    """
    B, d, g, _ = A.shape
    out: dict[int, dict[int, np.ndarray]] = {}
    if not wanted:
        return out
    top = max(wanted)
    power = {1 << i: A[:, i] for i in range(d)}
    if 1 in wanted:
        out[1] = {m: np.trace(P, axis1=1, axis2=2) for m, P in power.items()}
    for a in range(2, top + 1):
        nxt: dict[int, np.ndarray] = {}
        for m, P in power.items():
            for i in range(d):
                if m >> i & 1:
                    continue
                term = P @ A[:, i]
                if _popcount_above(m, i) % 2:
                    term = -term
                key = m | (1 << i)
                if key in nxt:
                    nxt[key] += term
                else:
                    nxt[key] = term
        power = nxt
        if a in wanted:
            out[a] = {m: np.trace(P, axis1=1, axis2=2) for m, P in power.items()}
    return out


def pullback_density(form: CanonicalForm, A: np.ndarray) -> np.ndarray:
    """Coefficient of dt_1...dt_d in the pullback, given A[b, i] = X^-1 dX/dt_i at each sample b."""
    B, d = A.shape[:2]
    full = (1 << d) - 1
    for mono, _ in form.terms:
        if sum(mono) != d:
            raise ValueError(f"form of degree {sum(mono)} on a {d}-dimensional patch")
    if d == 0:
        return np.full(B, float(sum(c for _, c in form.terms)))
    wanted = {k for mono, _ in form.terms for k in mono}
    traces = _trace_powers(A, wanted)
    total = np.zeros(B)
    for mono, c in form.terms:
        acc = {0: np.ones(B)}
        for k in mono:
            nxt: dict[int, np.ndarray] = {}
            for m1, v1 in acc.items():
                for m2, v2 in traces[k].items():
                    if m1 & m2:
                        continue
                    key = m1 | m2
                    term = v1 * v2 * _cross_sign(m1, m2)
                    nxt[key] = nxt[key] + term if key in nxt else term
            acc = nxt
        total += float(c) * acc.get(full, np.zeros(B))
    return total


@dataclass(frozen=True)
class ConePatch:
    """Simplex with vertex forms W_0..W_d, parametrized by X(t) = sum t_i W_i."""

    vertices: tuple[np.ndarray, ...]
    sign: int = 1

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]], sign: int = 1) -> "ConePatch":
        return cls(tuple(np.outer(v, v).astype(float) for v in vectors), sign)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def g(self) -> int:
        return self.vertices[0].shape[0]


def _tangents(patch: ConePatch) -> np.ndarray:
    W = np.stack(patch.vertices)
    return W[1:] - W[0]


def _density_at(form: CanonicalForm, patch: ConePatch, T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Densities at barycentric points T (B, d+1); returns (values, ok mask)."""
    W = np.stack(patch.vertices)
    X = np.einsum("bi,ijk->bjk", T, W)
    inv, ok = _ldl_inverse(X)
    dW = _tangents(patch)
    A = np.einsum("bjk,ikl->bijl", inv, dW)
    vals = pullback_density(form, A)
    return np.where(ok, vals, 0.0), ok


def evaluate_pullback(form: CanonicalForm, patch: ConePatch, t: Sequence[float]) -> float:
    """Density at one point; ``t`` holds the d affine coordinates (t_0 = 1 - sum t)."""
    t = np.asarray(t, dtype=float)
    if t.shape != (patch.dim,):
        raise ValueError("point has the wrong dimension")
    if form.degree != patch.dim:
        raise ValueError("form degree differs from the patch dimension")
    T = np.concatenate([[1.0 - t.sum()], t])[None, :]
    vals, ok = _density_at(form, patch, T)
    if not ok[0]:
        raise BoundaryEvaluationError("boundary evaluation")
    return float(vals[0])


# ------------------------------------------------------------ triangulation


def _frame_coords(frame: Sequence[Sequence[int]], vectors: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    return [_coords_in(frame, v) for v in vectors]


def triangulate(points: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Placing triangulation of the cone over ``points`` (full rank r in Q^r), in the given order.

    Each simplex is a tuple of r point indices.
    """
    pts = [[Fraction(x) for x in p] for p in points]
    r = len(pts[0])
    start: list[int] = []
    for i in range(len(pts)):
        if rational_rank([pts[j] for j in start + [i]]) == len(start) + 1:
            start.append(i)
        if len(start) == r:
            break
    if len(start) != r:
        raise ValueError("points do not span")
    simplices = [tuple(start)]
    for i in range(len(pts)):
        if i in start:
            continue
        p = pts[i]
        count: dict[frozenset, int] = {}
        owner: dict[frozenset, tuple[int, ...]] = {}
        for s in simplices:
            for k in range(r):
                f = frozenset(s[:k] + s[k + 1 :])
                count[f] = count.get(f, 0) + 1
                owner[f] = s
        new = []
        for f, c in count.items():
            if c != 1:
                continue
            s = owner[f]
            fl = sorted(f)
            apex = next(x for x in s if x not in f)
            side_apex = determinant([pts[j] for j in fl] + [pts[apex]])
            side_p = determinant([pts[j] for j in fl] + [p])
            if side_apex * side_p < 0:
                new.append(tuple(fl) + (i,))
        simplices += new
    return simplices


def _cone_patches(
    frame_vecs: Sequence[Sequence[int]],
    orient_vecs: Sequence[Sequence[int]],
    gram_vectors: Sequence[Sequence[int]],
) -> list[ConePatch]:
    """Patches of the cone over ``orient_vecs`` (sym_vec coordinates), oriented against ``frame_vecs``.

    ``gram_vectors[i]`` gives the rank-one form used for density evaluation at vertex i.
    """
    coords = _frame_coords(frame_vecs, orient_vecs)
    patches = []
    for s in triangulate(coords):
        sign = oriented_sign(frame_vecs, [orient_vecs[i] for i in s])
        patches.append(ConePatch.from_vectors([gram_vectors[i] for i in s], sign))
    return patches


# -------------------------------------------------------------- Monte Carlo


@dataclass
class IntegralEstimate:
    value: float
    stderr: float
    n_samples: int
    seed: int
    patches: list[dict] = field(default_factory=list)
    rejected: int = 0

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "value": self.value,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "rejected": self.rejected,
            "patches": self.patches,
        }


def _chunk_stats(form, patch: ConePatch, n: int, key: Sequence[int], alpha: float = 1.0) -> tuple[float, float, int, int]:
    """(sum, sum of squares, count, rejected) of density / sampling pdf over n Dirichlet(alpha) draws."""
    rng = np.random.default_rng(np.random.SeedSequence(list(key)))
    d = patch.dim
    log_norm = math.lgamma((d + 1) * alpha) - (d + 1) * math.lgamma(alpha)
    got: list[np.ndarray] = []
    have = 0
    rejected = 0
    while have < n:
        T = rng.dirichlet(np.full(d + 1, alpha), size=n - have)
        with np.errstate(divide="ignore"):
            log_pdf = log_norm + (alpha - 1.0) * np.log(T).sum(axis=1)
        vals, ok = _density_at(form, patch, T)
        ok &= np.isfinite(log_pdf)
        vals = np.where(ok, vals * np.exp(-np.where(ok, log_pdf, 0.0)), 0.0)
        rejected += int((~ok).sum())
        got.append(vals[ok])
        have += int(ok.sum())
        if rejected > 10 * n + 100:
            raise BoundaryEvaluationError("too many boundary samples")
    v = np.concatenate(got)
    return float(v.sum()), float((v * v).sum()), int(v.size), rejected


def _integrate_patches(
    form: CanonicalForm,
    patches: Sequence[ConePatch],
    n_samples: int,
    seed: int,
    stream: int = 0,
    threads: int = 1,
    alpha: float | None = None,
) -> IntegralEstimate:
    alpha = DIRICHLET_ALPHA if alpha is None else alpha
    if seed is None:
        raise ValueError("a seed is required")
    d = patches[0].dim
    if d == 0:
        val = float(sum(c for m, c in form.terms if not m)) * sum(p.sign for p in patches)
        return IntegralEstimate(val, 0.0, 0, seed, [], 0)
    per = [n_samples // len(patches) + (1 if k < n_samples % len(patches) else 0) for k in range(len(patches))]
    tasks = []
    for p, (patch, npatch) in enumerate(zip(patches, per)):
        for c, start in enumerate(range(0, npatch, CHUNK)):
            tasks.append((p, patch, min(CHUNK, npatch - start), (seed, stream, p, c)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda t: _chunk_stats(form, t[1], t[2], t[3], alpha), tasks))
    else:
        results = [_chunk_stats(form, t[1], t[2], t[3], alpha) for t in tasks]
    value = 0.0
    var = 0.0
    rejected = 0
    info = []
    for p, patch in enumerate(patches):
        s = sq = 0.0
        cnt = rej = 0
        for (tp, *_), (a, b, m, r) in zip(tasks, results):
            if tp == p:
                s, sq, cnt, rej = s + a, sq + b, cnt + m, rej + r
        mean = s / cnt
        sample_var = max(sq / cnt - mean * mean, 0.0) * cnt / max(cnt - 1, 1)
        contrib = patch.sign * mean
        err = math.sqrt(sample_var / cnt)
        value += contrib
        var += err * err
        rejected += rej
        info.append({"sign": patch.sign, "value": contrib, "stderr": err, "n": cnt, "rejected": rej})
    return IntegralEstimate(value, math.sqrt(var), sum(per), seed, info, rejected)


# orientation of the principal g=3 cone frame for which the wheel integral is positive
ORIENTATION_SIGN = 1


def _cone_frame(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    svecs = [sym_vec(v) for v in vectors]
    return [svecs[i] for i in _basis_indices(svecs)]


def _intrinsic_integral(form, vectors, n, seed, stream=0, threads=1, frame=None) -> IntegralEstimate:
    svecs = [sym_vec(v) for v in vectors]
    frame = frame or _cone_frame(vectors)
    return _integrate_patches(form, _cone_patches(frame, svecs, vectors), n, seed, stream, threads)


def integrate_cone(form: CanonicalForm, cone: Cone, n_samples: int, seed: int, threads: int = 1) -> IntegralEstimate:
    """Monte-Carlo integral of ``form`` over the link of a strictly positive cone."""
    if form.degree != cone.dim:
        raise ValueError(f"form of degree {form.degree} on a cone of dimension {cone.dim}")
    if cone_null_space(cone.generators):
        raise ValueError("cone is not strictly positive")
    est = _intrinsic_integral(form, cone.generators, int(n_samples), seed, 0, threads)
    est.value *= ORIENTATION_SIGN
    for p in est.patches:
        p["value"] *= ORIENTATION_SIGN
        p["sign"] *= ORIENTATION_SIGN
    return est


# ------------------------------------------------------------------- Stokes


def _restrict_vectors(vectors, basis_cols) -> list[tuple[int, ...]]:
    """Restriction of rank-one forms v v^T to the span of ``basis_cols``: v -> (b . v)_b."""
    return [tuple(sum(a * b for a, b in zip(col, v)) for col in basis_cols) for v in vectors]


@dataclass
class StokesReport:
    face: tuple[int, ...]
    terms: list[dict]
    total: float
    stderr: float

    @property
    def within(self) -> bool:
        return abs(self.total) <= 3 * self.stderr

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "face": list(self.face),
            "total": self.total,
            "stderr": self.stderr,
            "within_3sigma": self.within,
            "terms": self.terms,
        }


def _integral_or_unit(form, vectors, n, seed, stream, threads, frame=None) -> IntegralEstimate:
    if len(vectors) == 1 and not any(form.degrees):
        return IntegralEstimate(float(sum(c for _, c in form.terms)), 0.0, 0, seed)
    return _intrinsic_integral(form, vectors, n, seed, stream, threads, frame)


def stokes_residual(
    form: CanonicalForm,
    cone: Cone,
    n_samples: int,
    seed: int,
    threads: int = 1,
    face: Sequence[int] | None = None,
) -> StokesReport:
    """Signed sum of the boundary integrals of the blown-up cone (strictly positive facets and exceptional facets)."""
    gens = cone.generators if face is None else tuple(cone.generators[i] for i in face)
    sigma = Cone(cone.g, tuple(gens))
    if form.degree != sigma.dim - 1:
        raise ValueError("form degree must be one less than the cone dimension")
    if cone_null_space(gens):
        raise ValueError("cone is not strictly positive")
    g = cone.g
    svecs = [sym_vec(v) for v in gens]
    frame = _cone_frame(gens)
    terms: list[dict] = []
    stream = 1
    # strictly positive facets
    for fidx, _ in cone_facets(sigma):
        fg = [gens[i] for i in fidx]
        if cone_null_space(fg):
            continue
        v = next(svecs[i] for i in range(len(gens)) if i not in set(fidx))
        fframe = _cone_frame(fg)
        coef = oriented_sign(frame, [v] + fframe)
        est = _intrinsic_integral(form, fg, n_samples, seed, stream, threads, fframe)
        stream += 1
        terms.append(
            {"kind": "facet", "face": list(fidx), "coefficient": coef, "value": coef * est.value, "stderr": est.stderr}
        )
    # exceptional facets over essential faces at infinity
    pieces = coproduct(form)
    for fidx in cone_faces(sigma):
        if len(fidx) == len(gens):
            continue
        fg = [gens[i] for i in fidx]
        K = cone_null_space(fg)
        if not K or essential_envelope(sigma, fidx) != tuple(fidx):
            continue
        Kb = saturate(K)
        comp = complete_basis(Kb, g)[len(Kb) :]
        face_vecs = _restrict_vectors(fg, comp)
        rest_idx = [i for i in range(len(gens)) if i not in set(fidx)]
        normal_all = _restrict_vectors([gens[i] for i in rest_idx], Kb)
        # distinct normal rays, each lifted to its first preimage
        seen: dict[tuple, int] = {}
        for i, w in zip(rest_idx, normal_all):
            key = tuple(sym_vec(w))
            key = min(key, tuple(-x for x in key))
            seen.setdefault(key, i)
        lifts = list(seen.values())
        normal_vecs = _restrict_vectors([gens[i] for i in lifts], Kb)
        dimF = len(_basis_indices([sym_vec(v) for v in fg])) - 1
        nsv = [sym_vec(w) for w in normal_vecs]
        nbasis = _basis_indices(nsv)
        dimN = len(frame) - dimF - 2
        if len(nbasis) - 1 < dimN:
            # the restriction collapses the normal polyhedron, so pullbacks of positive degree vanish
            for left, right, c in pieces:
                if left.degree == dimF and right.degree == dimN:
                    terms.append(
                        {"kind": "exceptional", "face": list(fidx), "kernel_dim": len(Kb),
                         "coefficient": 0, "value": 0.0, "stderr": 0.0, "degenerate": True}
                    )
            continue
        fframe_orig = _cone_frame(fg)
        lift_frame = [sym_vec(gens[lifts[i]]) for i in nbasis]
        coef = (-1) ** (dimF + 1) * oriented_sign(frame, fframe_orig + lift_frame)
        for left, right, c in pieces:
            if left.degree != dimF or right.degree != dimN:
                continue
            fsv = [sym_vec(w) for w in face_vecs]
            # the face frame, restricted, keeps the orientation of fframe_orig
            fb = _basis_indices([sym_vec(v) for v in fg])
            est_f = _integral_or_unit(left, face_vecs, n_samples, seed, stream, threads, [fsv[i] for i in fb])
            stream += 1
            est_n = _integral_or_unit(right, normal_vecs, n_samples, seed, stream, threads, [nsv[i] for i in nbasis])
            stream += 1
            val = est_f.value * est_n.value
            err = math.hypot(est_f.stderr * est_n.value, est_n.stderr * est_f.value)
            terms.append(
                {
                    "kind": "exceptional",
                    "face": list(fidx),
                    "kernel_dim": len(Kb),
                    "coefficient": coef * float(c),
                    "value": coef * float(c) * val,
                    "stderr": abs(float(c)) * err,
                }
            )
    total = sum(t["value"] for t in terms)
    stderr = math.sqrt(sum(t["stderr"] ** 2 for t in terms))
    return StokesReport(tuple(face) if face is not None else tuple(range(len(gens))), terms, total, stderr)


def strictly_positive_faces(cone: Cone, dim: int) -> list[tuple[int, ...]]:
    """Faces of the given dimension with trivial null space, in face-lattice order."""
    out = []
    for f in cone_faces(cone):
        fg = [cone.generators[i] for i in f]
        if len(_basis_indices([sym_vec(v) for v in fg])) - 1 == dim and not cone_null_space(fg):
            out.append(f)
    return out


# --------------------------------------------------------------------- zeta


def _bernoulli(n: int) -> list[Fraction]:
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(math.comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return B


def zeta(s: int, cutoff: int = 20, order: int = 12) -> float:
    """Riemann zeta at an integer s > 1 by Euler-Maclaurin summation."""
    if s <= 1:
        raise ValueError("s must exceed 1")
    N = cutoff
    total = math.fsum(n ** -s for n in range(1, N))
    total += N ** (1 - s) / (s - 1) + 0.5 * N ** -s
    B = _bernoulli(2 * order)
    rising = Fraction(s)
    for k in range(1, order + 1):
        # rising = s (s+1) ... (s + 2k - 2)
        total += float(B[2 * k] / math.factorial(2 * k) * rising) * N ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return total
