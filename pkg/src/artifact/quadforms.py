"""Quadratic forms, minimal vectors, Voronoi cones and the perfect cone complex.

A form is a symmetric rational matrix ``Q`` with ``Q[x] = x^T Q x``.  A
vector ``v`` spans the rank-one form ``v v^T``; integer linear maps act on
vectors by ``v -> A v``, which is the action ``Q -> h^T Q h`` on forms
with ``h = A^T``.  Vectors are kept up to sign with the first nonzero
entry positive.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactlin import (
    as_fraction,
    complete_basis,
    determinant,
    inverse,
    kernel_basis,
    ldlt_classify,
    matmul,
    primitive,
    rational_rank,
    saturate,
    solve,
    transpose,
)
from .polyhedral import _span_columns, face_lattice, span_facets

__all__ = [
    "PosDefForm",
    "Cone",
    "KernelFlag",
    "form_value",
    "minimal_vectors",
    "cone_of_form",
    "is_perfect",
    "sym_vec",
    "cone_null_space",
    "face_from_kernel",
    "essential_envelope",
    "cone_facets",
    "cone_faces",
    "cone_equivalent",
    "cone_automorphisms",
    "enumerate_perfect_forms",
    "assemble_perfect_complex",
    "restrict_form",
    "scaled_determinant",
    "principal_form",
    "named_cone",
    "normalize_vector",
]


def normalize_vector(v: Sequence[int]) -> tuple[int, ...]:
    """Representative of the pair ±v with first nonzero entry positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def form_value(Q: Sequence[Sequence], x: Sequence) -> Fraction:
    n = len(x)
    return sum((Q[i][j] * x[i] * x[j] for i in range(n) for j in range(n)), Fraction(0))


@dataclass(frozen=True)
class PosDefForm:
    Q: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, rows: Iterable[Iterable]) -> "PosDefForm":
        Q = tuple(tuple(as_fraction(x) for x in r) for r in rows)
        if not ldlt_classify(Q).positive_definite:
            raise ValueError("form is not positive definite")
        return cls(Q)

    @property
    def g(self) -> int:
        return len(self.Q)

    @classmethod
    def from_json(cls, data: dict) -> "PosDefForm":
        return cls.of(data["Q"])

    def to_json(self) -> dict:
        return {"schema": "v1", "g": self.g, "Q": [[str(x) for x in r] for r in self.Q]}


def principal_form(g: int) -> tuple[tuple[Fraction, ...], ...]:
    """The form sum x_i^2 + sum_{i<j} x_i x_j."""
    return tuple(tuple(Fraction(1) if i == j else Fraction(1, 2) for j in range(g)) for i in range(g))


# ------------------------------------------------------------- minimal vectors


def _ldl(Q) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Q[x] = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2 for positive definite Q."""
    n = len(Q)
    A = [[as_fraction(x) for x in r] for r in Q]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = A[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= mu[i][j] * mu[i][k] * d[i]
    return d, mu


def _integer_range(center: Fraction, radius_sq: Fraction) -> range:
    """Integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    r = math.isqrt(int(radius_sq)) + 1
    lo = math.floor(center) - r
    hi = math.ceil(center) + r
    while (lo - center) ** 2 > radius_sq:
        lo += 1
    while (hi - center) ** 2 > radius_sq and hi >= lo:
        hi -= 1
    return range(lo, hi + 1)


def _gram_schmidt(G, B):
    n = len(B)
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (_pair(G, B[i], B[j]) - sum(mu[j][k] * mu[i][k] * norms[k] for k in range(j))) / norms[j]
        norms[i] = _pair(G, B[i], B[i]) - sum(mu[i][k] ** 2 * norms[k] for k in range(i))
    return mu, norms


def _pair(G, x, y) -> Fraction:
    n = len(x)
    return sum((G[i][j] * x[i] * y[j] for i in range(n) for j in range(n) if x[i] and y[j]), Fraction(0))


def lll_basis(Q) -> list[list[int]]:
    """Exact LLL-reduced basis (delta = 3/4) of Z^g for the positive definite form Q."""
    n = len(Q)
    B = [[int(i == j) for j in range(n)] for i in range(n)]
    k = 1
    while k < n:
        mu, norms = _gram_schmidt(Q, B)
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                mu, norms = _gram_schmidt(Q, B)
        if norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            k = max(k - 1, 1)
    return B


def minimal_vectors(Q) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Minimum and minimal vectors (one per sign pair, sorted) of a positive definite form.

    Fincke-Pohst enumeration in an LLL-reduced basis, exact throughout.
    """
    if isinstance(Q, PosDefForm):
        Q = Q.Q
    Q = [[as_fraction(x) for x in r] for r in Q]
    if not ldlt_classify(Q).positive_definite:
        raise ValueError("form is not positive definite")
    n = len(Q)
    B = lll_basis(Q)
    R = [[_pair(Q, B[i], B[j]) for j in range(n)] for i in range(n)]
    d, mu = _ldl(R)
    best = min(R[i][i] for i in range(n))
    found: list[tuple[int, ...]] = []
    x = [0] * n

    def rec(i: int, partial: Fraction):
        nonlocal best, found
        c = sum((mu[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        for xi in _integer_range(-c, (best - partial) / d[i]):
            x[i] = xi
            val = partial + d[i] * (xi + c) ** 2
            if val > best:
                continue
            if i == 0:
                if not any(x) or tuple(x) != normalize_vector(x):
                    continue
                if val < best:
                    best, found = val, []
                found.append(tuple(x))
            else:
                rec(i - 1, val)
        x[i] = 0

    rec(n - 1, Fraction(0))
    out = set()
    for y in found:
        v = tuple(sum(y[k] * B[k][j] for k in range(n)) for j in range(n))
        if form_value(Q, v) == best:
            out.add(normalize_vector(v))
    return best, sorted(out)


# ---------------------------------------------------------------------- cones


def sym_vec(v: Sequence[int]) -> tuple[int, ...]:
    """Upper-triangular coordinates (i <= j) of the rank-one form v v^T."""
    n = len(v)
    return tuple(v[i] * v[j] for i in range(n) for j in range(i, n))


def functional_to_matrix(f: Sequence, g: int) -> list[list[Fraction]]:
    """Symmetric F with F[v] = <f, sym_vec(v)>."""
    F = [[Fraction(0)] * g for _ in range(g)]
    k = 0
    for i in range(g):
        for j in range(i, g):
            if i == j:
                F[i][i] = Fraction(f[k])
            else:
                F[i][j] = F[j][i] = Fraction(f[k]) / 2
            k += 1
    return F


@dataclass(frozen=True)
class Cone:
    g: int
    generators: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, g: int, generators: Iterable[Sequence[int]]) -> "Cone":
        gens = sorted({normalize_vector(tuple(int(x) for x in v)) for v in generators})
        if any(len(v) != g for v in gens):
            raise ValueError("generator of the wrong length")
        if any(not any(v) for v in gens):
            raise ValueError("zero generator")
        return cls(g, tuple(gens))

    @property
    def rank(self) -> int:
        return rational_rank([sym_vec(v) for v in self.generators]) if self.generators else 0

    @property
    def dim(self) -> int:
        return self.rank - 1

    def sub(self, idx: Iterable[int]) -> "Cone":
        return Cone(self.g, tuple(self.generators[i] for i in sorted(idx)))

    def matrices(self) -> list[list[list[int]]]:
        return [[[a * b for b in v] for a in v] for v in self.generators]

    def to_json(self) -> dict:
        return {"schema": "v1", "g": self.g, "generators": [list(v) for v in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "Cone":
        return cls.of(int(data["g"]), data["generators"])


@dataclass(frozen=True)
class KernelFlag:
    """Strictly increasing chain of saturated subspaces, each given by an integer basis."""

    g: int
    spaces: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        prev = 0
        for basis in self.spaces:
            r = rational_rank(basis) if basis else 0
            if r != len(basis) or r <= prev:
                raise ValueError("flag is not strictly increasing")
            prev = r
        for a, b in zip(self.spaces, self.spaces[1:]):
            if rational_rank(list(a) + list(b)) != len(b):
                raise ValueError("flag is not nested")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.spaces)


def cone_of_form(Q) -> Cone:
    Qm = Q.Q if isinstance(Q, PosDefForm) else Q
    _, vecs = minimal_vectors(Qm)
    return Cone.of(len(Qm), vecs)


def is_perfect(Q) -> bool:
    c = cone_of_form(Q)
    return c.rank == c.g * (c.g + 1) // 2


def cone_null_space(generators: Iterable[Sequence[int]], g: int | None = None) -> list[list[int]]:
    """Saturated basis of the common kernel of the forms v v^T (orthogonal complement of the span)."""
    gens = [list(v) for v in generators]
    if not gens:
        raise ValueError("empty generator set")
    return saturate(kernel_basis(gens)) if kernel_basis(gens) else []


def face_from_kernel(cone: Cone, K: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Indices of generators v with v . k = 0 for every k in K."""
    return tuple(
        i for i, v in enumerate(cone.generators) if all(sum(a * b for a, b in zip(v, k)) == 0 for k in K)
    )


def essential_envelope(cone: Cone, face: Iterable[int]) -> tuple[int, ...]:
    face = tuple(sorted(face))
    if not face:
        return tuple(range(len(cone.generators)))
    K = cone_null_space([cone.generators[i] for i in face])
    return face_from_kernel(cone, K)


# ---------------------------------------------------------------- facets/faces


def cone_facets(cone: Cone, idx: Sequence[int] | None = None) -> list[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Facets of the cone spanned by the generators ``idx`` (default all).

    Returns (facet generator indices, functional on sym_vec coordinates)
    with the functional zero on the facet and positive on the other
    generators.
    """
    if idx is None:
        idx = list(range(len(cone.generators)))
    idx = list(idx)
    if len(idx) <= 1:
        return []
    facets = span_facets([sym_vec(cone.generators[i]) for i in idx])
    return sorted((tuple(idx[i] for i in f), fn) for f, fn in facets)


def cone_faces(cone: Cone, max_dim: int = 9) -> list[tuple[int, ...]]:
    """All nonempty faces (generator index tuples), the cone itself included.

    Faces are intersections of facets.  Sorted by (size, indices).
    """
    if cone.dim > max_dim:
        raise ValueError("cone too large")
    return face_lattice([sym_vec(v) for v in cone.generators])


def face_dim(cone: Cone, face: Sequence[int]) -> int:
    return rational_rank([sym_vec(cone.generators[i]) for i in face]) - 1


# ----------------------------------------------------------------- equivalence


def _reduce_to_span(vectors: Sequence[Sequence[int]]):
    """Coordinates of the vectors in a Z-basis of their saturated span."""
    B = saturate(vectors)
    r = len(B)
    g = len(vectors[0])
    full = complete_basis(B, g)
    Pinv = inverse(transpose(full, g))  # columns of P are the basis vectors
    coords = []
    for v in vectors:
        c = [sum(Pinv[i][j] * v[j] for j in range(g)) for i in range(r)]
        coords.append(tuple(int(x) for x in c))
    return B, full, coords


def _invariants(coords: Sequence[Sequence[int]]):
    r = len(coords[0])
    S = [[sum(Fraction(c[i] * c[j]) for c in coords) for j in range(r)] for i in range(r)]
    G = inverse(S)
    norms = [form_value(G, c) for c in coords]
    prods = [[abs(sum(G[i][j] * a[i] * b[j] for i in range(r) for j in range(r))) for b in coords] for a in coords]
    return G, norms, prods


def _signature(vectors: Sequence[Sequence[int]]):
    _, _, coords = _reduce_to_span(vectors)
    _, norms, prods = _invariants(coords)
    rows = sorted(tuple(sorted(p)) for p in prods)
    return (len(coords[0]), len(coords), tuple(sorted(norms)), tuple(rows))


def _spanning_maps(src: Sequence[tuple[int, ...]], dst: Sequence[tuple[int, ...]], first_only: bool):
    """Integer unimodular A with A src = ±dst as sets; spanning coordinates."""
    r = len(src[0])
    n = len(src)
    if n != len(dst):
        return []
    Gs, ns, ps = _invariants(src)
    Gd, nd, pd = _invariants(dst)
    if sorted(ns) != sorted(nd):
        return []
    # choose a basis of src greedily
    basis: list[int] = []
    for i in range(n):
        if rational_rank([src[j] for j in basis + [i]]) == len(basis) + 1:
            basis.append(i)
        if len(basis) == r:
            break
    M1inv = inverse(transpose([src[i] for i in basis], r))
    dst_set = {normalize_vector(v) for v in dst}
    results = []
    seen = set()

    def signed_prod(G, a, b):
        return sum(G[i][j] * a[i] * b[j] for i in range(r) for j in range(r))

    src_prod = [[signed_prod(Gs, src[a], src[b]) for b in basis] for a in basis]
    chosen: list[tuple[int, ...]] = []

    def rec(k):
        if k == r:
            M2 = transpose(chosen, r)
            A = matmul(M2, M1inv, r)
            if any(x.denominator != 1 for row in A for x in row):
                return False
            A = [[int(x) for x in row] for row in A]
            if abs(determinant(A)) != 1:
                return False
            img = {normalize_vector(tuple(sum(A[i][j] * v[j] for j in range(r)) for i in range(r))) for v in src}
            if img != dst_set:
                return False
            key = tuple(map(tuple, A))
            negk = tuple(tuple(-x for x in row) for row in A)
            if key in seen or negk in seen:
                return False
            seen.add(key)
            results.append(A)
            return first_only
        i = basis[k]
        for t, w in enumerate(dst):
            if nd[t] != ns[i]:
                continue
            for s in ((1, -1) if k else (1,)):
                cand = tuple(s * x for x in w)
                if any(signed_prod(Gd, cand, chosen[m]) != src_prod[k][m] for m in range(k)):
                    continue
                chosen.append(cand)
                stop = rec(k + 1)
                chosen.pop()
                if stop:
                    return True
        return False

    rec(0)
    return results


def _lift_maps(gens1, gens2, first_only):
    B1, full1, c1 = _reduce_to_span(gens1)
    B2, full2, c2 = _reduce_to_span(gens2)
    if len(B1) != len(B2):
        return []
    g = len(gens1[0])
    r = len(B1)
    maps = _spanning_maps(c1, c2, first_only)
    out = []
    P1inv = inverse(transpose(full1, g))
    P2 = transpose(full2, g)
    for Ar in maps:
        blk = [[Ar[i][j] if i < r and j < r else int(i == j) for j in range(g)] for i in range(g)]
        A = matmul(matmul(P2, blk, g), P1inv, g)
        out.append([[int(x) for x in row] for row in A])
    return out


def cone_equivalent(c1: Cone, c2: Cone) -> list[list[int]] | None:
    """A unimodular A with A(generators of c1) = ±(generators of c2), or None.

    The corresponding form action is h = A^T.
    """
    if c1.g != c2.g or len(c1.generators) != len(c2.generators):
        return None
    if not c1.generators:
        return [[int(i == j) for j in range(c1.g)] for i in range(c1.g)]
    maps = _lift_maps(list(c1.generators), list(c2.generators), True)
    return maps[0] if maps else None


def cone_automorphisms(cone: Cone) -> list[list[list[int]]]:
    """All unimodular A (modulo ±1) permuting the generators up to sign.

    For non-spanning generator sets these are the automorphisms of the
    saturated span, extended by the identity on a fixed complement.
    """
    return _lift_maps(list(cone.generators), list(cone.generators), False)


def apply_to_vectors(A: Sequence[Sequence[int]], vectors: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    return [normalize_vector(tuple(sum(a * x for a, x in zip(row, v)) for row in A)) for v in vectors]


# -------------------------------------------------------------- Voronoi walk


def _neighbor(Q, facet_vectors: set, F) -> list[list[Fraction]]:
    """Contiguous perfect form Q + u F across a facet, minimum kept at 1."""
    g = len(Q)
    u = Fraction(1)
    while True:
        R = [[Q[i][j] + u * F[i][j] for j in range(g)] for i in range(g)]
        if not ldlt_classify(R).positive_definite:
            u /= 2
            continue
        m, vecs = minimal_vectors(R)
        if m == 1:
            if set(vecs) != facet_vectors:
                return R
            u *= 2
            continue
        u = min(
            (form_value(Q, v) - 1) / (-form_value(F, v))
            for v in vecs
            if form_value(F, v) < 0
        )


def enumerate_perfect_forms(g: int, max_classes: int = 50) -> list[tuple[tuple[Fraction, ...], ...]]:
    """Inequivalent perfect forms (minimum 1) by Voronoi's neighbour walk."""
    if g < 1:
        raise ValueError("g must be positive")
    start = principal_form(g)
    classes: list[tuple[tuple, Cone, tuple]] = []
    sigs: list = []

    def find(cone: Cone):
        s = _signature(list(cone.generators))
        for k, (Q, c, sig) in enumerate(classes):
            if sig == s and cone_equivalent(c, cone) is not None:
                return k
        return None

    c0 = cone_of_form(start)
    classes.append((start, c0, _signature(list(c0.generators))))
    todo = [0]
    while todo:
        k = todo.pop(0)
        Q, cone, _ = classes[k]
        if g == 1:
            break
        for facet, f in cone_facets(cone):
            F = functional_to_matrix(f, g)
            R = _neighbor([list(r) for r in Q], {cone.generators[i] for i in facet}, F)
            rc = cone_of_form(R)
            if find(rc) is None:
                classes.append((tuple(tuple(r) for r in R), rc, _signature(list(rc.generators))))
                todo.append(len(classes) - 1)
                if len(classes) > max_classes:
                    raise RuntimeError("too many perfect form classes")
    return [Q for Q, _, _ in classes]


# ------------------------------------------------------------ perfect complex


@dataclass
class CellClass:
    """An equivalence class of faces of perfect cones."""

    id: int
    dim: int
    cone: Cone  # representative generator set
    basis: list[int]  # indices into cone.generators: ordered basis of the span
    stabilizer: list[list[list[int]]]
    strictly_positive: bool
    orientable: bool  # False if some stabilizer element reverses orientation
    facets: list[tuple[int, int]] = field(default_factory=list)  # (class id, incidence sign)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "dim": self.dim,
            "generators": [list(v) for v in self.cone.generators],
            "strictly_positive": self.strictly_positive,
            "orientable": self.orientable,
            "stabilizer_order": len(self.stabilizer),
            "facets": [{"cell": c, "sign": s} for c, s in self.facets],
        }


def _basis_indices(vectors: Sequence[Sequence[int]]) -> list[int]:
    basis: list[int] = []
    for i in range(len(vectors)):
        if rational_rank([vectors[j] for j in basis + [i]]) == len(basis) + 1:
            basis.append(i)
    return basis


def _coords_in(basis_vecs: Sequence[Sequence[int]], v: Sequence[int]) -> list[Fraction]:
    """Coordinates of v in the (independent) basis, exactly."""
    cols = _span_columns(list(basis_vecs))
    M = [[Fraction(b[c]) for b in basis_vecs] for c in cols]
    return solve(M, [v[c] for c in cols])


def oriented_sign(frame: Sequence[Sequence[int]], vectors: Sequence[Sequence[int]]) -> int:
    """Sign of det of ``vectors`` expressed in the ordered basis ``frame``."""
    M = [_coords_in(frame, v) for v in vectors]
    d = determinant(M)
    if d == 0:
        raise ValueError("vectors are dependent")
    return 1 if d > 0 else -1


@dataclass
class PerfectComplex:
    g: int
    forms: list
    cones: list[Cone]
    cells: list[CellClass]

    def by_dim(self) -> dict[int, list[CellClass]]:
        out: dict[int, list[CellClass]] = {}
        for c in self.cells:
            out.setdefault(c.dim, []).append(c)
        return out

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "g": self.g,
            "forms": [[[str(x) for x in r] for r in Q] for Q in self.forms],
            "cells": [c.to_json() for c in self.cells],
        }


def assemble_perfect_complex(g: int, forms=None, strictly_positive_only: bool = False) -> PerfectComplex:
    """Classify all faces of all perfect cones up to GL_g(Z) and record incidences.

    With ``strictly_positive_only`` only faces with trivial null space
    are classified (and only such facets are recorded), which is what
    the relative complex of the bordification needs.
    """
    if forms is None:
        forms = enumerate_perfect_forms(g)
    cones = [cone_of_form(Q) for Q in forms]
    classes: list[CellClass] = []
    buckets: dict[tuple, list[int]] = {}

    def classify(gens: tuple[tuple[int, ...], ...]) -> tuple[int, list[list[int]] | None]:
        sub = Cone(g, gens)
        sig = _signature(list(gens))
        for cid in buckets.get(sig, []):
            A = cone_equivalent(classes[cid].cone, sub)
            if A is not None:
                return cid, A
        cid = len(classes)
        svecs = [sym_vec(v) for v in gens]
        basis = _basis_indices(svecs)
        stab = cone_automorphisms(sub)
        frame = [svecs[i] for i in basis]
        orientable = True
        for A in stab:
            img = [sym_vec(w) for w in _apply_signed(A, [gens[i] for i in basis])]
            if oriented_sign(frame, img) < 0:
                orientable = False
                break
        strictly = not cone_null_space(gens)
        classes.append(CellClass(cid, len(basis) - 1, sub, basis, stab, strictly, orientable))
        buckets.setdefault(sig, []).append(cid)
        return cid, None

    face_sets = []
    for cone in cones:
        for face in cone_faces(cone, max_dim=64):
            gens = tuple(cone.generators[i] for i in face)
            if strictly_positive_only and cone_null_space(gens):
                continue
            face_sets.append(gens)
    for gens in sorted(set(face_sets), key=lambda t: (len(t), t)):
        classify(gens)
    for cell in classes:
        gens = cell.cone.generators
        svecs = [sym_vec(v) for v in gens]
        frame = [svecs[i] for i in cell.basis]
        for facet, _ in cone_facets(cell.cone):
            fg = tuple(gens[i] for i in facet)
            if strictly_positive_only and cone_null_space(fg):
                continue
            fid, A = classify(fg)
            rep = classes[fid]
            rep_basis = [rep.cone.generators[i] for i in rep.basis]
            C = [sym_vec(w) for w in (_apply_signed(A, rep_basis) if A is not None else rep_basis)]
            v = next(svecs[i] for i in range(len(gens)) if i not in set(facet))
            cell.facets.append((fid, oriented_sign(frame, [v] + C)))
        cell.facets.sort()
    return PerfectComplex(g, list(forms), cones, classes)


def _apply_signed(A, vectors):
    return [tuple(sum(a * x for a, x in zip(row, v)) for row in A) for v in vectors]


# --------------------------------------------------------- restriction, detfact


def restrict_form(Q, K: Sequence[Sequence[int]], complement: Sequence[Sequence[int]] | None = None):
    """Top-left block of Q in a basis (K basis, complement); returns (Q_K, full transformed form)."""
    Qm = [[as_fraction(x) for x in r] for r in (Q.Q if isinstance(Q, PosDefForm) else Q)]
    g = len(Qm)
    Kb = saturate(K) if K else []
    if complement is None:
        full = complete_basis(Kb, g) if Kb else [[int(i == j) for j in range(g)] for i in range(g)]
    else:
        full = [list(v) for v in Kb] + [list(v) for v in complement]
        if rational_rank(full) != g:
            raise ValueError("complement does not complete the basis")
    P = transpose(full, g)
    T = matmul(matmul(transpose(P, g), Qm, g), P, g)
    k = len(Kb)
    return [row[:k] for row in T[:k]], T


def scaled_determinant(T: Sequence[Sequence], k: int) -> list[Fraction]:
    """Coefficients in z of det of T with its first k rows scaled by z.

    The substitution multiplies entries x_ij with i <= k (upper
    triangle) by z; on the symmetric matrix this scales the top-left
    block, the top-right block and its transpose.
    """
    n = len(T)
    pts = list(range(n + 1))
    vals = []
    for z in pts:
        M = [
            [Fraction(T[i][j]) * (z if (i < k or j < k) else 1) for j in range(n)]
            for i in range(n)
        ]
        vals.append(determinant(M))
    # Lagrange interpolation to coefficients
    coeffs = [Fraction(0)] * (n + 1)
    for i, zi in enumerate(pts):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, zj in enumerate(pts):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= zj * basis[t + 1]
            denom *= zi - zj
        for t in range(n + 1):
            coeffs[t] += vals[i] * basis[t] / denom
    return coeffs


# ----------------------------------------------------------------- named cones


def named_cone(name: str) -> Cone:
    """Built-in cones: w3 and q3 (the g=3 perfect cone), a2 (g=2), d4 (g=4 D4 perfect cone)."""
    if name in ("w3", "q3"):
        return cone_of_form(principal_form(3))
    if name == "a2":
        return cone_of_form(principal_form(2))
    if name == "d4":
        return cone_of_form(d4_form())
    raise KeyError(f"unknown cone {name!r}")


def d4_form() -> list[list[Fraction]]:
    """A perfect form of type D4 with minimum 1 (24 minimal vectors)."""
    # D4 root lattice Gram matrix scaled to minimum 1
    G = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
    return [[Fraction(x, 2) for x in r] for r in G]
