"""Exact rational and integer linear algebra.

Matrices are immutable tuples of rows.  Entries are ``int`` for
:class:`IntMatrix` and :class:`fractions.Fraction` for :class:`RatMatrix`.
Every routine here is exact; floating point never enters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "RatMatrix",
    "Classification",
    "NotSymmetricError",
    "as_fraction",
    "smith_normal_form",
    "rational_rank",
    "kernel_basis",
    "integer_kernel_basis",
    "ldlt_classify",
    "determinant",
    "inverse",
    "solve",
    "saturate",
    "complete_basis",
    "primitive",
    "sparse_rank",
    "rank_mod_p",
    "matmul",
    "transpose",
    "identity",
    "DEFAULT_PRIMES",
]

# Two primes below 2**62, used by the modular fast path.
DEFAULT_PRIMES = (4611686018427387847, 4611686018427387817)


def as_fraction(x) -> Fraction:
    """Parse ``x`` (int, Fraction or a ``"p/q"`` string) to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(v) for v in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged matrix")
        return cls(data, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.of(transpose(self.rows, self.ncols), self.nrows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.of(matmul(self.rows, other.rows, other.ncols), other.ncols)

    def to_rat(self) -> "RatMatrix":
        return RatMatrix.of(self.rows, self.ncols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class RatMatrix:
    rows: tuple[tuple[Fraction, ...], ...]
    ncols: int

    @classmethod
    def of(cls, rows: Iterable[Iterable], ncols: int | None = None) -> "RatMatrix":
        data = tuple(tuple(as_fraction(v) for v in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged matrix")
        return cls(data, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @property
    def is_symmetric(self) -> bool:
        n = self.nrows
        return n == self.ncols and all(
            self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i + 1, n)
        )

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "RatMatrix":
        return RatMatrix.of(transpose(self.rows, self.ncols), self.nrows)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix.of(matmul(self.rows, other.rows, other.ncols), other.ncols)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]


def _rows(M) -> tuple[list[list], int]:
    """Return (list-of-lists copy, ncols) for a matrix object or nested sequence."""
    if isinstance(M, (IntMatrix, RatMatrix)):
        return [list(r) for r in M.rows], M.ncols
    rows = [list(r) for r in M]
    return rows, (len(rows[0]) if rows else 0)


def transpose(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return [[r[j] for r in rows] for j in range(ncols)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], bcols: int | None = None) -> list[list]:
    if bcols is None:
        bcols = len(B[0]) if B else 0
    Bt = transpose(B, bcols)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def primitive(v: Sequence, keep_sign: bool = False) -> list[int]:
    """Scale a rational vector to a primitive integer vector.

    The first nonzero entry is made positive unless ``keep_sign``.
    """
    fr = [as_fraction(x) for x in v]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    if keep_sign:
        return ints
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints


# ---------------------------------------------------------------- Smith form


def smith_normal_form(M) -> tuple[list[int], int, tuple[IntMatrix, IntMatrix]]:
    """Smith normal form ``U M V = D`` over the integers.

    Returns ``(diagonal, rank, (U, V))`` where ``diagonal`` lists the
    nonzero invariant factors d1 | d2 | ... (all positive).
    """
    A, n = _rows(M)
    A = [[int(x) for x in r] for r in A]
    m = len(A)
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        if c:
            A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        if c:
            for r in A:
                r[dst] += c * r[src]
            for r in V:
                r[dst] += c * r[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j]:
                        done = False
            if done:
                # enforce divisibility of the remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % A[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # move the smallest entry of row/column t to the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    diag = [A[i][i] for i in range(t)]
    return diag, t, (IntMatrix.of(U, m), IntMatrix.of(V, n))


# --------------------------------------------------------- rational elimination


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    A = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def _frac_rows(M) -> tuple[list[list[Fraction]], int]:
    rows, n = _rows(M)
    return [[as_fraction(x) for x in r] for r in rows], n


def rational_rank(M) -> int:
    """Exact rank over Q."""
    rows, n = _frac_rows(M)
    return sparse_rank([{j: x for j, x in enumerate(r) if x} for r in rows])


def kernel_basis(M) -> list[list[int]]:
    """Basis of the right kernel over Q, each vector primitive integral."""
    rows, n = _frac_rows(M)
    R, pivots = _rref(rows, n)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def integer_kernel_basis(M) -> list[list[int]]:
    """Z-basis of the integer kernel {v in Z^n : M v = 0}."""
    rows, n = _rows(M)
    if not rows:
        return identity(n)
    _, r, (_, V) = smith_normal_form(rows)
    return [[V.rows[i][j] for i in range(n)] for j in range(r, n)]


def determinant(M) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    rows, n = _frac_rows(M)
    if len(rows) != n:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, x.denominator)
    A = [[int(x * den) for x in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k]), None)
            if p is None:
                return Fraction(0)
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return Fraction(sign * A[n - 1][n - 1], den**n)


def solve(M, b: Sequence) -> list[Fraction]:
    """Solve the square nonsingular system ``M x = b``."""
    rows, n = _frac_rows(M)
    aug = [r + [as_fraction(x)] for r, x in zip(rows, b)]
    R, piv = _rref(aug, n + 1)
    if piv != list(range(n)):
        raise ValueError("singular system")
    return [R[i][n] for i in range(n)]


def inverse(M) -> list[list[Fraction]]:
    rows, n = _frac_rows(M)
    if len(rows) != n:
        raise ValueError("inverse of a non-square matrix")
    aug = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    R, piv = _rref(aug, 2 * n)
    if piv != list(range(n)):
        raise ValueError("singular matrix")
    return [r[n:] for r in R]


def saturate(vectors: Sequence[Sequence]) -> list[list[int]]:
    """Z-basis of span_Q(vectors) ∩ Z^n (empty for the zero space)."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return []
    n = len(vecs[0])
    if rational_rank(vecs) == 0:
        return []
    perp = kernel_basis(vecs)
    if not perp:
        return identity(n)
    return integer_kernel_basis(perp)


def complete_basis(basis: Sequence[Sequence[int]], n: int | None = None) -> list[list[int]]:
    """Extend a saturated Z-basis to a unimodular basis of Z^n.

    The returned list begins with the given vectors; the rest are the
    earliest standard basis vectors that keep the lattice unimodular
    when that is possible, else SNF-derived complements.
    """
    basis = [list(map(int, v)) for v in basis]
    if n is None:
        n = len(basis[0])
    out = list(basis)
    for i in range(n):
        if len(out) == n:
            break
        e = [int(i == j) for j in range(n)]
        cand = out + [e]
        if rational_rank(cand) == len(cand) and _is_saturated(cand):
            out = cand
    if len(out) == n:
        return out
    # Fall back to an SNF complement: U^{-1} columns beyond rank.
    k = len(basis)
    cols = transpose(basis, n)
    diag, r, (U, _) = smith_normal_form(cols)
    if r != k or any(d != 1 for d in diag):
        raise ValueError("basis is not saturated")
    Uinv = inverse(U.rows)
    comp = [[int(Uinv[i][j]) for i in range(n)] for j in range(k, n)]
    return basis + comp


def _is_saturated(vectors: Sequence[Sequence[int]]) -> bool:
    diag, r, _ = smith_normal_form(vectors)
    return r == len(vectors) and all(d == 1 for d in diag)


# ------------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    kind: str  # "positive_definite" | "positive_semidefinite" | "indefinite"
    kernel: tuple[tuple[int, ...], ...] = ()
    rank: int = 0

    @property
    def positive_definite(self) -> bool:
        return self.kind == "positive_definite"

    @property
    def positive_semidefinite(self) -> bool:
        return self.kind in ("positive_definite", "positive_semidefinite")


class NotSymmetricError(ValueError):
    pass


def ldlt_classify(Q) -> Classification:
    """Classify a symmetric rational form by LDL^T with symmetric pivoting."""
    rows, n = _frac_rows(Q)
    if len(rows) != n or any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i + 1, n)):
        raise NotSymmetricError("not symmetric")
    A = [list(r) for r in rows]
    active = list(range(n))
    rank = 0
    while active:
        piv = next((i for i in active if A[i][i] != 0), None)
        if piv is None:
            if any(A[i][j] != 0 for i in active for j in active):
                return Classification("indefinite")
            break
        d = A[piv][piv]
        if d < 0:
            return Classification("indefinite")
        rank += 1
        active.remove(piv)
        for i in active:
            if A[i][piv] != 0:
                f = A[i][piv] / d
                for j in active:
                    A[i][j] -= f * A[piv][j]
    if rank == n:
        return Classification("positive_definite", (), n)
    ker = kernel_basis(rows)
    return Classification("positive_semidefinite", tuple(tuple(v) for v in ker), rank)


# ------------------------------------------------------------------ sparse rank


def rank_mod_p(rows: Sequence[dict[int, int]], p: int) -> int:
    """Rank over Z/p of a sparse integer matrix given as column->value dicts."""
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows:
        r = {c: v % p for c, v in row.items() if v % p}
        while r:
            c = min(r)
            pr = pivots.get(c)
            if pr is None:
                inv = pow(r[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in r.items()}
                rank += 1
                break
            f = r[c]
            for k, v in pr.items():
                nv = (r.get(k, 0) - f * v) % p
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rank


def sparse_rank(rows: Sequence[dict], exact: bool = True, primes: Sequence[int] = DEFAULT_PRIMES) -> int:
    """Rank over Q of a sparse matrix (rows as column->value dicts).

    With ``exact=False`` the rank is computed modulo two large primes and
    falls back to exact elimination when they disagree.
    """
    if not exact and all(isinstance(v, int) for r in rows for v in r.values()):
        ranks = {rank_mod_p(rows, p) for p in primes}
        if len(ranks) == 1:
            return ranks.pop()
    pivots: dict[int, dict[int, Fraction]] = {}
    rank = 0
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        while r:
            c = min(r)
            pr = pivots.get(c)
            if pr is None:
                inv = 1 / r[c]
                pivots[c] = {k: v * inv for k, v in r.items()}
                rank += 1
                break
            f = r[c]
            for k, v in pr.items():
                nv = r.get(k, 0) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rank
