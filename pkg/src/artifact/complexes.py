"""Chain complexes: face complexes of cell diagrams and the graph complexes.

Boundary maps lower the degree by one.  ``boundary[k]`` maps degree ``k``
to degree ``k - 1`` and is stored as a dict {(row, col): coefficient}
with rows indexing generators of degree ``k - 1``.

Graph generators are oriented by an ordering of their edges; the
reference ordering of a canonical representative is ascending
canonical edge position.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .exactlin import determinant, kernel_basis, rank_mod_p, smith_normal_form, sparse_rank
from .graphs import (
    WeightedGraph,
    automorphisms,
    canonical_label,
    contract_edges,
    cycle_rank,
    bridges,
    enumerate_stable_graphs,
    has_odd_automorphism,
    permutation_sign,
)
from .polyhedral import NestedSequence, nested_sequences

__all__ = [
    "ChainComplex",
    "D2Error",
    "face_complex",
    "gc0_complex",
    "gc0B_complex",
    "boundary_subcomplex_ids",
    "relative_graph_face_complex",
    "perfect_face_complex",
    "long_exact_check",
    "LongExactReport",
    "betti",
]


class D2Error(ArithmeticError):
    pass


@dataclass
class ChainComplex:
    generators: dict[int, list[Hashable]]
    boundary: dict[int, dict[tuple[int, int], int]] = field(default_factory=dict)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.generators)

    def size(self, k: int) -> int:
        return len(self.generators.get(k, []))

    def columns(self, k: int) -> list[dict[int, int]]:
        """Boundary of each degree-k generator as a sparse column."""
        cols: list[dict[int, int]] = [dict() for _ in range(self.size(k))]
        for (i, j), v in self.boundary.get(k, {}).items():
            if v:
                cols[j][i] = v
        return cols

    def check_d2(self) -> None:
        for k in self.degrees:
            lower = self.columns(k - 1) if self.size(k - 1) else []
            for j, col in enumerate(self.columns(k)):
                acc: dict[int, int] = {}
                for i, v in col.items():
                    for r, w in lower[i].items():
                        acc[r] = acc.get(r, 0) + v * w
                if any(acc.values()):
                    raise D2Error(f"d^2 != 0 on generator {self.generators[k][j]!r} in degree {k}")

    def rank(self, k: int, exact: bool = True, prime: int | None = None) -> int:
        """Rank of the boundary map out of degree k."""
        cols = [c for c in self.columns(k) if c]
        if not cols:
            return 0
        if prime is not None:
            return rank_mod_p(cols, prime)
        return sparse_rank(cols, exact=exact)

    def betti(self, exact: bool = True, prime: int | None = None) -> dict[int, int]:
        ranks = {k: self.rank(k, exact, prime) for k in self.degrees}
        return {k: self.size(k) - ranks[k] - ranks.get(k + 1, 0) for k in self.degrees}

    def dense(self, k: int) -> list[list[int]]:
        """Boundary out of degree k as a dense integer matrix (rows: degree k-1)."""
        M = [[0] * self.size(k) for _ in range(self.size(k - 1))]
        for (i, j), v in self.boundary.get(k, {}).items():
            M[i][j] += v
        return M

    def integral_homology(self) -> dict[int, tuple[int, list[int]]]:
        """Per degree: (free rank, torsion invariant factors > 1), from Smith normal forms."""
        snf = {}
        for k in self.degrees:
            if self.size(k) and self.size(k - 1):
                diag, r, _ = smith_normal_form(self.dense(k))
                snf[k] = (r, [d for d in diag if d > 1])
            else:
                snf[k] = (0, [])
        out = {}
        for k in self.degrees:
            r_out = snf[k][0]
            r_in, tors = snf.get(k + 1, (0, []))
            out[k] = (self.size(k) - r_out - r_in, tors)
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.size(k) for k in self.degrees)

    def shifted(self, s: int) -> "ChainComplex":
        return ChainComplex({k + s: v for k, v in self.generators.items()}, {k + s: v for k, v in self.boundary.items()})

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "generators": {str(k): [repr(x) for x in v] for k, v in sorted(self.generators.items())},
            "boundary": {
                str(k): [[i, j, v] for (i, j), v in sorted(m.items()) if v] for k, m in sorted(self.boundary.items())
            },
        }


def betti(C: ChainComplex, coeffs: str | int = "Q") -> dict[int, int]:
    """Betti numbers over Q (``"Q"``) or Z/p (an integer prime); d^2 = 0 is checked first."""
    C.check_d2()
    if coeffs == "Q":
        return C.betti(exact=True)
    return C.betti(prime=int(coeffs))


def betti_csv(b: dict[int, int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "rank"])
    for k in sorted(b):
        w.writerow([k, b[k]])
    return buf.getvalue()


# --------------------------------------------------------------- face complex


def face_complex(cells: Sequence, relative_to: Iterable[int] = (), degree_of=None) -> ChainComplex:
    """Chain complex of oriented cell classes.

    ``cells`` need attributes ``id``, ``dim``, ``orientable`` and
    ``facets`` (a list of (cell id, incidence sign)).  Cells without an
    orientation (an orientation-reversing automorphism) and cells in
    ``relative_to`` are dropped.
    """
    for c in cells:
        if not hasattr(c, "orientable") or not hasattr(c, "facets"):
            raise ValueError("missing automorphism data")
    skip = set(relative_to)
    deg = degree_of or (lambda c: c.dim)
    live = [c for c in cells if c.orientable and c.id not in skip]
    gens: dict[int, list] = {}
    pos: dict[int, tuple[int, int]] = {}
    for c in sorted(live, key=lambda c: (deg(c), c.id)):
        k = deg(c)
        pos[c.id] = (k, len(gens.setdefault(k, [])))
        gens[k].append(c.id)
    bd: dict[int, dict[tuple[int, int], int]] = {}
    for c in live:
        k, j = pos[c.id]
        for fid, sgn in c.facets:
            if fid not in pos:
                continue
            kk, i = pos[fid]
            if kk != k - 1:
                raise ValueError("facet of the wrong dimension")
            m = bd.setdefault(k, {})
            m[(i, j)] = m.get((i, j), 0) + sgn
    return ChainComplex(gens, bd)


def perfect_face_complex(g: int, relative: bool = False, forms=None) -> ChainComplex:
    """Face complex of the perfect cone cells; ``relative`` keeps strictly positive cells only."""
    from .quadforms import assemble_perfect_complex

    P = assemble_perfect_complex(g, forms=forms, strictly_positive_only=relative)
    return face_complex(P.cells)


# ------------------------------------------------------------ graph complexes


def _weight_zero_graphs(g: int, max_edges: int | None) -> list[WeightedGraph]:
    return enumerate_stable_graphs(g, max_edges=max_edges, weight_zero_only=True)


def _oriented(G: WeightedGraph, colors: Sequence[int], order: Sequence[int]):
    """Canonical key and the sign relating ``order`` to the reference ordering."""
    lab = canonical_label(G, colors)
    return lab.key, permutation_sign([lab.edge_map[e] for e in order])


def gc0_complex(g: int, max_edges: int | None = None) -> ChainComplex:
    """Commutative graph complex on connected stable weight-0 genus-g graphs, graded by edge count.

    d[G, e_1 ... e_m] = sum_k (-1)^(k-1) [G/e_k, e_1 ... ^e_k ... e_m] over non-self edges.
    """
    if g < 2:
        raise ValueError("genus must be at least 2")
    graphs = [G for G in _weight_zero_graphs(g, max_edges) if not has_odd_automorphism(G)]
    gens: dict[int, list] = {}
    index: dict[tuple, tuple[int, int]] = {}
    for G in graphs:
        lab = canonical_label(G)
        k = G.num_edges
        index[lab.key] = (k, len(gens.setdefault(k, [])))
        gens[k].append(lab.key)
    bd: dict[int, dict[tuple[int, int], int]] = {}
    for G in graphs:
        lab = canonical_label(G)
        k, j = index[lab.key]
        order = sorted(range(G.num_edges), key=lambda e: lab.edge_map[e])
        for p, e in enumerate(order):
            if G.is_self_edge(e):
                continue
            H, emap = contract_edges(G, [e])
            key, s = _oriented(H, (0,) * H.num_edges, [emap[f] for f in order if f != e])
            if key not in index:
                continue
            i = index[key][1]
            m = bd.setdefault(k, {})
            m[(i, j)] = m.get((i, j), 0) + (-1) ** p * s
    return ChainComplex(gens, bd)


@dataclass(frozen=True)
class _BGen:
    graph: WeightedGraph
    colors: tuple[int, ...]
    key: tuple

    @property
    def num_blocks(self) -> int:
        return max(self.colors) + 1

    @property
    def degree(self) -> int:
        return self.graph.num_edges - self.num_blocks + 1


def _chain_from_colors(colors: Sequence[int]) -> list[frozenset[int]]:
    n = max(colors) + 1
    return [frozenset(e for e, c in enumerate(colors) if c <= j) for j in range(n)]


def gc0B_generators(g: int, max_edges: int | None = None, min_blocks: int = 1) -> list[_BGen]:
    out: dict[tuple, _BGen] = {}
    for G in _weight_zero_graphs(g, max_edges):
        for seq in nested_sequences(G):
            if seq.length < min_blocks:
                continue
            colors = seq.colors()
            if has_odd_automorphism(G, colors):
                continue
            lab = canonical_label(G, colors)
            if lab.key not in out:
                out[lab.key] = _BGen(lab.graph(), lab.colors(), lab.key)
    return sorted(out.values(), key=lambda b: (b.degree, b.key))


def _gc0B_terms(b: _BGen):
    """Boundary of the reference-oriented generator b: list of ((graph, colors, order), coefficient)."""
    G, colors = b.graph, b.colors
    nb = b.num_blocks
    blocks = [[e for e in range(G.num_edges) if colors[e] == j] for j in range(nb)]
    order = [e for blk in blocks for e in blk]
    s0 = permutation_sign(order)  # [b, reference] = s0 [b, order]
    chain = _chain_from_colors(colors)
    terms = []
    # internal differential: contract an admissible edge
    for p, e in enumerate(order):
        j = colors[e]
        lower = chain[j - 1] if j else frozenset()
        if len(blocks[j]) < 2 or cycle_rank(G, lower | {e}) != cycle_rank(G, lower):
            continue
        H, emap = contract_edges(G, [e])
        ncol = [0] * H.num_edges
        for f, nf in emap.items():
            ncol[nf] = colors[f]
        terms.append(((H, tuple(ncol), [emap[f] for f in order if f != e]), s0 * (-1) ** p * (-1) ** j))
    # exceptional differential: split a block by a core subgraph
    shift = 0
    for j, blk in enumerate(blocks):
        lower = chain[j - 1] if j else frozenset()
        m = len(blk)
        for mask in range(1, (1 << m) - 1):
            S = [blk[t] for t in range(m) if mask >> t & 1]
            rest = [blk[t] for t in range(m) if not mask >> t & 1]
            if bridges(G, lower | set(S)):
                continue
            ncol = [c + 1 if c > j else c for c in colors]
            for e in rest:
                ncol[e] = j + 1
            new_order = [e for blk2 in blocks[:j] for e in blk2] + S + rest + [e for blk2 in blocks[j + 1 :] for e in blk2]
            eps = permutation_sign([blk.index(e) for e in S + rest])
            coeff = s0 * (-1) ** shift * eps * (-1) ** (len(S) + 1)
            terms.append(((G, tuple(ncol), new_order), coeff))
        shift += m - 1
    return terms


def gc0B_complex(g: int, max_edges: int | None = None, min_blocks: int = 1) -> ChainComplex:
    """Graph complex on nested core sequences, graded by edge degree |E| - n + 1.

    With ``min_blocks=2`` this is the boundary subcomplex (sequences of
    length at least two).
    """
    if g < 2:
        raise ValueError("genus must be at least 2")
    gens_list = gc0B_generators(g, max_edges, min_blocks)
    gens: dict[int, list] = {}
    index: dict[tuple, tuple[int, int]] = {}
    for b in gens_list:
        index[b.key] = (b.degree, len(gens.setdefault(b.degree, [])))
        gens[b.degree].append(b.key)
    bd: dict[int, dict[tuple[int, int], int]] = {}
    for b in gens_list:
        k, j = index[b.key]
        for (H, col, order), c in _gc0B_terms(b):
            key, s = _oriented(H, col, order)
            if key not in index:
                continue
            kk, i = index[key]
            assert kk == k - 1
            m = bd.setdefault(k, {})
            m[(i, j)] = m.get((i, j), 0) + c * s
    return ChainComplex(gens, bd)


def boundary_subcomplex_ids(C: ChainComplex) -> dict[int, list[int]]:
    """Indices of generators with at least two blocks, per degree."""
    out = {}
    for k, keys in C.generators.items():
        out[k] = [i for i, key in enumerate(keys) if max(c for _, _, c in key[1]) >= 1]
    return out


# ------------------------------------------- relative face complex of graph cells


@dataclass
class _GraphCell:
    id: int
    dim: int
    graph: WeightedGraph
    orientable: bool
    facets: list[tuple[int, int]]


def relative_graph_face_complex(g: int, max_edges: int | None = None) -> ChainComplex:
    """Face complex of the simplices of weight-0 graphs, modulo the cells of weighted graphs.

    Cell of G has dimension |E| - 1 and is oriented by its edge order;
    incidence with the facet x_e = 0 is sign det(e, basis of the facet).
    """
    graphs = _weight_zero_graphs(g, max_edges)
    keys = {canonical_label(G).key: i for i, G in enumerate(graphs)}
    cells = []
    for i, G in enumerate(graphs):
        m = G.num_edges
        orientable = all(permutation_sign(ep) > 0 for _, ep in automorphisms(G))
        facets = []
        for e in range(m):
            if G.is_self_edge(e):
                continue
            H, emap = contract_edges(G, [e])
            labH = canonical_label(H)
            if labH.key not in keys:
                continue
            inv = {labH.edge_map[emap[f]]: f for f in emap}
            frame = [e] + [inv[t] for t in range(m - 1)]
            M = [[int(frame[c] == r) for c in range(m)] for r in range(m)]
            facets.append((keys[labH.key], 1 if determinant(M) > 0 else -1))
        cells.append(_GraphCell(i, m - 1, G, orientable, facets))
    return face_complex(cells)


# --------------------------------------------------------- long exact sequence


def _kernel(cols_k: list[dict[int, int]], nrows: int) -> list[list[Fraction]]:
    """Basis of the kernel of the map given by sparse columns (vectors in the column space)."""
    ncols = len(cols_k)
    if ncols == 0:
        return []
    rows = [[Fraction(0)] * ncols for _ in range(max(nrows, 1))]
    for j, col in enumerate(cols_k):
        for i, v in col.items():
            rows[i][j] = Fraction(v)
    return [[Fraction(x) for x in v] for v in kernel_basis(rows)]


def _image(cols_k: list[dict[int, int]]) -> list[dict[int, int]]:
    return [c for c in cols_k if c]


def _apply(cols: list[dict[int, int]], vec: Sequence[Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for j, x in enumerate(vec):
        if x:
            for i, v in cols[j].items():
                out[i] = out.get(i, 0) + x * v
    return {i: v for i, v in out.items() if v}


def _rank(vectors: list[dict]) -> int:
    return sparse_rank([v for v in vectors if v])


@dataclass
class LongExactReport:
    degrees: list[int]
    h_sub: dict[int, int]
    h_total: dict[int, int]
    h_quot: dict[int, int]
    rank_i: dict[int, int]
    rank_j: dict[int, int]
    rank_delta: dict[int, int]
    exact: bool
    failures: list[str]
    quotient_matches_gc0: bool

    def to_json(self) -> dict:
        d = self.__dict__.copy()
        return {k: ({str(a): b for a, b in v.items()} if isinstance(v, dict) else v) for k, v in d.items()}


def long_exact_check(g: int, max_edges: int | None = None) -> LongExactReport:
    """Exactness of H(boundary) -> H(total) -> H(quotient) -> H(boundary) for the nested-sequence complex."""
    B = gc0B_complex(g, max_edges)
    B.check_d2()
    sub_ids = boundary_subcomplex_ids(B)
    degrees = B.degrees
    # split generators into sub (A) and quotient (C) parts
    A_idx = {k: sub_ids.get(k, []) for k in degrees}
    C_idx = {k: [i for i in range(B.size(k)) if i not in set(A_idx[k])] for k in degrees}
    colsB = {k: B.columns(k) for k in degrees}

    def restrict(cols: list[dict[int, int]], src: list[int], dst: list[int]):
        pos = {x: t for t, x in enumerate(dst)}
        return [{pos[i]: v for i, v in cols[s].items() if i in pos} for s in src]

    colsA = {k: restrict(colsB[k], A_idx[k], A_idx.get(k - 1, [])) for k in degrees}
    colsC = {k: restrict(colsB[k], C_idx[k], C_idx.get(k - 1, [])) for k in degrees}

    def homology_data(cols, idx):
        Z = {k: _kernel(cols[k], len(idx.get(k - 1, []))) for k in degrees}
        Bd = {k: _image(cols.get(k + 1, [])) for k in degrees}
        return Z, Bd

    ZA, BA = homology_data(colsA, A_idx)
    ZB, BB = {k: _kernel(colsB[k], B.size(k - 1)) for k in degrees}, {k: _image(colsB.get(k + 1, [])) for k in degrees}
    ZC, BC = homology_data(colsC, C_idx)

    def hdim(Z, Bd, k):
        return len(Z[k]) - _rank(Bd[k])

    hA = {k: hdim(ZA, BA, k) for k in degrees}
    hB = {k: hdim(ZB, BB, k) for k in degrees}
    hC = {k: hdim(ZC, BC, k) for k in degrees}
    rank_i, rank_j, rank_d = {}, {}, {}
    for k in degrees:
        # i_*: embed A-cycles into B
        imgs = []
        for z in ZA[k]:
            imgs.append({A_idx[k][t]: x for t, x in enumerate(z) if x})
        rank_i[k] = _rank(imgs + BB[k]) - _rank(BB[k])
        # j_*: project B-cycles to C
        cpos = {x: t for t, x in enumerate(C_idx[k])}
        imgs = []
        for z in ZB[k]:
            imgs.append({cpos[i]: x for i, x in enumerate(z) if x and i in cpos})
        rank_j[k] = _rank(imgs + BC[k]) - _rank(BC[k])
        # delta: lift C-cycles, apply d, land in A (degree k-1)
        if k - 1 in degrees:
            apos = {x: t for t, x in enumerate(A_idx[k - 1])}
            imgs = []
            for z in ZC[k]:
                lift = [Fraction(0)] * B.size(k)
                for t, x in enumerate(z):
                    lift[C_idx[k][t]] = x
                dz = _apply(colsB[k], lift)
                if any(i not in apos for i in dz):
                    raise ArithmeticError("connecting map does not land in the boundary subcomplex")
                imgs.append({apos[i]: v for i, v in dz.items()})
            rank_d[k] = _rank(imgs + BA[k - 1]) - _rank(BA[k - 1])
        else:
            rank_d[k] = 0
    failures = []
    for k in degrees:
        if hA[k] != rank_d.get(k + 1, 0) + rank_i[k]:
            failures.append(f"H(boundary) in degree {k}")
        if hB[k] != rank_i[k] + rank_j[k]:
            failures.append(f"H(total) in degree {k}")
        if hC[k] != rank_j[k] + rank_d[k]:
            failures.append(f"H(quotient) in degree {k}")
    gc0 = gc0_complex(g, max_edges).betti()
    matches = all(gc0.get(k, 0) == hC.get(k, 0) for k in set(gc0) | set(hC))
    return LongExactReport(degrees, hA, hB, hC, rank_i, rank_j, rank_d, not failures, failures, matches)
