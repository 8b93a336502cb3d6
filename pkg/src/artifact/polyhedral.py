"""Polyhedral cones, blow-up sets and faces of blown-up cones.

A polyhedral cone is given by integer generator vectors.  Faces are
recorded as sorted tuples of generator indices.  A blow-up set is a
family of linear subspaces; since only its trace on the cone matters
for the face structure, each member is stored with the face it cuts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactlin import _rref, inverse, kernel_basis, primitive, rational_rank, saturate
from .graphs import WeightedGraph, bridges, contract_edges, cycle_rank

__all__ = [
    "PolyConfig",
    "BlowupSet",
    "BlownFace",
    "NestedSequence",
    "span_facets",
    "face_lattice",
    "graph_blown_face_count",
    "cone_is_pointed",
    "normal_polyhedron",
    "minimal_blowup_set",
    "blown_faces",
    "sequence_contract",
    "sequence_refine",
    "core_subsets",
    "graph_blowup_set",
    "graph_simplex",
    "nested_sequences",
    "InadmissibleEdgeError",
]


# ------------------------------------------------------------------- facets


def _span_columns(vectors: Sequence[Sequence]) -> list[int]:
    _, piv = _rref([[Fraction(x) for x in v] for v in vectors], len(vectors[0]))
    return piv


def _dual_rays(points: list[list[Fraction]], r: int) -> list[list[int]]:
    """Extreme rays of {y : <y, p> >= 0 for all p}; the points span Q^r and their cone is pointed."""
    if r == 1:
        return [[1]] if points[0][0] > 0 else [[-1]]
    basis: list[int] = []
    for i in range(len(points)):
        if rational_rank([points[j] for j in basis + [i]]) == len(basis) + 1:
            basis.append(i)
        if len(basis) == r:
            break
    Binv = inverse([points[i] for i in basis])
    rays = [primitive([Binv[k][c] for k in range(r)], keep_sign=True) for c in range(r)]

    def ev(y, p):
        return sum(a * b for a, b in zip(y, p))

    added = list(basis)
    for i in range(len(points)):
        if i in basis:
            continue
        p = points[i]
        vals = [ev(y, p) for y in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        tight = [frozenset(j for j in added if ev(y, points[j]) == 0) for y in rays]
        new = []
        for a in pos:
            for b in neg:
                common = tight[a] & tight[b]
                if len(common) < r - 2:
                    continue
                if any(c != a and c != b and common <= tight[c] for c in range(len(rays))):
                    continue
                y = [vals[a] * yb - vals[b] * ya for ya, yb in zip(rays[a], rays[b])]
                new.append(primitive(y, keep_sign=True))
        rays = [rays[k] for k in pos + zero] + new
        added.append(i)
    return rays


def span_facets(vectors: Sequence[Sequence]) -> list[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Facets of the pointed cone spanned by ``vectors``.

    Returns (indices on the facet, functional) pairs; the functional is
    zero on the facet and positive on the remaining vectors.  The
    functional reads only the pivot coordinates of the span.
    """
    vectors = [list(v) for v in vectors]
    if len(vectors) <= 1 or rational_rank(vectors) <= 1:
        return [((), tuple(Fraction(0) for _ in vectors[0]))] if len(vectors) == 1 else []
    cols = _span_columns(vectors)
    r = len(cols)
    pts = [[Fraction(v[c]) for c in cols] for v in vectors]
    out = []
    n = len(vectors[0])
    for ray in _dual_rays(pts, r):
        tight = tuple(i for i, p in enumerate(pts) if sum(a * b for a, b in zip(ray, p)) == 0)
        f = [Fraction(0)] * n
        for c, a in zip(cols, ray):
            f[c] = Fraction(a)
        out.append((tight, tuple(f)))
    out.sort()
    return out


def face_lattice(vectors: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """All nonempty faces (index tuples), the whole cone included, sorted by (size, indices)."""
    full = frozenset(range(len(vectors)))
    facets = [frozenset(f) for f, _ in span_facets(vectors)]
    faces = {full}
    frontier = {f for f in facets if f}
    while frontier:
        faces |= frontier
        nxt = set()
        for F in frontier:
            for H in facets:
                I = F & H
                if I and I not in faces:
                    nxt.add(I)
        frontier = nxt
    return sorted((tuple(sorted(F)) for F in faces), key=lambda t: (len(t), t))


# ---------------------------------------------------------- exact feasibility


def _exact_feasible(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """A point c >= 0 with A c = b, or None; phase-one simplex with Bland's rule."""
    m = len(A)
    n = len(A[0]) if A else 0
    rows = []
    for i in range(m):
        r = [Fraction(x) for x in A[i]] + [Fraction(int(j == i)) for j in range(m)] + [Fraction(b[i])]
        if b[i] < 0:
            r = [-x for x in r]
            r[n + i] = Fraction(1)
        rows.append(r)
    basis = [n + i for i in range(m)]
    width = n + m
    cost = [Fraction(0)] * n + [Fraction(1)] * m

    while True:
        # reduced costs
        red = list(cost) + [Fraction(0)]
        for i, bi in enumerate(basis):
            if cost[bi]:
                red = [x - cost[bi] * y for x, y in zip(red, rows[i])]
        enter = next((j for j in range(width) if red[j] < 0), None)
        if enter is None:
            break
        ratios = [(rows[i][-1] / rows[i][enter], basis[i], i) for i in range(m) if rows[i][enter] > 0]
        if not ratios:
            break
        _, _, leave = min(ratios)
        piv = rows[leave][enter]
        rows[leave] = [x / piv for x in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter]:
                f = rows[i][enter]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[leave])]
        basis[leave] = enter
    x = [Fraction(0)] * width
    for i, bi in enumerate(basis):
        x[bi] = rows[i][-1]
    if any(x[n + i] != 0 for i in range(m)):
        return None
    return x[:n]


def cone_is_pointed(vectors: Sequence[Sequence]) -> bool:
    """True iff no nontrivial nonnegative combination of the vectors vanishes."""
    vecs = [list(v) for v in vectors]
    if not vecs:
        return True
    if any(not any(v) for v in vecs):
        return False
    n = len(vecs[0])
    A = [[Fraction(v[k]) for v in vecs] for k in range(n)] + [[Fraction(1)] * len(vecs)]
    b = [Fraction(0)] * n + [Fraction(1)]
    return _exact_feasible(A, b) is None


# -------------------------------------------------------------- configurations


@dataclass(frozen=True)
class PolyConfig:
    """A polyhedral cone with integer generators in Q^n (projectively a polytope)."""

    generators: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, generators: Iterable[Sequence[int]]) -> "PolyConfig":
        gens = tuple(tuple(int(x) for x in v) for v in generators)
        if not gens:
            raise ValueError("a configuration needs generators")
        return cls(gens)

    @property
    def ambient(self) -> int:
        return len(self.generators[0])

    @property
    def dim(self) -> int:
        return rational_rank(self.generators) - 1

    def facets(self):
        return span_facets(self.generators)

    def faces(self) -> list[tuple[int, ...]]:
        return face_lattice(self.generators)

    def trace(self, W: Sequence[Sequence[int]]) -> tuple[int, ...]:
        """Indices of generators lying in span(W)."""
        if not W:
            return ()
        r = rational_rank(W)
        return tuple(i for i, v in enumerate(self.generators) if rational_rank(list(W) + [v]) == r)

    def is_face(self, idx: Sequence[int]) -> bool:
        idx = set(idx)
        if not idx:
            return True
        cover = frozenset(range(len(self.generators)))
        for f, _ in self.facets():
            if idx <= set(f):
                cover &= frozenset(f)
        return set(cover) == idx

    def meets_in_face(self, W: Sequence[Sequence[int]]) -> tuple[bool, tuple[int, ...]]:
        """Whether span(W) meets the cone in a face (possibly empty); returns the face."""
        face = self.trace(W)
        if not self.is_face(face):
            return False, face
        rest = [v for i, v in enumerate(self.generators) if i not in set(face)]
        basis = list(W) + [self.generators[i] for i in face]
        images = _quotient_images(basis, rest, self.ambient)
        return cone_is_pointed(images), face


def _quotient_images(sub: Sequence[Sequence[int]], vectors: Sequence[Sequence[int]], n: int) -> list[list[Fraction]]:
    """Coordinates of the images of ``vectors`` in Q^n / span(sub)."""
    if not sub or rational_rank(sub) == 0:
        return [[Fraction(x) for x in v] for v in vectors]
    # linear functionals vanishing on span(sub) give quotient coordinates
    ann = kernel_basis(list(sub))
    return [[Fraction(sum(a * x for a, x in zip(f, v))) for f in ann] for v in vectors]


def normal_polyhedron(sigma: PolyConfig, W: Sequence[Sequence[int]]) -> PolyConfig:
    """Images of the generators outside span(W) in Q^n / W, in annihilator coordinates."""
    ok, face = sigma.meets_in_face(W)
    if not ok:
        raise ValueError("subspace does not meet the polyhedron in a face")
    rest = [v for i, v in enumerate(sigma.generators) if i not in set(face)]
    if not W:
        return sigma
    imgs = _quotient_images(list(W), rest, sigma.ambient)
    return PolyConfig.of(_clear(v) for v in imgs)


def _clear(v: Sequence[Fraction]) -> list[int]:
    return primitive(v, keep_sign=True)


# --------------------------------------------------------------- blow-up sets


@dataclass(frozen=True)
class BlowupSet:
    """Subspaces (integer spanning sets) together with the faces they cut on a cone."""

    members: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def of(cls, members: Iterable[Iterable[Sequence[int]]]) -> "BlowupSet":
        out = []
        for W in members:
            basis = saturate([list(v) for v in W])
            out.append(tuple(tuple(v) for v in basis))
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.members)


def _same_space(A, B) -> bool:
    if len(A) != len(B):
        return False
    if not A:
        return True
    return rational_rank(list(A) + list(B)) == len(A)


def _intersection(A, B, n: int) -> tuple[tuple[int, ...], ...]:
    if not A or not B:
        return ()
    # x in A ∩ B  <=>  annihilators of both vanish on x
    ann = kernel_basis(list(A)) + kernel_basis(list(B))
    if not ann:
        return tuple(tuple(v) for v in saturate(list(A)))
    basis = kernel_basis(ann) if ann else []
    return tuple(tuple(v) for v in saturate(basis)) if basis else ()


def _contained(A, B) -> bool:
    if not A:
        return True
    if not B:
        return False
    return rational_rank(list(A) + list(B)) == len(B)


def check_blowup_axioms(B: BlowupSet, sigma: PolyConfig) -> None:
    """Raise ValueError if (B1) closure or (B2) face condition fails."""
    n = sigma.ambient
    for W in B.members:
        ok, _ = sigma.meets_in_face(W)
        if not ok:
            raise ValueError(f"(B2) violated by subspace {list(map(list, W))}")
    for A, C in itertools.combinations(B.members, 2):
        I = _intersection(A, C, n)
        if I and not any(_same_space(I, W) for W in B.members):
            raise ValueError(f"(B1) violated: intersection {list(map(list, I))} missing")


def minimal_blowup_set(B: BlowupSet, sigma: PolyConfig) -> BlowupSet:
    """Members meeting sigma that are minimal among members cutting the same face, closed under intersection."""
    check_blowup_axioms(B, sigma)
    traces = [sigma.trace(W) for W in B.members]
    keep = []
    for i, W in enumerate(B.members):
        if not traces[i]:
            continue
        if all(_contained(W, V) for j, V in enumerate(B.members) if traces[j] == traces[i]):
            keep.append(W)
    closed = list(keep)
    changed = True
    while changed:
        changed = False
        for A, C in itertools.combinations(list(closed), 2):
            I = _intersection(A, C, sigma.ambient)
            if I and not any(_same_space(I, W) for W in closed):
                closed.append(I)
                changed = True
    return BlowupSet(tuple(closed))


# ------------------------------------------------------------ blown-up faces


@dataclass(frozen=True)
class BlownFace:
    """Face of a blown-up cone: a chain of member faces and one face per graded piece.

    ``flag`` lists the member faces F_1 ⊊ ... ⊊ F_k (generator index
    tuples of the original cone), and ``pieces`` the faces H_1, ...,
    H_{k+1} with F_{i-1} ⊊ H_i ⊆ F_i (F_0 empty, F_{k+1} the cone).
    """

    flag: tuple[tuple[int, ...], ...]
    pieces: tuple[tuple[int, ...], ...]
    dim: int
    codim: int

    @property
    def is_exceptional(self) -> bool:
        return bool(self.flag)

    def to_json(self) -> dict:
        return {"schema": "v1", "flag": [list(f) for f in self.flag], "pieces": [list(p) for p in self.pieces], "codim": self.codim}


def _rank_of(vectors, idx) -> int:
    return rational_rank([vectors[i] for i in idx]) if idx else 0


def blown_faces(sigma: PolyConfig, member_faces: Iterable[Sequence[int]], max_codim: int | None = None) -> list[BlownFace]:
    """Faces of the cone blown up along the given member faces (closed under intersection).

    Each face is a chain of members with a strict-transform face in
    every graded piece: a face H of the piece is admissible when it is
    not contained in a member strictly between the chain steps.
    """
    vecs = sigma.generators
    N = len(vecs)
    top = tuple(range(N))
    members = sorted({tuple(sorted(m)) for m in member_faces if m and tuple(sorted(m)) != top}, key=lambda t: (len(t), t))
    faces = sigma.faces()
    dim_sigma = _rank_of(vecs, top) - 1
    rank = {F: _rank_of(vecs, F) for F in faces}
    for m in members:
        if m not in rank:
            raise ValueError(f"member {m} is not a face")
    memset = [frozenset(m) for m in members]

    def piece_faces(lo: tuple[int, ...], hi: tuple[int, ...]):
        slo, shi = frozenset(lo), frozenset(hi)
        between = [m for m in memset if slo < m < shi]
        for H in faces:
            sH = frozenset(H)
            if not (slo < sH <= shi):
                continue
            if any(sH <= m for m in between):
                continue
            # dimension inside the piece
            d = rank[H] - (rank[lo] if lo else 0) - 1
            yield H, d

    out = []

    def chains(prefix: list[tuple[int, ...]]):
        yield list(prefix)
        last = frozenset(prefix[-1]) if prefix else frozenset()
        for m in members:
            if last < frozenset(m):
                prefix.append(m)
                yield from chains(prefix)
                prefix.pop()

    for chain in chains([]):
        steps = [()] + chain + [top]
        options = [list(piece_faces(steps[i], steps[i + 1])) for i in range(len(steps) - 1)]
        for combo in itertools.product(*options):
            dim = sum(d for _, d in combo)
            codim = dim_sigma - dim
            if max_codim is not None and codim > max_codim:
                continue
            out.append(BlownFace(tuple(chain), tuple(H for H, _ in combo), dim, codim))
    out.sort(key=lambda f: (f.codim, f.flag, f.pieces))
    return out


# --------------------------------------------------------------- graph side


def graph_simplex(G: WeightedGraph) -> PolyConfig:
    """The coordinate simplex on the edges of G."""
    m = G.num_edges
    return PolyConfig.of([[int(i == j) for j in range(m)] for i in range(m)])


def core_subsets(G: WeightedGraph, edge_set: Iterable[int] | None = None, proper: bool = True) -> list[frozenset[int]]:
    """Nonempty bridgeless edge subsets of ``edge_set`` (default all edges)."""
    base = sorted(range(G.num_edges) if edge_set is None else set(edge_set))
    out = []
    for k in range(1, len(base) + 1):
        for S in itertools.combinations(base, k):
            if proper and k == len(base):
                continue
            if not bridges(G, S):
                out.append(frozenset(S))
    return out


def graph_blowup_set(G: WeightedGraph, kind: str = "core") -> BlowupSet:
    """Coordinate subspaces {x_e = 0, e in gamma}: gamma core (``core``) or any subset (``max``)."""
    m = G.num_edges
    if kind == "core":
        subsets = core_subsets(G)
    elif kind == "max":
        subsets = [frozenset(S) for k in range(1, m) for S in itertools.combinations(range(m), k)]
    else:
        raise ValueError(f"unknown blow-up family {kind!r}")
    members = []
    for S in subsets:
        members.append([[int(i == j) for j in range(m)] for i in range(m) if i not in S])
    return BlowupSet.of(members)


class InadmissibleEdgeError(ValueError):
    pass


@dataclass(frozen=True)
class NestedSequence:
    """A chain of edge subsets gamma_1 ⊊ ... ⊊ gamma_n = all edges of a graph."""

    graph: WeightedGraph
    chain: tuple[frozenset[int], ...]

    def __post_init__(self):
        if not self.chain or self.chain[-1] != frozenset(range(self.graph.num_edges)):
            raise ValueError("the last subgraph must be the whole graph")
        for a, b in zip(self.chain, self.chain[1:]):
            if not a < b:
                raise ValueError("chain is not strictly nested")
        if not self.chain[0]:
            raise ValueError("subgraphs must be nonempty")
        for gamma in self.chain[:-1]:
            if bridges(self.graph, gamma):
                raise ValueError("inner subgraphs must be core")

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def edge_degree(self) -> int:
        return self.graph.num_edges - self.length + 1

    def blocks(self) -> list[list[int]]:
        prev: frozenset[int] = frozenset()
        out = []
        for gamma in self.chain:
            out.append(sorted(gamma - prev))
            prev = gamma
        return out

    def block_of(self, e: int) -> int:
        for j, gamma in enumerate(self.chain):
            if e in gamma:
                return j
        raise IndexError(e)

    def colors(self) -> tuple[int, ...]:
        return tuple(self.block_of(e) for e in range(self.graph.num_edges))

    def is_admissible(self, e: int) -> bool:
        j = self.block_of(e)
        lower = self.chain[j - 1] if j else frozenset()
        if len(self.chain[j] - lower) < 2:
            return False
        return cycle_rank(self.graph, lower | {e}) == cycle_rank(self.graph, lower)


def sequence_contract(s: NestedSequence, e: int) -> tuple[NestedSequence, dict[int, int]]:
    """Contract an admissible edge; returns the new sequence and the edge relabelling."""
    if not 0 <= e < s.graph.num_edges:
        raise IndexError(f"invalid edge index {e}")
    if not s.is_admissible(e):
        raise InadmissibleEdgeError("inadmissible edge")
    H, emap = contract_edges(s.graph, [e])
    chain = tuple(frozenset(emap[f] for f in gamma if f != e) for gamma in s.chain)
    return NestedSequence(H, chain), emap


def sequence_refine(s: NestedSequence, gamma: Iterable[int]) -> NestedSequence:
    """Insert a core subgraph strictly between two consecutive members."""
    g = frozenset(gamma)
    if not g:
        raise ValueError("subgraph must be nonempty")
    if bridges(s.graph, g):
        raise ValueError("subgraph is not core")
    prev: frozenset[int] = frozenset()
    for j, step in enumerate(s.chain):
        if prev < g < step:
            return NestedSequence(s.graph, s.chain[:j] + (g,) + s.chain[j:])
        prev = step
    raise ValueError("subgraph does not fit strictly between consecutive members")


def nested_sequences(G: WeightedGraph) -> list[NestedSequence]:
    """All nested sequences ending at G (inner members nonempty, proper and core)."""
    cores = core_subsets(G)
    out = []

    def rec(chain: list[frozenset[int]]):
        out.append(NestedSequence(G, tuple(chain) + (frozenset(range(G.num_edges)),)))
        last = chain[-1] if chain else frozenset()
        for c in cores:
            if last < c:
                chain.append(c)
                rec(chain)
                chain.pop()

    rec([])
    return out


def graph_blown_face_count(G: WeightedGraph, codim: int) -> int:
    """Faces of the core blow-up of the graph simplex of a given codimension, by nested-sequence grammar.

    A face is a nested sequence of the quotient G/S by a set S of
    contracted edges that is a forest relative to each graded piece.
    """
    m = G.num_edges
    count = 0
    for seq in nested_sequences(G):
        blocks = seq.blocks()
        # per block choose S_j: contracted edges, acyclic relative to the previous member, not the whole block
        per_block = []
        prev: frozenset[int] = frozenset()
        for gamma, blk in zip(seq.chain, blocks):
            opts = []
            for k in range(len(blk)):
                for S in itertools.combinations(blk, k):
                    if cycle_rank(G, prev | set(S)) == cycle_rank(G, prev):
                        opts.append(k)
            per_block.append(opts)
            prev = gamma
        for combo in itertools.product(*per_block):
            if sum(combo) + seq.length - 1 == codim:
                count += 1
    return count
