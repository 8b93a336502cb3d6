"""The tropical Torelli map on graph cells.

An edge e of G is sent to the rank-one form Q_e = v_e v_e^T where
v_e = (<h_i, e>)_i lists the coefficients of e in a cycle basis h of
H_1(G).  The linear map lambda_G: Q^E -> Sym^2 has these as columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exactlin import kernel_basis, rational_rank, saturate
from .graphs import (
    WeightedGraph,
    bridges,
    fundamental_cycle_basis,
    graph_polynomial,
    is_3_edge_connected,
    max_core,
    Subgraph,
)
from .polyhedral import PolyConfig, graph_simplex
from .quadforms import Cone, cone_faces, cone_null_space, essential_envelope, normalize_vector, sym_vec

__all__ = [
    "TorelliImage",
    "TorelliConsistencyError",
    "InjectivityResult",
    "WHEEL_BASIS",
    "torelli_cone",
    "torelli_injective",
    "graph_face_kernel",
    "preimage_equations",
    "torelli_face_map_check",
    "FaceMatch",
    "FaceMapReport",
]

# cycle basis of the wheel with edges [(1,2),(2,0),(0,1),(0,3),(1,3),(2,3)]
WHEEL_BASIS = ((1, 1, 0, 1, -1, 0), (0, 1, 0, 1, 0, -1), (0, 0, 1, -1, 1, 0))


class TorelliConsistencyError(ArithmeticError):
    pass


def _check_cycle_basis(G: WeightedGraph, basis: Sequence[Sequence[int]]) -> None:
    m = G.num_edges
    for c in basis:
        if len(c) != m:
            raise ValueError("cycle vector has the wrong length")
        for v in range(G.num_vertices):
            if sum(c[e] * ((G.edges[e][1] == v) - (G.edges[e][0] == v)) for e in range(m)):
                raise ValueError("basis vector is not a cycle")
    if len(basis) != G.loop_number or (basis and rational_rank(basis) != len(basis)):
        raise ValueError("cycle vectors do not form a basis of H_1")


@dataclass(frozen=True)
class TorelliImage:
    graph: WeightedGraph
    basis: tuple[tuple[int, ...], ...]
    edge_vectors: tuple[tuple[int, ...], ...]
    bridges: frozenset[int]
    cone: Cone

    @property
    def genus(self) -> int:
        return len(self.basis)

    def edge_form(self, e: int) -> list[list[int]]:
        v = self.edge_vectors[e]
        return [[a * b for b in v] for a in v]

    def matrix(self) -> list[list[int]]:
        """lambda_G in sym_vec coordinates: one row per coordinate, one column per edge."""
        cols = [sym_vec(v) for v in self.edge_vectors]
        return [list(r) for r in zip(*cols)] if cols else []

    def evaluate(self, x: Sequence) -> list[list]:
        h = self.genus
        return [
            [sum(xe * v[i] * v[j] for xe, v in zip(x, self.edge_vectors)) for j in range(h)] for i in range(h)
        ]

    def generator_index(self, e: int) -> int | None:
        v = self.edge_vectors[e]
        if not any(v):
            return None
        return self.cone.generators.index(normalize_vector(v))


def torelli_cone(G: WeightedGraph, basis: Sequence[Sequence[int]] | None = None) -> TorelliImage:
    if not G.is_connected:
        raise ValueError("graph must be connected")
    if basis is None:
        basis = fundamental_cycle_basis(G)
    basis = tuple(tuple(int(x) for x in c) for c in basis)
    _check_cycle_basis(G, basis)
    vecs = tuple(tuple(c[e] for c in basis) for e in range(G.num_edges))
    br = frozenset(e for e, v in enumerate(vecs) if not any(v))
    if br != frozenset(bridges(G)):
        raise TorelliConsistencyError("zero edge vectors differ from the bridges")
    nonzero = [v for v in vecs if any(v)]
    cone = Cone.of(len(basis), nonzero) if nonzero else Cone(len(basis), ())
    return TorelliImage(G, basis, vecs, br, cone)


@dataclass(frozen=True)
class InjectivityResult:
    injective: bool
    rank: int
    kernel: tuple[tuple[int, ...], ...]

    def __bool__(self) -> bool:
        return self.injective


def torelli_injective(G: WeightedGraph) -> InjectivityResult:
    """3-edge-connectivity, certified by the rank of lambda_G (and a kernel basis when not injective)."""
    img = torelli_cone(G)
    M = img.matrix()
    r = rational_rank(M) if M else 0
    ker = tuple(tuple(v) for v in kernel_basis(M)) if M else tuple(
        tuple(int(i == j) for j in range(G.num_edges)) for i in range(G.num_edges)
    )
    three = is_3_edge_connected(G)
    if three != (r == G.num_edges):
        raise TorelliConsistencyError(f"rank {r} of lambda disagrees with 3-edge-connectivity {three}")
    return InjectivityResult(three, r, ker)


def graph_face_kernel(G: WeightedGraph, gamma: Iterable[int], basis: Sequence[Sequence[int]] | None = None) -> list[list[int]]:
    """H_1(gamma) inside H_1(G), as a saturated basis in the coordinates of the cycle basis.

    Also asserts that the essential envelope of the image face is the
    face of the largest core subgraph of gamma.
    """
    img = torelli_cone(G, basis)
    gamma = frozenset(gamma)
    outside = [img.edge_vectors[e] for e in range(G.num_edges) if e not in gamma]
    h = img.genus
    if not outside:
        K = [[int(i == j) for j in range(h)] for i in range(h)]
    else:
        K = saturate(kernel_basis([list(v) for v in outside])) if rational_rank(outside) < h else []
    core = max_core(Subgraph(G, gamma)).edge_set
    orth = frozenset(
        e for e, v in enumerate(img.edge_vectors) if all(sum(a * b for a, b in zip(v, k)) == 0 for k in K)
    )
    if orth != frozenset(range(G.num_edges)) - frozenset(core):
        raise TorelliConsistencyError("envelope of the image face differs from the core face")
    return [list(k) for k in K]


def preimage_equations(img: TorelliImage, K: Sequence[Sequence[int]]) -> list[list[int]]:
    """Linear equations in the edge lengths for lambda_G(x) k = 0 for all k in K (one per (k, row))."""
    eqs = []
    for k in K:
        for i in range(img.genus):
            eqs.append([sum(a * b for a, b in zip(v, k)) * v[i] for v in img.edge_vectors])
    return [r for r in eqs if any(r)]


@dataclass
class FaceMatch:
    image_face: tuple[int, ...]
    graph_face: tuple[int, ...]
    gamma: tuple[int, ...]
    kernel_dim: int
    matched: bool
    witness: str = ""

    def to_json(self) -> dict:
        return {
            "graph_face": list(self.graph_face),
            "gamma": list(self.gamma),
            "kernel_dim": self.kernel_dim,
            "matched": self.matched,
            **({"witness": self.witness} if self.witness else {}),
        }


@dataclass
class FaceMapReport:
    graph: WeightedGraph
    faces: list[FaceMatch] = field(default_factory=list)

    @property
    def all_matched(self) -> bool:
        return all(f.matched for f in self.faces)

    def to_json(self) -> dict:
        return {"schema": "v1", "graph": self.graph.to_json(), "faces": [f.to_json() for f in self.faces]}


def _same_span(A, B) -> bool:
    if not A or not B:
        return not A and not B
    return rational_rank(A) == rational_rank(B) == rational_rank(list(A) + list(B))


def torelli_face_map_check(G: WeightedGraph, basis: Sequence[Sequence[int]] | None = None) -> FaceMapReport:
    """Match every essential face at infinity of the image cone with a core subgraph of G."""
    if not is_3_edge_connected(G):
        raise ValueError("graph must be 3-edge connected")
    img = torelli_cone(G, basis)
    sigma = graph_simplex(G)
    report = FaceMapReport(G)
    gens = img.cone.generators
    for face in cone_faces(img.cone):
        K = cone_null_space([gens[i] for i in face])
        if not K or essential_envelope(img.cone, face) != tuple(face):
            continue
        eqs = preimage_equations(img, K)
        locus = kernel_basis(eqs) if eqs else [[int(i == j) for j in range(G.num_edges)] for i in range(G.num_edges)]
        ok, gface = sigma.meets_in_face(locus)
        gamma = tuple(e for e in range(G.num_edges) if e not in set(gface))
        witness = ""
        if not ok:
            witness = "preimage does not meet the simplex in a face"
        elif bridges(G, gamma):
            witness = "complement of the preimage face is not core"
        else:
            try:
                Kg = graph_face_kernel(G, gamma, img.basis)
            except TorelliConsistencyError as exc:
                Kg, witness = None, str(exc)
            if Kg is not None and not _same_span(Kg, K):
                witness = "kernel of the core subgraph differs"
            image_of_face = {img.generator_index(e) for e in gface}
            if not witness and image_of_face != set(face):
                witness = "graph face does not map onto the image face"
        report.faces.append(FaceMatch(tuple(face), tuple(gface), gamma, len(K), not witness, witness))
    return report


def determinant_check(G: WeightedGraph, points: Iterable[Sequence[int]]) -> bool:
    """det lambda_G(x) equals the graph polynomial at each point."""
    from .exactlin import determinant

    img = torelli_cone(G)
    psi = graph_polynomial(G, ignore_weights=True)
    return all(determinant(img.evaluate(x)) == psi.evaluate(x) for x in points)
