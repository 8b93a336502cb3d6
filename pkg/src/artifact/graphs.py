"""Stable weighted multigraphs, graph polynomials, Laplacians and enumeration.

Edges are stored in the order given; the index of an edge is its label.
An edge ``(a, b)`` is oriented from ``a`` to ``b`` when cycle vectors are
built.  Self-edges have ``a == b``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .exactlin import kernel_basis, rational_rank

__all__ = [
    "WeightedGraph",
    "Subgraph",
    "Poly",
    "SymbolicLaplacian",
    "contract_edge",
    "contract_edges",
    "is_stable",
    "is_core",
    "bridges",
    "max_core",
    "cycle_rank",
    "graph_polynomial",
    "graph_laplacian",
    "fundamental_cycle_basis",
    "canonical_label",
    "automorphisms",
    "has_odd_automorphism",
    "enumerate_trivalent",
    "enumerate_stable_graphs",
    "is_3_edge_connected",
    "permutation_sign",
    "named_graph",
]


@dataclass(frozen=True)
class WeightedGraph:
    weights: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = len(self.weights)
        if any(w < 0 for w in self.weights):
            raise ValueError("negative vertex weight")
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) has an endpoint out of range")

    @classmethod
    def make(cls, edges: Iterable[Sequence[int]], weights: Sequence[int] | None = None, nverts: int | None = None):
        edges = tuple((int(a), int(b)) for a, b in edges)
        if weights is None:
            if nverts is None:
                nverts = 1 + max((max(e) for e in edges), default=-1)
            weights = (0,) * nverts
        return cls(tuple(int(w) for w in weights), edges)

    @classmethod
    def from_json(cls, data: dict) -> "WeightedGraph":
        return cls.make(data["edges"], [v.get("w", 0) for v in data["vertices"]])

    def to_json(self) -> dict:
        return {"vertices": [{"w": w} for w in self.weights], "edges": [list(e) for e in self.edges]}

    @property
    def num_vertices(self) -> int:
        return len(self.weights)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def degree(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def is_self_edge(self, e: int) -> bool:
        a, b = self.edges[e]
        return a == b

    @cached_property
    def num_components(self) -> int:
        return _components(self.num_vertices, self.edges)

    @property
    def is_connected(self) -> bool:
        return self.num_components == 1

    @property
    def loop_number(self) -> int:
        """First Betti number |E| - |V| + #components."""
        return self.num_edges - self.num_vertices + self.num_components

    @property
    def genus(self) -> int:
        return self.loop_number + self.total_weight


def _components(n: int, edges: Iterable[tuple[int, int]]) -> int:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = n
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            count -= 1
    return count


def cycle_rank(G: WeightedGraph, edge_set: Iterable[int]) -> int:
    """Rank of H_1 of the subgraph spanned by ``edge_set``."""
    es = list(edge_set)
    return len(es) - G.num_vertices + _components(G.num_vertices, [G.edges[e] for e in es])


@dataclass(frozen=True)
class Subgraph:
    parent: WeightedGraph
    edge_set: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if any(not 0 <= e < self.parent.num_edges for e in self.edge_set):
            raise ValueError("edge set is not contained in the parent graph")

    @property
    def loop_number(self) -> int:
        return cycle_rank(self.parent, self.edge_set)


# ------------------------------------------------------------------ contraction


def contract_edge(G: WeightedGraph, e: int) -> WeightedGraph:
    if not 0 <= e < G.num_edges:
        raise IndexError(f"invalid edge index {e}")
    return contract_edges(G, [e])[0]


def contract_edges(G: WeightedGraph, edge_set: Iterable[int], add_weights: bool = True):
    """Contract a set of edges.

    Returns ``(quotient, edge_map)`` where ``edge_map[old] = new`` for the
    surviving edges; surviving edges keep their relative order.  With
    ``add_weights=False`` vertex weights are not increased, which gives
    the plain quotient multigraph.
    """
    S = set(edge_set)
    for e in S:
        if not 0 <= e < G.num_edges:
            raise IndexError(f"invalid edge index {e}")
    n = G.num_vertices
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    loops_at: dict[int, int] = {}
    for e in sorted(S):
        a, b = G.edges[e]
        ra, rb = find(a), find(b)
        if ra == rb:
            loops_at[e] = a
        else:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(v) for v in range(n)})
    new_index = {r: i for i, r in enumerate(roots)}
    weights = [0] * len(roots)
    for v in range(n):
        weights[new_index[find(v)]] += G.weights[v]
    if add_weights:
        for e, a in loops_at.items():
            weights[new_index[find(a)]] += 1
    edges = []
    edge_map = {}
    for e, (a, b) in enumerate(G.edges):
        if e in S:
            continue
        edge_map[e] = len(edges)
        edges.append((new_index[find(a)], new_index[find(b)]))
    return WeightedGraph(tuple(weights), tuple(edges)), edge_map


# -------------------------------------------------------------- stability, core


def is_stable(G: WeightedGraph) -> bool:
    for v, w in enumerate(G.weights):
        d = G.degree(v)
        if w == 0 and d < 3:
            return False
        if w > 0 and 2 * w - 2 + d <= 0:
            return False
    return True


def bridges(G: WeightedGraph, edge_set: Iterable[int] | None = None) -> set[int]:
    """Edges of the subgraph whose removal raises the number of components."""
    es = list(range(G.num_edges)) if edge_set is None else sorted(set(edge_set))
    out = set()
    base = _components(G.num_vertices, [G.edges[e] for e in es])
    for e in es:
        if G.is_self_edge(e):
            continue
        rest = [G.edges[f] for f in es if f != e]
        if _components(G.num_vertices, rest) > base:
            out.add(e)
    return out


def is_core(gamma: Subgraph) -> bool:
    return not bridges(gamma.parent, gamma.edge_set)


def max_core(gamma: Subgraph) -> Subgraph:
    """Largest bridgeless subgraph: the input minus its bridges."""
    return Subgraph(gamma.parent, frozenset(gamma.edge_set) - bridges(gamma.parent, gamma.edge_set))


def is_3_edge_connected(G: WeightedGraph) -> bool:
    """Connected, and G minus any single edge is connected and bridgeless."""
    if not G.is_connected:
        return False
    allE = range(G.num_edges)
    for e in allE:
        rest = [f for f in allE if f != e]
        if _components(G.num_vertices, [G.edges[f] for f in rest]) != 1:
            return False
        if bridges(G, rest):
            return False
    return True


# ------------------------------------------------------------------ polynomials


@dataclass(frozen=True)
class Poly:
    """Polynomial with integer coefficients: exponent tuple -> coefficient."""

    nvars: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_dict(cls, nvars: int, d: dict) -> "Poly":
        return cls(nvars, tuple(sorted((tuple(k), int(v)) for k, v in d.items() if v)))

    @classmethod
    def constant(cls, nvars: int, c: int) -> "Poly":
        return cls.from_dict(nvars, {(0,) * nvars: c})

    @classmethod
    def linear(cls, coeffs: Sequence[int]) -> "Poly":
        n = len(coeffs)
        return cls.from_dict(n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs) if c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "Poly") -> "Poly":
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return Poly.from_dict(self.nvars, d)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        d: dict = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                k = tuple(a + b for a, b in zip(k1, k2))
                d[k] = d.get(k, 0) + v1 * v2
        return Poly.from_dict(self.nvars, d)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def degrees(self) -> set[int]:
        return {sum(k) for k, _ in self.terms}

    def set_zero(self, variables: Iterable[int]) -> "Poly":
        vs = set(variables)
        return Poly.from_dict(self.nvars, {k: v for k, v in self.terms if not any(k[i] for i in vs)})

    def embed(self, nvars: int, positions: Sequence[int]) -> "Poly":
        """Rename variable i to ``positions[i]`` in a ring of ``nvars`` variables."""
        d = {}
        for k, v in self.terms:
            nk = [0] * nvars
            for i, a in enumerate(k):
                nk[positions[i]] += a
            d[tuple(nk)] = d.get(tuple(nk), 0) + v
        return Poly.from_dict(nvars, d)

    def evaluate(self, point: Sequence) -> object:
        total = 0
        for k, v in self.terms:
            term = v
            for x, a in zip(point, k):
                if a:
                    term = term * x**a
            total = total + term
        return total

    def to_json(self) -> dict:
        return {"monomials": [{"exponents": list(k), "coeff": v} for k, v in self.terms]}


# Polynomials of graphs are multilinear; the alias records the intent.
MultilinearPoly = Poly


def _spanning_tree_poly(nverts: int, edges: Sequence[tuple[int, int]], labels: Sequence[int], nvars: int) -> Poly:
    """Sum over spanning forests (one tree per component) of complement monomials."""
    ncomp = _components(nverts, edges)
    size = nverts - ncomp
    d: dict = {}
    idx = range(len(edges))
    for tree in itertools.combinations(idx, size):
        if _components(nverts, [edges[i] for i in tree]) != ncomp:
            continue
        k = [0] * nvars
        chosen = set(tree)
        for i in idx:
            if i not in chosen:
                k[labels[i]] += 1
        k = tuple(k)
        d[k] = d.get(k, 0) + 1
    return Poly.from_dict(nvars, d)


def graph_polynomial(G: WeightedGraph, ignore_weights: bool = False, method: str = "auto") -> Poly:
    """Kirchhoff polynomial in the edge variables, zero if G carries weight."""
    m = G.num_edges
    if G.total_weight > 0 and not ignore_weights:
        return Poly(m, ())
    if method == "auto":
        method = "trees" if m <= 12 else "determinant"
    if method == "trees":
        return _spanning_tree_poly(G.num_vertices, G.edges, list(range(m)), m)
    # product over components of Laplacian determinants
    comp_of = _component_labels(G)
    result = Poly.constant(m, 1)
    for c in sorted(set(comp_of)):
        verts = [v for v in range(G.num_vertices) if comp_of[v] == c]
        vmap = {v: i for i, v in enumerate(verts)}
        es = [e for e in range(m) if comp_of[G.edges[e][0]] == c]
        sub = WeightedGraph.make([(vmap[G.edges[e][0]], vmap[G.edges[e][1]]) for e in es], nverts=len(verts))
        det = graph_laplacian(sub).determinant()
        result = result * det.embed(m, es)
    return result


def _component_labels(G: WeightedGraph) -> list[int]:
    adj = [[] for _ in range(G.num_vertices)]
    for a, b in G.edges:
        adj[a].append(b)
        adj[b].append(a)
    comp = [-1] * G.num_vertices
    c = 0
    for s in range(G.num_vertices):
        if comp[s] >= 0:
            continue
        comp[s] = c
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if comp[y] < 0:
                    comp[y] = c
                    stack.append(y)
        c += 1
    return comp


def subgraph_polynomial(G: WeightedGraph, edge_set: Iterable[int]) -> Poly:
    """Kirchhoff polynomial of the subgraph on ``edge_set`` in the variables of G."""
    es = sorted(set(edge_set))
    return _spanning_tree_poly(G.num_vertices, [G.edges[e] for e in es], es, G.num_edges)


def quotient_polynomial(G: WeightedGraph, edge_set: Iterable[int]) -> Poly:
    """Kirchhoff polynomial of the multigraph G/edge_set in the variables of G."""
    H, emap = contract_edges(G, edge_set, add_weights=False)
    inv = [0] * H.num_edges
    for old, new in emap.items():
        inv[new] = old
    return _spanning_tree_poly(H.num_vertices, H.edges, inv, G.num_edges)


# ------------------------------------------------------------------ Laplacians


def fundamental_cycle_basis(G: WeightedGraph) -> list[list[int]]:
    """Cycle basis from a BFS spanning forest; one cycle per non-tree edge, in label order."""
    n = G.num_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (a, b) in enumerate(G.edges):
        if a != b:
            adj[a].append((b, e))
            adj[b].append((a, e))
    parent_edge = [-1] * n
    depth = [-1] * n
    tree = set()
    for s in range(n):
        if depth[s] >= 0:
            continue
        depth[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y, e in sorted(adj[x], key=lambda t: t[1]):
                if depth[y] < 0:
                    depth[y] = depth[x] + 1
                    parent_edge[y] = e
                    tree.add(e)
                    q.append(y)

    def step_up(v):
        e = parent_edge[v]
        a, b = G.edges[e]
        return (a if b == v else b), e

    basis = []
    for e, (a, b) in enumerate(G.edges):
        if e in tree:
            continue
        vec = [0] * G.num_edges
        vec[e] += 1
        if a != b:
            # walk b -> a through the tree
            x, y = b, a
            up_x, up_y = [], []
            while depth[x] > depth[y]:
                p, f = step_up(x)
                up_x.append((x, p, f))
                x = p
            while depth[y] > depth[x]:
                p, f = step_up(y)
                up_y.append((y, p, f))
                y = p
            while x != y:
                p, f = step_up(x)
                up_x.append((x, p, f))
                x = p
                p, f = step_up(y)
                up_y.append((y, p, f))
                y = p
            for u, v, f in up_x:  # traverse u -> v
                vec[f] += 1 if G.edges[f] == (u, v) else -1
            for u, v, f in reversed(up_y):  # traverse v -> u
                vec[f] += 1 if G.edges[f] == (v, u) else -1
        basis.append(vec)
    return basis


@dataclass(frozen=True)
class SymbolicLaplacian:
    """Symmetric matrix of integer linear forms; entry[i][j][e] is the coefficient of x_e."""

    entries: tuple[tuple[tuple[int, ...], ...], ...]
    cycle_basis: tuple[tuple[int, ...], ...]
    nvars: int

    @property
    def size(self) -> int:
        return len(self.entries)

    def evaluate(self, x: Sequence) -> list[list]:
        return [[sum(c * xe for c, xe in zip(ent, x)) for ent in row] for row in self.entries]

    def edge_form(self, e: int) -> list[list[int]]:
        """Coefficient matrix of x_e."""
        return [[ent[e] for ent in row] for row in self.entries]

    def determinant(self) -> Poly:
        """Determinant as a polynomial, by cofactor expansion over column subsets."""
        h = self.size
        m = self.nvars
        if h == 0:
            return Poly.constant(m, 1)
        polys = [[Poly.linear(ent) for ent in row] for row in self.entries]
        memo: dict[int, Poly] = {0: Poly.constant(m, 1)}
        # memo[mask] = det of rows 0..k-1 on the columns in mask (k = popcount)
        for k in range(h):
            nxt: dict[int, Poly] = {}
            for mask, val in memo.items():
                if val.is_zero():
                    continue
                for j in range(h):
                    if mask & (1 << j):
                        continue
                    sign = -1 if bin(mask >> (j + 1)).count("1") % 2 else 1
                    term = polys[k][j] * val
                    if sign < 0:
                        term = -term
                    key = mask | (1 << j)
                    nxt[key] = nxt[key] + term if key in nxt else term
            memo = nxt
        return memo.get((1 << h) - 1, Poly(m, ()))


def graph_laplacian(G: WeightedGraph, basis: Sequence[Sequence[int]] | None = None) -> SymbolicLaplacian:
    if G.total_weight > 0:
        raise ValueError("Laplacian undefined for weighted graphs")
    if not G.is_connected:
        raise ValueError("Laplacian requires a connected graph")
    if basis is None:
        basis = fundamental_cycle_basis(G)
    basis = [list(map(int, c)) for c in basis]
    m = G.num_edges
    for c in basis:
        if len(c) != m:
            raise ValueError("cycle vector has the wrong length")
        for v in range(G.num_vertices):
            if sum(c[e] * ((G.edges[e][1] == v) - (G.edges[e][0] == v)) for e in range(m)) != 0:
                raise ValueError("basis vector is not a cycle")
    if len(basis) != G.loop_number or (basis and rational_rank(basis) != len(basis)):
        raise ValueError("cycle vectors do not form a basis of H_1")
    entries = tuple(
        tuple(tuple(ci[e] * cj[e] for e in range(m)) for cj in basis) for ci in basis
    )
    return SymbolicLaplacian(entries, tuple(tuple(c) for c in basis), m)


# ------------------------------------------------------- canonical labelling


def permutation_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _refined_classes(G: WeightedGraph, colors: Sequence[int]) -> list[int]:
    """Colour refinement; returns a canonical integer colour per vertex."""
    n = G.num_vertices
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    loops = [[] for _ in range(n)]
    for e, (a, b) in enumerate(G.edges):
        if a == b:
            loops[a].append(colors[e])
        else:
            nbrs[a].append((b, colors[e]))
            nbrs[b].append((a, colors[e]))
    sig = [(G.weights[v], G.degree(v), tuple(sorted(loops[v]))) for v in range(n)]
    col = _relabel(sig)
    while True:
        sig = [(col[v], tuple(sorted((col[u], c) for u, c in nbrs[v]))) for v in range(n)]
        new = _relabel(sig)
        if len(set(new)) == len(set(col)):
            return new
        col = new


def _relabel(sig: list) -> list[int]:
    order = {s: i for i, s in enumerate(sorted(set(sig)))}
    return [order[s] for s in sig]


def _key(G: WeightedGraph, colors: Sequence[int], vperm: Sequence[int]):
    n = G.num_vertices
    w = [0] * n
    for v in range(n):
        w[vperm[v]] = G.weights[v]
    triples = []
    for e, (a, b) in enumerate(G.edges):
        x, y = vperm[a], vperm[b]
        if x > y:
            x, y = y, x
        triples.append((x, y, colors[e]))
    return (tuple(w), tuple(sorted(triples)))


def _candidate_perms(G: WeightedGraph, colors: Sequence[int]):
    """Vertex relabellings old->new compatible with the refined colour classes."""
    col = _refined_classes(G, colors)
    classes: dict[int, list[int]] = {}
    for v, c in enumerate(col):
        classes.setdefault(c, []).append(v)
    ordered = [classes[c] for c in sorted(classes)]
    offsets = []
    pos = 0
    for cls in ordered:
        offsets.append(pos)
        pos += len(cls)
    for choice in itertools.product(*[itertools.permutations(cls) for cls in ordered]):
        vperm = [0] * G.num_vertices
        for off, arr in zip(offsets, choice):
            for i, v in enumerate(arr):
                vperm[v] = off + i
        yield vperm


@dataclass(frozen=True)
class CanonicalLabel:
    key: tuple
    vertex_map: tuple[int, ...]  # old vertex -> canonical vertex
    edge_map: tuple[int, ...]  # old edge -> canonical edge position

    def graph(self) -> WeightedGraph:
        w, triples = self.key
        return WeightedGraph(w, tuple((a, b) for a, b, _ in triples))

    def colors(self) -> tuple[int, ...]:
        return tuple(c for _, _, c in self.key[1])


def canonical_label(G: WeightedGraph, colors: Sequence[int] | None = None) -> CanonicalLabel:
    """Canonical form under weight- and colour-preserving isomorphism.

    Two coloured graphs are isomorphic iff their keys are equal.  Edges
    with identical canonical (endpoints, colour) are matched in label
    order.
    """
    if colors is None:
        colors = (0,) * G.num_edges
    best = None
    best_perm = None
    for vperm in _candidate_perms(G, colors):
        k = _key(G, colors, vperm)
        if best is None or k < best:
            best, best_perm = k, vperm
    if best is None:  # no vertices
        return CanonicalLabel(((), ()), (), ())
    return CanonicalLabel(best, tuple(best_perm), tuple(_edge_map(G, colors, best_perm, best[1])))


def _edge_map(G, colors, vperm, sorted_triples) -> list[int]:
    slots: dict[tuple, list[int]] = {}
    for pos, t in enumerate(sorted_triples):
        slots.setdefault(t, []).append(pos)
    out = [0] * G.num_edges
    used: dict[tuple, int] = {}
    for e, (a, b) in enumerate(G.edges):
        x, y = vperm[a], vperm[b]
        t = (min(x, y), max(x, y), colors[e])
        i = used.get(t, 0)
        out[e] = slots[t][i]
        used[t] = i + 1
    return out


def automorphisms(G: WeightedGraph, colors: Sequence[int] | None = None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (vertex permutation, edge permutation) pairs preserving incidence, weights and colours.

    Orientation flips of self-edges are not counted separately.
    """
    if colors is None:
        colors = (0,) * G.num_edges
    ident = _key(G, colors, list(range(G.num_vertices)))
    groups: dict[tuple, list[int]] = {}
    for e, (a, b) in enumerate(G.edges):
        groups.setdefault((min(a, b), max(a, b), colors[e]), []).append(e)
    out = []
    for vperm in _candidate_perms(G, colors):
        if _key(G, colors, vperm) != ident:
            continue
        # map each parallel class onto its image class in every possible way
        images = []
        for t, es in groups.items():
            a, b, c = t
            x, y = vperm[a], vperm[b]
            images.append((es, groups[(min(x, y), max(x, y), c)]))
        for choice in itertools.product(*[itertools.permutations(dst) for _, dst in images]):
            eperm = [0] * G.num_edges
            for (src, _), dst in zip(images, choice):
                for s, d in zip(src, dst):
                    eperm[s] = d
            out.append((tuple(vperm), tuple(eperm)))
    return out


def has_odd_automorphism(G: WeightedGraph, colors: Sequence[int] | None = None) -> bool:
    """True iff some automorphism induces an odd permutation of the edges."""
    if colors is None:
        colors = (0,) * G.num_edges
    groups: dict[tuple, int] = {}
    for e, (a, b) in enumerate(G.edges):
        t = (min(a, b), max(a, b), colors[e])
        groups[t] = groups.get(t, 0) + 1
        if groups[t] > 1:
            return True  # swapping two parallel edges
    ident = _key(G, colors, list(range(G.num_vertices)))
    for vperm in _candidate_perms(G, colors):
        if _key(G, colors, vperm) != ident:
            continue
        eperm = _edge_map(G, colors, vperm, [t for t in ident[1]])
        # eperm sends e to the canonical position of its image, ident positions = sorted triples
        base = _edge_map(G, colors, list(range(G.num_vertices)), ident[1])
        inv_base = [0] * len(base)
        for e, p in enumerate(base):
            inv_base[p] = e
        if permutation_sign([inv_base[p] for p in eperm]) < 0:
            return True
    return False


# ------------------------------------------------------------------ enumeration


def enumerate_trivalent(g: int) -> list[WeightedGraph]:
    """Connected 3-regular weight-0 multigraphs of genus g, one per isomorphism class."""
    if g < 2:
        return []
    n = 2 * g - 2
    found: dict[tuple, WeightedGraph] = {}
    rem = [3] * n
    edges: list[tuple[int, int]] = []

    def rec():
        i = next((v for v in range(n) if rem[v] > 0), None)
        if i is None:
            G = WeightedGraph((0,) * n, tuple(edges))
            if G.is_connected:
                k = canonical_label(G).key
                if k not in found:
                    found[k] = canonical_label(G).graph()
            return
        lo = edges[-1][1] if edges and edges[-1][0] == i else i
        for j in range(lo, n):
            need = 2 if j == i else 1
            if rem[i] < need or (j != i and rem[j] < 1):
                continue
            rem[i] -= 1
            rem[j] -= 1
            edges.append((i, j))
            rec()
            edges.pop()
            rem[i] += 1
            rem[j] += 1

    rec()
    return [found[k] for k in sorted(found)]


def enumerate_stable_graphs(g: int, max_edges: int | None = None, weight_zero_only: bool = False) -> list[WeightedGraph]:
    """Isomorphism classes of connected stable genus-g graphs with at least one edge.

    Obtained by closing the trivalent classes under edge contraction.
    Returned in canonical form, sorted by (edge count, key).
    """
    if g < 2:
        raise ValueError("genus must be at least 2")
    seen: dict[tuple, WeightedGraph] = {}
    frontier = enumerate_trivalent(g)
    for G in frontier:
        seen[canonical_label(G).key] = G
    while frontier:
        nxt = []
        for G in frontier:
            if G.num_edges <= 1:
                continue
            for e in range(G.num_edges):
                H = contract_edge(G, e)
                if weight_zero_only and H.total_weight:
                    continue
                lab = canonical_label(H)
                if lab.key not in seen:
                    seen[lab.key] = lab.graph()
                    nxt.append(lab.graph())
        frontier = nxt
    out = [G for G in seen.values() if max_edges is None or G.num_edges <= max_edges]
    if weight_zero_only:
        out = [G for G in out if G.total_weight == 0]
    out.sort(key=lambda G: (G.num_edges, canonical_label(G).key))
    return out


def named_graph(name: str) -> WeightedGraph:
    """Small graphs used in examples and tests."""
    table = {
        "sunrise": [(0, 1), (0, 1), (0, 1)],
        "theta": [(0, 1), (0, 1), (0, 1)],
        "dumbbell": [(0, 0), (0, 1), (1, 1)],
        # wheel with three spokes: rim labels 0..2, spokes 3..5 towards hub 3;
        # the cycles e1+e2+e4-e5, e2+e4-e6, e3-e4+e5 are a basis of H_1
        "w3": [(1, 2), (2, 0), (0, 1), (0, 3), (1, 3), (2, 3)],
        "k4": [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    }
    if name not in table:
        raise KeyError(f"unknown graph {name!r}")
    return WeightedGraph.make(table[name])
