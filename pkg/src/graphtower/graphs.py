"""Finite multigraphs in Serre's formalism, their Laplacians and Jacobians.

A graph is a set of vertices and a set of *directed* edges closed under a
fixed-point-free involution ``bar``; an unoriented edge is a pair
``{e, bar(e)}``.  Loops and multi-edges are allowed.  Vertices and edges
are addressed by index; ``vertices`` holds their display names.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Sequence

from .linalg import AbelianGroupClass, IntMatrix, cokernel, determinant

__all__ = [
    "GraphError",
    "Graph",
    "Divisor",
    "CoveringMorphism",
    "CoveringCheck",
    "validate_graph",
    "components",
    "is_connected",
    "laplacian_matrix",
    "laplacian_apply",
    "picard_group",
    "jacobian",
    "kappa",
    "kappa_bruteforce",
    "validate_covering",
    "covering_degree",
    "pushforward",
    "check_functoriality_diagram",
    "identity_covering",
]

BRUTEFORCE_EDGE_LIMIT = 12


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    vertices: tuple[Hashable, ...]
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    bar: tuple[int, ...]

    @classmethod
    def from_edges(cls, vertices: Sequence[Hashable], edges: Sequence[tuple[int, int]]) -> "Graph":
        """Build a graph from unoriented edges given as (u, v) vertex-index pairs.

        Edge ``2*i`` runs u -> v and edge ``2*i + 1`` is its reverse.
        """
        src, tgt, bar = [], [], []
        for i, (u, v) in enumerate(edges):
            src += [u, v]
            tgt += [v, u]
            bar += [2 * i + 1, 2 * i]
        return cls(tuple(vertices), tuple(src), tuple(tgt), tuple(bar))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        """Number of directed edges."""
        return len(self.src)

    @property
    def num_undirected(self) -> int:
        return len(self.src) // 2

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        """``out_edges[v]`` lists the edges e with src(e) == v."""
        out = [[] for _ in self.vertices]
        for e, v in enumerate(self.src):
            out[v].append(e)
        return tuple(tuple(es) for es in out)

    def undirected_edges(self) -> list[int]:
        """One representative (the smaller index) of every pair {e, bar e}."""
        return [e for e in range(self.num_edges) if e < self.bar[e]]

    def vertex_index(self, name: Hashable) -> int:
        return self.vertices.index(name)


def validate_graph(g: Graph) -> str | None:
    """Return a description of the first violated graph axiom, or None."""
    nv, ne = len(g.vertices), len(g.src)
    if len(g.tgt) != ne or len(g.bar) != ne:
        return "src, tgt and bar must have one entry per edge"
    for e in range(ne):
        if not (0 <= g.src[e] < nv and 0 <= g.tgt[e] < nv):
            return f"edge {e} has an endpoint outside the vertex set"
        if not 0 <= g.bar[e] < ne:
            return f"bar({e}) is not an edge"
    for e in range(ne):
        b = g.bar[e]
        if b == e:
            return f"fixed-point involution: bar({e}) = {e}"
        if g.bar[b] != e:
            return f"bar is not an involution at edge {e}"
        if g.src[b] != g.tgt[e]:
            return f"src(bar {e}) != tgt({e})"
        if g.tgt[b] != g.src[e]:
            return f"tgt(bar {e}) != src({e})"
    return None


def _require_valid(g: Graph):
    problem = validate_graph(g)
    if problem:
        raise GraphError(f"invalid graph: {problem}")


def components(g: Graph) -> int:
    """Number of connected components."""
    parent = list(range(g.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = g.num_vertices
    for u, v in zip(g.src, g.tgt):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            count -= 1
    return count


def is_connected(g: Graph) -> bool:
    return components(g) == 1


def _require_connected(g: Graph):
    _require_valid(g)
    if not is_connected(g):
        raise GraphError(f"graph is disconnected ({components(g)} components)")


def laplacian_matrix(g: Graph, ordering: Sequence[int] | None = None) -> IntMatrix:
    """Matrix whose row for v lists the coefficients of L([v]) = sum_{s(e)=v} ([v] - [t(e)]).

    A loop contributes [v] - [v] = 0 in both orientations.
    """
    _require_valid(g)
    n = g.num_vertices
    rows = [[0] * n for _ in range(n)]
    for e, (u, v) in enumerate(zip(g.src, g.tgt)):
        rows[u][u] += 1
        rows[u][v] -= 1
    if ordering is not None:
        ordering = list(ordering)
        if sorted(ordering) != list(range(n)):
            raise GraphError("ordering must be a permutation of the vertex indices")
        rows = [[rows[i][j] for j in ordering] for i in ordering]
    return IntMatrix.from_rows(rows, n)


def picard_group(g: Graph) -> AbelianGroupClass:
    """Pic(X) = coker of the Laplacian; free part of rank one."""
    _require_connected(g)
    return cokernel(laplacian_matrix(g).transpose())


def jacobian(g: Graph) -> AbelianGroupClass:
    """Jac(X) = degree-zero part of Pic(X), i.e. its torsion."""
    return picard_group(g).torsion()


def kappa(g: Graph, drop: int = 0, method: str = "bareiss") -> int:
    """Number of spanning trees, as a principal minor of the Laplacian."""
    _require_connected(g)
    if g.num_vertices == 1:
        return 1
    return determinant(laplacian_matrix(g).delete(drop, drop), method=method)


def kappa_bruteforce(g: Graph, limit: int = BRUTEFORCE_EDGE_LIMIT) -> int:
    """Count spanning trees by trying every (|V|-1)-subset of unoriented edges.

    Parallel edges count as distinct; loops never occur in a tree.
    """
    _require_connected(g)
    reps = g.undirected_edges()
    if len(reps) > limit:
        raise GraphError(f"{len(reps)} unoriented edges exceeds the brute-force limit {limit}")
    candidates = [(g.src[e], g.tgt[e]) for e in reps if g.src[e] != g.tgt[e]]
    n = g.num_vertices
    count = 0
    for subset in itertools.combinations(candidates, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for u, v in subset:
            ru, rv = find(u), find(v)
            if ru == rv:
                break
            parent[ru] = rv
        else:
            count += 1
    return count


@dataclass(frozen=True)
class Divisor:
    """Integer combination of the vertices of ``graph``."""

    graph: Graph
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.graph.num_vertices:
            raise GraphError("divisor length does not match the vertex count")

    @classmethod
    def zero(cls, g: Graph) -> "Divisor":
        return cls(g, (0,) * g.num_vertices)

    @classmethod
    def basis(cls, g: Graph, v: int) -> "Divisor":
        return cls(g, tuple(int(i == v) for i in range(g.num_vertices)))

    @classmethod
    def ones(cls, g: Graph) -> "Divisor":
        return cls(g, (1,) * g.num_vertices)

    def _check(self, other):
        if other.graph != self.graph:
            raise GraphError("divisors live on different graphs")

    def __add__(self, other: "Divisor") -> "Divisor":
        self._check(other)
        return Divisor(self.graph, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Divisor") -> "Divisor":
        self._check(other)
        return Divisor(self.graph, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor(self.graph, tuple(k * a for a in self.coeffs))

    @property
    def degree(self) -> int:
        return sum(self.coeffs)


def laplacian_apply(d: Divisor) -> Divisor:
    """Apply the Laplacian operator straight from its edge-sum definition."""
    g = d.graph
    out = [0] * g.num_vertices
    for v, c in enumerate(d.coeffs):
        if c:
            for e in g.out_edges[v]:
                out[v] += c
                out[g.tgt[e]] -= c
    return Divisor(g, tuple(out))


@dataclass(frozen=True)
class CoveringMorphism:
    """Morphism f: domain -> codomain given on vertices and directed edges."""

    domain: Graph
    codomain: Graph
    vmap: tuple[int, ...]
    emap: tuple[int, ...]


@dataclass(frozen=True)
class CoveringCheck:
    ok: bool
    ram_indices: tuple[int, ...] = ()
    violation: str | None = None

    def __bool__(self):
        return self.ok


def identity_covering(g: Graph) -> CoveringMorphism:
    return CoveringMorphism(g, g, tuple(range(g.num_vertices)), tuple(range(g.num_edges)))


def validate_covering(f: CoveringMorphism) -> CoveringCheck:
    """Check the morphism and covering axioms; report m_w for every w on success."""
    Y, X = f.domain, f.codomain
    for name, g in (("domain", Y), ("codomain", X)):
        problem = validate_graph(g)
        if problem:
            return CoveringCheck(False, violation=f"{name}: {problem}")
    if len(f.vmap) != Y.num_vertices or len(f.emap) != Y.num_edges:
        return CoveringCheck(False, violation="vmap/emap sizes do not match the domain")
    if any(not 0 <= v < X.num_vertices for v in f.vmap):
        return CoveringCheck(False, violation="vmap leaves the codomain")
    if any(not 0 <= e < X.num_edges for e in f.emap):
        return CoveringCheck(False, violation="emap leaves the codomain")
    for e in range(Y.num_edges):
        fe = f.emap[e]
        if f.vmap[Y.src[e]] != X.src[fe]:
            return CoveringCheck(False, violation=f"src not preserved at edge {e}")
        if f.vmap[Y.tgt[e]] != X.tgt[fe]:
            return CoveringCheck(False, violation=f"tgt not preserved at edge {e}")
        if f.emap[Y.bar[e]] != X.bar[fe]:
            return CoveringCheck(False, violation=f"bar not preserved at edge {e}")
    ram = []
    for w in range(Y.num_vertices):
        v = f.vmap[w]
        counts = Counter(f.emap[e] for e in Y.out_edges[w])
        wanted = X.out_edges[v]
        if not wanted and not counts:
            ram.append(1)
            continue
        mults = {counts.get(e, 0) for e in wanted}
        if len(mults) != 1 or 0 in mults:
            return CoveringCheck(
                False, violation=f"edges at vertex {w} do not map uniformly onto those at {v}"
            )
        ram.append(mults.pop())
    return CoveringCheck(True, tuple(ram))


def covering_degree(f: CoveringMorphism) -> int:
    """[Y:X] = sum of m_w over a vertex fibre; checked against every fibre and edge fibre."""
    check = validate_covering(f)
    if not check:
        raise GraphError(f"not a covering: {check.violation}")
    X = f.codomain
    sums = [0] * X.num_vertices
    for w, v in enumerate(f.vmap):
        sums[v] += check.ram_indices[w]
    edge_fibres = Counter(f.emap)
    degrees = set(sums) | {edge_fibres.get(e, 0) for e in range(X.num_edges)}
    if len(degrees) != 1:
        raise GraphError(f"inconsistent covering degree: {sorted(degrees)}")
    return degrees.pop()


def pushforward(f: CoveringMorphism, d: Divisor, mode: str = "star") -> Divisor:
    """f_*([w]) = [f(w)] (mode ``"star"``) or f_r([w]) = m_w [f(w)] (mode ``"r"``)."""
    if d.graph != f.domain:
        raise GraphError("divisor is not on the domain of the covering")
    if mode == "star":
        weights = (1,) * f.domain.num_vertices
    elif mode == "r":
        check = validate_covering(f)
        if not check:
            raise GraphError(f"not a covering: {check.violation}")
        weights = check.ram_indices
    else:
        raise ValueError(f"unknown pushforward mode {mode!r}")
    out = [0] * f.codomain.num_vertices
    for w, c in enumerate(d.coeffs):
        out[f.vmap[w]] += weights[w] * c
    return Divisor(f.codomain, tuple(out))


def check_functoriality_diagram(f: CoveringMorphism) -> Divisor | None:
    """Verify f_* L_Y = L_X f_r on each [w] and f_r(sum [w]) = [Y:X] sum [v].

    Returns None when both squares commute, otherwise a divisor on the
    domain witnessing the failure.
    """
    Y, X = f.domain, f.codomain
    for w in range(Y.num_vertices):
        bw = Divisor.basis(Y, w)
        lhs = pushforward(f, laplacian_apply(bw), "star")
        rhs = laplacian_apply(pushforward(f, bw, "r"))
        if lhs != rhs:
            return bw
    ones = Divisor.ones(Y)
    if pushforward(f, ones, "r") != covering_degree(f) * Divisor.ones(X):
        return ones
    return None
