"""Graph and voltage-graph families: cycles, the multi-cycles Y(m, N), the
three inertia cases over a cycle, and random instances for property tests."""

from __future__ import annotations

import random

from .graphs import CoveringMorphism, Graph
from .groups import InertiaGenerator, ProfiniteSpec, SubgroupSpec
from .voltage import VoltageGraph, connectivity, derive

__all__ = [
    "make_cycle",
    "make_Y",
    "is_Y_graph",
    "collapse_Y",
    "make_section5_voltage",
    "canonical_inertia",
    "random_connected_multigraph",
    "random_voltage_graph",
    "random_subgroup_spec",
    "SECTION5_CASES",
]

SECTION5_CASES = ("a", "b", "c")


def make_Y(m: int, N: int) -> Graph:
    """m vertices v1..vm on a cycle, with N parallel edges from v_i to v_{i+1}."""
    if m < 1 or N < 1:
        raise ValueError("m and N must be positive")
    vertices = [f"v{i + 1}" for i in range(m)]
    edges = [(i, (i + 1) % m) for i in range(m) for _ in range(N)]
    return Graph.from_edges(vertices, edges)


def make_cycle(m: int) -> Graph:
    """Cycle with m vertices; edge 2*(i-1) is e_i: v_i -> v_{i+1}."""
    return make_Y(m, 1)


def collapse_Y(m: int, N: int) -> CoveringMorphism:
    """The totally ramified covering Y(m, N) -> Y(m, 1) merging parallel edges."""
    Y, X = make_Y(m, N), make_Y(m, 1)
    emap = tuple(2 * (d // 2 // N) + d % 2 for d in range(Y.num_edges))
    return CoveringMorphism(Y, X, tuple(range(m)), emap)


def is_Y_graph(g: Graph, m: int, N: int) -> bool:
    """Decide whether g is isomorphic to Y(m, N)."""
    if g.num_vertices != m or g.num_undirected != m * N:
        return False
    mult = {}
    for e in g.undirected_edges():
        key = frozenset((g.src[e], g.tgt[e]))
        mult[key] = mult.get(key, 0) + 1
    if m == 1:
        return mult == {frozenset((0,)): N}
    if m == 2:
        return mult == {frozenset((0, 1)): 2 * N}
    if any(len(k) != 2 or c != N for k, c in mult.items()):
        return False
    # every vertex has two distinct neighbours and the graph is one cycle
    nbrs = {v: set() for v in range(m)}
    for k in mult:
        u, v = tuple(k)
        nbrs[u].add(v)
        nbrs[v].add(u)
    if any(len(s) != 2 for s in nbrs.values()):
        return False
    seen, prev, cur = {0}, None, 0
    while True:
        nxt = next(x for x in nbrs[cur] if x != prev)
        if nxt == 0:
            break
        if nxt in seen:
            return False
        seen.add(nxt)
        prev, cur = cur, nxt
    return len(seen) == m


def canonical_inertia(spec: ProfiniteSpec, kind: str) -> SubgroupSpec:
    """One of the four canonical inertia groups: trivial, G, Gamma, Gamma x G."""
    if kind == "trivial":
        return SubgroupSpec.trivial()
    if kind == "G":
        return SubgroupSpec.g_part(spec)
    if kind == "Gamma":
        return SubgroupSpec.gamma(spec)
    if kind == "Gamma x G":
        return SubgroupSpec.whole(spec)
    raise ValueError(f"unknown inertia kind {kind!r}")


_CASE_KIND = {"a": "G", "b": "Gamma", "c": "Gamma x G"}


def make_section5_voltage(p: int, m: int, case: str, g_order: int | None = None) -> VoltageGraph:
    """Cycle of length m over Z_p x Z/g_order (default g_order = p).

    alpha(e_1) = (1, 1), every other voltage is trivial, and every vertex
    gets the inertia group G (case a), Gamma (case b) or Gamma x G (case c).
    """
    if case not in _CASE_KIND:
        raise ValueError(f"case must be one of {SECTION5_CASES}, got {case!r}")
    spec = ProfiniteSpec(p, (g_order or p,))
    base = make_cycle(m)
    inertia = [canonical_inertia(spec, _CASE_KIND[case])] * m
    return VoltageGraph.from_representatives(base, spec, {0: spec.element(1, (1,))}, inertia)


def random_connected_multigraph(rng: random.Random, max_vertices: int = 6,
                                max_edges: int = 12, loops: bool = True) -> Graph:
    n = rng.randint(1, max_vertices)
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[rng.randrange(i)], order[i]) for i in range(1, n)]
    extra = rng.randint(0 if n > 1 else 1, max_edges - len(edges))
    for _ in range(extra):
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v and not loops:
            continue
        edges.append((u, v))
    rng.shuffle(edges)
    edges = [(u, v) if rng.random() < 0.5 else (v, u) for u, v in edges]
    return Graph.from_edges([f"x{i}" for i in range(n)], edges)


def random_voltage_graph(rng: random.Random, p: int = 2, g_factors: tuple[int, ...] | None = None,
                         max_vertices: int = 4, max_edges: int = 6,
                         kinds=("trivial", "G", "Gamma", "Gamma x G"),
                         attempts: int = 200) -> VoltageGraph:
    """Random voltage graph whose every layer is connected.

    Inertia groups are drawn from ``kinds``.  Connectivity of layer 1
    implies it for all layers (a p-group is generated by a set iff that set
    generates its Frattini quotient), so layers 0 and 1 are checked.
    """
    spec = ProfiniteSpec(p, (p,) if g_factors is None else tuple(g_factors))
    for _ in range(attempts):
        base = random_connected_multigraph(rng, max_vertices, max_edges)
        volts = {}
        for e in base.undirected_edges():
            zp = rng.randrange(-p ** 2, p ** 2 + 1)
            g = tuple(rng.randrange(q) for q in spec.g_factors)
            volts[e] = spec.element(zp, g)
        inertia = [canonical_inertia(spec, rng.choice(kinds)) for _ in base.vertices]
        vg = VoltageGraph.from_representatives(base, spec, volts, inertia)
        if connectivity(derive(vg, 0)) == 1 and connectivity(derive(vg, 1)) == 1:
            return vg
    raise RuntimeError("could not draw a connected voltage graph")


def random_subgroup_spec(rng: random.Random, spec: ProfiniteSpec, max_k: int = 3,
                         max_gens: int = 3) -> SubgroupSpec:
    """Random closed subgroup with generators (p^k or 0, g)."""
    gens = []
    for _ in range(rng.randint(0, max_gens)):
        k = rng.choice([None] + list(range(max_k + 1)))
        g = tuple(rng.randrange(q) for q in spec.g_factors)
        gens.append(InertiaGenerator(k, g))
    return SubgroupSpec(tuple(gens))
