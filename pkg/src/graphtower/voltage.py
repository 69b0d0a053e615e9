"""Voltage graphs with inertia and their derived coverings.

A :class:`VoltageGraph` carries voltages in the profinite group Z_p x G
and one closed inertia subgroup per base vertex.  Its tower is never
materialised; :func:`derive` builds the finite layer at a given level
from the induced voltage graph over Z/p^n x G.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

from .graphs import (
    CoveringMorphism,
    Graph,
    components,
    laplacian_matrix,
    validate_covering,
    validate_graph,
)
from .groups import (
    FiniteSubgroup,
    GroupElement,
    LayerGroup,
    ProfiniteSpec,
    SubgroupSpec,
    subgroup_image,
)

__all__ = [
    "VoltageError",
    "GaloisAxiomError",
    "VoltageGraph",
    "FiniteVoltageGraph",
    "DerivedLayer",
    "GroupAction",
    "ExtractedVoltage",
    "validate_voltage",
    "quotient_voltage",
    "derive",
    "derive_finite",
    "covering_between",
    "layer_covering",
    "cross_covering",
    "groupring_laplacian_check",
    "voltage_from_covering",
    "connectivity",
    "tower",
]


class VoltageError(ValueError):
    pass


class GaloisAxiomError(VoltageError):
    """The supplied group action does not make the morphism a Galois covering."""


@dataclass(frozen=True)
class VoltageGraph:
    """Base graph with voltages in Z_p x G (one per directed edge) and inertia per vertex."""

    base: Graph
    spec: ProfiniteSpec
    alpha: tuple[GroupElement, ...]
    inertia: tuple[SubgroupSpec, ...]

    @classmethod
    def from_representatives(cls, base: Graph, spec: ProfiniteSpec,
                             voltages: dict[int, GroupElement],
                             inertia: Sequence[SubgroupSpec]) -> "VoltageGraph":
        """Voltages given on one orientation per edge; the reverse gets the negative.

        Edges missing from ``voltages`` carry the identity.
        """
        alpha = [None] * base.num_edges
        for e, x in voltages.items():
            alpha[e] = spec.element(x.zp, x.g)
            alpha[base.bar[e]] = spec.neg(alpha[e])
        alpha = [spec.zero() if x is None else x for x in alpha]
        return cls(base, spec, tuple(alpha), tuple(inertia))


@dataclass(frozen=True)
class FiniteVoltageGraph:
    """Voltage graph over a finite layer group Z/p^n x G."""

    base: Graph
    group: LayerGroup
    alpha: tuple[tuple[int, ...], ...]
    inertia: tuple[FiniteSubgroup, ...]


def validate_voltage(vg: VoltageGraph | FiniteVoltageGraph) -> str | None:
    """Return the first violated voltage-graph condition, or None."""
    g = vg.base
    problem = validate_graph(g)
    if problem:
        return f"base graph: {problem}"
    if len(vg.alpha) != g.num_edges:
        return "one voltage per directed edge is required"
    if len(vg.inertia) != g.num_vertices:
        return "one inertia group per vertex is required"
    if isinstance(vg, VoltageGraph):
        k = len(vg.spec.g_factors)
        for e, x in enumerate(vg.alpha):
            if len(x.g) != k:
                return f"voltage on edge {e} has the wrong number of G-coordinates"
        for e, x in enumerate(vg.alpha):
            if vg.spec.add(x, vg.alpha[g.bar[e]]) != vg.spec.zero():
                return f"voltage involution violated at edge {e}"
        for v, s in enumerate(vg.inertia):
            bad = s.check(vg.spec)
            if bad:
                return f"inertia at vertex {v}: {bad}"
    else:
        grp = vg.group
        for e, x in enumerate(vg.alpha):
            if grp.add(x, vg.alpha[g.bar[e]]) != grp.zero:
                return f"voltage involution violated at edge {e}"
        for v, s in enumerate(vg.inertia):
            if s.layer != grp:
                return f"inertia at vertex {v} lives in another group"
    return None


def _project_finite(fvg: FiniteVoltageGraph, lower: LayerGroup) -> FiniteVoltageGraph:
    grp = fvg.group
    return FiniteVoltageGraph(
        fvg.base,
        lower,
        tuple(grp.project(x, lower) for x in fvg.alpha),
        tuple(s.image(lower) for s in fvg.inertia),
    )


def quotient_voltage(vg, selector):
    """Induced voltage graph for a supported quotient.

    ``selector`` is ``"trivial"`` (no change), ``"G"`` (quotient by 1 x G,
    leaving Z_p-data), or an integer n (quotient by p^n Z_p, giving the
    finite voltage graph over Z/p^n x G).
    """
    if selector == "trivial":
        return vg
    if isinstance(vg, VoltageGraph):
        if selector == "G":
            spec = vg.spec.quotient_by_g()
            return VoltageGraph(
                vg.base, spec,
                tuple(spec.element(x.zp) for x in vg.alpha),
                tuple(s.drop_g() for s in vg.inertia),
            )
        if isinstance(selector, int) and not isinstance(selector, bool) and selector >= 0:
            layer = vg.spec.layer(selector)
            return FiniteVoltageGraph(
                vg.base, layer,
                tuple(layer.reduce(x) for x in vg.alpha),
                tuple(subgroup_image(s, layer) for s in vg.inertia),
            )
    elif isinstance(vg, FiniteVoltageGraph):
        grp = vg.group
        if selector == "G":
            return _project_finite(vg, grp.spec.quotient_by_g().layer(grp.n))
        if isinstance(selector, int) and not isinstance(selector, bool) and 0 <= selector <= grp.n:
            return _project_finite(vg, grp.spec.layer(selector))
    raise VoltageError(f"unsupported quotient selector {selector!r}")


@dataclass(frozen=True)
class GroupAction:
    """Action of a finite layer group on a graph by explicit permutations."""

    group: LayerGroup
    vperm: dict = field(hash=False)
    eperm: dict = field(hash=False)


@dataclass(frozen=True, eq=False)
class DerivedLayer:
    """Derived graph of a finite voltage graph, with its labels and group action.

    Vertex ``i`` is the pair ``vertex_labels[i] = (coset rep, base vertex)``;
    edge ``j`` is ``edge_labels[j] = (group element, base edge)``.
    """

    graph: Graph
    level: int
    voltage: FiniteVoltageGraph
    vertex_labels: tuple[tuple[tuple[int, ...], int], ...]
    edge_labels: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def group(self) -> LayerGroup:
        return self.voltage.group

    @cached_property
    def vertex_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.vertex_labels)}

    def edge_index(self, gamma, e: int) -> int:
        grp = self.group
        return e * grp.order + grp.index_of(gamma)

    def act(self, h) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Vertex and edge permutations induced by the group element h."""
        grp, inertia = self.group, self.voltage.inertia
        vidx = self.vertex_index
        vperm = tuple(
            vidx[(inertia[v].coset_rep(grp.add(h, c)), v)] for c, v in self.vertex_labels
        )
        eperm = tuple(self.edge_index(grp.add(h, g), e) for g, e in self.edge_labels)
        return vperm, eperm

    def action(self) -> GroupAction:
        vp, ep = {}, {}
        for h in self.group.elements():
            vp[h], ep[h] = self.act(h)
        return GroupAction(self.group, vp, ep)

    def projection(self) -> CoveringMorphism:
        """The covering map to the base graph."""
        return CoveringMorphism(
            self.graph, self.voltage.base,
            tuple(v for _, v in self.vertex_labels),
            tuple(e for _, e in self.edge_labels),
        )

    def fibre_sizes(self) -> list[int]:
        """Number of vertices over each base vertex."""
        sizes = [0] * self.voltage.base.num_vertices
        for _, v in self.vertex_labels:
            sizes[v] += 1
        return sizes


def _vertex_name(base: Graph, v: int, rep: tuple[int, ...]) -> str:
    return f"{base.vertices[v]}@{','.join(map(str, rep))}"


def derive_finite(fvg: FiniteVoltageGraph, level: int | None = None) -> DerivedLayer:
    """Build the derived graph X(Gamma, I) of a finite voltage graph."""
    problem = validate_voltage(fvg)
    if problem:
        raise VoltageError(problem)
    base, grp = fvg.base, fvg.group
    elements = grp.elements()

    vertex_labels = []
    for v, sub in enumerate(fvg.inertia):
        vertex_labels += [(rep, v) for rep in sub.representatives()]
    vidx = {lab: i for i, lab in enumerate(vertex_labels)}

    src, tgt, bar, edge_labels = [], [], [], []
    order = grp.order
    for e in range(base.num_edges):
        a = fvg.alpha[e]
        s_sub = fvg.inertia[base.src[e]]
        t_sub = fvg.inertia[base.tgt[e]]
        for g in elements:
            ga = grp.add(g, a)
            src.append(vidx[(s_sub.coset_rep(g), base.src[e])])
            tgt.append(vidx[(t_sub.coset_rep(ga), base.tgt[e])])
            bar.append(base.bar[e] * order + grp.index_of(ga))
            edge_labels.append((g, e))

    graph = Graph(
        tuple(_vertex_name(base, v, rep) for rep, v in vertex_labels),
        tuple(src), tuple(tgt), tuple(bar),
    )
    problem = validate_graph(graph)
    if problem:
        raise VoltageError(f"derived graph is malformed: {problem}")
    return DerivedLayer(
        graph, grp.n if level is None else level, fvg, tuple(vertex_labels), tuple(edge_labels)
    )


@lru_cache(maxsize=128)
def derive(vg: VoltageGraph, n: int) -> DerivedLayer:
    """Layer n of the tower: the derived graph over Z/p^n x G."""
    if n < 0:
        raise VoltageError("level must be non-negative")
    problem = validate_voltage(vg)
    if problem:
        raise VoltageError(problem)
    return derive_finite(quotient_voltage(vg, n), n)


def tower(vg: VoltageGraph, start: int = 0):
    """Lazy sequence of layers start, start+1, ..."""
    n = start
    while True:
        yield derive(vg, n)
        n += 1


def covering_between(upper: DerivedLayer, lower: DerivedLayer) -> CoveringMorphism:
    """Natural projection of derived layers induced by the group projection."""
    if upper.voltage.base != lower.voltage.base:
        raise VoltageError("layers are over different base graphs")
    up, lo = upper.group, lower.group
    vidx = lower.vertex_index
    lo_inertia = lower.voltage.inertia
    vmap = tuple(
        vidx[(lo_inertia[v].coset_rep(up.project(c, lo)), v)] for c, v in upper.vertex_labels
    )
    emap = tuple(lower.edge_index(up.project(g, lo), e) for g, e in upper.edge_labels)
    return CoveringMorphism(upper.graph, lower.graph, vmap, emap)


def layer_covering(vg: VoltageGraph, n_hi: int, n_lo: int) -> CoveringMorphism:
    """The covering X_{n_hi} -> X_{n_lo} of tower layers."""
    if n_hi < n_lo:
        raise VoltageError("n_hi must be at least n_lo")
    return covering_between(derive(vg, n_hi), derive(vg, n_lo))


def cross_covering(vg: VoltageGraph, n: int) -> CoveringMorphism:
    """The covering from layer n of the full tower to layer n of its G-quotient."""
    return covering_between(derive(vg, n), derive(quotient_voltage(vg, "G"), n))


def groupring_laplacian_check(vg: VoltageGraph | FiniteVoltageGraph, n: int | None = None) -> str | None:
    """Compare the group-ring Laplacian with the Laplacian of the derived graph.

    Row (c, v) of the group-ring side is c * N_{I_v} * sum_{e at v} ([v] - alpha(e)[t(e)])
    expanded in the basis of cosets; it must equal the matching row of the
    derived graph's Laplacian.  Returns None on agreement, else the first
    differing entry.
    """
    fvg = quotient_voltage(vg, n) if isinstance(vg, VoltageGraph) else vg
    base, grp = fvg.base, fvg.group
    basis = [(rep, v) for v, sub in enumerate(fvg.inertia) for rep in sub.representatives()]
    pos = {b: i for i, b in enumerate(basis)}
    size = len(basis)

    rows = []
    for c, v in basis:
        row = [0] * size
        norm = fvg.inertia[v].sorted_elements()
        for e in base.out_edges[v]:
            t = base.tgt[e]
            row[pos[(c, v)]] += len(norm)
            shift = grp.add(c, fvg.alpha[e])
            for sigma in norm:
                row[pos[(fvg.inertia[t].coset_rep(grp.add(shift, sigma)), t)]] -= 1
        rows.append(row)

    layer = derive_finite(fvg)
    if list(layer.vertex_labels) != basis:
        return "derived vertex ordering differs from the group-ring basis"
    direct = laplacian_matrix(layer.graph)
    for i in range(size):
        for j in range(size):
            if rows[i][j] != direct[i, j]:
                return (f"entry ({basis[i]}, {basis[j]}): group ring gives {rows[i][j]}, "
                        f"derived graph gives {direct[i, j]}")
    return None


@dataclass(frozen=True, eq=False)
class ExtractedVoltage:
    """Voltage data recovered from a Galois covering, plus the isomorphism witness.

    ``vmap``/``emap`` send the vertices/edges of ``derived`` to those of the
    original covering graph.
    """

    voltage: FiniteVoltageGraph
    derived: DerivedLayer
    vmap: tuple[int, ...]
    emap: tuple[int, ...]


def _check_action(f: CoveringMorphism, action: GroupAction):
    Y = f.domain
    grp = action.group
    elements = grp.elements()
    nv, ne = Y.num_vertices, Y.num_edges
    for h in elements:
        vp, ep = action.vperm.get(h), action.eperm.get(h)
        if vp is None or ep is None:
            raise GaloisAxiomError(f"action: no permutation given for {h}")
        if sorted(vp) != list(range(nv)) or sorted(ep) != list(range(ne)):
            raise GaloisAxiomError(f"action: element {h} does not act by permutations")
        for e in range(ne):
            if (Y.src[ep[e]] != vp[Y.src[e]] or Y.tgt[ep[e]] != vp[Y.tgt[e]]
                    or Y.bar[ep[e]] != ep[Y.bar[e]]):
                raise GaloisAxiomError(f"action: element {h} is not a graph automorphism")
        if any(f.vmap[vp[w]] != f.vmap[w] for w in range(nv)) or any(
                f.emap[ep[e]] != f.emap[e] for e in range(ne)):
            raise GaloisAxiomError(f"respects f: element {h} moves a fibre")
    if action.vperm[grp.zero] != tuple(range(nv)) or action.eperm[grp.zero] != tuple(range(ne)):
        raise GaloisAxiomError("action: identity does not act trivially")
    gens = grp.whole().generators
    for g in gens:
        for h in elements:
            gh = grp.add(g, h)
            if tuple(action.vperm[g][action.vperm[h][w]] for w in range(nv)) != tuple(action.vperm[gh]):
                raise GaloisAxiomError("action: not compatible with the group law")
            if tuple(action.eperm[g][action.eperm[h][e]] for e in range(ne)) != tuple(action.eperm[gh]):
                raise GaloisAxiomError("action: not compatible with the group law")


def voltage_from_covering(f: CoveringMorphism, action: GroupAction) -> ExtractedVoltage:
    """Recover voltage data from a Galois covering with a finite abelian group.

    Lifts are the lowest-index vertex of each fibre and the lowest-index
    edge over e starting at the chosen lift of s(e).  alpha(e) is the
    element moving the lift of bar(e) onto bar(lift of e), and I_v is the
    stabiliser of the lift of v.
    """
    check = validate_covering(f)
    if not check:
        raise GaloisAxiomError(f"not a covering: {check.violation}")
    _check_action(f, action)
    Y, X = f.domain, f.codomain
    grp = action.group
    elements = grp.elements()

    vfib = [[] for _ in range(X.num_vertices)]
    for w, v in enumerate(f.vmap):
        vfib[v].append(w)
    efib = [[] for _ in range(X.num_edges)]
    for d, e in enumerate(f.emap):
        efib[e].append(d)

    for v, fib in enumerate(vfib):
        if not fib:
            raise GaloisAxiomError(f"transitive on vertex fibres: fibre over {v} is empty")
        orbit = {action.vperm[h][fib[0]] for h in elements}
        if orbit != set(fib):
            raise GaloisAxiomError(f"transitive on vertex fibres: fails over vertex {v}")
    for e, fib in enumerate(efib):
        if not fib:
            raise GaloisAxiomError(f"transitive on edge fibres: fibre over {e} is empty")
        images = [action.eperm[h][fib[0]] for h in elements]
        if set(images) != set(fib):
            raise GaloisAxiomError(f"transitive on edge fibres: fails over edge {e}")
        if len(set(images)) != len(images):
            raise GaloisAxiomError(f"free on edge fibres: fails over edge {e}")

    vlift = [fib[0] for fib in vfib]
    elift = []
    for e in range(X.num_edges):
        start = vlift[X.src[e]]
        choice = next((d for d in efib[e] if Y.src[d] == start), None)
        if choice is None:
            raise GaloisAxiomError(f"no lift of edge {e} starts at the chosen vertex lift")
        elift.append(choice)

    alpha = []
    for e in range(X.num_edges):
        target = Y.bar[elift[e]]
        source = elift[X.bar[e]]
        hits = [h for h in elements if action.eperm[h][source] == target]
        if len(hits) != 1:
            raise GaloisAxiomError(f"free on edge fibres: voltage of edge {e} is not unique")
        alpha.append(hits[0])
    inertia = tuple(
        FiniteSubgroup(grp, tuple(h for h in elements if action.vperm[h][vlift[v]] == vlift[v]))
        for v in range(X.num_vertices)
    )
    fvg = FiniteVoltageGraph(X, grp, tuple(alpha), inertia)
    derived = derive_finite(fvg)

    vmap = tuple(action.vperm[c][vlift[v]] for c, v in derived.vertex_labels)
    emap = tuple(action.eperm[g][elift[e]] for g, e in derived.edge_labels)
    _verify_witness(derived, f, action, vmap, emap)
    return ExtractedVoltage(fvg, derived, vmap, emap)


def _verify_witness(derived: DerivedLayer, f: CoveringMorphism, action: GroupAction, vmap, emap):
    D, Y = derived.graph, f.domain
    if sorted(vmap) != list(range(Y.num_vertices)) or sorted(emap) != list(range(Y.num_edges)):
        raise VoltageError("witness is not bijective")
    for d in range(D.num_edges):
        y = emap[d]
        if (Y.src[y] != vmap[D.src[d]] or Y.tgt[y] != vmap[D.tgt[d]]
                or Y.bar[y] != emap[D.bar[d]]):
            raise VoltageError(f"witness is not a graph morphism at edge {d}")
    proj = derived.projection()
    if any(f.vmap[vmap[i]] != proj.vmap[i] for i in range(D.num_vertices)) or any(
            f.emap[emap[d]] != proj.emap[d] for d in range(D.num_edges)):
        raise VoltageError("witness does not commute with the projections")
    for h in derived.group.elements():
        dv, de = derived.act(h)
        if any(vmap[dv[i]] != action.vperm[h][vmap[i]] for i in range(D.num_vertices)) or any(
                emap[de[d]] != action.eperm[h][emap[d]] for d in range(D.num_edges)):
            raise VoltageError(f"witness is not equivariant for {h}")


def connectivity(layer: DerivedLayer | Graph) -> int:
    """Number of connected components (1 means connected)."""
    g = layer.graph if isinstance(layer, DerivedLayer) else layer
    return components(g)
