"""Finite abelian p-groups Z/p^n x G and the profinite group Z_p x G.

Conventions
-----------
``G = Z/p^e1 x ... x Z/p^ek`` is fixed by a :class:`ProfiniteSpec`.  The
layer at level ``n`` is the quotient ``Z/p^n x G``; its elements are plain
tuples ``(a, g1, ..., gk)`` of reduced residues, enumerated in
lexicographic order.  That order is the canonical one everywhere (coset
representatives are the lexicographically smallest coset members).

A closed subgroup of ``Z_p x G`` is described by a :class:`SubgroupSpec`,
a list of generators whose Z_p-coordinate is either zero or ``p^k``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .linalg import smith_normal_form

__all__ = [
    "EXPLICIT_LIMIT",
    "GroupError",
    "is_prime",
    "ProfiniteSpec",
    "GroupElement",
    "InertiaGenerator",
    "SubgroupSpec",
    "LayerGroup",
    "FiniteSubgroup",
    "LimitQuantities",
    "layer_group",
    "subgroup_image",
    "subgroup_order",
    "cosets",
    "subgroup_intersect",
    "intersection_order",
    "limit_quantities",
]

# Ambient groups up to this order keep explicit element sets.
EXPLICIT_LIMIT = 2**20


class GroupError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def _p_exponent(p: int, q: int) -> int | None:
    """Return e with q == p**e (e >= 1), or None."""
    e = 0
    while q > 1 and q % p == 0:
        q //= p
        e += 1
    return e if q == 1 and e >= 1 else None


@dataclass(frozen=True)
class ProfiniteSpec:
    """The profinite group Z_p x G with G = prod Z/g_factors[i]."""

    p: int
    g_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "g_factors", tuple(int(q) for q in self.g_factors))
        if not is_prime(self.p):
            raise GroupError(f"p = {self.p} is not prime")
        for q in self.g_factors:
            if _p_exponent(self.p, q) is None:
                raise GroupError(f"G factor {q} is not a positive power of p = {self.p}")

    @property
    def g_order(self) -> int:
        return math.prod(self.g_factors)

    @property
    def g_exponents(self) -> tuple[int, ...]:
        return tuple(_p_exponent(self.p, q) for q in self.g_factors)

    @property
    def e_max(self) -> int:
        return max(self.g_exponents, default=0)

    def element(self, zp: int = 0, g: Sequence[int] = ()) -> "GroupElement":
        g = tuple(g) or (0,) * len(self.g_factors)
        if len(g) != len(self.g_factors):
            raise GroupError(f"expected {len(self.g_factors)} G-coordinates, got {len(g)}")
        return GroupElement(int(zp), tuple(int(x) % q for x, q in zip(g, self.g_factors)))

    def zero(self) -> "GroupElement":
        return self.element()

    def neg(self, x: "GroupElement") -> "GroupElement":
        return self.element(-x.zp, [-c for c in x.g])

    def add(self, x: "GroupElement", y: "GroupElement") -> "GroupElement":
        return self.element(x.zp + y.zp, [a + b for a, b in zip(x.g, y.g)])

    def layer(self, n: int) -> "LayerGroup":
        return LayerGroup(self, n)

    def quotient_by_g(self) -> "ProfiniteSpec":
        return ProfiniteSpec(self.p, ())


@dataclass(frozen=True)
class GroupElement:
    """Element of Z_p x G; the integer ``zp`` stands for a compatible system of residues."""

    zp: int
    g: tuple[int, ...] = ()


@dataclass(frozen=True)
class InertiaGenerator:
    """Generator ``(p^zp_power, g)`` of a closed subgroup; ``zp_power=None`` means a zero Z_p part."""

    zp_power: int | None
    g: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(x) for x in self.g))
        if self.zp_power is not None and self.zp_power < 0:
            raise GroupError("Z_p exponent must be non-negative")


@dataclass(frozen=True)
class SubgroupSpec:
    """Closed subgroup of Z_p x G given by finitely many generators."""

    generators: tuple[InertiaGenerator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    @classmethod
    def trivial(cls) -> "SubgroupSpec":
        return cls(())

    @classmethod
    def gamma(cls, spec: ProfiniteSpec, k: int = 0) -> "SubgroupSpec":
        """The subgroup p^k Z_p x 1."""
        return cls((InertiaGenerator(k, (0,) * len(spec.g_factors)),))

    @classmethod
    def g_part(cls, spec: ProfiniteSpec) -> "SubgroupSpec":
        """The subgroup 1 x G."""
        k = len(spec.g_factors)
        return cls(tuple(
            InertiaGenerator(None, tuple(int(i == j) for j in range(k))) for i in range(k)
        ))

    @classmethod
    def whole(cls, spec: ProfiniteSpec) -> "SubgroupSpec":
        return cls(cls.gamma(spec).generators + cls.g_part(spec).generators)

    @property
    def is_infinite(self) -> bool:
        return any(g.zp_power is not None for g in self.generators)

    @property
    def zp_level(self) -> int:
        """Largest k among the p^k generators (0 when there are none)."""
        return max((g.zp_power for g in self.generators if g.zp_power is not None), default=0)

    def check(self, spec: ProfiniteSpec) -> str | None:
        for gen in self.generators:
            if len(gen.g) != len(spec.g_factors):
                return (f"inertia generator {gen} has {len(gen.g)} G-coordinates, "
                        f"expected {len(spec.g_factors)}")
        return None

    def drop_g(self) -> "SubgroupSpec":
        """Image under Z_p x G -> Z_p."""
        return SubgroupSpec(tuple(
            InertiaGenerator(g.zp_power, ()) for g in self.generators if g.zp_power is not None
        ))


class LayerGroup:
    """The finite group Z/p^n x G with tuple elements."""

    def __init__(self, spec: ProfiniteSpec, n: int):
        if n < 0:
            raise GroupError("level must be non-negative")
        self.spec = spec
        self.n = n
        self.moduli = (spec.p ** n,) + spec.g_factors

    def __eq__(self, other):
        return isinstance(other, LayerGroup) and (self.spec, self.n) == (other.spec, other.n)

    def __hash__(self):
        return hash((self.spec, self.n))

    def __repr__(self):
        return f"LayerGroup(p={self.spec.p}, n={self.n}, G={self.spec.g_factors})"

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)

    def reduce(self, x) -> tuple[int, ...]:
        if isinstance(x, GroupElement):
            x = (x.zp,) + tuple(x.g)
        if len(x) != len(self.moduli):
            raise GroupError(f"element {x} has the wrong number of coordinates for {self}")
        return tuple(int(a) % q for a, q in zip(x, self.moduli))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % q for a, b, q in zip(x, y, self.moduli))

    def sub(self, x, y) -> tuple[int, ...]:
        return tuple((a - b) % q for a, b, q in zip(x, y, self.moduli))

    def neg(self, x) -> tuple[int, ...]:
        return tuple(-a % q for a, q in zip(x, self.moduli))

    def scale(self, k: int, x) -> tuple[int, ...]:
        return tuple(k * a % q for a, q in zip(x, self.moduli))

    def element_order(self, x) -> int:
        return math.lcm(*(q // math.gcd(a, q) for a, q in zip(x, self.moduli)))

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(q) for q in self.moduli)))

    def index_of(self, x) -> int:
        i = 0
        for a, q in zip(x, self.moduli):
            i = i * q + a
        return i

    def project(self, x, lower: "LayerGroup") -> tuple[int, ...]:
        """Natural map to a lower layer (or to the G-quotient layer)."""
        if lower.spec == self.spec:
            return lower.reduce(x)
        if lower.spec == self.spec.quotient_by_g():
            return lower.reduce(x[:1])
        raise GroupError(f"no natural projection {self} -> {lower}")

    def subgroup(self, generators: Iterable) -> "FiniteSubgroup":
        return FiniteSubgroup(self, tuple(self.reduce(g) for g in generators))

    def whole(self) -> "FiniteSubgroup":
        k = len(self.moduli)
        return self.subgroup(tuple(int(i == j) for j in range(k)) for i in range(k))

    def trivial(self) -> "FiniteSubgroup":
        return self.subgroup(())

    def g_subgroup(self) -> "FiniteSubgroup":
        """The factor 1 x G."""
        k = len(self.moduli)
        return self.subgroup(tuple(int(i == j) for j in range(k)) for i in range(1, k))

    def gamma_subgroup(self) -> "FiniteSubgroup":
        """The factor Z/p^n x 1."""
        return self.subgroup([(1,) + (0,) * len(self.spec.g_factors)])


class FiniteSubgroup:
    """Subgroup of a layer group, generated by ``generators``.

    The element set is materialised on demand when the ambient group has
    at most :data:`EXPLICIT_LIMIT` elements; orders are always available
    through a Smith form of the relation matrix.
    """

    def __init__(self, layer: LayerGroup, generators: tuple[tuple[int, ...], ...]):
        self.layer = layer
        self.generators = tuple(g for g in generators if any(g))

    def __repr__(self):
        return f"FiniteSubgroup({self.layer!r}, order={self.order})"

    def __eq__(self, other):
        return (isinstance(other, FiniteSubgroup) and self.layer == other.layer
                and self.elements == other.elements)

    def __hash__(self):
        return hash((self.layer, self.elements))

    @cached_property
    def elements(self) -> frozenset[tuple[int, ...]]:
        if self.layer.order > EXPLICIT_LIMIT:
            raise GroupError(f"{self.layer} is too large for explicit element sets")
        layer = self.layer
        elems = {layer.zero}
        for g in self.generators:
            if g in elems:
                continue
            multiples = [layer.zero]
            x = g
            while x != layer.zero:
                multiples.append(x)
                x = layer.add(x, g)
            elems = {layer.add(a, b) for a in elems for b in multiples}
        return frozenset(elems)

    def sorted_elements(self) -> list[tuple[int, ...]]:
        return sorted(self.elements)

    @cached_property
    def order(self) -> int:
        if self.layer.order <= EXPLICIT_LIMIT:
            return len(self.elements)
        return self.layer.order // _quotient_order(self.layer, self.generators)

    @property
    def index(self) -> int:
        return self.layer.order // self.order

    def __contains__(self, x) -> bool:
        return tuple(x) in self.elements

    def is_trivial(self) -> bool:
        return not self.generators

    @cached_property
    def coset_map(self) -> dict[tuple[int, ...], tuple[int, ...]]:
        """Map every layer element to its canonical coset representative."""
        layer = self.layer
        members = self.sorted_elements()
        rep_of = {}
        for x in layer.elements():
            if x in rep_of:
                continue
            for h in members:
                rep_of[layer.add(x, h)] = x
        return rep_of

    def coset_rep(self, x) -> tuple[int, ...]:
        return self.coset_map[tuple(x)]

    def representatives(self) -> list[tuple[int, ...]]:
        return sorted(set(self.coset_map.values()))

    def image(self, lower: LayerGroup) -> "FiniteSubgroup":
        return FiniteSubgroup(lower, tuple(self.layer.project(g, lower) for g in self.generators))


def _quotient_order(layer: LayerGroup, generators) -> int:
    """Order of layer / <generators>, via the Smith form of the relation matrix."""
    k = len(layer.moduli)
    cols = [[q if i == j else 0 for i in range(k)] for j, q in enumerate(layer.moduli)]
    cols += [list(g) for g in generators]
    rows = [[c[i] for c in cols] for i in range(k)]
    return math.prod(smith_normal_form(rows).diag)


def layer_group(spec: ProfiniteSpec, n: int) -> LayerGroup:
    return LayerGroup(spec, n)


def subgroup_image(s: SubgroupSpec, layer: LayerGroup) -> FiniteSubgroup:
    """Image of a closed subgroup of Z_p x G in the layer Z/p^n x G."""
    problem = s.check(layer.spec)
    if problem:
        raise GroupError(problem)
    p = layer.spec.p
    gens = []
    for gen in s.generators:
        zp = 0 if gen.zp_power is None else p ** gen.zp_power
        gens.append((zp,) + gen.g)
    return layer.subgroup(gens)


def subgroup_order(f: FiniteSubgroup) -> int:
    return f.order


def cosets(layer: LayerGroup, f: FiniteSubgroup) -> list[tuple[int, ...]]:
    """Canonical (lexicographically minimal) coset representatives, sorted."""
    if f.layer != layer:
        raise GroupError("subgroup does not live in this layer")
    return f.representatives()


def subgroup_intersect(f1: FiniteSubgroup, f2: FiniteSubgroup) -> FiniteSubgroup:
    if f1.layer != f2.layer:
        raise GroupError(f"ambient mismatch: {f1.layer} vs {f2.layer}")
    common = f1.elements & f2.elements
    return FiniteSubgroup(f1.layer, tuple(sorted(common)))


def intersection_order(f1: FiniteSubgroup, f2: FiniteSubgroup) -> int:
    """#(f1 & f2) = #f1 * #f2 / #(f1 + f2); never enumerates elements."""
    if f1.layer != f2.layer:
        raise GroupError(f"ambient mismatch: {f1.layer} vs {f2.layer}")
    layer = f1.layer
    sum_order = layer.order // _quotient_order(layer, f1.generators + f2.generators)
    return f1.order * f2.order // sum_order


@dataclass(frozen=True)
class LimitQuantities:
    """Limits along the tower of the local invariants of one inertia group.

    ``m_inf`` is the stable order of (1 x G) meet the layer image,
    ``n_inf`` the stable index of the image (``math.inf`` when it grows
    without bound), and ``stable_level`` the level from which both are
    constant.
    """

    m_inf: int
    n_inf: int | float
    i_infinite: bool
    i_trivial: bool
    stable_level: int


def limit_quantities(s: SubgroupSpec, spec: ProfiniteSpec) -> LimitQuantities:
    # For n >= K + e_max the image is <(p^K', g0)> + (I meet G) with
    # constant shape, so one layer computation gives the limits.
    level = s.zp_level + spec.e_max
    layer = spec.layer(level)
    image = subgroup_image(s, layer)
    m_inf = intersection_order(image, layer.g_subgroup())
    infinite = s.is_infinite
    n_inf = image.index if infinite else math.inf
    trivial = all(g.zp_power is None and not any(
        c % q for c, q in zip(g.g, spec.g_factors)) for g in s.generators)
    return LimitQuantities(m_inf, n_inf, infinite, trivial, level)
