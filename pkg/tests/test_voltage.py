import itertools
import random

import pytest

from graphtower.families import (
    canonical_inertia,
    collapse_Y,
    is_Y_graph,
    make_cycle,
    make_section5_voltage,
    make_Y,
    random_voltage_graph,
)
from graphtower.graphs import (
    Graph,
    check_functoriality_diagram,
    covering_degree,
    identity_covering,
    kappa,
    validate_covering,
)
from graphtower.groups import GroupElement, ProfiniteSpec, SubgroupSpec, subgroup_image
from graphtower.voltage import (
    GaloisAxiomError,
    GroupAction,
    VoltageError,
    VoltageGraph,
    connectivity,
    cross_covering,
    derive,
    groupring_laplacian_check,
    layer_covering,
    quotient_voltage,
    tower,
    validate_voltage,
    voltage_from_covering,
)

CASES = ("a", "b", "c")


class TestValidateVoltage:
    @pytest.mark.parametrize("case", CASES)
    def test_section5_ok(self, case):
        assert validate_voltage(make_section5_voltage(2, 3, case)) is None

    def test_involution_violation(self):
        vg = make_section5_voltage(2, 3, "b")
        alpha = list(vg.alpha)
        alpha[1] = vg.spec.element(1, (1,))
        bad = VoltageGraph(vg.base, vg.spec, tuple(alpha), vg.inertia)
        assert "involution" in validate_voltage(bad)
        with pytest.raises(VoltageError):
            derive(bad, 0)

    def test_empty_graph(self):
        empty = Graph((), (), (), ())
        vg = VoltageGraph(empty, ProfiniteSpec(2, ()), (), ())
        assert validate_voltage(vg) is None

    def test_inertia_count(self):
        vg = make_section5_voltage(2, 3, "b")
        bad = VoltageGraph(vg.base, vg.spec, vg.alpha, vg.inertia[:2])
        assert validate_voltage(bad) is not None


class TestQuotient:
    def test_case_a_gives_trivial_inertia(self):
        q = quotient_voltage(make_section5_voltage(2, 3, "a"), "G")
        assert q.spec.g_factors == ()
        assert all(s.generators == () for s in q.inertia)

    def test_case_b_keeps_gamma(self):
        q = quotient_voltage(make_section5_voltage(3, 2, "b"), "G")
        assert all(s == SubgroupSpec.gamma(q.spec) for s in q.inertia)

    def test_trivial_selector(self):
        vg = make_section5_voltage(2, 3, "c")
        assert quotient_voltage(vg, "trivial") is vg

    def test_finite_level(self):
        vg = make_section5_voltage(2, 3, "a")
        fvg = quotient_voltage(vg, 2)
        assert fvg.group.order == 8
        assert fvg.alpha[0] == (1, 1)
        assert fvg.alpha[1] == (3, 1)
        lower = quotient_voltage(fvg, 1)
        assert lower.alpha[1] == (1, 1)
        assert quotient_voltage(fvg, "G").alpha[1] == (3,)

    def test_bad_selector(self):
        with pytest.raises(VoltageError):
            quotient_voltage(make_section5_voltage(2, 3, "a"), "H")
        with pytest.raises(VoltageError):
            quotient_voltage(quotient_voltage(make_section5_voltage(2, 3, "a"), 1), 2)


class TestDerive:
    def test_trivial_group_reproduces_base(self):
        base = make_Y(3, 2)
        spec = ProfiniteSpec(2, ())
        vg = VoltageGraph.from_representatives(base, spec, {}, [SubgroupSpec.trivial()] * 3)
        layer = derive(vg, 0)
        assert layer.graph.src == base.src and layer.graph.tgt == base.tgt
        assert layer.graph.bar == base.bar

    @pytest.mark.parametrize("p, m, n", [(2, 3, 0), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 3, 1), (2, 1, 2)])
    def test_case_c_is_y_graph(self, p, m, n):
        assert is_Y_graph(derive(make_section5_voltage(p, m, "c"), n).graph, m, p ** (n + 1))

    def test_case_c_level1_is_y34(self):
        assert is_Y_graph(derive(make_section5_voltage(2, 3, "c"), 1).graph, 3, 4)

    @pytest.mark.parametrize("p, m, n", [(2, 3, 0), (2, 3, 2), (3, 2, 2), (2, 2, 3)])
    def test_case_a_base_is_long_cycle(self, p, m, n):
        g = derive(quotient_voltage(make_section5_voltage(p, m, "a"), "G"), n).graph
        assert is_Y_graph(g, m * p ** n, 1)

    def test_negative_level(self):
        with pytest.raises(VoltageError):
            derive(make_section5_voltage(2, 3, "a"), -1)

    def test_vertex_order(self):
        layer = derive(make_section5_voltage(2, 2, "b"), 1)
        assert [v for _, v in layer.vertex_labels] == sorted(v for _, v in layer.vertex_labels)
        assert layer.graph.vertices[0] == "v1@0,0"

    def test_tower_is_lazy(self):
        layers = tower(make_section5_voltage(2, 3, "b"))
        assert [next(layers).graph.num_vertices for _ in range(3)] == [6, 6, 6]


def _random_instances(count, seed, levels=(0, 1, 2)):
    rng = random.Random(seed)
    for i in range(count):
        p = rng.choice([2, 3])
        g_factors = rng.choice([(), (p,), (p, p), (p * p,)]) if p == 2 else rng.choice([(), (p,)])
        vg = random_voltage_graph(rng, p, g_factors, max_vertices=4, max_edges=5)
        yield vg, levels[i % len(levels)]


def test_counting_formulas():
    for vg, n in _random_instances(30, 5):
        layer = derive(vg, n)
        grp = vg.spec.layer(n)
        assert layer.graph.num_vertices == sum(subgroup_image(s, grp).index for s in vg.inertia)
        assert layer.graph.num_edges == grp.order * vg.base.num_edges


def test_action_and_ramification():
    for vg, n in _random_instances(30, 6):
        layer = derive(vg, n)
        f = layer_covering(vg, n, 0)
        assert validate_covering(f).ok
        assert covering_degree(f) == vg.spec.p ** n
        assert covering_degree(layer.projection()) == layer.group.order
        ram = validate_covering(layer.projection()).ram_indices
        action = layer.action()
        for i, (rep, v) in enumerate(layer.vertex_labels):
            stab = sum(1 for h in layer.group.elements() if action.vperm[h][i] == i)
            assert stab == ram[i] == layer.voltage.inertia[v].order
        for d in range(layer.graph.num_edges):
            orbit = {action.eperm[h][d] for h in layer.group.elements()}
            assert len(orbit) == layer.group.order


class TestLayerCoverings:
    def test_same_level_is_identity(self):
        vg = make_section5_voltage(2, 3, "a")
        f = layer_covering(vg, 2, 2)
        assert f.vmap == tuple(range(f.domain.num_vertices))
        assert f.emap == tuple(range(f.domain.num_edges))

    @pytest.mark.parametrize("p, n", [(2, 1), (2, 3), (3, 2)])
    def test_case_b_base_totally_ramified(self, p, n):
        q = quotient_voltage(make_section5_voltage(p, 3, "b"), "G")
        assert set(validate_covering(layer_covering(q, n, 0)).ram_indices) == {p ** n}

    @pytest.mark.parametrize("p, n", [(2, 0), (2, 2), (3, 1)])
    def test_case_c_cross_covering(self, p, n):
        f = cross_covering(make_section5_voltage(p, 3, "c"), n)
        check = validate_covering(f)
        assert set(check.ram_indices) == {p}
        assert covering_degree(f) == p

    def test_low_above_high(self):
        with pytest.raises(VoltageError):
            layer_covering(make_section5_voltage(2, 3, "a"), 0, 1)

    @pytest.mark.parametrize("case", CASES)
    def test_functoriality_on_tower_maps(self, case):
        vg = make_section5_voltage(2, 2, case)
        for n in range(3):
            assert check_functoriality_diagram(cross_covering(vg, n)) is None
            for lo in range(n + 1):
                assert check_functoriality_diagram(layer_covering(vg, n, lo)) is None


class TestGroupRingLaplacian:
    def test_unramified(self):
        rng = random.Random(8)
        vg = random_voltage_graph(rng, 2, (2,), kinds=("trivial",))
        for n in range(3):
            assert groupring_laplacian_check(vg, n) is None

    @pytest.mark.parametrize("p, m, case", list(itertools.product([2, 3], [1, 2, 3], CASES)))
    def test_section5(self, p, m, case):
        vg = make_section5_voltage(p, m, case)
        for n in range(3):
            assert groupring_laplacian_check(vg, n) is None

    def test_single_loop(self):
        spec = ProfiniteSpec(2, ())
        vg = VoltageGraph.from_representatives(make_cycle(1), spec, {0: GroupElement(1)},
                                               [SubgroupSpec.trivial()])
        for n in range(5):
            assert groupring_laplacian_check(vg, n) is None

    def test_mixed_inertia(self):
        for vg, n in _random_instances(10, 9):
            assert groupring_laplacian_check(vg, n) is None


class TestVoltageFromCovering:
    def test_identity_with_trivial_group(self):
        g = make_Y(2, 2)
        grp = ProfiniteSpec(2, ()).layer(0)
        action = GroupAction(grp, {grp.zero: tuple(range(g.num_vertices))},
                             {grp.zero: tuple(range(g.num_edges))})
        ex = voltage_from_covering(identity_covering(g), action)
        assert all(a == grp.zero for a in ex.voltage.alpha)
        assert all(s.order == 1 for s in ex.voltage.inertia)
        assert ex.derived.graph.num_edges == g.num_edges

    @pytest.mark.parametrize("m, p", [(1, 2), (2, 3), (3, 2), (4, 3)])
    def test_rotation_of_parallel_edges(self, m, p):
        f = collapse_Y(m, p)
        grp = ProfiniteSpec(p, ()).layer(1)
        Y = f.domain

        def rotate(k, d):
            i, j = (d // 2) // p, (d // 2) % p
            return 2 * (i * p + (j + k) % p) + d % 2

        vperm = {(k,): tuple(range(m)) for k in range(p)}
        eperm = {(k,): tuple(rotate(k, d) for d in range(Y.num_edges)) for k in range(p)}
        ex = voltage_from_covering(f, GroupAction(grp, vperm, eperm))
        assert all(s.order == p for s in ex.voltage.inertia)
        assert all(a == grp.zero for a in ex.voltage.alpha)
        assert kappa(ex.derived.graph) == kappa(Y)

    def test_action_that_moves_fibres(self):
        layer = derive(make_section5_voltage(2, 3, "a"), 1)
        action = layer.action()
        wrong = dict(action.vperm)
        h = layer.group.elements()[1]
        wrong[h] = tuple(reversed(wrong[h]))
        with pytest.raises(GaloisAxiomError):
            voltage_from_covering(layer.projection(), GroupAction(layer.group, wrong, action.eperm))

    def test_round_trip(self):
        for vg, n in _random_instances(20, 10):
            layer = derive(vg, n)
            ex = voltage_from_covering(layer.projection(), layer.action())
            assert ex.derived.graph.num_vertices == layer.graph.num_vertices
            assert sorted(s.order for s in ex.voltage.inertia) == sorted(
                s.order for s in layer.voltage.inertia)


class TestConnectivity:
    @pytest.mark.parametrize("case", CASES)
    def test_section5_connected(self, case):
        vg = make_section5_voltage(2, 3, case)
        assert all(connectivity(derive(vg, n)) == 1 for n in range(4))

    @pytest.mark.parametrize("p", [2, 3])
    def test_identity_voltage_splits(self, p):
        spec = ProfiniteSpec(p, ())
        vg = VoltageGraph.from_representatives(make_cycle(3), spec, {}, [SubgroupSpec.trivial()] * 3)
        assert connectivity(derive(vg, 1)) == p

    def test_disconnected_base(self):
        base = Graph.from_edges(range(4), [(0, 1), (2, 3), (0, 1)])
        spec = ProfiniteSpec(2, ())
        vg = VoltageGraph.from_representatives(base, spec, {}, [canonical_inertia(spec, "trivial")] * 4)
        assert connectivity(derive(vg, 0)) == 2
        assert connectivity(derive(vg, 2)) == 2 * 4
        # a voltage on the cycle 0-1-0 reconnects that part only
        vg = VoltageGraph.from_representatives(base, spec, {0: GroupElement(1)}, vg.inertia)
        assert connectivity(derive(vg, 2)) == 1 + 4
