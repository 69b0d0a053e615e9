import itertools
import random

import pytest

from graphtower.families import collapse_Y, make_cycle, make_Y, random_connected_multigraph
from graphtower.graphs import (
    CoveringMorphism,
    Divisor,
    Graph,
    GraphError,
    check_functoriality_diagram,
    covering_degree,
    identity_covering,
    jacobian,
    kappa,
    kappa_bruteforce,
    laplacian_apply,
    laplacian_matrix,
    picard_group,
    pushforward,
    validate_covering,
    validate_graph,
)


def k4():
    return Graph.from_edges(list("abcd"), list(itertools.combinations(range(4), 2)))


def path(n):
    return Graph.from_edges(range(n), [(i, i + 1) for i in range(n - 1)])


class TestValidate:
    def test_cycle_ok(self):
        assert validate_graph(make_cycle(3)) is None

    def test_fixed_point(self):
        g = Graph(("a", "b"), (0, 1), (1, 0), (0, 0))
        assert "fixed-point involution" in validate_graph(g)

    def test_src_of_bar(self):
        g = Graph(("a", "b", "c"), (0, 2), (1, 0), (1, 0))
        assert "src(bar" in validate_graph(g)

    def test_invalid_graph_rejected_by_laplacian(self):
        with pytest.raises(GraphError):
            laplacian_matrix(Graph(("a",), (0,), (0,), (0,)))


class TestLaplacian:
    def test_triangle(self):
        assert laplacian_matrix(make_cycle(3)).tolist() == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]

    def test_loop_cancels(self):
        assert laplacian_matrix(make_cycle(1)).tolist() == [[0]]

    def test_y23_has_six_parallel_edges(self):
        # Y(2, N) carries N edges v1 -> v2 and N edges v2 -> v1.
        assert make_Y(2, 3).num_undirected == 6
        assert laplacian_matrix(make_Y(2, 3)).tolist() == [[6, -6], [-6, 6]]

    def test_three_parallel_edges(self):
        g = Graph.from_edges(["a", "b"], [(0, 1)] * 3)
        assert laplacian_matrix(g).tolist() == [[3, -3], [-3, 3]]

    def test_ordering(self):
        g = path(3)
        assert laplacian_matrix(g, [2, 1, 0]).tolist() == [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
        with pytest.raises(GraphError):
            laplacian_matrix(g, [0, 0, 1])

    def test_matches_operator(self):
        g = random_connected_multigraph(random.Random(3))
        L = laplacian_matrix(g)
        for v in range(g.num_vertices):
            assert laplacian_apply(Divisor.basis(g, v)).coeffs == L.row(v)


class TestJacobian:
    @pytest.mark.parametrize("m", range(1, 8))
    def test_cycle(self, m):
        jac = jacobian(make_cycle(m))
        assert jac.invariant_factors == ((m,) if m > 1 else ())
        assert jac.free_rank == 0

    def test_tree(self):
        assert jacobian(path(5)).torsion_order == 1

    def test_y32(self):
        jac = jacobian(make_Y(3, 2))
        assert jac.torsion_order == 12
        assert jac.invariant_factors == (2, 6)

    def test_k4(self):
        assert jacobian(k4()).invariant_factors == (4, 4)

    def test_disconnected_rejected(self):
        g = Graph.from_edges(range(4), [(0, 1), (2, 3)])
        with pytest.raises(GraphError):
            picard_group(g)
        with pytest.raises(GraphError):
            kappa(g)


class TestKappa:
    def test_k4(self):
        assert kappa(k4()) == 16
        assert kappa_bruteforce(k4()) == 16

    @pytest.mark.parametrize("m, N", list(itertools.product(range(1, 6), repeat=2)))
    def test_y_family(self, m, N):
        assert kappa(make_Y(m, N)) == m * N ** (m - 1)

    @pytest.mark.parametrize("n", [1, 2, 5, 8])
    def test_tree(self, n):
        assert kappa(path(n)) == 1

    def test_bruteforce_examples(self):
        assert kappa_bruteforce(make_cycle(3)) == 3
        assert kappa_bruteforce(make_Y(2, 4)) == 8

    def test_bruteforce_limit(self):
        with pytest.raises(GraphError):
            kappa_bruteforce(make_Y(4, 4))

    def test_all_deletions_agree(self):
        rng = random.Random(11)
        for _ in range(20):
            g = random_connected_multigraph(rng)
            values = {kappa(g, drop=v) for v in range(g.num_vertices)}
            assert len(values) == 1


def test_random_graphs_agree_with_oracle():
    rng = random.Random(2026)
    for _ in range(100):
        g = random_connected_multigraph(rng)
        k = kappa(g)
        assert k == kappa_bruteforce(g)
        assert k == kappa(g, method="smith")
        assert k == jacobian(g).torsion_order
        assert picard_group(g).free_rank == 1


class TestCoverings:
    def test_identity(self):
        check = validate_covering(identity_covering(make_Y(3, 2)))
        assert check.ok and set(check.ram_indices) == {1}
        assert covering_degree(identity_covering(make_Y(3, 2))) == 1

    @pytest.mark.parametrize("m, N", list(itertools.product(range(1, 5), repeat=2)))
    def test_collapse_parallel_edges(self, m, N):
        f = collapse_Y(m, N)
        check = validate_covering(f)
        assert check.ok and set(check.ram_indices) == {N}
        assert covering_degree(f) == N

    def test_src_violation(self):
        g = make_cycle(3)
        f = CoveringMorphism(g, g, (1, 0, 2), tuple(range(g.num_edges)))
        check = validate_covering(f)
        assert not check.ok and "src" in check.violation

    def test_non_uniform_fibre(self):
        f = CoveringMorphism(path(3), make_cycle(1), (0, 0, 0), (0, 1, 0, 1))
        assert not validate_covering(f).ok


class TestPushforward:
    @pytest.mark.parametrize("m, N", [(2, 3), (3, 2), (4, 4)])
    def test_star_of_ones(self, m, N):
        f = collapse_Y(m, N)
        assert pushforward(f, Divisor.ones(f.domain)) == Divisor.ones(f.codomain)

    @pytest.mark.parametrize("m, N", [(2, 3), (3, 2), (4, 4)])
    def test_r_of_ones(self, m, N):
        f = collapse_Y(m, N)
        assert pushforward(f, Divisor.ones(f.domain), "r") == N * Divisor.ones(f.codomain)

    def test_zero(self):
        f = collapse_Y(3, 3)
        assert pushforward(f, Divisor.zero(f.domain)) == Divisor.zero(f.codomain)

    def test_degree(self):
        d = Divisor(make_cycle(3), (2, -5, 1))
        assert d.degree == -2
        assert laplacian_apply(d).degree == 0


class TestFunctoriality:
    @pytest.mark.parametrize("m, N", list(itertools.product(range(1, 5), repeat=2)))
    def test_collapse(self, m, N):
        assert check_functoriality_diagram(collapse_Y(m, N)) is None

    def test_identity(self):
        assert check_functoriality_diagram(identity_covering(k4())) is None
