"""
Unit tests for the weighted graph core, lattices and graph files.
"""

import itertools

import numpy as np
import pytest

from graphs.graph_io import parse_vertex, read_graph, write_graph
from graphs.lattice import build_lattice, lattice_ball_size
from graphs.metric import compute_metric
from graphs.weighted_graph import (
    GraphFunction,
    WeightedGraph,
    integration_by_parts_defect,
    laplacian_at,
    make_graph,
    validate_structure,
)
from utils.exceptions import CapacityError, DomainError


class TestLattice:
    """Tests for truncated lattices."""

    def test_vertex_counts(self):
        """Ball sizes match the closed form for l1 balls."""
        assert build_lattice(1, 64).num_vertices == 129
        assert lattice_ball_size(2, 3) == 25
        assert build_lattice(2, 8).num_vertices == 2 * 8 * 8 + 2 * 8 + 1

    def test_measure_and_outer_weight(self, z1):
        """mu = 2n everywhere; the end points carry one outer edge each."""
        graph, _ = z1
        assert np.all(graph.mu == 2.0)
        end = graph.index_of((64,))
        assert graph.boundary[end]
        assert graph.outer_weight[end] == 1.0
        assert graph.outer_weight[graph.index_of((0,))] == 0.0

    def test_capacity_guard(self):
        """Lattices larger than the vertex guard are refused."""
        with pytest.raises(CapacityError):
            build_lattice(3, 100, max_vertices=1000)

    def test_invalid_dimension(self):
        """Dimension zero is rejected."""
        with pytest.raises(DomainError):
            build_lattice(0, 4)

    def test_lattice_passes_structure_checks(self, z2):
        """Lattices satisfy symmetry, connectivity and sum omega <= mu."""
        graph, _ = z2
        report = validate_structure(graph)
        assert report.all_passed
        assert report.measured_constant == pytest.approx(1.0)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_ball_counts_match_enumeration(self, n):
        """Hop-ball sizes on the lattice equal a direct count of l1 balls."""
        graph = build_lattice(n, 10)
        metric = compute_metric(graph, (0,) * n)
        for r in range(11):
            direct = sum(
                1 for x in itertools.product(range(-r, r + 1), repeat=n)
                if sum(abs(c) for c in x) <= r
            )
            assert lattice_ball_size(n, r) == direct
            assert int(np.count_nonzero(metric.dist <= r)) == direct


class TestLaplacian:
    """Tests for the graph Laplacian."""

    def test_square_function_on_z1(self):
        """Lap |x|^2 = 1 at the origin of Z^1 (mu = 2)."""
        graph = build_lattice(1, 5)
        f = GraphFunction({(k,): k * k for k in range(-5, 6)})
        assert laplacian_at(graph, f, (0,)) == pytest.approx(1.0)

    def test_square_function_on_z2(self, z2):
        """Lap |x|^2 = 1 on Z^2 as well, since mu = 4."""
        graph, _ = z2
        f = GraphFunction({x: float(x[0] ** 2 + x[1] ** 2) for x in graph.vertices})
        assert laplacian_at(graph, f, (0, 0)) == pytest.approx(1.0)
        assert laplacian_at(graph, f, (2, -3)) == pytest.approx(1.0)

    def test_constant_is_harmonic_inside(self, z2):
        """Constants have zero Laplacian where the neighbourhood is complete."""
        graph, _ = z2
        ones = GraphFunction({x: 1.0 for x in graph.vertices})
        assert laplacian_at(graph, ones, (3, 1)) == 0.0

    def test_matrix_agrees_with_pointwise(self, z2):
        """The sparse Laplacian matches the pointwise formula."""
        graph, _ = z2
        rng = np.random.default_rng(7)
        values = rng.normal(size=graph.num_vertices)
        f = GraphFunction.from_array(graph, values)
        lap = graph.laplacian_matrix() @ values
        for x in [(0, 0), (1, 2), (-4, 3), (8, 0)]:
            assert lap[graph.index_of(x)] == pytest.approx(laplacian_at(graph, f, x), abs=1e-12)

    def test_integration_by_parts(self, z2):
        """sum (Lap f) g mu = sum f (Lap g) mu for compactly supported f, g."""
        graph, _ = z2
        f = GraphFunction({(0, 0): 1.0, (1, 0): -2.0, (0, 2): 0.5})
        g = GraphFunction({(1, 0): 3.0, (1, 1): 1.0, (-2, 1): 4.0})
        assert abs(integration_by_parts_defect(graph, f, g)) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_integration_by_parts_random_pairs(self, n):
        """Seeded random compactly supported pairs on lattice patches."""
        graph = build_lattice(n, 6)
        rng = np.random.default_rng(100 + n)
        inner = [x for x in graph.vertices if sum(abs(c) for c in x) <= 4]
        lap = graph.laplacian_matrix()
        for _ in range(34):
            picks = rng.choice(len(inner), size=(2, 6))
            f = GraphFunction({inner[i]: float(v) for i, v in zip(picks[0], rng.normal(size=6))})
            g = GraphFunction({inner[i]: float(v) for i, v in zip(picks[1], rng.normal(size=6))})
            fa, ga = f.to_array(graph), g.to_array(graph)
            scale = float(np.sum(np.abs(fa * (lap @ ga) * graph.mu))) + 1.0
            assert abs(integration_by_parts_defect(graph, f, g)) < 1e-10 * scale

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_affine_is_harmonic_inside(self, n):
        """Lap (a.x + b) = 0 wherever the neighbourhood is complete."""
        graph = build_lattice(n, 6)
        a = np.array([3.0, -2.0, 0.5][:n])
        values = np.array([float(a @ np.array(x)) + 7.0 for x in graph.vertices])
        lap = graph.laplacian_matrix() @ values
        inside = graph.interior_mask()
        assert inside.sum() == lattice_ball_size(n, 5)
        assert np.max(np.abs(lap[inside])) < 1e-12
        f = GraphFunction.from_array(graph, values)
        assert laplacian_at(graph, f, (1,) + (0,) * (n - 1)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_total_flux_vanishes(self, n):
        """sum mu Lap f = 0 for f supported away from the truncation."""
        graph = build_lattice(n, 6)
        rng = np.random.default_rng(200 + n)
        inner = np.array([sum(abs(c) for c in x) <= 4 for x in graph.vertices])
        values = np.where(inner, rng.normal(size=graph.num_vertices), 0.0)
        total = float(graph.mu @ (graph.laplacian_matrix() @ values))
        assert abs(total) < 1e-10 * float(np.sum(graph.mu * np.abs(values)))

    def test_integration_by_parts_needs_interior_support(self, z2):
        """Supports touching the truncation are rejected."""
        graph, _ = z2
        f = GraphFunction({(8, 0): 1.0})
        with pytest.raises(DomainError):
            integration_by_parts_defect(graph, f, f)


class TestConstruction:
    """Tests for edge-list construction and structural checks."""

    def test_weighted_star(self):
        """A hub with three leaves: mu(hub) = 3 keeps sum omega <= mu."""
        graph = make_graph(
            ["hub", "a", "b", "c"],
            {"hub": 3.0, "a": 1.0, "b": 1.0, "c": 1.0},
            [("hub", "a", 1.0), ("hub", "b", 1.0), ("hub", "c", 1.0)],
            name="star",
        )
        report = validate_structure(graph)
        assert report.all_passed
        assert graph.num_edges == 3
        f = GraphFunction({"a": 1.0})
        assert laplacian_at(graph, f, "hub") == pytest.approx(1.0 / 3.0)
        assert laplacian_at(graph, f, "a") == pytest.approx(-1.0)

    def test_self_loop_rejected(self):
        """omega(x, x) must be zero."""
        with pytest.raises(DomainError):
            WeightedGraph.from_edges(["a", "b"], {"a": 1.0, "b": 1.0}, [("a", "a", 1.0)])

    def test_conflicting_duplicate_rejected(self):
        """An unordered pair given twice must carry the same weight."""
        with pytest.raises(DomainError):
            WeightedGraph.from_edges(
                ["a", "b"], {"a": 1.0, "b": 1.0}, [("a", "b", 1.0), ("b", "a", 2.0)]
            )

    def test_missing_measure_rejected(self):
        """Every vertex needs an explicit mu."""
        with pytest.raises(DomainError):
            WeightedGraph.from_edges(["a", "b"], {"a": 1.0}, [("a", "b", 1.0)])

    def test_negative_weight_rejected(self):
        """Weights must be non-negative."""
        with pytest.raises(DomainError):
            WeightedGraph.from_edges(["a", "b"], {"a": 1.0, "b": 1.0}, [("a", "b", -1.0)])

    def test_disconnected_graph(self):
        """Disconnected graphs fail the connectivity check and have no hop metric."""
        graph = WeightedGraph.from_edges(
            ["a", "b", "c"], {"a": 1.0, "b": 1.0, "c": 1.0}, [("a", "b", 1.0)]
        )
        report = validate_structure(graph)
        assert not report.connected
        assert "connected" in report.failed_checks()
        with pytest.raises(DomainError):
            compute_metric(graph, "a")

    def test_degree_bound_violation(self):
        """sum omega > C mu is reported, not raised."""
        graph = WeightedGraph.from_edges(["a", "b"], {"a": 1.0, "b": 1.0}, [("a", "b", 2.0)])
        report = validate_structure(graph, c_bound=1.0)
        assert not report.degree_bound_holds
        assert report.measured_constant == pytest.approx(2.0)


class TestGraphFiles:
    """Tests for reading and writing graph files."""

    def test_write_read_preserves_graph(self, tmp_path):
        """A written lattice reads back with identical weights, mu and truncation flags."""
        graph = build_lattice(2, 4)
        path = write_graph(graph, tmp_path / "z2.graph")
        loaded = read_graph(path)
        assert loaded.vertices == graph.vertices
        assert np.array_equal(loaded.mu, graph.mu)
        assert (loaded.weights != graph.weights).nnz == 0
        assert np.array_equal(loaded.boundary, graph.boundary)
        assert np.array_equal(loaded.outer_weight, graph.outer_weight)

    def test_parse_vertex(self):
        """Integers, tuples and bare tokens are recognised."""
        assert parse_vertex("7") == 7
        assert parse_vertex("(1,-2)") == (1, -2)
        assert parse_vertex("hub") == "hub"

    def test_malformed_line_reports_location(self, tmp_path):
        """Errors name the file and line."""
        path = tmp_path / "bad.graph"
        path.write_text("v a 1\nv b 1\ne a b\n", encoding="utf-8")
        with pytest.raises(DomainError) as exc_info:
            read_graph(path)
        assert "bad.graph:3" in str(exc_info.value)

    def test_header_capacity(self, tmp_path):
        """The declared vertex count is checked against the guard."""
        path = tmp_path / "big.graph"
        path.write_text("graph 5000\n", encoding="utf-8")
        with pytest.raises(CapacityError):
            read_graph(path, max_vertices=100)
