"""
Unit tests for base-point metrics, ball volumes and the decay check.
"""

import numpy as np
import pytest

from graphs.lattice import build_lattice, lattice_origin
from graphs.metric import (
    ball_volumes,
    check_distance_laplacian_decay,
    compute_metric,
    custom_metric,
    euclidean_lattice_metric,
    fit_volume_growth,
    truncation_radius,
)
from graphs.weighted_graph import WeightedGraph
from utils.exceptions import DomainError, InsufficientDataError, RangeError


class TestHopMetric:
    """Tests for the hop distance."""

    def test_l1_distance_on_z2(self, z2):
        """Hop distance on Z^2 is the l1 norm."""
        _, metric = z2
        assert metric.distance((3, -2)) == 5.0
        assert metric.distance((0, 0)) == 0.0
        assert metric.jump_size == 1.0

    def test_truncation_radius(self, z1):
        """Balls are complete up to the lattice radius."""
        graph, metric = z1
        assert metric.truncation_radius() == 64.0
        assert truncation_radius(graph, metric) == 64.0

    def test_metric_from_other_graph(self, z1):
        """A metric is tied to the graph it was computed on."""
        _, metric = z1
        with pytest.raises(DomainError):
            truncation_radius(build_lattice(1, 64), metric)

    def test_single_vertex(self):
        """An isolated vertex has jump size 0 and no truncation."""
        graph = WeightedGraph.from_edges([0], {0: 1.0}, [])
        metric = compute_metric(graph, 0)
        assert metric.jump_size == 0.0
        assert metric.truncation_radius() == float("inf")


class TestOtherMetrics:
    """Tests for Euclidean and user-supplied metrics."""

    def test_euclidean_distance(self):
        """Euclidean lattice distance, with edge jumps of at most 1."""
        graph = build_lattice(2, 12)
        metric = euclidean_lattice_metric(graph, lattice_origin(2))
        assert metric.distance((3, 4)) == pytest.approx(5.0)
        assert metric.jump_size <= 1.0 + 1e-12

    def test_euclidean_needs_lattice(self):
        """Non-lattice graphs have no coordinates."""
        graph = WeightedGraph.from_edges(["a", "b"], {"a": 1.0, "b": 1.0}, [("a", "b", 1.0)])
        with pytest.raises(DomainError):
            euclidean_lattice_metric(graph, "a")

    def test_custom_metric_base_must_be_zero(self, z1):
        """d(x0, x0) = 0 is required."""
        graph, _ = z1
        with pytest.raises(DomainError):
            custom_metric(graph, (0,), np.ones(graph.num_vertices))

    def test_custom_metric_jump(self, z1):
        """The jump size is measured over the edges."""
        graph, metric = z1
        scaled = custom_metric(graph, (0,), 3.0 * metric.dist)
        assert scaled.jump_size == pytest.approx(3.0)
        assert scaled.kind == "custom"


class TestBallVolumes:
    """Tests for ball volumes and the growth fit."""

    def test_volumes_on_z1(self, z1):
        """Vol(B(0, r)) = 2 (2r + 1) on Z^1."""
        graph, metric = z1
        table = ball_volumes(graph, metric, [3.0, 10.0])
        assert table.counts == [7, 21]
        assert table.volumes == [14.0, 42.0]

    def test_radius_beyond_truncation(self, z1):
        """Balls reaching past the complete part are refused."""
        graph, metric = z1
        with pytest.raises(RangeError):
            ball_volumes(graph, metric, [65.0])

    def test_negative_radius(self, z1):
        """Negative radii are refused."""
        graph, metric = z1
        with pytest.raises(DomainError):
            ball_volumes(graph, metric, [-1.0, 2.0])

    def test_growth_exponent_z1(self, z1):
        """Z^1 grows like r^1."""
        graph, metric = z1
        fit = fit_volume_growth(ball_volumes(graph, metric, [8, 16, 32, 64]))
        assert abs(fit.exponent - 1.0) < 0.05
        assert fit.points_used == 4

    def test_growth_exponent_z2(self):
        """Z^2 grows like r^2."""
        graph = build_lattice(2, 32)
        metric = compute_metric(graph, lattice_origin(2))
        fit = fit_volume_growth(ball_volumes(graph, metric, [4, 8, 16, 32]))
        assert abs(fit.exponent - 2.0) < 0.15
        assert fit.r_squared > 0.99

    def test_growth_needs_four_radii(self, z1):
        """Three radii are not enough for a fit."""
        graph, metric = z1
        with pytest.raises(InsufficientDataError):
            fit_volume_growth(ball_volumes(graph, metric, [2, 4, 8]))

    def test_growth_needs_four_distinct_volumes(self, z1):
        """Radii between lattice shells repeat a volume and do not count twice."""
        graph, metric = z1
        table = ball_volumes(graph, metric, [2, 2.5, 3, 3.5, 8])
        assert len(set(table.volumes)) == 3
        with pytest.raises(InsufficientDataError, match="have 3"):
            fit_volume_growth(table)
        fit = fit_volume_growth(ball_volumes(graph, metric, [2, 2.5, 3, 3.5, 8, 16]))
        assert fit.points_used == 6


class TestDistanceLaplacianDecay:
    """Tests for the |Lap d| d^nu check."""

    def test_hop_distance_is_harmonic_on_z1(self, z1):
        """On Z^1, Lap d = 0 away from the origin."""
        graph, metric = z1
        report = check_distance_laplacian_decay(graph, metric, nu=1.0, R0=1.0)
        assert report.sup_value == 0.0
        assert report.passed

    def test_l1_distance_on_z2_axes(self, z2):
        """On Z^2 the l1 distance has Lap d = 1/2 on the axes and 0 elsewhere."""
        graph, metric = z2
        flat = check_distance_laplacian_decay(graph, metric, nu=0.0, R0=1.0)
        assert flat.sup_value == pytest.approx(0.5)
        weighted = check_distance_laplacian_decay(graph, metric, nu=1.0, R0=1.0)
        # largest interior axis point sits at distance 7
        assert weighted.sup_value == pytest.approx(3.5)

    def test_nu_out_of_range(self, z1):
        """nu must lie in [0, 1]."""
        graph, metric = z1
        with pytest.raises(DomainError):
            check_distance_laplacian_decay(graph, metric, nu=1.5, R0=1.0)

    def test_nothing_outside_inner_ball(self, z1):
        """An inner radius covering the whole interior leaves nothing to test."""
        graph, metric = z1
        with pytest.raises(InsufficientDataError):
            check_distance_laplacian_decay(graph, metric, nu=1.0, R0=100.0)
