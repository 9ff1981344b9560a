"""
Tests for the test-function functionals, the weak-form residual and the
estimate chain audit.
"""

import numpy as np
import pytest

from cutoff.profile import CutoffParams
from functionals.chain import check_estimate_chain, functional_report
from functionals.integrals import (
    LOG2_OVER_4,
    data_term,
    functional_G,
    functional_H,
    functional_IR,
    functional_JR,
    functional_PR,
    quadrature_error_estimate,
    support_measure,
    time_window,
)
from functionals.weak_form import shift_trajectory, weak_form_residual
from solver.integrator import integrate
from solver.problem import ProblemKind, ProblemSpec, SolverControls, default_bump
from tests.conftest import scalar_problem
from utils.exceptions import CoverageError, DomainError, InsufficientDataError, RangeError


def _params(R, p=2.0, q=None, x0=(0,)):
    return CutoffParams.auto(1.0, R, x0, p, q)


def _system(graph, metric, epsilon, p=2.0, q=3.0):
    u0, u1 = default_bump(graph, metric)
    return ProblemSpec(
        kind=ProblemKind.SYSTEM, p=p, q=q, epsilon=epsilon, graph=graph, metric=metric,
        u0=u0, u1=u1, v0=u0, v1=u1,
    )


@pytest.fixture(scope="module")
def system_blowup_run(z1):
    """(p, q) = (2, 3) system with eps = 3; blows up near t = 10."""
    graph, metric = z1
    return integrate(_system(graph, metric, 3.0), SolverControls(t_max=200.0))


@pytest.fixture(scope="module")
def system_linear_run(z1):
    """Small-data system run covering t in [0, 20]."""
    graph, metric = z1
    return integrate(_system(graph, metric, 0.05), SolverControls(t_max=20.0))


class TestSupportMeasure:
    """Tests for the space-time measure of supp Phi*_R."""

    def test_measure_on_z1(self, z1):
        """Closed-form slab lengths summed over Z^1 at R = 8."""
        graph, metric = z1
        result = support_measure(graph, metric, _params(8.0))
        assert result.measure == pytest.approx(693.689, rel=1e-4)
        assert result.bound == pytest.approx(64.0 * 2 * 17)

    def test_measure_below_bound_and_scaling(self, z1):
        """measure <= R^(4/(alpha+2)) Vol(B(x0, R)), doubling R multiplies it by about 2^3."""
        graph, metric = z1
        results = [support_measure(graph, metric, _params(R)) for R in (8.0, 16.0, 32.0)]
        assert all(r.measure <= r.bound for r in results)
        assert 7.0 < results[1].measure / results[0].measure < 9.5
        assert 7.0 < results[2].measure / results[1].measure < 9.5

    def test_ball_beyond_truncation(self, z1):
        """Clipped balls are refused."""
        graph, metric = z1
        with pytest.raises(RangeError):
            support_measure(graph, metric, _params(65.0))


class TestFunctionals:
    """Tests for P_R, the data term and the log-averaged functional."""

    def test_time_window(self, linear_run, blowup_run):
        """Surviving runs must cover the time support; blown-up runs need not."""
        trajectory, _ = linear_run
        assert trajectory.times[time_window(trajectory, _params(8.0)) - 1] >= 64.0 - 1e-9
        with pytest.raises(CoverageError):
            time_window(trajectory, _params(16.0))
        blown, _ = blowup_run
        assert time_window(blown, _params(16.0)) == len(blown)
        with pytest.raises(CoverageError):
            time_window(blown, _params(16.0), require_full=True)

    def test_starred_functional_is_smaller(self, linear_run):
        """0 < P*_R <= P_R since phi* <= phi."""
        trajectory, _ = linear_run
        params = _params(8.0)
        full = functional_PR(trajectory, params, 2.0)
        starred = functional_PR(trajectory, params, 2.0, starred=True)
        assert 0.0 < starred <= full

    def test_missing_field(self, linear_run):
        """Scalar trajectories have no v."""
        trajectory, _ = linear_run
        with pytest.raises(DomainError):
            functional_PR(trajectory, _params(8.0), 2.0, field="v")
        with pytest.raises(DomainError):
            data_term(trajectory, _params(8.0), which="v")

    def test_data_term(self, linear_run):
        """Phi_R(0, .) = 1 on the data, so the term is eps * mass."""
        trajectory, _ = linear_run
        assert data_term(trajectory, _params(8.0)) == pytest.approx(0.05)

    def test_log_average_bound(self, linear_run, blowup_run):
        """H(R) <= (log 2 / 4) P_R on both small-data and blow-up runs."""
        for trajectory, _ in (linear_run, blowup_run):
            report = functional_H(trajectory, _params(8.0), 2.0)
            assert report.H > 0
            assert report.satisfied
            assert report.r_min == pytest.approx(0.5)
            assert report.bound == pytest.approx(LOG2_OVER_4 * functional_PR(trajectory, _params(8.0), 2.0))

    def test_log_average_below_smallest_scale(self, linear_run):
        """R under r_min leaves nothing to average."""
        trajectory, _ = linear_run
        with pytest.raises(InsufficientDataError):
            functional_H(trajectory, _params(8.0), 2.0, R=0.4)

    def test_log_average_quadrature_points(self, linear_run):
        """At least two quadrature nodes are needed."""
        trajectory, _ = linear_run
        with pytest.raises(DomainError):
            functional_H(trajectory, _params(8.0), 2.0, quad_points=1)

    def test_quadrature_error_estimate(self, linear_run):
        """Snapshot cadence resolves P_R to well under 0.1%."""
        trajectory, _ = linear_run
        assert quadrature_error_estimate(trajectory, _params(8.0), 2.0) < 1e-3


class TestSystemFunctionals:
    """Tests for I_R, J_R and the system analogues of H."""

    def test_ir_jr_fields(self, system_blowup_run):
        """I_R integrates |v|^p and J_R integrates |u|^q."""
        trajectory, record = system_blowup_run
        assert record.verdict.value == "blowup"
        params = _params(8.0, 2.0, 3.0)
        assert functional_IR(trajectory, params, 2.0) == functional_PR(trajectory, params, 2.0, field="v")
        assert functional_JR(trajectory, params, 3.0) == functional_PR(trajectory, params, 3.0, field="u")

    def test_log_average_bounds(self, system_blowup_run):
        """Both system functionals satisfy the log-average bound."""
        trajectory, _ = system_blowup_run
        params = _params(8.0, 2.0, 3.0)
        assert functional_G(trajectory, params, "p", 2.0).satisfied
        assert functional_G(trajectory, params, "q", 3.0).satisfied
        with pytest.raises(DomainError):
            functional_G(trajectory, params, "r", 2.0)


class TestWeakForm:
    """Tests for the weak-form residual."""

    def test_zero_solution(self, z1):
        """u = 0 with eps = 0 gives a vanishing residual."""
        graph, metric = z1
        trajectory, _ = integrate(scalar_problem(graph, metric, epsilon=0.0), SolverControls(t_max=20.0))
        report = weak_form_residual(trajectory, _params(4.0))
        assert report.residual == 0.0
        assert report.relative_residual == 0.0

    def test_small_residual(self, linear_run):
        """A converged lattice run satisfies the identity to 1e-3 relative."""
        trajectory, _ = linear_run
        report = weak_form_residual(trajectory, _params(8.0))
        assert report.relative_residual <= 1e-3
        assert set(report.terms) == {"A", "B", "C", "N", "D", "E"}
        assert report.terms["D"] == pytest.approx(0.05)

    def test_refinement_reduces_residual(self, z1, linear_run):
        """Halving tolerances and cadence shrinks the residual by at least half."""
        graph, metric = z1
        coarse = weak_form_residual(linear_run[0], _params(8.0))
        fine_run, _ = integrate(
            scalar_problem(graph, metric, epsilon=0.05), SolverControls(t_max=80.0).halved()
        )
        fine = weak_form_residual(fine_run, _params(8.0))
        assert abs(fine.residual) <= 0.5 * abs(coarse.residual)

    def test_time_shifted_control(self, linear_run):
        """u(t + 24) is not a solution for the original data."""
        trajectory, _ = linear_run
        control = shift_trajectory(trajectory, 24.0)
        assert control.times[-1] == pytest.approx(56.0, abs=0.3)
        true = weak_form_residual(trajectory, _params(4.0))
        shifted = weak_form_residual(control, _params(4.0))
        assert shifted.relative_residual >= 0.1
        assert shifted.relative_residual > 100 * true.relative_residual

    def test_double_damping(self, z1):
        """The identity with the extra -L u_t terms closes as well."""
        graph, metric = z1
        spec = scalar_problem(graph, metric, epsilon=0.05, kind=ProblemKind.SCALAR_DOUBLE_DAMPING)
        trajectory, _ = integrate(spec, SolverControls(t_max=20.0))
        report = weak_form_residual(trajectory, _params(4.0))
        assert "G" in report.terms and "G0" in report.terms
        assert report.relative_residual <= 1e-3

    def test_system(self, system_linear_run):
        """Both identities of a system close; the v terms are prefixed."""
        trajectory, _ = system_linear_run
        report = weak_form_residual(trajectory, _params(4.0, 2.0, 3.0))
        assert "v_A" in report.terms
        assert report.relative_residual <= 1e-3

    def test_needs_full_coverage(self, blowup_run):
        """The identity needs the whole time support, even for blown-up runs."""
        trajectory, _ = blowup_run
        with pytest.raises(CoverageError):
            weak_form_residual(trajectory, _params(8.0))

    def test_invalid_shift(self, linear_run):
        """Negative or overlong shifts are refused."""
        trajectory, _ = linear_run
        with pytest.raises(DomainError):
            shift_trajectory(trajectory, -1.0)
        with pytest.raises(DomainError):
            shift_trajectory(trajectory, 1000.0)


class TestEstimateChain:
    """Tests for the chain audit and the bundled report."""

    def test_scalar_chain(self, blowup_run):
        """Implied constants are finite and positive at every radius."""
        trajectory, _ = blowup_run
        report = check_estimate_chain(trajectory, _params(8.0), [4.0, 8.0, 16.0], 2.0)
        assert [row.R for row in report.rows] == [4.0, 8.0, 16.0]
        assert all(row.implied_constant is not None and row.implied_constant > 0 for row in report.rows)
        assert report.violations == 0

    def test_system_chain(self, system_blowup_run):
        """Systems audit the u and v chains."""
        trajectory, _ = system_blowup_run
        report = check_estimate_chain(trajectory, _params(8.0, 2.0, 3.0), [4.0, 8.0], 2.0, 3.0)
        assert {row.bound for row in report.rows} == {"u", "v"}
        assert len(report.rows) == 4

    def test_beta_too_small(self, blowup_run):
        """beta below the lower bound for p is refused."""
        trajectory, _ = blowup_run
        params = CutoffParams(alpha=0.0, beta=1.0, nu=1.0, R=8.0, x0=(0,))
        with pytest.raises(DomainError):
            check_estimate_chain(trajectory, params, [8.0], 2.0)

    def test_functional_report(self, linear_run):
        """The bundle holds chain rows, H values, residuals and support measures."""
        trajectory, _ = linear_run
        report = functional_report(trajectory, _params(8.0), [4.0, 8.0], quad_points=64)
        assert len(report.chain.rows) == 2
        assert len(report.h_reports) == 2
        assert len(report.residuals) == 2
        assert len(report.support) == 2
        kinds = {row["kind"] for row in report.to_rows()}
        assert kinds == {"chain", "H", "residual", "support"}

    def test_report_needs_coverage(self, linear_run):
        """Radii beyond the run's horizon cannot be audited."""
        trajectory, _ = linear_run
        with pytest.raises(CoverageError):
            functional_report(trajectory, _params(8.0), [8.0, 16.0])

    def test_blowup_report_residuals_follow_coverage(self, blowup_run):
        """A residual is computed where supp Phi_R ends before blow-up and skipped where it does not."""
        trajectory, record = blowup_run
        assert _params(4.0).time_support < record.T_end < _params(8.0).time_support
        report = functional_report(trajectory, _params(8.0), [4.0, 8.0], quad_points=32)
        assert [r.R for r in report.residuals] == [4.0]
        assert report.residuals[0].relative_residual < 1e-3
        assert np.isfinite(report.chain.rows[-1].implied_constant)
