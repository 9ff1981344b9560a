"""
Numerical audit of the test-function estimate chain.

For the scalar equation

    P_R + eps sum mu (u0 + u1) Phi_R(0)  <~  R^-(1+nu) (P*_R)^(1/p) |supp Phi*_R|^(1/p')

and for systems the two coupled chains

    I_R + eps sum mu (u0 + u1) Phi_R(0)  <~  R^-(1+nu) (J*_R)^(1/q) |supp|^(1/q')
    J_R + eps sum mu (v0 + v1) Phi_R(0)  <~  R^-(1+nu) (I*_R)^(1/p) |supp|^(1/p')

The audit reports the implied constant lhs / rhs per radius; a constant
that keeps growing with R is flagged.
"""

from typing import List, Optional, Sequence

from config import settings
from cutoff.profile import CutoffParams, choose_beta
from functionals.integrals import (
    data_term,
    functional_G,
    functional_H,
    functional_PR,
    support_measure,
)
from functionals.weak_form import weak_form_residual
from schemas.report_schema import ChainReport, ChainRow, FunctionalReport
from solver.integrator import Trajectory
from utils.exceptions import CoverageError, DomainError, InsufficientDataError
from utils.helpers import growth_flag
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _chain_row(
    R: float,
    name: str,
    lhs: float,
    starred: float,
    exponent: float,
    nu: float,
    measure: float,
) -> ChainRow:
    conj = exponent / (exponent - 1.0)
    rhs = R ** (-(1.0 + nu)) * starred ** (1.0 / exponent) * measure ** (1.0 / conj)
    if rhs > 0:
        return ChainRow(R=R, bound=name, lhs=lhs, rhs=rhs, implied_constant=lhs / rhs)
    return ChainRow(R=R, bound=name, lhs=lhs, rhs=rhs, implied_constant=None, violation=lhs > 0)


def check_estimate_chain(
    trajectory: Trajectory,
    params: CutoffParams,
    radii: Sequence[float],
    p: float,
    q: Optional[float] = None,
    trend_tolerance: Optional[float] = None,
) -> ChainReport:
    """
    Evaluate both sides of the estimate chain at every radius.

    Args:
        trajectory: Trajectory covering R^(4/(alpha+2)) for every radius, or blown up
        params: Base cutoff parameters; R is replaced by each radius
        radii: Radii to audit
        p: Exponent of the nonlinearity (of |v| for systems)
        q: Exponent of |u| for systems
        trend_tolerance: Growth tolerance, defaults from Settings

    Returns:
        ChainReport with one row per (radius, chain)

    Raises:
        DomainError: if beta is below the lower bound for (p, q)
        CoverageError: if the trajectory stops too early
    """
    if params.beta < choose_beta(p, q, margin=0):
        raise DomainError(f"beta={params.beta} is below the lower bound {choose_beta(p, q, margin=0)}")
    tol = settings.trend_tolerance if trend_tolerance is None else trend_tolerance
    system = trajectory.spec.kind.is_system
    graph, metric = trajectory.graph, trajectory.metric

    rows: List[ChainRow] = []
    for R in sorted(float(r) for r in radii):
        scaled = params.at_scale(R)
        measure = support_measure(graph, metric, scaled).measure
        if system:
            I = functional_PR(trajectory, scaled, p, field="v")
            J = functional_PR(trajectory, scaled, q, field="u")
            I_star = functional_PR(trajectory, scaled, p, starred=True, field="v")
            J_star = functional_PR(trajectory, scaled, q, starred=True, field="u")
            rows.append(_chain_row(R, "u", I + data_term(trajectory, scaled, "u"), J_star, q, params.nu, measure))
            rows.append(_chain_row(R, "v", J + data_term(trajectory, scaled, "v"), I_star, p, params.nu, measure))
        else:
            P = functional_PR(trajectory, scaled, p)
            P_star = functional_PR(trajectory, scaled, p, starred=True)
            rows.append(_chain_row(R, "u", P + data_term(trajectory, scaled, "u"), P_star, p, params.nu, measure))

    flagged = False
    for name in sorted({r.bound for r in rows}):
        constants = [r.implied_constant for r in rows if r.bound == name]
        flagged = flagged or growth_flag([c for c in constants if c is not None], tol)
    violations = sum(r.violation for r in rows)
    if flagged:
        logger.warning("⚠️  Implied constant of the estimate chain keeps growing with R")
    return ChainReport(rows=rows, growth_flag=flagged, violations=violations)


def functional_report(
    trajectory: Trajectory,
    params: CutoffParams,
    radii: Sequence[float],
    quad_points: int = 128,
) -> FunctionalReport:
    """
    Chain audit, log-averaged functionals, weak residuals and support measures.

    Radii the trajectory does not cover are skipped for the residual (which
    needs the full time support) and logged.
    """
    spec = trajectory.spec
    p, q = spec.p, spec.q
    logger.info("=" * 60)
    logger.info(f"📐 Functionals for {spec.kind.value} p={p:g}" + (f" q={q:g}" if q else ""))
    logger.info("=" * 60)

    chain = check_estimate_chain(trajectory, params, radii, p, q)
    report = FunctionalReport(chain=chain)
    for R in sorted(float(r) for r in radii):
        scaled = params.at_scale(R)
        report.support.append(support_measure(trajectory.graph, trajectory.metric, scaled))
        try:
            if spec.kind.is_system:
                report.h_reports.append(functional_G(trajectory, scaled, "p", p, quad_points=quad_points))
                report.h_reports.append(functional_G(trajectory, scaled, "q", q, quad_points=quad_points))
            else:
                report.h_reports.append(functional_H(trajectory, scaled, p, quad_points=quad_points))
        except InsufficientDataError as exc:
            logger.warning(f"⚠️  R={R:g}: {exc}")
        try:
            report.residuals.append(weak_form_residual(trajectory, scaled))
        except CoverageError as exc:
            logger.info(f"R={R:g}: residual skipped ({exc})")

    logger.info(f"✓ {len(chain.rows)} chain rows, {len(report.h_reports)} H values, {len(report.residuals)} residuals")
    return report


__all__ = ["check_estimate_chain", "functional_report"]
