"""
Numerical verification of the pointwise cutoff bounds.

For Phi = Phi_R and Phi* = Phi*_R:

    |d_t Phi|  <= C R^(-4/(alpha+2)) Phi*^((beta+1)/(beta+2))
    |d_tt Phi| <= C R^(-8/(alpha+2)) Phi*^(beta/(beta+2))
    -Lap Phi   <= C R^(-(1+nu))      Phi^((beta+1)/(beta+2))

The Laplacian bound is one-sided: on a discrete graph Lap Phi can be
positive, and can be non-zero where Phi* vanishes, because neighbours sit
on the other side of the support edge. Those points, and the trend of
the two-sided ratio |Lap Phi| against Phi*, decide a separate two-sided
verdict.
"""

import time
from typing import Dict, List, Optional, Sequence

import numpy as np

from config import settings
from cutoff.profile import (
    CutoffParams,
    Phi_time_derivative_values,
    Phi_values,
    _check_base,
)
from schemas.report_schema import BoundCheck, CutoffBoundLadderReport, CutoffBoundReport
from utils.exceptions import DomainError, RangeError
from utils.helpers import growth_flag
from utils.logger import setup_logger

logger = setup_logger(__name__)

_TOL = 1e-14


def _ratio(lhs: np.ndarray, rhs: np.ndarray) -> float:
    positive = rhs > 0
    if not positive.any():
        return 0.0
    return float(np.max(lhs[positive] / rhs[positive]))


def _sample_indices(graph, metric, params: CutoffParams, vertex_samples: Optional[Sequence]) -> np.ndarray:
    interior = graph.interior_mask()
    ball = metric.dist <= params.R
    if not np.all(interior[ball]):
        raise RangeError(f"B(x0, {params.R}) reaches the truncation boundary")
    if vertex_samples is None:
        return np.flatnonzero(ball)
    idx = np.array([graph.index_of(x) for x in vertex_samples], dtype=int)
    if not np.all(interior[idx]):
        raise RangeError("vertex samples must have complete neighbourhoods")
    return idx


def verify_cutoff_bounds(
    params: CutoffParams,
    graph,
    metric,
    t_samples: Sequence[float],
    vertex_samples: Optional[Sequence] = None,
) -> CutoffBoundReport:
    """
    Evaluate the three cutoff bounds at every (t, x) sample for one R.

    Args:
        params: Cutoff parameters (R, alpha, beta, nu, x0)
        graph: Weighted graph
        metric: Distances from params.x0
        t_samples: Times at which to evaluate
        vertex_samples: Vertices to test, defaults to the whole ball B(x0, R)

    Returns:
        CutoffBoundReport with sup-ratios and anomaly counts

    Raises:
        DomainError: if R is not larger than the jump size or bases differ
        RangeError: if the ball or the samples reach the truncation boundary
    """
    _check_base(params, metric)
    if params.R <= metric.jump_size:
        raise DomainError(f"R = {params.R} must exceed the jump size {metric.jump_size}")
    idx = _sample_indices(graph, metric, params, vertex_samples)
    lap = graph.laplacian_matrix()
    a, b, R = params.alpha, params.beta, params.R

    dt_ratio = dtt_ratio = lap_ratio = lap_abs_ratio = 0.0
    dt_viol = dtt_viol = off_support = sign_anomalies = 0
    d = metric.dist[idx]

    for t in t_samples:
        phi_all = Phi_values(params, metric.dist, t)
        lap_phi = (lap @ phi_all)[idx]
        phi_s = phi_all[idx]
        star = Phi_values(params, d, t, starred=True)
        dt, dtt = Phi_time_derivative_values(params, d, t)
        dt, dtt = np.abs(dt), np.abs(dtt)

        rhs_dt = R ** (-4.0 / (a + 2)) * star ** ((b + 1) / (b + 2))
        rhs_dtt = R ** (-8.0 / (a + 2)) * star ** (b / (b + 2))
        rhs_lap = R ** (-(1.0 + params.nu)) * phi_s ** ((b + 1) / (b + 2))
        rhs_lap_star = R ** (-(1.0 + params.nu)) * star ** ((b + 1) / (b + 2))

        dt_ratio = max(dt_ratio, _ratio(dt, rhs_dt))
        dtt_ratio = max(dtt_ratio, _ratio(dtt, rhs_dtt))
        lap_ratio = max(lap_ratio, _ratio(np.maximum(-lap_phi, 0.0), rhs_lap))
        lap_abs_ratio = max(lap_abs_ratio, _ratio(np.abs(lap_phi), rhs_lap_star))

        dt_viol += int(np.sum((rhs_dt == 0) & (dt > _TOL)))
        dtt_viol += int(np.sum((rhs_dtt == 0) & (dtt > _TOL)))
        off_support += int(np.sum((star == 0) & (np.abs(lap_phi) > _TOL)))
        sign_anomalies += int(np.sum((star > 0) & (lap_phi > _TOL)))

    samples = len(idx) * len(t_samples)
    return CutoffBoundReport(
        R=R,
        alpha=a,
        beta=b,
        nu=params.nu,
        bounds=[
            BoundCheck(name="dt", sup_ratio=dt_ratio, violations=dt_viol, samples=samples),
            BoundCheck(name="dtt", sup_ratio=dtt_ratio, violations=dtt_viol, samples=samples),
            BoundCheck(
                name="laplacian",
                sup_ratio=lap_ratio,
                abs_sup_ratio=lap_abs_ratio,
                off_support_points=off_support,
                sign_anomalies=sign_anomalies,
                samples=samples,
            ),
        ],
    )


def verify_cutoff_bounds_ladder(
    params: CutoffParams,
    radii: Sequence[float],
    graph,
    metric,
    tau_samples: Optional[Sequence[float]] = None,
    vertex_samples: Optional[Sequence] = None,
    trend_tolerance: Optional[float] = None,
) -> CutoffBoundLadderReport:
    """
    Run verify_cutoff_bounds across a ladder of radii.

    Times are sampled in self-similar form t = tau * R^(4/(alpha+2)) with
    tau in [0, 1], so the time bounds are checked at the same relative
    positions for every R.

    Args:
        params: Cutoff parameters, R is replaced by each ladder entry
        radii: Increasing radii (e.g. 8, 16, 32, 64)
        graph: Weighted graph
        metric: Distances from params.x0
        tau_samples: Relative times, defaults to 41 points on [0, 1]
        vertex_samples: Vertices to test, defaults to each ball
        trend_tolerance: Growth tolerance, defaults to settings.trend_tolerance

    Returns:
        CutoffBoundLadderReport with per-R reports and growth flags
    """
    if len(radii) < 2:
        raise DomainError("a ladder needs at least two radii")
    tau = np.linspace(0.0, 1.0, 41) if tau_samples is None else np.asarray(tau_samples, dtype=float)
    tol = settings.trend_tolerance if trend_tolerance is None else trend_tolerance

    logger.info("=" * 60)
    logger.info(f"🚀 Cutoff bound check: R in {list(radii)}, alpha={params.alpha}, beta={params.beta}")
    started = time.time()

    reports: List[CutoffBoundReport] = []
    for R in radii:
        scaled = params.at_scale(R)
        report = verify_cutoff_bounds(scaled, graph, metric, tau * scaled.time_support, vertex_samples)
        reports.append(report)
        logger.info(
            f"✓ R={R:g}: dt {report.bound('dt').sup_ratio:.4g}, "
            f"dtt {report.bound('dtt').sup_ratio:.4g}, "
            f"lap {report.bound('laplacian').sup_ratio:.4g}"
        )

    flags: Dict[str, bool] = {
        name: growth_flag([r.bound(name).sup_ratio for r in reports], tol)
        for name in ("dt", "dtt", "laplacian")
    }
    hard = sum(r.bound("dt").violations + r.bound("dtt").violations for r in reports)
    result = CutoffBoundLadderReport(
        reports=reports,
        growth_flags=flags,
        hard_violations=hard,
        abs_growth_flag=growth_flag([r.bound("laplacian").abs_sup_ratio for r in reports], tol),
        off_support_points=sum(r.bound("laplacian").off_support_points for r in reports),
    )

    if result.bounded:
        logger.info(f"✓ Ratios bounded across the ladder ({time.time() - started:.2f}s)")
    else:
        logger.warning(f"⚠️  Ratio growth or violations: flags={flags}, violations={hard}")
    if not result.two_sided_bounded:
        logger.warning(
            f"⚠️  Two-sided Laplacian bound fails: off-support points {result.off_support_points}, "
            f"abs ratio trend {result.abs_growth_flag}"
        )
    logger.info("=" * 60)
    return result
