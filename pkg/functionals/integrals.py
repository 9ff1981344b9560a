"""
Test-function functionals evaluated on computed trajectories.

    P_R  = int_0^inf sum_x mu(x) Phi_R(t, x)  |u(t, x)|^p dt
    P*_R = the same with Phi*_R
    H(R) = int_{r_min}^R P*_r(p) dr / r

Time integrals use the trapezoid rule on the trajectory snapshots, cut at
min(trajectory end, R^(4/(alpha+2))). Only vertices of B(x0, R) contribute.
"""

import math
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from cutoff.profile import CutoffParams, Phi_values, _check_base, phi_star
from schemas.report_schema import HReport, SupportMeasure
from solver.integrator import Trajectory
from utils.exceptions import CoverageError, DomainError, InsufficientDataError, RangeError
from utils.logger import setup_logger

logger = setup_logger(__name__)

LOG2_OVER_4 = math.log(2.0) / 4.0


def time_window(trajectory: Trajectory, params: CutoffParams, require_full: bool = False) -> int:
    """
    Number of leading snapshots needed to integrate against Phi_R.

    Raises:
        CoverageError: if the trajectory stops before Phi_R's time support
            without having blown up (or at all, when ``require_full``)
    """
    times = trajectory.times
    if len(times) < 2:
        raise CoverageError("trajectory has fewer than two snapshots")
    t_support = params.time_support
    if times[-1] < t_support and (require_full or not trajectory.blew_up):
        raise CoverageError(
            f"trajectory ends at t={times[-1]:.6g} before the test function support {t_support:.6g}"
        )
    return int(min(np.searchsorted(times, t_support, side="left") + 1, len(times)))


def _ball(trajectory: Trajectory, R: float) -> np.ndarray:
    return np.flatnonzero(trajectory.metric.dist < R)


def _field(trajectory: Trajectory, name: str) -> np.ndarray:
    try:
        return trajectory.field(name)
    except KeyError:
        raise DomainError(f"trajectory of kind {trajectory.spec.kind.value} has no field {name!r}") from None


def _weighted_power(trajectory: Trajectory, field: str, power: float, k_end: int, idx: np.ndarray) -> np.ndarray:
    values = np.abs(_field(trajectory, field)[:k_end][:, idx]) ** power
    return values * trajectory.graph.mu[idx]


def functional_PR(
    trajectory: Trajectory,
    params: CutoffParams,
    power: float,
    starred: bool = False,
    field: str = "u",
) -> float:
    """
    P_R (or P*_R) of one field of a trajectory.

    Args:
        trajectory: Computed trajectory with snapshots
        params: Cutoff parameters at scale R
        power: Exponent applied to |field|
        starred: Use Phi*_R instead of Phi_R
        field: "u" or "v"

    Returns:
        The trapezoid value of the time integral

    Raises:
        CoverageError: if the trajectory stops too early
    """
    _check_base(params, trajectory.metric)
    k_end = time_window(trajectory, params)
    idx = _ball(trajectory, params.R)
    if idx.size == 0:
        return 0.0
    weights = _weighted_power(trajectory, field, power, k_end, idx)
    dist = trajectory.metric.dist[idx]
    times = trajectory.times[:k_end]
    integrand = np.array(
        [np.dot(Phi_values(params, dist, t, starred=starred), w) for t, w in zip(times, weights)]
    )
    return float(trapezoid(integrand, times))


def functional_IR(trajectory: Trajectory, params: CutoffParams, p: float, starred: bool = False) -> float:
    """I_R of a system: |v|^p against Phi_R."""
    return functional_PR(trajectory, params, p, starred=starred, field="v")


def functional_JR(trajectory: Trajectory, params: CutoffParams, q: float, starred: bool = False) -> float:
    """J_R of a system: |u|^q against Phi_R."""
    return functional_PR(trajectory, params, q, starred=starred, field="u")


def data_term(trajectory: Trajectory, params: CutoffParams, which: str = "u") -> float:
    """epsilon * sum mu (u0 + u1) Phi_R(0, x) (v0, v1 when which == 'v')."""
    spec = trajectory.spec
    g = spec.graph
    if which == "u":
        f0, f1 = spec.u0, spec.u1
    elif which == "v" and spec.kind.is_system:
        f0, f1 = spec.v0, spec.v1
    else:
        raise DomainError(f"no initial data for {which!r}")
    phi0 = Phi_values(params, spec.metric.dist, 0.0)
    return float(spec.epsilon * np.sum(g.mu * (f0.to_array(g) + f1.to_array(g)) * phi0))


def support_measure(graph, metric, params: CutoffParams) -> SupportMeasure:
    """
    Space-time measure of supp Phi*_R and the bound R^(4/(alpha+2)) Vol(B(x0, R)).

    Phi*_R(t, x) > 0 exactly when R^4/2 <= t^(alpha+2) + d^4 < R^4, so each
    vertex contributes mu(x) times the length of an explicit time slab.

    Raises:
        RangeError: if B(x0, R) is clipped by the truncation
    """
    _check_base(params, metric)
    R, a = params.R, params.alpha
    if R > metric.truncation_radius():
        raise RangeError(f"B(x0, {R}) is clipped by the truncation")
    d4 = metric.dist ** 4
    R4 = R ** 4
    inside = d4 < R4
    upper = (R4 - d4[inside]) ** (1.0 / (a + 2.0))
    lower = np.maximum(R4 / 2.0 - d4[inside], 0.0) ** (1.0 / (a + 2.0))
    measure = float(np.sum(graph.mu[inside] * (upper - lower)))
    volume = float(np.sum(graph.mu[metric.dist <= R]))
    bound = params.time_support * volume
    return SupportMeasure(R=R, measure=measure, bound=bound, ratio=measure / bound if bound else 0.0)


def _h_setup(trajectory: Trajectory, params: CutoffParams, field: str, power: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    k_end = time_window(trajectory, params)
    idx = _ball(trajectory, params.R)
    times = trajectory.times[:k_end]
    dist = trajectory.metric.dist[idx]
    weights = _weighted_power(trajectory, field, power, k_end, idx)
    S = times[:, None] ** (params.alpha + 2.0) + dist[None, :] ** 4
    return times, S, weights


def _log_average(
    trajectory: Trajectory,
    params: CutoffParams,
    field: str,
    power: float,
    quad_points: int,
) -> HReport:
    _check_base(params, trajectory.metric)
    if quad_points < 2:
        raise DomainError("quad_points must be at least 2")
    times, S, weights = _h_setup(trajectory, params, field, power)
    positive = S[S > 0]
    if positive.size == 0:
        raise InsufficientDataError("no snapshot point enters any starred support")
    r_min = float(positive.min()) ** 0.25
    R = params.R
    if R <= r_min:
        raise InsufficientDataError(f"R={R} is below the smallest scale with starred support {r_min:.6g}")

    radii = np.geomspace(r_min, R, quad_points)
    h = np.empty(quad_points)
    for j, r in enumerate(radii):
        star = np.asarray(phi_star(S / r ** 4)) ** (params.beta + 2.0)
        h[j] = trapezoid(np.sum(star * weights, axis=1), times)
    value = float(trapezoid(h, np.log(radii)))

    P_R = functional_PR(trajectory, params, power, field=field)
    bound = LOG2_OVER_4 * P_R
    return HReport(
        R=R,
        H=value,
        bound=bound,
        r_min=r_min,
        quad_points=quad_points,
        satisfied=value <= bound * 1.02 + 1e-300,
    )


def functional_H(
    trajectory: Trajectory,
    params: CutoffParams,
    p: float,
    R: Optional[float] = None,
    quad_points: int = 128,
) -> HReport:
    """
    Log-averaged functional H(R) and its bound (log 2 / 4) P_R.

    The r-integral runs over log-spaced nodes from r_min, the smallest
    scale whose starred support contains a snapshot point, up to R.

    Args:
        trajectory: Scalar trajectory
        params: Cutoff parameters; R overrides params.R when given
        p: Exponent of the nonlinearity
        R: Optional scale override
        quad_points: Number of log-spaced nodes

    Returns:
        HReport

    Raises:
        InsufficientDataError: if every node lies below r_min
    """
    params = params if R is None else params.at_scale(R)
    return _log_average(trajectory, params, "u", p, quad_points)


def functional_G(
    trajectory: Trajectory,
    params: CutoffParams,
    which: str,
    exponent: float,
    R: Optional[float] = None,
    quad_points: int = 128,
) -> HReport:
    """
    System analogues of H: which='p' integrates |v|^p, which='q' integrates |u|^q.
    """
    if which not in ("p", "q"):
        raise DomainError(f"which must be 'p' or 'q', got {which!r}")
    params = params if R is None else params.at_scale(R)
    field = "v" if which == "p" else "u"
    return _log_average(trajectory, params, field, exponent, quad_points)


def quadrature_error_estimate(
    trajectory: Trajectory,
    params: CutoffParams,
    power: float,
    field: str = "u",
) -> float:
    """
    Relative trapezoid error estimate for P_R from cadence halving.

    Compares the full-cadence value with every other snapshot; the
    trapezoid error scales with the square of the spacing, so the fine
    error is about a third of the difference.
    """
    fine = functional_PR(trajectory, params, power, field=field)
    keep = np.arange(0, len(trajectory.times), 2)
    if keep[-1] != len(trajectory.times) - 1:
        keep = np.append(keep, len(trajectory.times) - 1)
    sub = trajectory.with_fields(
        trajectory.times[keep],
        **{name: getattr(trajectory, name)[keep] for name in ("u", "u_t", "v", "v_t") if getattr(trajectory, name) is not None},
    )
    coarse = functional_PR(sub, params, power, field=field)
    if fine == 0:
        return 0.0 if coarse == 0 else float("inf")
    return abs(fine - coarse) / 3.0 / abs(fine)


__all__ = [
    "LOG2_OVER_4",
    "time_window",
    "functional_PR",
    "functional_IR",
    "functional_JR",
    "data_term",
    "support_measure",
    "functional_H",
    "functional_G",
    "quadrature_error_estimate",
]
