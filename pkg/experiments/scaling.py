"""
Predicted lifespan laws and least-squares fits of measured lifespans.

With Vol(B(x0, r)) ~ r^n and the distance-Laplacian decay exponent nu:

* scalar, n < (1+nu)/(p-1): power law, T ~ eps^s with
  s = -(p-1)(1+nu) / (1+nu - n(p-1))
* scalar, n == (1+nu)/(p-1): exponential law, log T ~ eps^-(p-1)
* system, n < (1+nu) Gamma: power law, s = -(1+nu) / ((1+nu) Gamma - n)
* system, n == (1+nu) Gamma: exponential, kappa = p-1 if p == q,
  else max(p, q) / Gamma

Nothing is predicted for supercritical parameters.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from schemas.report_schema import BallTable
from schemas.run_schema import ImplicitLifespanCheck, LifespanModel, LifespanRecord, ScalingFit, Verdict
from solver.problem import ProblemKind, gamma_exponent
from utils.exceptions import DomainError, InsufficientDataError, NoPredictionError, RangeError
from utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_FIT_POINTS = 5
SHARP_TOLERANCE = 0.15

gamma = gamma_exponent


def fujita(n: float, nu: float = 1.0) -> float:
    """
    Critical exponent 1 + (1+nu)/n; 1 + 2/n on lattices.

    Example:
        >>> fujita(1)
        3.0
        >>> fujita(2)
        2.0
    """
    if n <= 0:
        raise DomainError(f"n must be positive, got {n}")
    return 1.0 + (1.0 + nu) / n


def _is_close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def predicted_lifespan_model(
    kind: ProblemKind,
    n: float,
    nu: float,
    p: float,
    q: Optional[float] = None,
) -> LifespanModel:
    """
    Lifespan law predicted for a parameter set.

    Double-damping kinds share the laws of their single-damping counterparts.

    Args:
        kind: Problem kind
        n: Volume growth exponent
        nu: Decay exponent of the distance Laplacian
        p, q: Nonlinearity exponents (q for systems)

    Returns:
        LifespanModel

    Raises:
        DomainError: on p <= 1 or a system without q
        NoPredictionError: for supercritical parameters

    Example:
        >>> predicted_lifespan_model(ProblemKind.SCALAR, 1, 1.0, 2.0).slope
        -2.0
    """
    kind = ProblemKind(kind)
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")

    if kind.is_system:
        if q is None:
            raise DomainError("systems need q")
        g = gamma_exponent(p, q)
        critical_n = (1.0 + nu) * g
        if _is_close(n, critical_n):
            kappa = p - 1.0 if _is_close(p, q) else max(p, q) / g
            return LifespanModel(model="exponential", regime="critical", kappa=kappa, gamma=g)
        if n < critical_n:
            return LifespanModel(
                model="power", regime="subcritical", slope=-(1.0 + nu) / (critical_n - n), gamma=g
            )
        raise NoPredictionError(f"supercritical system: (1+nu) Gamma = {critical_n:g} < n = {n:g}")

    p_fuj = fujita(n, nu)
    if _is_close(p, p_fuj):
        return LifespanModel(model="exponential", regime="critical", kappa=p - 1.0, fujita=p_fuj)
    if p < p_fuj:
        slope = -(p - 1.0) * (1.0 + nu) / (1.0 + nu - n * (p - 1.0))
        return LifespanModel(model="power", regime="subcritical", slope=slope, fujita=p_fuj)
    raise NoPredictionError(f"supercritical scalar problem: p = {p:g} > {p_fuj:g}")


def _usable(records: Sequence[LifespanRecord]) -> Tuple[List[LifespanRecord], List[float]]:
    used, excluded = [], []
    for r in records:
        if r.verdict == Verdict.BLOWUP and r.T_est is not None and r.T_est > 0 and r.epsilon > 0:
            used.append(r)
        else:
            excluded.append(r.epsilon)
    return sorted(used, key=lambda r: r.epsilon), sorted(excluded)


def _agreement(fitted: float, predicted: float) -> str:
    if abs(fitted - predicted) <= SHARP_TOLERANCE * abs(predicted):
        return "matches_sharp_rate"
    if abs(fitted) < abs(predicted):
        return "consistent_with_upper_bound"
    return "exceeds_upper_bound"


def fit_scaling(
    records: Sequence[LifespanRecord],
    model: str,
    kappa: Optional[float] = None,
    n: Optional[float] = None,
    nu: float = 1.0,
) -> ScalingFit:
    """
    Least-squares fit of lifespans in the model's linearising coordinates.

    power:        log T against log eps (slope = lifespan exponent)
    exponential:  log T against eps^-kappa (slope = C in exp(C eps^-kappa))

    Records without a blow-up estimate are excluded and listed in the fit.
    When n is given the predicted law is attached with the relative error.

    Args:
        records: Sweep records
        model: "power" or "exponential"
        kappa: Exponent for the exponential abscissa; taken from the
            prediction when omitted
        n: Volume growth exponent for the prediction
        nu: Decay exponent for the prediction

    Returns:
        ScalingFit

    Raises:
        InsufficientDataError: with fewer than five usable records
        DomainError: on an unknown model or an exponential fit without kappa
    """
    if model not in ("power", "exponential"):
        raise DomainError(f"unknown model {model!r}")
    used, excluded = _usable(records)
    if len({r.epsilon for r in used}) < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"need {MIN_FIT_POINTS} blow-up records with distinct epsilon, got {len(used)}"
        )
    if excluded:
        logger.warning(f"⚠️  Excluded from fit: eps = {excluded}")

    prediction: Optional[LifespanModel] = None
    if n is not None:
        first = used[0]
        try:
            prediction = predicted_lifespan_model(ProblemKind(first.kind), n, nu, first.p, first.q)
        except NoPredictionError as exc:
            logger.warning(f"⚠️  {exc}")

    eps = np.array([r.epsilon for r in used])
    T = np.array([r.T_est for r in used])
    logT = np.log(T)

    fitted_kappa = None
    if model == "power":
        result = linregress(np.log(eps), logT)
    else:
        if kappa is None:
            if prediction is None or prediction.kappa is None:
                raise DomainError("exponential fit needs kappa")
            kappa = prediction.kappa
        result = linregress(eps ** (-kappa), logT)
        if np.all(logT > 0):
            fitted_kappa = float(linregress(-np.log(eps), np.log(logT)).slope)

    slope = float(result.slope)
    r_squared = float(min(max(result.rvalue ** 2, 0.0), 1.0))

    predicted_slope = relative_error = agreement = None
    if prediction is not None and model == prediction.model == "power":
        predicted_slope = prediction.slope
        relative_error = abs(slope - predicted_slope) / abs(predicted_slope)
        agreement = _agreement(slope, predicted_slope)
    elif prediction is not None and model == prediction.model == "exponential" and fitted_kappa is not None:
        relative_error = abs(fitted_kappa - prediction.kappa) / prediction.kappa
        agreement = _agreement(fitted_kappa, prediction.kappa)

    fit = ScalingFit(
        model=model,
        slope=slope,
        intercept=float(result.intercept),
        r_squared=r_squared,
        points_used=len(used),
        excluded_epsilons=excluded,
        predicted_slope=predicted_slope,
        kappa=kappa,
        fitted_kappa=fitted_kappa,
        relative_error=relative_error,
        agreement=agreement,
    )
    logger.info(f"✓ {model} fit: slope={slope:.6g}, R^2={r_squared:.4f}, points={len(used)}")
    return fit


def implicit_lifespan_check(
    records: Sequence[LifespanRecord],
    table: BallTable,
    kind: ProblemKind,
    nu: float,
    p: float,
    q: Optional[float] = None,
) -> ImplicitLifespanCheck:
    """
    Evaluate the implicit lifespan bound on graphs without a power volume law.

    Per blow-up record the quantity

        T / Vol(B(x0, T^(1/(1+nu))))^e * eps^e,  e = p - 1 (scalar) or 1/Gamma (system)

    is bounded above by a constant; its spread across records shows whether
    the bound is attained uniformly.

    Raises:
        InsufficientDataError: without any blow-up record
        RangeError: if a lifespan needs a ball beyond the table
    """
    kind = ProblemKind(kind)
    exponent = 1.0 / gamma_exponent(p, q) if kind.is_system else p - 1.0
    used, _ = _usable(records)
    if not used:
        raise InsufficientDataError("no blow-up records")
    radii = np.asarray(table.radii, dtype=float)
    volumes = np.asarray(table.volumes, dtype=float)

    values, epsilons = [], []
    for r in used:
        radius = r.T_est ** (1.0 / (1.0 + nu))
        if radius > radii[-1]:
            raise RangeError(f"eps={r.epsilon:g} needs Vol at r={radius:.4g} beyond the table ({radii[-1]:g})")
        vol = float(np.interp(radius, radii, volumes))
        values.append(r.T_est / vol ** exponent * r.epsilon ** exponent)
        epsilons.append(r.epsilon)
    spread = max(values) / min(values)
    return ImplicitLifespanCheck(values=values, epsilons=epsilons, spread=spread)


__all__ = [
    "gamma",
    "fujita",
    "predicted_lifespan_model",
    "fit_scaling",
    "implicit_lifespan_check",
    "MIN_FIT_POINTS",
]
