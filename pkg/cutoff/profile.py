"""
Smooth cutoff profile phi and the space-time test function Phi_R.

    e(s)   = exp(-1/s) for s > 0, 0 otherwise
    phi(r) = 1 on [0, 1/2], 0 on [1, inf),
             e(1 - s) / (e(1 - s) + e(s)) with s = 2r - 1 in between
    Phi_R(t, x) = phi((t^(alpha+2) + d(x)^4) / R^4)^(beta+2)

phi* agrees with phi on [1/2, inf) and vanishes on [0, 1/2).
All functions accept scalars or numpy arrays.
"""

import math
from typing import Any, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.special import expit

from utils.exceptions import DomainError

ArrayLike = Union[float, np.ndarray]

# Outside this band exp(-1/s) underflows relative to the polynomial factors.
_S_CLIP = 1e-3


def _as_array(r: ArrayLike) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("phi is defined for r >= 0")
    return arr


def _out(arr: np.ndarray, scalar: bool) -> ArrayLike:
    return float(arr) if scalar else arr


def _transition(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    s = 2.0 * r - 1.0
    inside = (s > 0) & (s < 1)
    return s, inside


def _log_ratio(s: np.ndarray) -> np.ndarray:
    # k(s) = log(e(s) / e(1 - s)) so that phi = 1 / (1 + exp(k))
    return 1.0 / (1.0 - s) - 1.0 / s


def phi(r: ArrayLike) -> ArrayLike:
    """
    Cutoff profile phi(r).

    Raises:
        DomainError: if r < 0

    Example:
        >>> phi(0.75)
        0.5
    """
    scalar = np.ndim(r) == 0
    r = _as_array(r)
    s, inside = _transition(r)
    out = np.where(r <= 0.5, 1.0, 0.0)
    if np.any(inside):
        out = np.where(inside, expit(-_log_ratio(np.where(inside, s, 0.5))), out)
    return _out(out, scalar)


def phi_star(r: ArrayLike) -> ArrayLike:
    """phi on [1/2, inf), 0 on [0, 1/2)."""
    scalar = np.ndim(r) == 0
    r = _as_array(r)
    out = np.where(r >= 0.5, np.asarray(phi(r)), 0.0)
    return _out(out, scalar)


def phi_derivatives(r: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Closed-form first and second derivatives of phi with respect to r.

    With k(s) as above, phi = sigmoid(-k), so
    phi_s = -phi (1 - phi) k' and phi_ss = -phi_s (1 - 2 phi) k' - phi (1 - phi) k''.
    Both vanish identically off the transition band (1/2, 1).
    """
    scalar = np.ndim(r) == 0
    r = _as_array(r)
    s, inside = _transition(r)
    sc = np.clip(np.where(inside, s, 0.5), _S_CLIP, 1.0 - _S_CLIP)
    k = _log_ratio(sc)
    p = expit(-k)
    q = expit(k)
    k1 = 1.0 / sc ** 2 + 1.0 / (1.0 - sc) ** 2
    k2 = -2.0 / sc ** 3 + 2.0 / (1.0 - sc) ** 3
    d_s = -p * q * k1
    dd_s = -d_s * (1.0 - 2.0 * p) * k1 - p * q * k2
    first = np.where(inside, 2.0 * d_s, 0.0)
    second = np.where(inside, 4.0 * dd_s, 0.0)
    return _out(first, scalar), _out(second, scalar)


def choose_alpha(nu: float) -> float:
    """alpha = 2 (1 - nu) / (1 + nu)."""
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"nu must lie in [0, 1], got {nu}")
    return 2.0 * (1.0 - nu) / (1.0 + nu)


def choose_beta(p: float, q: Optional[float] = None, margin: int = 1) -> float:
    """
    beta = ceil(2 / (min(p, q) - 1)) + margin.

    Large enough that Phi_R^(-1/(p-1)) |d_t Phi_R|^(p/(p-1)) stays bounded.
    """
    m = p if q is None else min(p, q)
    if m <= 1:
        raise DomainError(f"exponents must exceed 1, got {m}")
    return float(math.ceil(2.0 / (m - 1.0)) + margin)


class CutoffParams(BaseModel):
    """Parameters of the test function Phi_R."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: float = Field(..., ge=0.0, description="Time exponent shift")
    beta: float = Field(..., ge=0.0, description="Power shift, Phi = phi^(beta+2)")
    nu: float = Field(..., ge=0.0, le=1.0, description="Decay exponent of the metric")
    R: float = Field(..., gt=0.0, description="Scale")
    x0: Any = Field(..., description="Base vertex")

    @field_validator("R")
    @classmethod
    def finite_scale(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("R must be finite")
        return v

    @classmethod
    def auto(cls, nu: float, R: float, x0: Any, p: float, q: Optional[float] = None, margin: int = 1) -> "CutoffParams":
        return cls(alpha=choose_alpha(nu), beta=choose_beta(p, q, margin), nu=nu, R=R, x0=x0)

    def at_scale(self, R: float) -> "CutoffParams":
        return self.model_copy(update={"R": float(R)})

    @property
    def time_support(self) -> float:
        """R^(4/(alpha+2)): Phi_R(t, .) vanishes for t >= this."""
        return self.R ** (4.0 / (self.alpha + 2.0))


def _argument(params: CutoffParams, t: float, d: np.ndarray) -> np.ndarray:
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return (t ** (params.alpha + 2.0) + d ** 4) / params.R ** 4


def Phi_values(params: CutoffParams, dist: np.ndarray, t: float, starred: bool = False) -> np.ndarray:
    """Phi_R (or Phi*_R) at time t for every distance in ``dist``."""
    s = _argument(params, t, np.asarray(dist, dtype=float))
    base = phi_star(s) if starred else phi(s)
    return np.asarray(base) ** (params.beta + 2.0)


def _check_base(params: CutoffParams, metric: Any) -> None:
    if metric.base != params.x0:
        raise DomainError(f"metric base {metric.base!r} differs from cutoff base {params.x0!r}")


def Phi_R(params: CutoffParams, metric: Any, t: float, x: Any) -> float:
    """
    Phi_R(t, x).

    Raises:
        DomainError: on t < 0, an unknown vertex, or mismatched bases
    """
    _check_base(params, metric)
    return float(Phi_values(params, np.array([metric.distance(x)]), t)[0])


def Phi_star_R(params: CutoffParams, metric: Any, t: float, x: Any) -> float:
    """Phi*_R(t, x) built from phi*."""
    _check_base(params, metric)
    return float(Phi_values(params, np.array([metric.distance(x)]), t, starred=True)[0])


def Phi_time_derivative_values(params: CutoffParams, dist: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """d_t Phi_R and d_tt Phi_R at time t for every distance in ``dist``."""
    a, b, R4 = params.alpha, params.beta, params.R ** 4
    s = _argument(params, t, np.asarray(dist, dtype=float))
    f = np.asarray(phi(s))
    f1, f2 = (np.asarray(v) for v in phi_derivatives(s))
    # f^(b+1) and f^b are well defined at f == 0 because b >= 0
    dt = (a + 2) * (b + 2) * t ** (a + 1) / R4 * f ** (b + 1) * f1
    dtt = (
        (a + 2) * (a + 1) * (b + 2) * t ** a / R4 * f ** (b + 1) * f1
        + (a + 2) ** 2 * (b + 1) * (b + 2) * t ** (2 * a + 2) / R4 ** 2 * f ** b * f1 ** 2
        + (a + 2) ** 2 * (b + 2) * t ** (2 * a + 2) / R4 ** 2 * f ** (b + 1) * f2
    )
    return dt, dtt


def Phi_time_derivatives(params: CutoffParams, metric: Any, t: float, x: Any) -> Tuple[float, float]:
    """
    Closed-form d_t Phi_R(t, x) and d_tt Phi_R(t, x).

    Example:
        >>> Phi_time_derivatives(params, metric, 0.0, params.x0)
        (0.0, 0.0)
    """
    _check_base(params, metric)
    dt, dtt = Phi_time_derivative_values(params, np.array([metric.distance(x)]), t)
    return float(dt[0]), float(dtt[0])


def laplacian_of_phi(params: CutoffParams, graph: Any, metric: Any, t: float) -> np.ndarray:
    """Graph Laplacian of Phi_R(t, .) on every stored vertex."""
    _check_base(params, metric)
    return graph.laplacian_matrix() @ Phi_values(params, metric.dist, t)
