"""
Weak-solution residual of a computed trajectory.

Testing u_tt - Lu + u_t = F against Psi = Phi_R and integrating by parts
in time gives, for a weak solution,

    A - B - C + E = N + D
    A = int sum mu u Psi_tt        B = int sum mu u L Psi
    C = int sum mu u Psi_t         E = eps sum mu u0 Psi_t(0)
    N = int sum mu F Psi           D = eps sum mu (u0 + u1) Psi(0)

With double damping the extra term -L u_t contributes
G = int sum mu u L Psi_t and eps sum mu u0 L Psi(0) to the left side.
"""

from typing import Dict, Tuple

import numpy as np
from scipy.integrate import trapezoid

from cutoff.profile import CutoffParams, Phi_time_derivative_values, Phi_values, _check_base
from functionals.integrals import time_window
from schemas.report_schema import ResidualReport
from solver.integrator import Trajectory
from utils.exceptions import DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _identity_terms(
    trajectory: Trajectory,
    params: CutoffParams,
    field: str,
    forcing_field: str,
    power: float,
    data: Tuple[np.ndarray, np.ndarray],
    k_end: int,
) -> Dict[str, float]:
    spec = trajectory.spec
    graph = spec.graph
    mu = graph.mu
    lap = graph.laplacian_matrix()
    dist = spec.metric.dist
    times = trajectory.times[:k_end]
    u = trajectory.field(field)[:k_end]
    forcing = spec.nonlinear_coefficient * np.abs(trajectory.field(forcing_field)[:k_end]) ** power

    A, B, C, N, G = (np.empty(k_end) for _ in range(5))
    for k, t in enumerate(times):
        psi = Phi_values(params, dist, t)
        psi_t, psi_tt = Phi_time_derivative_values(params, dist, t)
        weighted = mu * u[k]
        A[k] = weighted @ psi_tt
        B[k] = weighted @ (lap @ psi)
        C[k] = weighted @ psi_t
        N[k] = (mu * forcing[k]) @ psi
        G[k] = weighted @ (lap @ psi_t) if spec.kind.double_damping else 0.0

    f0, f1 = data
    eps = spec.epsilon
    psi0 = Phi_values(params, dist, 0.0)
    psi0_t, _ = Phi_time_derivative_values(params, dist, 0.0)
    terms = {
        "A": float(trapezoid(A, times)),
        "B": float(trapezoid(B, times)),
        "C": float(trapezoid(C, times)),
        "N": float(trapezoid(N, times)),
        "D": float(eps * np.sum(mu * (f0 + f1) * psi0)),
        "E": float(eps * np.sum(mu * f0 * psi0_t)),
    }
    if spec.kind.double_damping:
        terms["G"] = float(trapezoid(G, times))
        terms["G0"] = float(eps * np.sum(mu * f0 * (lap @ psi0)))
    return terms


def _residual(terms: Dict[str, float]) -> Tuple[float, float]:
    left = terms["A"] - terms["B"] - terms["C"] + terms["E"] + terms.get("G", 0.0) + terms.get("G0", 0.0)
    right = terms["N"] + terms["D"]
    residual = left - right
    scale = max(abs(v) for v in terms.values())
    return residual, (abs(residual) / scale if scale > 0 else 0.0)


def weak_form_residual(trajectory: Trajectory, params: CutoffParams) -> ResidualReport:
    """
    Residual of the weak identity with Psi = Phi_R, normalised by the largest term.

    For systems both identities are evaluated and the larger relative
    residual is reported; the terms of the v identity carry a ``v_`` prefix.

    Args:
        trajectory: Trajectory covering the whole time support of Phi_R
        params: Cutoff parameters at scale R

    Returns:
        ResidualReport

    Raises:
        CoverageError: if the trajectory ends before R^(4/(alpha+2))
    """
    _check_base(params, trajectory.metric)
    spec = trajectory.spec
    if spec.graph.laplacian_matrix().shape[0] != trajectory.u.shape[1]:
        raise DomainError("trajectory does not match its graph")
    k_end = time_window(trajectory, params, require_full=True)
    g = spec.graph

    u_data = (spec.u0.to_array(g), spec.u1.to_array(g))
    if spec.kind.is_system:
        terms = _identity_terms(trajectory, params, "u", "v", spec.p, u_data, k_end)
        v_data = (spec.v0.to_array(g), spec.v1.to_array(g))
        v_terms = _identity_terms(trajectory, params, "v", "u", spec.q, v_data, k_end)
        res_u, rel_u = _residual(terms)
        res_v, rel_v = _residual(v_terms)
        residual, relative = (res_u, rel_u) if rel_u >= rel_v else (res_v, rel_v)
        terms.update({f"v_{k}": v for k, v in v_terms.items()})
    else:
        terms = _identity_terms(trajectory, params, "u", "u", spec.p, u_data, k_end)
        residual, relative = _residual(terms)

    logger.debug(f"Weak residual at R={params.R:g}: {relative:.3e}")
    return ResidualReport(R=params.R, residual=residual, relative_residual=relative, terms=terms)


def shift_trajectory(trajectory: Trajectory, shift: float) -> Trajectory:
    """
    Control trajectory w(t) = u(t + shift) on the same snapshot grid.

    The shift is rounded to a whole number of snapshot intervals; the
    returned trajectory is shorter by that many snapshots.

    Raises:
        DomainError: if the shift is negative or not shorter than the trajectory
    """
    if shift < 0:
        raise DomainError(f"shift must be >= 0, got {shift}")
    times = trajectory.times
    if len(times) < 2:
        raise DomainError("trajectory has fewer than two snapshots")
    m = int(round(shift / float(np.median(np.diff(times)))))
    if m >= len(times) - 1:
        raise DomainError(f"shift {shift} leaves fewer than two snapshots")
    keep = len(times) - m
    fields = {
        name: getattr(trajectory, name)[m:m + keep]
        for name in ("u", "u_t", "v", "v_t")
        if getattr(trajectory, name) is not None
    }
    clone = trajectory.with_fields(times[:keep], **fields)
    clone.blew_up = False
    clone.t_end = float(times[keep - 1])
    return clone


__all__ = ["weak_form_residual", "shift_trajectory"]
