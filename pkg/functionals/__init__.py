"""
Functionals package for Graph Blowup Lab.

Space-time integrals of computed trajectories against the test function
Phi_R: the estimate-chain audit, log-averaged functionals and the
weak-form residual.
"""

from functionals.integrals import (
    time_window,
    functional_PR,
    functional_IR,
    functional_JR,
    data_term,
    support_measure,
    functional_H,
    functional_G,
    quadrature_error_estimate,
)
from functionals.weak_form import weak_form_residual, shift_trajectory
from functionals.chain import check_estimate_chain, functional_report

__all__ = [
    # Integrals
    'time_window',
    'functional_PR',
    'functional_IR',
    'functional_JR',
    'data_term',
    'support_measure',
    'functional_H',
    'functional_G',
    'quadrature_error_estimate',

    # Weak form
    'weak_form_residual',
    'shift_trajectory',

    # Reports
    'check_estimate_chain',
    'functional_report',
]
