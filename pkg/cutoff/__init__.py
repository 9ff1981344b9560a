"""
Cutoff package for Graph Blowup Lab.

The smooth profile phi, the space-time test function Phi_R and the
numerical check of its pointwise bounds.
"""

from cutoff.profile import (
    CutoffParams,
    phi,
    phi_star,
    phi_derivatives,
    choose_alpha,
    choose_beta,
    Phi_R,
    Phi_star_R,
    Phi_values,
    Phi_time_derivatives,
    Phi_time_derivative_values,
    laplacian_of_phi,
)
from cutoff.bound_check import verify_cutoff_bounds, verify_cutoff_bounds_ladder

__all__ = [
    'CutoffParams',
    'phi',
    'phi_star',
    'phi_derivatives',
    'choose_alpha',
    'choose_beta',
    'Phi_R',
    'Phi_star_R',
    'Phi_values',
    'Phi_time_derivatives',
    'Phi_time_derivative_values',
    'laplacian_of_phi',
    'verify_cutoff_bounds',
    'verify_cutoff_bounds_ladder',
]
