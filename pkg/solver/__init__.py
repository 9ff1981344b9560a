"""
Solver package for Graph Blowup Lab.

Problem definitions, the semi-discrete right-hand side, adaptive
integration with blow-up detection and lifespan estimation.
"""

from solver.problem import (
    ProblemKind,
    ProblemSpec,
    SolverControls,
    gamma_exponent,
    default_bump,
    random_bump,
    check_data_support,
    make_rhs,
    rhs,
)
from solver.integrator import Trajectory, integrate, estimate_lifespan

__all__ = [
    # Problems
    'ProblemKind',
    'ProblemSpec',
    'SolverControls',
    'gamma_exponent',
    'default_bump',
    'random_bump',
    'check_data_support',
    'make_rhs',
    'rhs',

    # Integration
    'Trajectory',
    'integrate',
    'estimate_lifespan',
]
