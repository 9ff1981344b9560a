"""
Pytest configuration and fixtures for Graph Blowup Lab tests.
"""

import os
import sys

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphs.lattice import build_lattice, lattice_origin  # noqa: E402
from graphs.metric import compute_metric  # noqa: E402
from solver.integrator import integrate  # noqa: E402
from solver.problem import ProblemKind, ProblemSpec, SolverControls, default_bump  # noqa: E402


def scalar_problem(graph, metric, epsilon, p=2.0, kind=ProblemKind.SCALAR):
    """Default bump data on a lattice, scalar kinds."""
    u0, u1 = default_bump(graph, metric)
    return ProblemSpec(kind=kind, p=p, epsilon=epsilon, graph=graph, metric=metric, u0=u0, u1=u1)


@pytest.fixture(scope="session")
def z1():
    """Z^1 truncated at radius 64 with its hop metric."""
    graph = build_lattice(1, 64)
    return graph, compute_metric(graph, lattice_origin(1))


@pytest.fixture(scope="session")
def z2():
    """Z^2 truncated at radius 8 with its hop metric."""
    graph = build_lattice(2, 8)
    return graph, compute_metric(graph, lattice_origin(2))


@pytest.fixture
def default_controls():
    """Solver controls built from Settings."""
    return SolverControls()


@pytest.fixture(scope="session")
def linear_run(z1):
    """Small-data scalar run on Z^1 that covers t in [0, 80] without blowing up."""
    graph, metric = z1
    spec = scalar_problem(graph, metric, epsilon=0.05)
    return integrate(spec, SolverControls(t_max=80.0))


@pytest.fixture(scope="session")
def blowup_run(z1):
    """Scalar p = 2 run on Z^1 with eps = 1; blows up near t = 25."""
    graph, metric = z1
    spec = scalar_problem(graph, metric, epsilon=1.0)
    return integrate(spec, SolverControls(t_max=200.0))
