"""
Problem definitions and the semi-discrete right-hand side.

On a finite truncation the PDE is an ODE system in the state
y = (u, u_t) for scalar kinds and y = (u, u_t, v, v_t) for systems:

    scalar                   u_tt - Lu + u_t       = c |u|^p
    scalar_double_damping    u_tt - Lu + u_t - Lu_t = c |u|^p
    system                   u_tt - Lu + u_t = c |v|^p,  v_tt - Lv + v_t = c |u|^q
    system_double_damping    the system with -Lu_t, -Lv_t added
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.sparse.csgraph import dijkstra

from config import settings
from graphs.metric import GraphMetric, compute_metric
from graphs.weighted_graph import GraphFunction, WeightedGraph
from utils.exceptions import DomainError, NumericError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def gamma_exponent(p: float, q: float) -> float:
    """
    Gamma(p, q) = max((p + 1)/(pq - 1), (q + 1)/(pq - 1)).

    Raises:
        DomainError: if pq <= 1

    Example:
        >>> gamma_exponent(2.0, 2.0)
        1.0
    """
    if not p * q > 1:
        raise DomainError(f"Gamma needs pq > 1 (got p={p}, q={q})")
    return max(p + 1.0, q + 1.0) / (p * q - 1.0)


class ProblemKind(str, Enum):
    SCALAR = "scalar"
    SYSTEM = "system"
    SCALAR_DOUBLE_DAMPING = "scalar_double_damping"
    SYSTEM_DOUBLE_DAMPING = "system_double_damping"

    @property
    def is_system(self) -> bool:
        return self in (ProblemKind.SYSTEM, ProblemKind.SYSTEM_DOUBLE_DAMPING)

    @property
    def double_damping(self) -> bool:
        return self in (ProblemKind.SCALAR_DOUBLE_DAMPING, ProblemKind.SYSTEM_DOUBLE_DAMPING)


class SolverControls(BaseModel):
    """Integrator settings; defaults come from Settings."""

    model_config = ConfigDict(extra="forbid")

    rtol: float = Field(default_factory=lambda: settings.solver_rtol, gt=0)
    atol: float = Field(default_factory=lambda: settings.solver_atol, gt=0)
    initial_dt: float = Field(default_factory=lambda: settings.solver_initial_dt, gt=0)
    dt_min: float = Field(default_factory=lambda: settings.solver_dt_min, gt=0)
    thresholds: List[float] = Field(default_factory=lambda: list(settings.solver_threshold_ladder))
    t_max: float = Field(default_factory=lambda: settings.solver_t_max, gt=0)
    boundary_tolerance: float = Field(default_factory=lambda: settings.solver_boundary_tolerance, gt=0)
    snapshot_dt: float = Field(default_factory=lambda: settings.solver_snapshot_dt, gt=0)
    growth_cap: float = Field(
        default_factory=lambda: settings.solver_growth_cap,
        gt=0,
        description=(
            "c in max_step = c / sup|u|^a. Near blow-up sup|u| ~ (T - t)^(-1/a) with "
            "a = (p - 1)/2 for the equation and 1/(2 Gamma) for systems, so the cap "
            "keeps every step a fixed fraction c of the remaining lifespan T - t"
        ),
    )
    retry_on_contamination: bool = True

    @field_validator("thresholds", mode="before")
    @classmethod
    def sorted_thresholds(cls, v):
        if isinstance(v, str):
            v = [float(x) for x in v.split(",") if x.strip()]
        v = sorted(float(x) for x in v)
        if not v:
            raise ValueError("at least one blow-up threshold is required")
        if v[0] <= 0:
            raise ValueError("thresholds must be positive")
        return v

    def halved(self) -> "SolverControls":
        """Tolerances and snapshot cadence halved (convergence studies)."""
        return self.model_copy(
            update={"rtol": self.rtol / 2, "atol": self.atol / 2, "snapshot_dt": self.snapshot_dt / 2}
        )


@dataclass(frozen=True)
class ProblemSpec:
    """
    One initial-value problem on a graph.

    The initial state is u(0) = epsilon u0, u_t(0) = epsilon u1 (and the
    same with v0, v1 for systems).

    Raises:
        DomainError: on p <= 1, a missing q or v data for systems, negative
            epsilon, a metric from another graph, or data too close to the
            truncation boundary
    """

    kind: ProblemKind
    p: float
    epsilon: float
    graph: WeightedGraph
    metric: GraphMetric
    u0: GraphFunction
    u1: GraphFunction
    q: Optional[float] = None
    v0: Optional[GraphFunction] = None
    v1: Optional[GraphFunction] = None
    nonlinear_coefficient: float = 1.0
    domain_radius: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        if not self.p > 1:
            raise DomainError(f"p must exceed 1, got {self.p}")
        if self.epsilon < 0 or not np.isfinite(self.epsilon):
            raise DomainError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if self.kind.is_system:
            if self.q is None or not self.q > 1:
                raise DomainError(f"systems need q > 1, got {self.q}")
            if self.v0 is None or self.v1 is None:
                raise DomainError("systems need initial data v0, v1")
        if self.metric.graph is not self.graph:
            raise DomainError("metric was computed on a different graph")
        if self.domain_radius is None and self.graph.lattice:
            object.__setattr__(self, "domain_radius", float(self.graph.lattice[1]))
        check_data_support(self.graph, self._data())
        mass = self.data_mass()
        if self.epsilon > 0 and any(m <= 0 for m in mass):
            logger.warning(f"⚠️  Positivity condition violated: sum mu (u0 + u1) = {mass}")

    def _data(self) -> List[GraphFunction]:
        funcs = [self.u0, self.u1]
        if self.kind.is_system:
            funcs += [self.v0, self.v1]
        return funcs

    def data_mass(self) -> Tuple[float, ...]:
        """sum mu (u0 + u1) (and for v), which must be positive for blow-up."""
        g = self.graph
        masses = [float(np.sum(g.mu * (self.u0.to_array(g) + self.u1.to_array(g))))]
        if self.kind.is_system:
            masses.append(float(np.sum(g.mu * (self.v0.to_array(g) + self.v1.to_array(g)))))
        return tuple(masses)

    @property
    def components(self) -> int:
        return 2 if self.kind.is_system else 1

    @property
    def growth_exponent(self) -> float:
        """
        Exponent a with sup|u| ~ (T - t)^(-1/a) near blow-up.

        1 / (2 Gamma(p, q)), which is (p - 1)/2 for the scalar equation.
        """
        if self.kind.is_system:
            return 1.0 / (2.0 * gamma_exponent(self.p, self.q))
        return (self.p - 1.0) / 2.0

    def initial_state(self) -> np.ndarray:
        parts = [self.epsilon * f.to_array(self.graph) for f in self._data()]
        return np.concatenate(parts)

    def with_graph(self, graph: WeightedGraph) -> "ProblemSpec":
        """Same problem on another truncation (same vertex identifiers)."""
        metric = compute_metric(graph, self.metric.base)
        domain = float(graph.lattice[1]) if graph.lattice else self.domain_radius
        return replace(self, graph=graph, metric=metric, domain_radius=domain)

    def with_epsilon(self, epsilon: float) -> "ProblemSpec":
        return replace(self, epsilon=float(epsilon))

    def signature(self) -> Dict:
        data = {}
        for name, f in zip(("u0", "u1", "v0", "v1"), self._data()):
            data[name] = sorted((str(x), v) for x, v in f.values.items())
        return {
            "kind": self.kind.value,
            "p": self.p,
            "q": self.q,
            "epsilon": self.epsilon,
            "c": self.nonlinear_coefficient,
            "graph": self.graph.signature(),
            "base": str(self.metric.base),
            "data": data,
        }


def check_data_support(graph: WeightedGraph, data: List[GraphFunction]) -> None:
    """
    Require data supports to sit at hop distance >= 2 from clipped vertices.

    Raises:
        DomainError: if a support vertex is unknown or too close to the truncation
    """
    support = sorted({graph.index_of(x) for f in data for x in f.support()})
    clipped = ~graph.interior_mask()
    if not support or not clipped.any():
        return
    near = dijkstra(graph.weights, directed=False, indices=support, unweighted=True, limit=1.5, min_only=True)
    if np.any(np.isfinite(near[clipped])):
        raise DomainError("initial data support must lie at distance >= 2 from the truncation boundary")


def default_bump(
    graph: WeightedGraph,
    metric: GraphMetric,
    radius: float = 2.0,
    mass: float = 1.0,
) -> Tuple[GraphFunction, GraphFunction]:
    """
    u0 = u1 = indicator of B(x0, radius), scaled so sum mu (u0 + u1) = mass.

    Returns:
        (u0, u1)
    """
    ball = metric.dist <= radius
    height = mass / (2.0 * float(graph.mu[ball].sum()))
    bump = {graph.vertices[i]: height for i in np.flatnonzero(ball)}
    return GraphFunction(bump), GraphFunction(bump)


def random_bump(
    graph: WeightedGraph,
    metric: GraphMetric,
    seed: int,
    radius: float = 2.0,
    mass: float = 1.0,
) -> Tuple[GraphFunction, GraphFunction]:
    """Seeded positive random data on B(x0, radius) with sum mu (u0 + u1) = mass."""
    rng = np.random.default_rng(seed)
    idx = np.flatnonzero(metric.dist <= radius)
    a = rng.uniform(0.1, 1.0, size=len(idx))
    b = rng.uniform(0.0, 1.0, size=len(idx))
    scale = mass / float(np.sum(graph.mu[idx] * (a + b)))
    u0 = GraphFunction({graph.vertices[i]: scale * v for i, v in zip(idx, a)})
    u1 = GraphFunction({graph.vertices[i]: scale * v for i, v in zip(idx, b)})
    return u0, u1


def make_rhs(spec: ProblemSpec) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Build f(t, y) for the integrator, closing over the sparse Laplacian.

    Raises (from the returned function):
        NumericError: if the derivative is not finite
    """
    lap = spec.graph.laplacian_matrix()
    n = spec.graph.num_vertices
    c = spec.nonlinear_coefficient
    p = spec.p
    q = spec.q
    double = spec.kind.double_damping

    def _wave(u, w, forcing):
        acc = lap @ u - w + forcing
        if double:
            acc = acc + lap @ w
        return acc

    if spec.kind.is_system:
        def fun(t: float, y: np.ndarray) -> np.ndarray:
            u, w, v, z = y[:n], y[n:2 * n], y[2 * n:3 * n], y[3 * n:]
            with np.errstate(over="ignore", invalid="ignore"):
                out = np.concatenate([w, _wave(u, w, c * np.abs(v) ** p), z, _wave(v, z, c * np.abs(u) ** q)])
            if not np.all(np.isfinite(out)):
                raise NumericError(f"non-finite derivative at t={t}")
            return out
    else:
        def fun(t: float, y: np.ndarray) -> np.ndarray:
            u, w = y[:n], y[n:]
            with np.errstate(over="ignore", invalid="ignore"):
                out = np.concatenate([w, _wave(u, w, c * np.abs(u) ** p)])
            if not np.all(np.isfinite(out)):
                raise NumericError(f"non-finite derivative at t={t}")
            return out

    return fun


def rhs(spec: ProblemSpec, state: np.ndarray) -> np.ndarray:
    """
    Time derivative of the semi-discrete state.

    Args:
        spec: The problem
        state: Concatenated (u, u_t) or (u, u_t, v, v_t)

    Returns:
        d/dt of the state

    Raises:
        DomainError: if the state has the wrong length
        NumericError: if the state or its derivative is not finite
    """
    state = np.asarray(state, dtype=float)
    expected = 2 * spec.components * spec.graph.num_vertices
    if state.shape != (expected,):
        raise DomainError(f"state has shape {state.shape}, expected ({expected},)")
    if not np.all(np.isfinite(state)):
        raise NumericError("non-finite state")
    return make_rhs(spec)(0.0, state)
