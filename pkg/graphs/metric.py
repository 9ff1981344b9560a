"""
Pseudo-metric d(x) = d(x0, x) on a weighted graph.

The default metric is the hop (combinatorial) distance, computed by a
breadth-first search from the base vertex; it has jump size 1. Any other
distance-to-base array can be supplied through ``custom_metric``.
"""

from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import shortest_path
from scipy.stats import linregress

from config import settings
from graphs.weighted_graph import Vertex, WeightedGraph
from schemas.report_schema import BallTable, DecayReport, VolumeGrowthFit
from utils.exceptions import DomainError, InsufficientDataError, RangeError
from utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_VOLUME_RADII = 4


class GraphMetric:
    """
    Distances from a base vertex, indexed like the graph's vertices.

    Attributes:
        base: The base vertex x0
        dist: d(x0, x) for every stored vertex
        jump_size: sup over edges of |d(x) - d(y)|
        kind: "hop" or "custom"
    """

    def __init__(self, graph: WeightedGraph, base: Vertex, dist: np.ndarray, jump_size: float, kind: str):
        self.graph = graph
        self.base = base
        self.base_index = graph.index_of(base)
        self.dist = np.asarray(dist, dtype=float)
        self.dist.setflags(write=False)
        self.jump_size = float(jump_size)
        self.kind = kind

    def distance(self, x: Vertex) -> float:
        return float(self.dist[self.graph.index_of(x)])

    def truncation_radius(self) -> float:
        """
        Largest radius r for which B(x0, r) is known to be complete.

        Every vertex beyond the truncation is adjacent to a boundary or
        outer-weighted vertex, so balls up to the closest such vertex are
        fully stored.
        """
        clipped = ~self.graph.interior_mask()
        if not clipped.any():
            return float("inf")
        return float(self.dist[clipped].min())

    def ball_mask(self, r: float) -> np.ndarray:
        return self.dist <= r

    def __repr__(self) -> str:
        return f"GraphMetric(base={self.base!r}, kind={self.kind}, jump={self.jump_size})"


def _edge_jump(graph: WeightedGraph, dist: np.ndarray) -> float:
    coo = graph.weights.tocoo()
    if coo.nnz == 0:
        return 0.0
    return float(np.max(np.abs(dist[coo.row] - dist[coo.col])))


def compute_metric(graph: WeightedGraph, base: Vertex) -> GraphMetric:
    """
    Hop distance from ``base`` by breadth-first search.

    Args:
        graph: Connected weighted graph
        base: Base vertex x0

    Returns:
        GraphMetric with jump_size 1 (0 for a single vertex)

    Raises:
        DomainError: if base is unknown or the graph is disconnected
    """
    i0 = graph.index_of(base)
    dist = shortest_path(graph.weights, directed=False, unweighted=True, indices=i0)
    if not np.all(np.isfinite(dist)):
        unreachable = int(np.sum(~np.isfinite(dist)))
        raise DomainError(f"{graph.name} is disconnected: {unreachable} vertices unreachable from {base!r}")
    jump = 1.0 if graph.num_edges else 0.0
    return GraphMetric(graph, base, dist, jump, "hop")


def custom_metric(graph: WeightedGraph, base: Vertex, distances: Sequence[float]) -> GraphMetric:
    """
    Wrap a user-supplied distance-to-base array.

    Raises:
        DomainError: if the array has the wrong length, is negative, or
            d(x0) != 0
    """
    dist = np.asarray(distances, dtype=float)
    if dist.shape != (graph.num_vertices,):
        raise DomainError(f"expected {graph.num_vertices} distances, got shape {dist.shape}")
    if np.any(dist < 0) or not np.all(np.isfinite(dist)):
        raise DomainError("distances must be finite and non-negative")
    if dist[graph.index_of(base)] != 0:
        raise DomainError("distance of the base vertex to itself must be 0")
    return GraphMetric(graph, base, dist, _edge_jump(graph, dist), "custom")


def euclidean_lattice_metric(graph: WeightedGraph, base: Vertex) -> GraphMetric:
    """Euclidean distance on a lattice graph with tuple vertices."""
    if graph.lattice is None:
        raise DomainError(f"{graph.name} is not a lattice")
    coords = np.array(graph.vertices, dtype=float)
    dist = np.linalg.norm(coords - np.asarray(base, dtype=float), axis=1)
    return custom_metric(graph, base, dist)


def ball_volumes(graph: WeightedGraph, metric: GraphMetric, radii: Iterable[float]) -> BallTable:
    """
    Vol(B(x0, r)) = sum of mu(x) over d(x) <= r, for each r.

    Raises:
        DomainError: if a radius is negative
        RangeError: if a radius reaches beyond the complete part of the truncation
    """
    radii = sorted(float(r) for r in radii)
    if radii and radii[0] < 0:
        raise DomainError(f"negative radius {radii[0]}")
    trusted = metric.truncation_radius()
    if radii and radii[-1] > trusted:
        raise RangeError(f"radius {radii[-1]} exceeds trusted truncation radius {trusted}")

    order = np.argsort(metric.dist, kind="stable")
    sorted_dist = metric.dist[order]
    cum_mu = np.cumsum(graph.mu[order])
    volumes: List[float] = []
    counts: List[int] = []
    for r in radii:
        k = int(np.searchsorted(sorted_dist, r, side="right"))
        counts.append(k)
        volumes.append(float(cum_mu[k - 1]) if k else 0.0)
    return BallTable(base=str(metric.base), radii=radii, volumes=volumes, counts=counts)


def fit_volume_growth(table: BallTable, r_min: float = 1.0) -> VolumeGrowthFit:
    """
    Least-squares slope of log Vol against log r over radii >= r_min.

    Raises:
        InsufficientDataError: with fewer than 4 usable radii of distinct volume
    """
    pts = [(r, v) for r, v in zip(table.radii, table.volumes) if r >= r_min and r > 0 and v > 0]
    distinct = len({v for _, v in pts})
    if distinct < MIN_VOLUME_RADII:
        raise InsufficientDataError(
            f"need {MIN_VOLUME_RADII} radii with distinct volumes, have {distinct}"
        )
    log_r = np.log([r for r, _ in pts])
    log_v = np.log([v for _, v in pts])
    fit = linregress(log_r, log_v)
    return VolumeGrowthFit(
        exponent=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue ** 2),
        points_used=len(pts),
    )


def check_distance_laplacian_decay(
    graph: WeightedGraph,
    metric: GraphMetric,
    nu: float,
    R0: float,
    threshold: Optional[float] = None,
) -> DecayReport:
    """
    Measure sup |Lap d(x)| d(x)^nu over interior vertices with d(x) > R0.

    Args:
        graph: The weighted graph
        metric: Distances from x0
        nu: Decay exponent in [0, 1]
        R0: Inner radius excluded from the check
        threshold: Pass/fail constant, defaults to settings.decay_threshold

    Returns:
        DecayReport (pass flag, sup and arg-sup, per-vertex rows)

    Raises:
        DomainError: if nu is outside [0, 1]
        InsufficientDataError: if no interior vertex lies outside B(x0, R0)
    """
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"nu must lie in [0, 1], got {nu}")
    threshold = settings.decay_threshold if threshold is None else threshold
    tested = graph.interior_mask() & (metric.dist > R0)
    if not tested.any():
        raise InsufficientDataError(f"no interior vertex outside B(x0, {R0})")

    lap_d = graph.laplacian_matrix() @ metric.dist
    values = np.abs(lap_d[tested]) * metric.dist[tested] ** nu
    idx = np.flatnonzero(tested)
    k = int(np.argmax(values))
    sup_value = float(values[k])

    rows = [
        {"vertex": str(graph.vertices[i]), "d": float(metric.dist[i]), "lap_d": float(lap_d[i]), "value": float(v)}
        for i, v in zip(idx, values)
    ]
    report = DecayReport(
        nu=nu,
        R0=R0,
        threshold=threshold,
        sup_value=sup_value,
        argsup_vertex=str(graph.vertices[idx[k]]),
        tested_vertices=int(tested.sum()),
        passed=sup_value <= threshold,
        values=rows,
    )
    status = "✓" if report.passed else "⚠️ "
    logger.info(f"{status} |Lap d| d^{nu} sup = {sup_value:.6g} over {report.tested_vertices} vertices")
    return report


def truncation_radius(graph: WeightedGraph, metric: GraphMetric) -> float:
    """Largest r whose ball holds no clipped vertex except at distance exactly r."""
    if metric.graph is not graph:
        raise DomainError("metric was computed on a different graph")
    return metric.truncation_radius()
