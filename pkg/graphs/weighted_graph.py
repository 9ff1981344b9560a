"""
Weighted graph core.

Stores a finite truncation of a locally finite weighted graph (V, omega, mu)
with dense vertex indexing, evaluates the graph Laplacian and checks the
structural assumptions (symmetry, zero diagonal, connectivity, the
sum omega <= C mu bound).
"""

from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from schemas.report_schema import ValidationReport
from utils.exceptions import DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)

Vertex = Hashable


class GraphFunction:
    """
    A real function on the vertices of a graph.

    Only vertices with non-default values are stored, which makes compactly
    supported data (u0, u1, v0, v1) cheap to carry around.
    """

    def __init__(self, values: Optional[Dict[Vertex, float]] = None, default: float = 0.0):
        self.values: Dict[Vertex, float] = {
            x: float(v) for x, v in (values or {}).items() if float(v) != default
        }
        self.default = float(default)

    def __call__(self, x: Vertex) -> float:
        return self.values.get(x, self.default)

    def support(self) -> List[Vertex]:
        """Vertices carrying a non-default value."""
        return list(self.values)

    def is_zero(self) -> bool:
        return self.default == 0.0 and not self.values

    def scaled(self, factor: float) -> "GraphFunction":
        return GraphFunction({x: factor * v for x, v in self.values.items()}, factor * self.default)

    def to_array(self, graph: "WeightedGraph") -> np.ndarray:
        """
        Dense array of values in the graph's vertex order.

        Raises:
            DomainError: if a stored vertex is not part of the graph
        """
        arr = np.full(graph.num_vertices, self.default, dtype=float)
        for x, v in self.values.items():
            arr[graph.index_of(x)] = v
        return arr

    @classmethod
    def from_array(cls, graph: "WeightedGraph", values: np.ndarray) -> "GraphFunction":
        return cls({graph.vertices[i]: v for i, v in enumerate(np.asarray(values)) if v != 0.0})

    def __repr__(self) -> str:
        return f"GraphFunction(support={len(self.values)}, default={self.default})"


class WeightedGraph:
    """
    Finite truncation of a weighted graph (V, omega, mu).

    Edge weights are held in a symmetric CSR matrix built from one entry per
    unordered pair, so symmetry holds by construction. ``outer_weight[i]`` is
    the total weight of edges from vertex i to vertices that were cut away by
    the truncation; those neighbours read as 0 (Dirichlet truncation).
    Instances are immutable after construction.
    """

    def __init__(
        self,
        vertices: Sequence[Vertex],
        mu: Sequence[float],
        weights: sp.spmatrix,
        boundary: Optional[Sequence[bool]] = None,
        outer_weight: Optional[Sequence[float]] = None,
        name: str = "graph",
        lattice: Optional[Tuple[int, int]] = None,
    ):
        self.vertices: Tuple[Vertex, ...] = tuple(vertices)
        self._index: Dict[Vertex, int] = {x: i for i, x in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise DomainError("Duplicate vertex identifiers")

        n = len(self.vertices)
        self.mu = np.asarray(mu, dtype=float)
        if self.mu.shape != (n,):
            raise DomainError(f"mu has shape {self.mu.shape}, expected ({n},)")

        self.weights = sp.csr_matrix(weights, dtype=float)
        if self.weights.shape != (n, n):
            raise DomainError(f"weights have shape {self.weights.shape}, expected ({n}, {n})")
        self.weights.eliminate_zeros()
        self.weights.sort_indices()

        self.boundary = np.zeros(n, dtype=bool) if boundary is None else np.asarray(boundary, dtype=bool)
        self.outer_weight = np.zeros(n) if outer_weight is None else np.asarray(outer_weight, dtype=float)
        self.name = name
        # (n, radius) for graphs produced by build_lattice
        self.lattice = lattice

        for arr in (self.mu, self.boundary, self.outer_weight):
            arr.setflags(write=False)
        self._laplacian: Optional[sp.csr_matrix] = None

    # ------------------------------------------------------------------ #
    # construction helpers
    # ------------------------------------------------------------------ #

    @classmethod
    def from_edges(
        cls,
        vertices: Sequence[Vertex],
        mu: Dict[Vertex, float],
        edges: Iterable[Tuple[Vertex, Vertex, float]],
        boundary: Iterable[Vertex] = (),
        outer_weight: Optional[Dict[Vertex, float]] = None,
        name: str = "graph",
    ) -> "WeightedGraph":
        """
        Build a graph from an edge list, one entry per unordered pair.

        Args:
            vertices: Vertex identifiers
            mu: Node measure per vertex (every vertex must be listed, no default)
            edges: (x, y, omega) triples
            boundary: Vertices flagged as truncation boundary
            outer_weight: Weight leaving the truncation per vertex
            name: Label used in logs and reports

        Returns:
            WeightedGraph

        Raises:
            DomainError: on self loops, negative weights, conflicting
                duplicate pairs, missing or non-positive mu
        """
        vertices = list(vertices)
        index = {x: i for i, x in enumerate(vertices)}
        missing = [x for x in vertices if x not in mu]
        if missing:
            raise DomainError(f"mu missing for {len(missing)} vertices (e.g. {missing[0]!r})")
        mu_arr = np.array([mu[x] for x in vertices], dtype=float)
        if np.any(mu_arr <= 0) or not np.all(np.isfinite(mu_arr)):
            raise DomainError("mu must be positive and finite at every vertex")

        pairs: Dict[Tuple[int, int], float] = {}
        for x, y, w in edges:
            if x not in index or y not in index:
                raise DomainError(f"Edge ({x!r}, {y!r}) references an unknown vertex")
            if x == y:
                raise DomainError(f"Self loop at {x!r}: omega(x, x) must be 0")
            w = float(w)
            if w < 0 or not np.isfinite(w):
                raise DomainError(f"Edge ({x!r}, {y!r}) has invalid weight {w}")
            key = (min(index[x], index[y]), max(index[x], index[y]))
            if key in pairs and pairs[key] != w:
                raise DomainError(f"Edge ({x!r}, {y!r}) given twice with different weights")
            pairs[key] = w

        n = len(vertices)
        if pairs:
            rows, cols = np.array(list(pairs)).T
            vals = np.array(list(pairs.values()))
        else:
            rows = cols = np.zeros(0, dtype=int)
            vals = np.zeros(0)
        upper = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
        weights = (upper + upper.T).tocsr()

        boundary_mask = np.zeros(n, dtype=bool)
        for x in boundary:
            boundary_mask[index[x]] = True
        outer = np.zeros(n)
        for x, w in (outer_weight or {}).items():
            outer[index[x]] = float(w)

        return cls(vertices, mu_arr, weights, boundary_mask, outer, name=name)

    # ------------------------------------------------------------------ #
    # queries
    # ------------------------------------------------------------------ #

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return int(sp.triu(self.weights, k=1).nnz)

    def index_of(self, x: Vertex) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise DomainError(f"Unknown vertex {x!r}") from None

    def has_vertex(self, x: Vertex) -> bool:
        return x in self._index

    def neighbors(self, x: Vertex) -> List[Tuple[Vertex, float]]:
        """Neighbours y of x with omega(x, y) > 0, as (y, omega) pairs."""
        i = self.index_of(x)
        start, end = self.weights.indptr[i], self.weights.indptr[i + 1]
        return [
            (self.vertices[j], float(w))
            for j, w in zip(self.weights.indices[start:end], self.weights.data[start:end])
        ]

    def degree_weights(self) -> np.ndarray:
        """Sum over stored neighbours of omega(x, y)."""
        return np.asarray(self.weights.sum(axis=1)).ravel()

    def interior_mask(self) -> np.ndarray:
        """Vertices whose full neighbourhood is stored."""
        return (~self.boundary) & (self.outer_weight == 0)

    def laplacian_matrix(self) -> sp.csr_matrix:
        """
        Sparse Laplacian with Dirichlet truncation.

        (L f)(x) = (1/mu(x)) * (sum_y omega(x,y) (f(y) - f(x)) - outer_weight(x) f(x))
        """
        if self._laplacian is None:
            diag = self.degree_weights() + self.outer_weight
            lap = sp.diags(1.0 / self.mu) @ (self.weights - sp.diags(diag))
            self._laplacian = sp.csr_matrix(lap)
        return self._laplacian

    def signature(self) -> Dict[str, Any]:
        """Small JSON-able description used in settings hashes."""
        return {
            "name": self.name,
            "vertices": self.num_vertices,
            "edges": self.num_edges,
            "total_mu": float(self.mu.sum()),
            "total_weight": float(self.weights.sum()),
            "lattice": list(self.lattice) if self.lattice else None,
        }

    def __repr__(self) -> str:
        return f"WeightedGraph(name={self.name!r}, vertices={self.num_vertices}, edges={self.num_edges})"


def make_graph(
    vertices: Sequence[Vertex],
    mu: Dict[Vertex, float],
    edges: Iterable[Tuple[Vertex, Vertex, float]],
    **kwargs: Any,
) -> WeightedGraph:
    """Shorthand for WeightedGraph.from_edges."""
    return WeightedGraph.from_edges(vertices, mu, edges, **kwargs)


def laplacian_at(graph: WeightedGraph, f: GraphFunction, x: Vertex) -> float:
    """
    Evaluate (1/mu(x)) * sum_{y ~ x} omega(x, y) (f(y) - f(x)).

    Neighbours cut away by the truncation take f's default value.

    Args:
        graph: The weighted graph
        f: Function on the vertices
        x: Vertex at which to evaluate

    Returns:
        The Laplacian of f at x

    Raises:
        DomainError: if x is not a vertex of the graph

    Example:
        >>> laplacian_at(build_lattice(1, 5), GraphFunction({(k,): k * k for k in range(-5, 6)}), (0,))
        1.0
    """
    i = graph.index_of(x)
    fx = f(x)
    total = sum(w * (f(y) - fx) for y, w in graph.neighbors(x))
    total += graph.outer_weight[i] * (f.default - fx)
    return float(total / graph.mu[i])


def integration_by_parts_defect(graph: WeightedGraph, f: GraphFunction, g: GraphFunction) -> float:
    """
    sum_x (Lap f)(x) g(x) mu(x) - sum_x f(x) (Lap g)(x) mu(x).

    Vanishes up to rounding for finitely supported f, g whose supports sit
    on complete neighbourhoods.

    Raises:
        DomainError: if f or g has a non-zero default or a support vertex
            whose neighbourhood is not fully stored
    """
    if f.default != 0.0 or g.default != 0.0:
        raise DomainError("integration by parts needs finitely supported functions")
    interior = graph.interior_mask()
    for func in (f, g):
        for x in func.support():
            if not interior[graph.index_of(x)]:
                raise DomainError(f"Support vertex {x!r} has an incomplete neighbourhood")

    lap = graph.laplacian_matrix()
    fa, ga = f.to_array(graph), g.to_array(graph)
    lhs = float(np.sum((lap @ fa) * ga * graph.mu))
    rhs = float(np.sum(fa * (lap @ ga) * graph.mu))
    return lhs - rhs


def validate_structure(graph: WeightedGraph, c_bound: float = 1.0) -> ValidationReport:
    """
    Check symmetry, connectivity and the degree bound on a stored graph.

    Report-style: never raises on a failed check.

    Args:
        graph: The weighted graph
        c_bound: Constant C in sum_y omega(x, y) <= C mu(x)

    Returns:
        ValidationReport with one flag per check and the measured constant
    """
    w = graph.weights
    asym = abs(w - w.T)
    symmetric = bool(asym.nnz == 0 or asym.max() <= 1e-14 * max(1.0, abs(w).max()))
    zero_diagonal = bool(np.all(w.diagonal() == 0))
    if graph.num_vertices:
        n_components, _ = connected_components(w, directed=False)
    else:
        n_components = 0
    connected = n_components <= 1

    ratios = graph.degree_weights() / graph.mu if graph.num_vertices else np.zeros(0)
    measured = float(ratios.max()) if ratios.size else 0.0
    argmax = str(graph.vertices[int(np.argmax(ratios))]) if ratios.size else None

    report = ValidationReport(
        num_vertices=graph.num_vertices,
        num_edges=graph.num_edges,
        symmetric=symmetric,
        zero_diagonal=zero_diagonal,
        connected=connected,
        positive_measure=bool(np.all(graph.mu > 0)),
        measured_constant=measured,
        argmax_vertex=argmax,
        c_bound=c_bound,
        degree_bound_holds=measured <= c_bound * (1 + 1e-12),
    )
    if report.all_passed:
        logger.info(f"✓ Structure checks passed for {graph.name} (sup sum(omega)/mu = {measured:.6g})")
    else:
        logger.warning(f"⚠️  Structure checks failed for {graph.name}: {report.failed_checks()}")
    return report
