"""
Truncated integer lattices Z^n with the l1 (hop) ball as truncation.
"""

from math import comb
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from config import settings
from graphs.weighted_graph import WeightedGraph
from utils.exceptions import CapacityError, DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def lattice_ball_size(n: int, radius: int) -> int:
    """Number of points x in Z^n with |x|_1 <= radius."""
    return sum(2 ** k * comb(n, k) * comb(radius, k) for k in range(min(n, radius) + 1))


def _points(n: int, radius: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in range(-radius, radius + 1):
        for tail in _points(n - 1, radius - abs(head)):
            yield (head,) + tail


def build_lattice(n: int, radius: int, max_vertices: Optional[int] = None) -> WeightedGraph:
    """
    Build the truncated lattice {x in Z^n : |x|_1 <= radius}.

    omega = 1 on nearest-neighbour pairs and mu = 2n, so sum_y omega = mu
    (C = 1) at every vertex of the infinite lattice. Vertices with
    |x|_1 = radius are flagged as boundary; their missing neighbours are
    recorded as outer weight.

    Args:
        n: Dimension (>= 1)
        radius: l1 truncation radius (>= 1)
        max_vertices: Capacity guard, defaults to settings.max_vertices

    Returns:
        WeightedGraph with tuple vertex identifiers

    Raises:
        DomainError: if n < 1 or radius < 1
        CapacityError: if the vertex count would exceed the guard

    Example:
        >>> g = build_lattice(1, 64)
        >>> g.num_vertices
        129
    """
    if n < 1 or radius < 1:
        raise DomainError(f"lattice needs n >= 1 and radius >= 1 (got n={n}, radius={radius})")
    cap = settings.max_vertices if max_vertices is None else max_vertices
    size = lattice_ball_size(n, radius)
    if size > cap:
        raise CapacityError(f"lattice Z^{n} with radius {radius} has {size} vertices (cap {cap})")

    vertices: List[Tuple[int, ...]] = sorted(_points(n, radius))
    index: Dict[Tuple[int, ...], int] = {x: i for i, x in enumerate(vertices)}

    rows, cols = [], []
    for i, x in enumerate(vertices):
        for axis in range(n):
            y = x[:axis] + (x[axis] + 1,) + x[axis + 1:]
            j = index.get(y)
            if j is not None:
                rows.append(i)
                cols.append(j)
    rows_a, cols_a = np.array(rows, dtype=int), np.array(cols, dtype=int)
    upper = sp.coo_matrix((np.ones(len(rows_a)), (rows_a, cols_a)), shape=(size, size))
    weights = (upper + upper.T).tocsr()

    degree = np.asarray(weights.sum(axis=1)).ravel()
    mu = np.full(size, 2.0 * n)
    outer = mu - degree
    boundary = np.array([sum(abs(c) for c in x) == radius for x in vertices])

    logger.debug(f"Built Z^{n} ball of radius {radius}: {size} vertices, {len(rows_a)} edges")
    return WeightedGraph(
        vertices,
        mu,
        weights,
        boundary=boundary,
        outer_weight=outer,
        name=f"Z{n}_r{radius}",
        lattice=(n, radius),
    )


def lattice_origin(n: int) -> Tuple[int, ...]:
    return (0,) * n
