"""
Graphs package for Graph Blowup Lab.

Weighted graphs, lattice truncations, graph files and the distance
pseudo-metric with its volume and decay checks.
"""

from graphs.weighted_graph import (
    GraphFunction,
    WeightedGraph,
    make_graph,
    laplacian_at,
    integration_by_parts_defect,
    validate_structure,
)
from graphs.lattice import build_lattice, lattice_ball_size, lattice_origin
from graphs.graph_io import read_graph, write_graph
from graphs.metric import (
    GraphMetric,
    compute_metric,
    custom_metric,
    euclidean_lattice_metric,
    ball_volumes,
    fit_volume_growth,
    check_distance_laplacian_decay,
    truncation_radius,
)

__all__ = [
    # Graph core
    'GraphFunction',
    'WeightedGraph',
    'make_graph',
    'laplacian_at',
    'integration_by_parts_defect',
    'validate_structure',

    # Lattices and files
    'build_lattice',
    'lattice_ball_size',
    'lattice_origin',
    'read_graph',
    'write_graph',

    # Metric
    'GraphMetric',
    'compute_metric',
    'custom_metric',
    'euclidean_lattice_metric',
    'ball_volumes',
    'fit_volume_growth',
    'check_distance_laplacian_decay',
    'truncation_radius',
]
