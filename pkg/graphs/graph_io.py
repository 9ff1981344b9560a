"""
Plain-text graph files.

Line format (``#`` starts a comment):

    graph <N>
    v <id> <mu>
    e <id1> <id2> <omega>        one line per unordered pair
    b <id>                       truncation boundary vertex
    o <id> <weight>              weight to vertices outside the file

Identifiers are integers, parenthesised integer tuples such as ``(1,-2)``,
or bare tokens. Reals are written with 17 significant digits so a
write/read cycle reproduces every value exactly.
"""

import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from config import settings
from graphs.weighted_graph import Vertex, WeightedGraph
from utils.exceptions import CapacityError, DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)

_INT = re.compile(r"^-?\d+$")
_TUPLE = re.compile(r"^\((-?\d+(,-?\d+)*)?\)$")


def format_vertex(x: Vertex) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(str(int(c)) for c in x) + ")"
    token = str(x)
    if not token or any(ch.isspace() for ch in token) or "#" in token:
        raise DomainError(f"Vertex id {x!r} cannot be written as a single token")
    return token


def parse_vertex(token: str) -> Vertex:
    if _INT.match(token):
        return int(token)
    if _TUPLE.match(token):
        inner = token[1:-1]
        return tuple(int(c) for c in inner.split(",")) if inner else ()
    return token


def _real(x: float) -> str:
    return f"{x:.17g}"


def write_graph(graph: WeightedGraph, path: Union[str, Path]) -> Path:
    """
    Write a graph to a text file.

    Args:
        graph: Graph to write
        path: Destination file

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    w = graph.weights.tocoo()
    lines: List[str] = [f"# {graph.name}", f"graph {graph.num_vertices}"]
    ids = [format_vertex(x) for x in graph.vertices]
    for token, m in zip(ids, graph.mu):
        lines.append(f"v {token} {_real(m)}")
    for i, j, val in sorted(zip(w.row, w.col, w.data)):
        if i < j:
            lines.append(f"e {ids[i]} {ids[j]} {_real(val)}")
    for i, flag in enumerate(graph.boundary):
        if flag:
            lines.append(f"b {ids[i]}")
    for i, val in enumerate(graph.outer_weight):
        if val:
            lines.append(f"o {ids[i]} {_real(val)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"✓ Wrote {graph.name} ({graph.num_vertices} vertices) to {path}")
    return path


def read_graph(path: Union[str, Path], max_vertices: Optional[int] = None) -> WeightedGraph:
    """
    Read a graph from a text file.

    Args:
        path: Source file
        max_vertices: Capacity guard, defaults to settings.max_vertices

    Returns:
        WeightedGraph

    Raises:
        DomainError: on malformed lines or inconsistent data
        CapacityError: if the declared vertex count exceeds the guard
    """
    path = Path(path)
    cap = settings.max_vertices if max_vertices is None else max_vertices
    vertices: List[Vertex] = []
    mu: Dict[Vertex, float] = {}
    edges: List[Tuple[Vertex, Vertex, float]] = []
    boundary: List[Vertex] = []
    outer: Dict[Vertex, float] = {}
    declared = None

    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        try:
            if tag == "graph" and len(args) == 1:
                declared = int(args[0])
                if declared > cap:
                    raise CapacityError(f"{path}: {declared} vertices exceeds cap {cap}")
            elif tag == "v" and len(args) == 2:
                x = parse_vertex(args[0])
                if x in mu:
                    raise DomainError(f"vertex {args[0]} declared twice")
                vertices.append(x)
                mu[x] = float(args[1])
            elif tag == "e" and len(args) == 3:
                edges.append((parse_vertex(args[0]), parse_vertex(args[1]), float(args[2])))
            elif tag == "b" and len(args) == 1:
                boundary.append(parse_vertex(args[0]))
            elif tag == "o" and len(args) == 2:
                outer[parse_vertex(args[0])] = float(args[1])
            else:
                raise DomainError(f"unrecognised line {raw!r}")
        except DomainError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from None
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from exc

    if declared is not None and declared != len(vertices):
        raise DomainError(f"{path}: header declares {declared} vertices, found {len(vertices)}")
    if len(vertices) > cap:
        raise CapacityError(f"{path}: {len(vertices)} vertices exceeds cap {cap}")
    unknown = [x for x in list(boundary) + list(outer) if x not in mu]
    if unknown:
        raise DomainError(f"{path}: boundary/outer line references unknown vertex {unknown[0]!r}")

    graph = WeightedGraph.from_edges(
        vertices, mu, edges, boundary=boundary, outer_weight=outer, name=path.stem
    )
    logger.info(f"✓ Loaded {graph}")
    return graph
