"""
Epsilon sweeps: one lifespan estimate per data size.

Runs are independent, so a bounded worker pool executes them; only the
parent process writes results. Every finished record is appended to the
run manifest, and a rerun with the same settings skips the epsilons the
manifest already holds.
"""

import json
import time
from functools import lru_cache
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from experiments.config_file import ExperimentConfig
from graphs.graph_io import parse_vertex, read_graph
from graphs.lattice import build_lattice, lattice_origin
from graphs.metric import GraphMetric, compute_metric, euclidean_lattice_metric
from graphs.weighted_graph import WeightedGraph
from schemas.run_schema import LifespanRecord, Verdict
from solver.integrator import estimate_lifespan
from solver.problem import ProblemSpec, default_bump, random_bump
from utils.exceptions import DomainError
from utils.helpers import generate_slug, settings_hash
from utils.logger import setup_logger

logger = setup_logger(__name__)

MANIFEST = "manifest.json"


def build_graph(config: ExperimentConfig) -> Tuple[WeightedGraph, GraphMetric]:
    """
    Graph and base-point metric described by the [graph] section.

    Raises:
        DomainError: on an unreadable graph, an unknown base vertex or a
            Euclidean metric on a non-lattice graph
        CapacityError: if the lattice exceeds the vertex guard
    """
    section = config.graph
    if section.file:
        graph = read_graph(section.file)
        if section.base is None:
            raise DomainError("graphs read from files need an explicit base vertex")
        base = parse_vertex(section.base)
    else:
        graph = build_lattice(section.lattice_dim, section.lattice_radius)
        base = parse_vertex(section.base) if section.base else lattice_origin(section.lattice_dim)
    if section.metric == "euclidean":
        return graph, euclidean_lattice_metric(graph, base)
    return graph, compute_metric(graph, base)


def build_problem(
    config: ExperimentConfig,
    epsilon: float,
    graph: Optional[WeightedGraph] = None,
    metric: Optional[GraphMetric] = None,
) -> ProblemSpec:
    """ProblemSpec for one epsilon; v data equals u data for systems."""
    if graph is None or metric is None:
        graph, metric = build_graph(config)
    section = config.problem
    if section.data == "random":
        u0, u1 = random_bump(graph, metric, config.run.seed, section.data_radius, section.data_mass)
    else:
        u0, u1 = default_bump(graph, metric, section.data_radius, section.data_mass)
    system = section.kind.is_system
    return ProblemSpec(
        kind=section.kind,
        p=section.p,
        q=section.q if system else None,
        epsilon=float(epsilon),
        graph=graph,
        metric=metric,
        u0=u0,
        u1=u1,
        v0=u0 if system else None,
        v1=u1 if system else None,
        nonlinear_coefficient=section.nonlinear_coefficient,
    )


@lru_cache(maxsize=4)
def _cached_problem(config_json: str) -> ProblemSpec:
    return build_problem(ExperimentConfig.model_validate_json(config_json), 1.0)


def _sweep_task(args: Tuple[str, float]) -> Dict:
    config_json, epsilon = args
    config = ExperimentConfig.model_validate_json(config_json)
    spec = _cached_problem(config_json).with_epsilon(epsilon)
    return estimate_lifespan(spec, config.solver).model_dump(mode="json")


def run_directory(config: ExperimentConfig) -> Path:
    return Path(config.output.dir) / generate_slug(config.output.label)


def config_hash(config: ExperimentConfig) -> str:
    return settings_hash(config.signature())


def load_manifest(directory: Path, expected_hash: str) -> Dict[float, LifespanRecord]:
    """Records of an earlier run with the same settings, keyed by epsilon."""
    path = directory / MANIFEST
    if not path.exists():
        return {}
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("settings_hash") != expected_hash:
        logger.warning(f"⚠️  {path} belongs to different settings; starting over")
        return {}
    records = [LifespanRecord.model_validate(r) for r in data.get("records", [])]
    return {r.epsilon: r for r in records}


def write_manifest(directory: Path, config: ExperimentConfig, records: List[LifespanRecord]) -> Path:
    """Config echo, settings hash and per-record results; written atomically."""
    directory.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": config.signature(),
        "settings_hash": config_hash(config),
        "records": [r.model_dump(mode="json") for r in sorted(records, key=lambda r: r.epsilon)],
    }
    path = directory / MANIFEST
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    tmp.replace(path)
    return path


def lifespan_sweep(
    config: ExperimentConfig,
    epsilons: Optional[List[float]] = None,
    resume: bool = True,
) -> List[LifespanRecord]:
    """
    Estimate the lifespan for every epsilon of the grid.

    Args:
        config: Experiment configuration
        epsilons: Override of the config grid
        resume: Reuse records from a manifest written with the same settings

    Returns:
        Records sorted by epsilon; contaminated runs are kept and flagged

    Example:
        >>> records = lifespan_sweep(ExperimentConfig.from_file("p2.ini"))
        >>> [r.verdict.value for r in records]
        ['blowup', 'blowup', 'blowup', 'blowup', 'blowup']
    """
    grid = sorted(float(e) for e in (epsilons if epsilons is not None else config.epsilon.values()))
    directory = run_directory(config)
    done = load_manifest(directory, config_hash(config)) if resume else {}
    records = [done[e] for e in grid if e in done]
    todo = [e for e in grid if e not in done]

    logger.info("=" * 60)
    logger.info(f"🚀 Sweep {config.output.label}: {config.problem.kind.value} p={config.problem.p:g}"
                + (f" q={config.problem.q:g}" if config.problem.q else ""))
    logger.info(f"   {len(grid)} epsilon values, {len(records)} already done, workers={config.run.workers}")
    logger.info("=" * 60)
    started = time.time()

    config_json = config.model_dump_json()
    tasks = [(config_json, e) for e in todo]
    if config.run.workers == 1 or len(tasks) <= 1:
        results = map(_sweep_task, tasks)
        pool = None
    else:
        pool = Pool(min(config.run.workers, len(tasks)))
        results = pool.imap_unordered(_sweep_task, tasks)
    try:
        for payload in results:
            record = LifespanRecord.model_validate(payload)
            records.append(record)
            write_manifest(directory, config, records)
            logger.info(f"✓ eps={record.epsilon:g}: {record.verdict.value} ({len(records)}/{len(grid)})")
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    records.sort(key=lambda r: r.epsilon)
    contaminated = [r.epsilon for r in records if r.verdict == Verdict.CONTAMINATED]
    if contaminated:
        logger.warning(f"⚠️  Truncation contaminated (excluded from fits): eps = {contaminated}")
    logger.info("=" * 60)
    logger.info(f"✓ Sweep finished in {time.time() - started:.1f}s")
    logger.info("=" * 60)
    return records


__all__ = [
    "build_graph",
    "build_problem",
    "lifespan_sweep",
    "run_directory",
    "config_hash",
    "load_manifest",
    "write_manifest",
]
