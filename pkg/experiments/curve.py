"""
Critical-curve scan for weakly coupled systems.

For each (p, q) the margin Gamma(p, q) - n/(1+nu) decides the prediction
(blow-up when >= 0); the sweep over the epsilon grid gives the outcome.
"""

import math
from typing import Iterable, List, Optional, Tuple

from experiments.config_file import ExperimentConfig
from experiments.sweep import build_graph, build_problem
from schemas.run_schema import CurvePoint, CurveReport, Verdict
from solver.integrator import estimate_lifespan
from solver.problem import gamma_exponent
from utils.exceptions import DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def curve_margin(p: float, q: float, n: float, nu: float = 1.0) -> float:
    """Gamma(p, q) - n/(1+nu); zero on the critical curve."""
    return gamma_exponent(p, q) - n / (1.0 + nu)


def critical_curve_scan(
    config: ExperimentConfig,
    pq_grid: Iterable[Tuple[float, float]],
    epsilons: Optional[List[float]] = None,
) -> CurveReport:
    """
    Run every (p, q) pair over the epsilon grid and compare with the prediction.

    Args:
        config: Experiment configuration; its problem kind must be a system
            on a lattice graph
        pq_grid: Pairs straddling the critical curve
        epsilons: Override of the config grid

    Returns:
        CurveReport; outcome is all_blowup, some_survive or contaminated

    Raises:
        DomainError: if the config is not a system on a lattice
    """
    if not config.problem.kind.is_system:
        raise DomainError("critical-curve scans need a system kind")
    if config.graph.file:
        raise DomainError("critical-curve scans run on lattices")
    n = config.graph.lattice_dim
    nu = config.cutoff.nu
    grid = epsilons if epsilons is not None else config.epsilon.values()
    graph, metric = build_graph(config)

    logger.info("=" * 60)
    logger.info(f"🚀 Critical-curve scan on Z^{n}: {len(list(grid))} epsilon values per pair")
    logger.info("=" * 60)

    points: List[CurvePoint] = []
    for p, q in pq_grid:
        pair = config.model_copy(update={"problem": config.problem.model_copy(update={"p": p, "q": q})})
        spec = build_problem(pair, 1.0, graph, metric)
        records = [estimate_lifespan(spec.with_epsilon(e), config.solver) for e in grid]
        blowups = sum(r.verdict == Verdict.BLOWUP for r in records)
        contaminated = any(r.verdict == Verdict.CONTAMINATED for r in records)
        if blowups == len(records):
            outcome = "all_blowup"
        elif contaminated:
            outcome = "contaminated"
        else:
            outcome = "some_survive"
        margin = curve_margin(p, q, n, nu)
        predicted = margin >= 0 or math.isclose(margin, 0.0, abs_tol=1e-12)
        points.append(
            CurvePoint(
                p=p,
                q=q,
                gamma=gamma_exponent(p, q),
                margin=margin,
                predicted_blowup=predicted,
                outcome=outcome,
                blowups=blowups,
                runs=len(records),
            )
        )
        logger.info(f"✓ (p, q) = ({p:g}, {q:g}): margin {margin:+.4f}, {outcome}")

    report = CurveReport(n=n, points=points)
    logger.info(f"✓ Agreement with prediction: {report.agreement:.0%}")
    return report


__all__ = ["curve_margin", "critical_curve_scan"]
