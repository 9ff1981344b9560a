"""
Graph Blowup Lab - Command Line Interface

    python cli.py lattice --dim 1 --radius 64 --out z1.graph
    python cli.py validate --dim 2 --radius 96 --out runs/validate
    python cli.py simulate --config p2.ini --epsilon 0.3
    python cli.py sweep --config p2.ini
    python cli.py fit --config p2.ini --model power
    python cli.py curve --config system.ini --pairs 2:3,2:2
    python cli.py bounds --dim 1 --radii 8,16,32,64 --beta 4
    python cli.py functionals --config p2.ini --epsilon 0.3
    python cli.py config --defaults

Exit codes: 0 success, 1 other lab errors, 2 config error, 3 numeric
failure, 4 truncation contamination.
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from config import settings
from cutoff.bound_check import verify_cutoff_bounds_ladder
from cutoff.profile import CutoffParams, choose_alpha
from experiments.config_file import ExperimentConfig, defaults_text
from experiments.curve import critical_curve_scan
from experiments.exporters import (
    plot_phase_diagram,
    plot_scaling,
    write_csv,
    write_json,
    write_records_csv,
)
from experiments.scaling import fit_scaling
from experiments.sweep import build_graph, build_problem, lifespan_sweep, load_manifest, run_directory, config_hash
from functionals.chain import functional_report
from graphs.graph_io import parse_vertex, read_graph, write_graph
from graphs.lattice import build_lattice, lattice_origin
from graphs.metric import (
    ball_volumes,
    check_distance_laplacian_decay,
    compute_metric,
    euclidean_lattice_metric,
    fit_volume_growth,
)
from graphs.weighted_graph import validate_structure
from schemas.run_schema import Verdict
from solver.integrator import integrate
from utils.exceptions import ConfigError, InsufficientDataError, LabError, TruncationError
from utils.logger import set_global_level, setup_logger

logger = setup_logger(__name__)


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _pairs(text: str) -> List[Tuple[float, float]]:
    pairs = []
    for item in text.split(","):
        try:
            p, q = item.split(":")
            pairs.append((float(p), float(q)))
        except ValueError as exc:
            raise ConfigError(f"expected p:q pairs, got {item!r}") from exc
    return pairs


def _config(args) -> ExperimentConfig:
    return ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()


def _graph_and_metric(args):
    if args.graph:
        graph = read_graph(args.graph)
        base = parse_vertex(args.base) if args.base else graph.vertices[0]
    else:
        graph = build_lattice(args.dim, args.radius)
        base = parse_vertex(args.base) if args.base else lattice_origin(args.dim)
    if args.metric == "euclidean":
        return graph, euclidean_lattice_metric(graph, base)
    return graph, compute_metric(graph, base)


def cmd_lattice(args) -> int:
    graph = build_lattice(args.dim, args.radius)
    write_graph(graph, args.out)
    print(f"{graph.name}: {graph.num_vertices} vertices, {graph.num_edges} edges -> {args.out}")
    return 0


def cmd_validate(args) -> int:
    graph, metric = _graph_and_metric(args)
    out = Path(args.out)
    structure = validate_structure(graph, settings.c_bound)
    write_csv(out / "structure.csv", structure.to_rows())

    trusted = metric.truncation_radius()
    radii = [r for r in _floats(args.radii) if r <= trusted]
    table = ball_volumes(graph, metric, radii)
    write_csv(out / "volumes.csv", table.to_rows())
    summary = {"structure_passed": structure.all_passed, "jump_size": metric.jump_size}
    try:
        growth = fit_volume_growth(table, r_min=min(radii) if radii else 1.0)
        summary["volume_exponent"] = growth.exponent
        summary["volume_r_squared"] = growth.r_squared
    except InsufficientDataError as exc:
        logger.warning(f"⚠️  Volume growth not fitted: {exc}")

    decay = check_distance_laplacian_decay(graph, metric, args.nu, args.R0)
    write_csv(out / "decay.csv", decay.to_rows())
    summary.update({"decay_passed": decay.passed, "decay_sup": decay.sup_value})
    write_json(out / "validate.json", summary)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_simulate(args) -> int:
    config = _config(args)
    spec = build_problem(config, args.epsilon)
    trajectory, record = integrate(spec, config.solver)
    out = Path(args.out) if args.out else run_directory(config)
    write_csv(out / f"trajectory_eps{args.epsilon:g}.csv", trajectory.to_rows())
    write_json(out / f"record_eps{args.epsilon:g}.json", record)
    print(json.dumps(record.to_row(), indent=2, default=str))
    if record.verdict == Verdict.CONTAMINATED:
        raise TruncationError(record.advice or "run reached the truncation boundary")
    return 0


def cmd_sweep(args) -> int:
    config = _config(args)
    if args.workers:
        config = config.model_copy(update={"run": config.run.model_copy(update={"workers": args.workers})})
    records = lifespan_sweep(config, resume=not args.no_resume)
    out = run_directory(config)
    write_records_csv(out / "lifespans.csv", records)
    contaminated = [r.epsilon for r in records if r.verdict == Verdict.CONTAMINATED]
    if contaminated:
        raise TruncationError(f"contaminated after retry at eps = {contaminated}")
    return 0


def cmd_fit(args) -> int:
    config = _config(args)
    out = run_directory(config)
    records = list(load_manifest(out, config_hash(config)).values())
    if not records:
        raise InsufficientDataError(f"no sweep results in {out}; run `sweep` first")
    n = None if config.graph.file else config.graph.lattice_dim
    fit = fit_scaling(records, args.model, kappa=args.kappa, n=n, nu=config.cutoff.nu)
    write_json(out / f"fit_{args.model}.json", fit)
    plot_scaling(records, fit, out / f"scaling_{args.model}.svg")
    print(fit.model_dump_json(indent=2))
    return 0


def cmd_curve(args) -> int:
    config = _config(args)
    report = critical_curve_scan(config, _pairs(args.pairs))
    out = run_directory(config)
    write_csv(out / "curve.csv", report.to_rows())
    write_json(out / "curve.json", report)
    plot_phase_diagram(report, out / "phase.svg", nu=config.cutoff.nu)
    print(f"agreement with prediction: {report.agreement:.0%}")
    return 0


def cmd_bounds(args) -> int:
    graph, metric = _graph_and_metric(args)
    params = CutoffParams(alpha=choose_alpha(args.nu), beta=args.beta, nu=args.nu, R=1.0, x0=metric.base)
    report = verify_cutoff_bounds_ladder(params, _floats(args.radii), graph, metric)
    write_csv(args.out, report.to_rows())
    print(f"bounded: {report.bounded} (growth flags {report.growth_flags}, hard violations {report.hard_violations})")
    print(
        f"two-sided laplacian: {report.two_sided_bounded} "
        f"(abs ratio trend {report.abs_growth_flag}, off-support points {report.off_support_points})"
    )
    return 0


def cmd_functionals(args) -> int:
    config = _config(args)
    spec = build_problem(config, args.epsilon)
    trajectory, record = integrate(spec, config.solver)
    if record.verdict == Verdict.CONTAMINATED:
        raise TruncationError(record.advice or "run reached the truncation boundary")
    params = CutoffParams.auto(
        config.cutoff.nu, 1.0, spec.metric.base, spec.p, spec.q, margin=config.cutoff.beta_margin
    )
    report = functional_report(trajectory, params, config.cutoff.radii, quad_points=config.cutoff.quad_points)
    out = Path(args.out) if args.out else run_directory(config)
    write_csv(out / f"functionals_eps{args.epsilon:g}.csv", report.to_rows())
    write_json(out / f"functionals_eps{args.epsilon:g}.json", report)
    return 0


def cmd_config(args) -> int:
    if args.check:
        ExperimentConfig.from_file(args.check)
        print(f"{args.check}: ok")
        return 0
    print(defaults_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lab", description="Blow-up lab for damped waves on weighted graphs")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_options(p):
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--radius", type=int, default=96)
        p.add_argument("--graph", help="graph file instead of a lattice")
        p.add_argument("--base", help="base vertex x0")
        p.add_argument("--metric", choices=("hop", "euclidean"), default="hop")
        p.add_argument("--nu", type=float, default=1.0)

    p = sub.add_parser("lattice", help="write a truncated lattice graph file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("validate", help="structure, volume growth and decay checks")
    graph_options(p)
    p.add_argument("--radii", default="8,16,32,64")
    p.add_argument("--R0", type=float, default=1.0)
    p.add_argument("--out", default=str(Path(settings.output_dir) / "validate"))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="single run, trajectory CSV")
    p.add_argument("--config")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="lifespan sweep over the epsilon grid")
    p.add_argument("--config")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-resume", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="scaling fit of a finished sweep")
    p.add_argument("--config")
    p.add_argument("--model", choices=("power", "exponential"), default="power")
    p.add_argument("--kappa", type=float)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("curve", help="critical-curve scan for systems")
    p.add_argument("--config")
    p.add_argument("--pairs", required=True, help="p:q pairs, e.g. 2:3,2:2")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("bounds", help="cutoff bound verification across radii")
    graph_options(p)
    p.add_argument("--radii", default="8,16,32,64")
    p.add_argument("--beta", type=float, default=4.0)
    p.add_argument("--out", default=str(Path(settings.output_dir) / "cutoff_bounds.csv"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("functionals", help="estimate chain, H and weak residual of one run")
    p.add_argument("--config")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_functionals)

    p = sub.add_parser("config", help="print defaults or check a config file")
    p.add_argument("--defaults", action="store_true")
    p.add_argument("--check")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_global_level(args.log_level)
    started = time.time()
    try:
        code = args.func(args)
    except LabError as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        return exc.exit_code
    logger.debug(f"{args.command} finished in {time.time() - started:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
