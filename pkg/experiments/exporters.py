"""
Writers for CSV, JSON and SVG outputs.

CSV is the authoritative format: RFC-4180 quoting, CRLF line ends and
reals written with 17 significant digits, so identical inputs give
byte-identical files.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel

from schemas.run_schema import CurveReport, LifespanRecord, ScalingFit, Verdict
from utils.helpers import format_real
from utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_real(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path: PathLike, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> Path:
    """
    Write rows as CSV.

    Columns default to the keys of the rows in first-seen order.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if columns is None:
        columns = []
        for row in rows:
            columns += [k for k in row if k not in columns]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    logger.info(f"✓ Wrote {path} ({len(rows)} rows)")
    return path


def write_json(path: PathLike, payload: Union[BaseModel, Dict[str, Any], List[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    logger.info(f"✓ Wrote {path}")
    return path


def write_records_csv(path: PathLike, records: Iterable[LifespanRecord]) -> Path:
    rows = [r.to_row() for r in sorted(records, key=lambda r: r.epsilon)]
    return write_csv(path, rows)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "graph-blowup-lab"
    return plt


def _save_svg(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info(f"✓ Wrote {path}")
    return path


def plot_scaling(records: Sequence[LifespanRecord], fit: Optional[ScalingFit], path: PathLike) -> Path:
    """log T against log eps (power) or eps^-kappa (exponential), with the fitted line."""
    plt = _pyplot()
    exponential = fit is not None and fit.model == "exponential"
    used = [r for r in records if r.verdict == Verdict.BLOWUP and r.T_est]
    if exponential:
        xs = [r.epsilon ** (-fit.kappa) for r in used]
        xlabel = f"eps^-{fit.kappa:g}"
    else:
        xs = [math.log(r.epsilon) for r in used]
        xlabel = "log eps"
    ys = [math.log(r.T_est) for r in used]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o", label="measured")
    if fit is not None and xs:
        lo, hi = min(xs), max(xs)
        ax.plot([lo, hi], [fit.intercept + fit.slope * lo, fit.intercept + fit.slope * hi], "-",
                label=f"fit slope {fit.slope:.3g} (R^2 {fit.r_squared:.3f})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("log T")
    ax.legend()
    fig.tight_layout()
    try:
        return _save_svg(fig, path)
    finally:
        plt.close(fig)


def plot_phase_diagram(report: CurveReport, path: PathLike, nu: float = 1.0) -> Path:
    """Scan outcomes in the (p, q) plane with the curve Gamma(p, q) = n/(1+nu)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    markers = {"all_blowup": ("x", "blow-up"), "some_survive": ("o", "survived"), "contaminated": ("s", "contaminated")}
    for outcome, (marker, label) in markers.items():
        pts = [pt for pt in report.points if pt.outcome == outcome]
        if pts:
            ax.plot([pt.p for pt in pts], [pt.q for pt in pts], marker, linestyle="none", label=label)

    # Gamma(p, q) = c with q >= p:  (q + 1) = c (pq - 1)  =>  q = (1 + c) / (c p - 1)
    c = report.n / (1.0 + nu)
    ps = [pt.p for pt in report.points] + [pt.q for pt in report.points]
    top = max(ps + [2.0]) * 1.2
    start = 1.0 / c + 1e-3
    curve_p, curve_q = [], []
    steps = 200
    for k in range(steps + 1):
        p = start + (top - start) * k / steps
        q = (1.0 + c) / (c * p - 1.0)
        if q >= p:
            curve_p.append(p)
            curve_q.append(q)
    # symmetric branch
    curve = sorted(set(zip(curve_p, curve_q)) | set(zip(curve_q, curve_p)))
    curve = [(p, q) for p, q in curve if p <= top and q <= top]
    if curve:
        ax.plot([p for p, _ in curve], [q for _, q in curve], "-", color="gray", label=f"Gamma = {c:g}")
    ax.set_xlim(1.0, top)
    ax.set_ylim(1.0, top)
    ax.set_xlabel("p")
    ax.set_ylabel("q")
    ax.legend()
    fig.tight_layout()
    try:
        return _save_svg(fig, path)
    finally:
        plt.close(fig)


__all__ = [
    "write_csv",
    "write_json",
    "write_records_csv",
    "plot_scaling",
    "plot_phase_diagram",
]
