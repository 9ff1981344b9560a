"""
Adaptive time integration with blow-up detection.

Runs scipy's embedded Dormand-Prince 5(4) stepper (RK45) one accepted step
at a time so that every step can be inspected: snapshots are taken from
the dense-output interpolant at a fixed cadence, sup-norm threshold
crossings are located inside the step by root finding, and the boundary
monitor watches for mass reaching the truncation.
"""

import time
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

from graphs.lattice import build_lattice
from schemas.run_schema import LifespanRecord, ThresholdCrossing, Verdict
from solver.problem import ProblemSpec, SolverControls, make_rhs
from utils.exceptions import CapacityError, NumericError
from utils.helpers import settings_hash
from utils.logger import setup_logger

logger = setup_logger(__name__)

FIELDS = ("u", "u_t", "v", "v_t")


class Trajectory:
    """
    Time-stamped snapshots of (u, u_t) (and (v, v_t) for systems).

    Attributes:
        times: Snapshot times, strictly increasing
        u, u_t, v, v_t: Arrays of shape (snapshots, vertices); v, v_t are None for scalar kinds
        dt_history: Accepted step sizes
        norm_history: (t, sup-norm, sum mu u) after every accepted step
        boundary_peak: Running max of |u| (and |v|) on clipped vertices
        blew_up: Whether the run ended in a blow-up verdict
    """

    def __init__(
        self,
        spec: ProblemSpec,
        times: List[float],
        states: List[np.ndarray],
        dt_history: List[float],
        norm_history: List[Tuple[float, float, float]],
        boundary_peak: float,
        blew_up: bool,
        t_end: float,
    ):
        self.spec = spec
        self.graph = spec.graph
        self.metric = spec.metric
        n = self.graph.num_vertices
        self.times = np.asarray(times, dtype=float)
        data = np.vstack(states) if states else np.zeros((0, 2 * spec.components * n))
        self.u = data[:, :n]
        self.u_t = data[:, n:2 * n]
        self.v = data[:, 2 * n:3 * n] if spec.kind.is_system else None
        self.v_t = data[:, 3 * n:] if spec.kind.is_system else None
        self.dt_history = dt_history
        self.norm_history = norm_history
        self.boundary_peak = boundary_peak
        self.blew_up = blew_up
        self.t_end = t_end

    def field(self, name: str) -> np.ndarray:
        arr = getattr(self, name) if name in FIELDS else None
        if arr is None:
            raise KeyError(f"trajectory has no field {name!r}")
        return arr

    def state_at(self, k: int) -> np.ndarray:
        parts = [self.u[k], self.u_t[k]]
        if self.v is not None:
            parts += [self.v[k], self.v_t[k]]
        return np.concatenate(parts)

    def with_fields(self, times: np.ndarray, **fields: np.ndarray) -> "Trajectory":
        """Copy with replaced snapshot arrays (used to build control trajectories)."""
        clone = object.__new__(Trajectory)
        clone.__dict__.update(self.__dict__)
        clone.times = np.asarray(times, dtype=float)
        for name, arr in fields.items():
            setattr(clone, name, arr)
        return clone

    def to_rows(self) -> List[Dict[str, float]]:
        """One row per (snapshot, vertex)."""
        names = [f for f in FIELDS if getattr(self, f) is not None]
        rows = []
        for k, t in enumerate(self.times):
            for i, x in enumerate(self.graph.vertices):
                row = {"t": float(t), "vertex": str(x)}
                for name in names:
                    row[name] = float(getattr(self, name)[k, i])
                rows.append(row)
        return rows

    def __len__(self) -> int:
        return len(self.times)


def _run_once(
    spec: ProblemSpec, controls: SolverControls, record_snapshots: bool
) -> Tuple[Trajectory, LifespanRecord]:
    graph = spec.graph
    n = graph.num_vertices
    system = spec.kind.is_system
    clipped = ~graph.interior_mask()
    mu = graph.mu

    def sup_norm(y: np.ndarray) -> float:
        s = float(np.max(np.abs(y[:n]))) if n else 0.0
        if system:
            s = max(s, float(np.max(np.abs(y[2 * n:3 * n]))))
        return s

    def boundary_value(y: np.ndarray) -> float:
        if not clipped.any():
            return 0.0
        b = float(np.max(np.abs(y[:n][clipped])))
        if system:
            b = max(b, float(np.max(np.abs(y[2 * n:3 * n][clipped]))))
        return b

    fun = make_rhs(spec)
    y0 = spec.initial_state()
    solver = RK45(
        fun,
        0.0,
        y0,
        t_bound=controls.t_max,
        first_step=min(controls.initial_dt, controls.t_max),
        rtol=controls.rtol,
        atol=controls.atol,
    )
    growth = spec.growth_exponent

    times: List[float] = [0.0]
    states: List[np.ndarray] = [y0.copy()] if record_snapshots else []
    next_snap = controls.snapshot_dt
    dt_history: List[float] = []
    sup0 = sup_norm(y0)
    norm_history = [(0.0, sup0, float(np.sum(mu * y0[:n])))]
    boundary_peak = boundary_value(y0)

    pending = list(controls.thresholds)
    crossings: List[ThresholdCrossing] = []
    while pending and sup0 >= pending[0]:
        crossings.append(ThresholdCrossing(threshold=pending.pop(0), time=0.0))

    verdict: Optional[Verdict] = Verdict.BLOWUP if not pending else None
    forced_stop = False
    steps = 0

    while verdict is None:
        sup = sup_norm(solver.y)
        solver.max_step = controls.growth_cap / sup ** growth if sup > 1.0 else np.inf
        t_old = solver.t
        try:
            solver.step()
        except NumericError:
            logger.debug(f"Non-finite derivative after t={t_old:.10g}; treating as blow-up")
            verdict, forced_stop = Verdict.BLOWUP, True
            break
        if solver.status == "failed":
            verdict, forced_stop = Verdict.BLOWUP, True
            break

        steps += 1
        t_new, y = solver.t, solver.y
        dt_history.append(t_new - t_old)
        dense = solver.dense_output()
        if record_snapshots:
            while next_snap < t_new:
                times.append(next_snap)
                states.append(dense(next_snap))
                next_snap += controls.snapshot_dt

        sup_new = sup_norm(y)
        norm_history.append((t_new, sup_new, float(np.sum(mu * y[:n]))))
        while pending and sup_new >= pending[0]:
            M = pending.pop(0)
            t_cross = _locate_crossing(lambda s: sup_norm(dense(s)) - M, t_old, t_new)
            if crossings:
                t_cross = max(t_cross, crossings[-1].time)
            crossings.append(ThresholdCrossing(threshold=M, time=t_cross))
        boundary_peak = max(boundary_peak, boundary_value(y))

        if not pending:
            verdict = Verdict.BLOWUP
        elif boundary_peak > controls.boundary_tolerance:
            verdict = Verdict.CONTAMINATED
        elif solver.step_size is not None and solver.step_size < controls.dt_min:
            verdict, forced_stop = Verdict.BLOWUP, True
        elif solver.status == "finished":
            verdict = Verdict.SURVIVED

    if forced_stop:
        # thresholds never reached are pinned to the stopping time
        for M in pending:
            crossings.append(ThresholdCrossing(threshold=M, time=solver.t))
        pending = []

    if record_snapshots and solver.t > times[-1]:
        times.append(solver.t)
        states.append(solver.y.copy())
    elif not record_snapshots:
        times = []

    blew_up = verdict == Verdict.BLOWUP
    trajectory = Trajectory(
        spec, times, states, dt_history, norm_history, boundary_peak, blew_up, float(solver.t)
    )
    record = LifespanRecord(
        epsilon=spec.epsilon,
        kind=spec.kind.value,
        p=spec.p,
        q=spec.q,
        verdict=verdict,
        T_est=crossings[-1].time if blew_up else None,
        horizon_exceeded=verdict == Verdict.SURVIVED,
        T_end=float(solver.t),
        threshold_ladder=crossings,
        low_confidence=forced_stop,
        boundary_peak=boundary_peak,
        domain_radius=spec.domain_radius,
        steps=steps,
        settings_hash=settings_hash({"problem": spec.signature(), "controls": controls.model_dump()}),
    )
    return trajectory, record


def _locate_crossing(f, t_old: float, t_new: float) -> float:
    if f(t_old) >= 0:
        return t_old
    if f(t_new) < 0:
        return t_new
    return float(brentq(f, t_old, t_new, xtol=1e-14, rtol=1e-15, maxiter=200))


def integrate(
    spec: ProblemSpec,
    controls: Optional[SolverControls] = None,
    record_snapshots: bool = True,
) -> Tuple[Trajectory, LifespanRecord]:
    """
    Integrate a problem until blow-up, contamination or the time horizon.

    Blow-up is declared when the sup-norm reaches the largest threshold,
    when the step controller drops below dt_min, or when the derivative
    stops being finite. A contaminated run on a lattice is retried once on
    a lattice of twice the radius.

    Args:
        spec: The problem
        controls: Solver settings, defaults from Settings
        record_snapshots: Keep snapshots (sweeps switch this off)

    Returns:
        (Trajectory, LifespanRecord); the record's T_est is T at the largest threshold

    Example:
        >>> trajectory, record = integrate(spec)
        >>> record.verdict
        <Verdict.BLOWUP: 'blowup'>
    """
    controls = controls or SolverControls()
    trajectory, record = _run_once(spec, controls, record_snapshots)

    if (
        record.verdict == Verdict.CONTAMINATED
        and controls.retry_on_contamination
        and spec.graph.lattice is not None
    ):
        dim, radius = spec.graph.lattice
        logger.warning(
            f"⚠️  eps={spec.epsilon:g}: boundary reached at t={record.T_end:.4g}, retrying with radius {2 * radius}"
        )
        try:
            bigger = spec.with_graph(build_lattice(dim, 2 * radius))
        except CapacityError as exc:
            logger.warning(f"⚠️  Retry skipped: {exc}")
        else:
            trajectory, record = _run_once(bigger, controls, record_snapshots)
            record.retried = True

    if record.verdict == Verdict.CONTAMINATED:
        record.advice = (
            f"increase domain_radius beyond {record.domain_radius:g}"
            if record.domain_radius
            else "enlarge the stored graph around the data"
        )
    return trajectory, record


def estimate_lifespan(
    spec: ProblemSpec,
    controls: Optional[SolverControls] = None,
) -> LifespanRecord:
    """
    Lifespan estimate with threshold-ladder extrapolation.

    Near blow-up sup|u| ~ (T - t)^(-1/a) with a = 1/(2 Gamma), so
    T - T(M) ~ M^(-a). The last two rungs give a Richardson estimate of T.
    A non-monotone ladder falls back to T at the largest threshold and
    marks the record low-confidence.

    Args:
        spec: The problem
        controls: Solver settings, defaults from Settings

    Returns:
        LifespanRecord
    """
    controls = controls or SolverControls()
    started = time.time()
    _, record = integrate(spec, controls, record_snapshots=False)

    if record.verdict == Verdict.BLOWUP:
        ladder = record.threshold_ladder
        t = [c.time for c in ladder]
        diffs = np.diff(t)
        monotone = bool(np.all(diffs >= 0))
        if len(ladder) >= 2 and monotone and not record.low_confidence:
            ratio = (ladder[-1].threshold / ladder[-2].threshold) ** spec.growth_exponent
            record.T_est = t[-1] + (t[-1] - t[-2]) / (ratio - 1.0)
            record.extrapolated = True
            shrinking = bool(np.all(diffs[1:] <= diffs[:-1] * (1 + 1e-9))) if len(diffs) > 1 else True
            record.low_confidence = not shrinking
        else:
            record.T_est = t[-1]
            record.low_confidence = True

    elapsed = time.time() - started
    if record.verdict == Verdict.BLOWUP:
        flag = " (low confidence)" if record.low_confidence else ""
        logger.info(f"✓ eps={spec.epsilon:g}: blow-up, T_est={record.T_est:.10g}{flag} [{elapsed:.2f}s]")
    elif record.verdict == Verdict.SURVIVED:
        logger.info(f"✓ eps={spec.epsilon:g}: survived to t={record.T_end:g} [{elapsed:.2f}s]")
    else:
        logger.warning(f"⚠️  eps={spec.epsilon:g}: truncation contaminated ({record.advice})")
    return record
