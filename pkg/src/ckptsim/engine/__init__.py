"""Trace-driven execution of checkpointing policies.

``run`` plays one job against one event trace and returns the makespan
plus a full waste breakdown; ``run_replicates`` averages independent
replicates; ``best_period_search`` brute-forces the regular period over
a grid with common random numbers.

Two interchangeable kernels exist: a compiled Cython extension and a
pure-Python twin.  The compiled one is picked when importable; set
``CKPTSIM_BACKEND=py`` or ``=c`` to force a choice.  Both produce
bit-identical results.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..platform import PlatformParams
from ..strategies import KERNEL_CODE, StrategySpec
from ..traces import (KIND_FALSE_PRED, KIND_FAULT, KIND_TRUE_PRED, EventTrace,
                      TraceConfig, make_trace, replicate_seed)

__all__ = [
    "BACKEND",
    "JobSpec",
    "SimOutcome",
    "Counters",
    "ReplicateSummary",
    "BestPeriodResult",
    "SimulationStallError",
    "run",
    "run_seeded",
    "run_replicates",
    "best_period_search",
]

GUARD_FACTOR = 1e4


def _select_backend():
    choice = os.environ.get("CKPTSIM_BACKEND", "auto").strip().lower()
    if choice in ("auto", "c", "cython", ""):
        try:
            from . import _core  # type: ignore[attr-defined]
            return _core
        except ImportError:
            if choice in ("c", "cython"):
                raise
    elif choice not in ("py", "python"):
        raise ValueError(f"CKPTSIM_BACKEND must be auto, c or py, got {choice!r}")
    from . import _core_py
    return _core_py


_impl = _select_backend()
BACKEND: str = _impl.BACKEND_NAME


class SimulationStallError(RuntimeError):
    """The run exceeded the non-termination guard (10^4 x base work)."""


@dataclass(frozen=True)
class JobSpec:
    """A job is just its fault-free, checkpoint-free compute time."""

    base_work: float

    def __post_init__(self) -> None:
        if not self.base_work > 0.0:
            raise ValueError(f"base_work must be positive, got {self.base_work}")


@dataclass(frozen=True)
class Counters:
    faults: int
    predicted_faults: int
    unpredicted_faults: int
    true_preds_seen: int
    false_preds_seen: int
    preds_trusted: int
    preds_untrusted: int
    preds_dropped: int
    ckpts_regular: int
    ckpts_extra: int
    ckpts_proactive: int
    rollbacks: int
    dr_restarts: int


@dataclass(frozen=True)
class SimOutcome:
    """One run's makespan and its exact decomposition.

    useful_work + lost_work + ckpt_time + idle_time + downtime +
    recovery_time adds up to the makespan (to float accumulation
    error); waste_fraction is 1 - useful_work/makespan.
    """

    makespan: float
    useful_work: float
    waste_fraction: float
    lost_work: float
    ckpt_time: float
    idle_time: float
    downtime: float
    recovery_time: float
    counters: Counters
    seed: int | None
    horizon: float
    backend: str = BACKEND


def _occurrences(trace: EventTrace, ckpt_c: float):
    """Flatten a trace into time-sorted atomic occurrences.

    Every prediction contributes an announcement exactly one checkpoint
    ahead of its window start; every real fault (predicted or not)
    contributes a strike.  Faults sort before announcements at equal
    times; generation order breaks the remaining ties.
    """
    kind = trace.kind
    pred_rows = kind != KIND_FAULT
    strike_rows = kind != KIND_FALSE_PRED

    ws = trace.window_start[pred_rows]
    ann_t = ws - ckpt_c
    ann_pred = (kind[pred_rows] == KIND_TRUE_PRED).astype(np.int8)
    ann_u = trace.trust_u[pred_rows]

    f_t = trace.fault_time[strike_rows]
    f_pred = (kind[strike_rows] == KIND_TRUE_PRED).astype(np.int8)

    occ_t = np.concatenate([f_t, ann_t])
    occ_type = np.concatenate([
        np.zeros(f_t.size, dtype=np.int8),
        np.ones(ann_t.size, dtype=np.int8),
    ])
    occ_pred = np.concatenate([f_pred, ann_pred])
    occ_win = np.concatenate([f_t, ws])
    occ_u = np.concatenate([np.zeros(f_t.size), ann_u])
    idx = np.arange(occ_t.size)
    order = np.lexsort((idx, occ_type, occ_t))
    return (np.ascontiguousarray(occ_t[order]),
            np.ascontiguousarray(occ_type[order]),
            np.ascontiguousarray(occ_pred[order]),
            np.ascontiguousarray(occ_win[order]),
            np.ascontiguousarray(occ_u[order]))


def _run_once(job: JobSpec, spec: StrategySpec, platform: PlatformParams,
              trace: EventTrace) -> SimOutcome:
    occ_t, occ_type, occ_pred, occ_win, occ_u = _occurrences(trace, platform.ckpt_c)
    t_p = spec.period_tp if spec.period_tp is not None else 0.0
    res = _impl.simulate_run(
        KERNEL_CODE[spec.kind], job.base_work, platform.ckpt_c,
        platform.down_d, platform.rec_r, spec.period_tr, t_p, trace.window,
        spec.trust_q, occ_t, occ_type, occ_pred, occ_win, occ_u,
        GUARD_FACTOR * job.base_work)
    status, makespan, lost, ckpt_time, idle, down, rec, counters, useful = res
    if status != 0:
        raise SimulationStallError(
            f"no progress: makespan passed {GUARD_FACTOR:g} x base_work "
            f"(strategy={spec.kind.value}, t_r={spec.period_tr}s, "
            f"t_p={spec.period_tp}, seed={trace.seed})")
    return SimOutcome(
        makespan=makespan,
        useful_work=useful,
        waste_fraction=1.0 - useful / makespan,
        lost_work=lost, ckpt_time=ckpt_time, idle_time=idle,
        downtime=down, recovery_time=rec,
        counters=Counters(*counters),
        seed=trace.seed, horizon=trace.horizon)


def run(job: JobSpec, spec: StrategySpec, platform: PlatformParams,
        trace: EventTrace) -> SimOutcome:
    """Run one job against one trace.

    If the job outlives the trace and the trace knows its generating
    laws, the trace is regrown (same seed, doubled horizon, identical
    prefix) and the run repeated; traces without laws are treated as
    fault-free beyond their horizon.
    """
    spec.validate_against(platform.ckpt_c, trace.window)
    while True:
        out = _run_once(job, spec, platform, trace)
        if out.makespan <= trace.horizon or trace.config is None:
            return out
        grown = 2.0 * trace.horizon
        while grown < out.makespan:
            grown *= 2.0
        trace = make_trace(trace.config, grown, trace.seed)


def _default_horizon(job: JobSpec) -> float:
    return 4.0 * job.base_work


def run_seeded(job: JobSpec, spec: StrategySpec, platform: PlatformParams,
               cfg: TraceConfig, seed: int,
               horizon_hint: float | None = None) -> SimOutcome:
    """Generate the trace for ``seed`` and run against it."""
    horizon = horizon_hint if horizon_hint is not None else _default_horizon(job)
    trace = make_trace(cfg, horizon, seed)
    return run(job, spec, platform, trace)


@dataclass(frozen=True)
class ReplicateSummary:
    outcomes: tuple[SimOutcome, ...]
    makespan_mean: float
    makespan_se: float
    waste_mean: float
    waste_se: float
    base_seed: int

    @property
    def n_reps(self) -> int:
        return len(self.outcomes)


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def _replicate_task(args):
    job, spec, platform, cfg, seed, horizon_hint = args
    return run_seeded(job, spec, platform, cfg, seed, horizon_hint)


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("CKPTSIM_WORKERS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def run_replicates(job: JobSpec, spec: StrategySpec, platform: PlatformParams,
                   cfg: TraceConfig, n_reps: int, base_seed: int,
                   workers: int | None = None,
                   horizon_hint: float | None = None) -> ReplicateSummary:
    """Average ``n_reps`` independent runs.

    Replicate i uses the trace seed derived from (base_seed, i), so
    growing n_reps extends the replicate list without changing earlier
    entries, and reruns are bitwise reproducible regardless of the
    worker count.
    """
    if n_reps < 1:
        raise ValueError(f"n_reps must be >= 1, got {n_reps}")
    seeds = [replicate_seed(base_seed, i) for i in range(n_reps)]
    tasks = [(job, spec, platform, cfg, s, horizon_hint) for s in seeds]
    nw = _worker_count(workers)
    if nw > 1 and n_reps > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            outcomes = list(pool.map(_replicate_task, tasks))
    else:
        outcomes = [_replicate_task(task) for task in tasks]
    mk_mean, mk_se = _mean_se([o.makespan for o in outcomes])
    w_mean, w_se = _mean_se([o.waste_fraction for o in outcomes])
    return ReplicateSummary(outcomes=tuple(outcomes), makespan_mean=mk_mean,
                            makespan_se=mk_se, waste_mean=w_mean,
                            waste_se=w_se, base_seed=base_seed)


@dataclass(frozen=True)
class BestPeriodResult:
    t_star: float
    waste_star: float
    curve: tuple[tuple[float, float], ...]   # (period, mean waste) per grid point
    base_seed: int
    n_reps: int


def best_period_search(job: JobSpec, spec_template: StrategySpec,
                       platform: PlatformParams, cfg: TraceConfig,
                       t_grid, n_reps: int, base_seed: int,
                       workers: int | None = None,
                       horizon_hint: float | None = None) -> BestPeriodResult:
    """Brute-force the regular period over ``t_grid``.

    Every grid point reuses the same replicate seeds (common random
    numbers), so the comparison across periods is paired and the
    returned minimizer is deterministic for a fixed base seed.
    """
    curve = []
    best_t = math.nan
    best_w = math.inf
    for t in t_grid:
        spec = replace(spec_template, period_tr=float(t))
        summary = run_replicates(job, spec, platform, cfg, n_reps, base_seed,
                                 workers=workers, horizon_hint=horizon_hint)
        curve.append((float(t), summary.waste_mean))
        if summary.waste_mean < best_w:
            best_w = summary.waste_mean
            best_t = float(t)
    return BestPeriodResult(t_star=best_t, waste_star=best_w,
                            curve=tuple(curve), base_seed=base_seed,
                            n_reps=n_reps)
