"""Reproducible stochastic event traces: faults plus predictions.

A trace is generated in three steps.  A renewal process of fault times
is drawn with the requested inter-arrival law, and each fault is tagged
as predicted with probability ``recall``.  A second renewal process of
false predictions is drawn with mean inter-arrival
``precision * mu / (recall * (1 - precision))``, which makes the
overall announcement rate come out at recall/(precision*mu).  Both are
merged into a single stream of events ordered by announcement time,
where an announcement precedes its window start by exactly the
checkpoint length (the minimum usable lead).

Randomness discipline: one PCG64 stream per purpose (fault arrivals,
prediction tags, in-window offsets, trust draws for true and false
predictions, false-prediction arrivals), all spawned from the trace
seed.  Uniform draws are transformed by inverse CDF only, so a trace
regenerated with a larger horizon extends the shorter one verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .platform import PredictorParams, WindowLaw, UNIFORM_IN_WINDOW

__all__ = [
    "FailureLaw",
    "TraceConfig",
    "TraceEvent",
    "EventTrace",
    "TraceStats",
    "sample_interarrival",
    "gen_fault_trace",
    "gen_false_prediction_trace",
    "false_prediction_mean",
    "merge_traces",
    "make_trace",
    "replicate_seed",
    "trace_stats",
    "save_trace",
    "load_trace",
]

KIND_FAULT = 0        # unpredicted fault
KIND_TRUE_PRED = 1    # predicted fault, with its window
KIND_FALSE_PRED = 2   # prediction with no fault behind it

_KIND_TOKEN = {KIND_FAULT: "fault", KIND_TRUE_PRED: "true_pred",
               KIND_FALSE_PRED: "false_pred"}
_TOKEN_KIND = {v: k for k, v in _KIND_TOKEN.items()}

TRACE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FailureLaw:
    """Inter-arrival law of a renewal process, scaled to a given mean.

    Weibull scale follows from the mean via lambda = mean/Gamma(1+1/k);
    the uniform law draws on [0, 2*mean].
    """

    kind: str
    mean: float
    shape: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exponential", "weibull", "uniform"):
            raise ValueError(f"unknown failure law {self.kind!r}")
        if not self.mean > 0.0:
            raise ValueError(f"law mean must be positive, got {self.mean}")
        if self.kind == "weibull":
            if self.shape is None or not self.shape > 0.0:
                raise ValueError("weibull law needs a positive shape")
        elif self.shape is not None:
            raise ValueError(f"{self.kind} law takes no shape parameter")

    @classmethod
    def exponential(cls, mean: float) -> "FailureLaw":
        return cls("exponential", mean)

    @classmethod
    def weibull(cls, shape: float, mean: float) -> "FailureLaw":
        return cls("weibull", mean, shape)

    @classmethod
    def uniform_renewal(cls, mean: float) -> "FailureLaw":
        return cls("uniform", mean)

    @property
    def scale(self) -> float:
        if self.kind == "weibull":
            return self.mean / math.gamma(1.0 + 1.0 / self.shape)
        return self.mean

    def quantile(self, u):
        """Inverse CDF of one inter-arrival; u may be a scalar or array."""
        if self.kind == "exponential":
            return -self.mean * np.log1p(-u)
        if self.kind == "weibull":
            return self.scale * (-np.log1p(-u)) ** (1.0 / self.shape)
        return 2.0 * self.mean * u

    def rescaled(self, mean: float) -> "FailureLaw":
        return replace(self, mean=mean)


def sample_interarrival(law: FailureLaw, rng: np.random.Generator) -> float:
    """Draw one inter-arrival time from the law."""
    return float(law.quantile(rng.random()))


def _renewal_times(law: FailureLaw, horizon: float,
                   rng: np.random.Generator) -> np.ndarray:
    """Arrival times of a renewal process on [0, horizon].

    Draws uniforms in blocks; since each double consumes exactly one
    generator step, the draw sequence (and hence the trace prefix) does
    not depend on how the blocks are sized.
    """
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    expected = horizon / law.mean
    chunks = []
    total = 0.0
    n = max(64, int(expected * 1.25) + 16)
    while True:
        gaps = law.quantile(rng.random(n))
        chunks.append(gaps)
        total += float(gaps.sum())
        if total > horizon:
            break
        n = max(64, int(n * 0.5))
    times = np.cumsum(np.concatenate(chunks))
    return times[times <= horizon]


def _superposed_times(platform_law: FailureLaw, n_procs: int, horizon: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Merge of ``n_procs`` per-component renewal processes, all cold at 0.

    Each component uses the platform law rescaled to mean
    ``n_procs * platform mean``.  Unlike the single renewal process the
    draw sequence depends on the horizon, so regenerating with a longer
    horizon yields a statistically equivalent but not prefix-identical
    trace.
    """
    law = platform_law.rescaled(platform_law.mean * n_procs)
    cur = np.asarray(law.quantile(rng.random(n_procs)), dtype=np.float64)
    cur = cur[cur <= horizon]
    parts = [cur]
    while cur.size:
        cur = cur + np.asarray(law.quantile(rng.random(cur.size)))
        cur = cur[cur <= horizon]
        parts.append(cur)
    return np.sort(np.concatenate(parts), kind="stable")


def gen_fault_trace(law: FailureLaw, horizon: float, recall: float,
                    rng_arrivals: np.random.Generator,
                    rng_tags: np.random.Generator,
                    fault_model: str = "renewal",
                    n_procs: int | None = None,
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Fault times over the horizon, each independently tagged as
    predicted with probability ``recall``."""
    if fault_model == "superposed":
        times = _superposed_times(law, n_procs, horizon, rng_arrivals)
    else:
        times = _renewal_times(law, horizon, rng_arrivals)
    predicted = rng_tags.random(times.size) < recall
    return times, predicted


def false_prediction_mean(mu: float, recall: float, precision: float) -> float:
    """Mean gap between false predictions; infinite when none occur."""
    if recall == 0.0 or precision == 1.0:
        return math.inf
    return precision * mu / (recall * (1.0 - precision))


def gen_false_prediction_trace(law: FailureLaw, mu: float, recall: float,
                               precision: float, horizon: float,
                               rng: np.random.Generator) -> np.ndarray:
    """Renewal process of false-prediction announcements.

    ``law`` gives the shape; its mean is replaced by
    precision*mu/(recall*(1-precision)) so true and false announcements
    together arrive every mu_p = precision*mu/recall seconds.
    """
    mean = false_prediction_mean(mu, recall, precision)
    if math.isinf(mean):
        return np.empty(0, dtype=np.float64)
    return _renewal_times(law.rescaled(mean), horizon, rng)


@dataclass(frozen=True)
class TraceConfig:
    """Everything needed to regenerate a trace from its seed.

    ``fault_law.mean`` is always the platform-level MTBF.  With
    ``fault_model="renewal"`` the faults form a single renewal process
    with that mean.  With ``"superposed"`` the trace is the merge of
    ``n_procs`` independent per-component renewal processes (each with
    mean ``n_procs`` times larger), all starting cold at time zero; for
    the exponential law this is distributionally identical to the
    renewal model, but for Weibull shapes below 1 it front-loads
    failures heavily (infant mortality across the whole machine).
    """

    fault_law: FailureLaw
    recall: float
    precision: float
    window: float = 0.0
    lead: float = 0.0               # announcement precedes window start by this
    window_law: WindowLaw = field(default=UNIFORM_IN_WINDOW)
    false_law: str = "same"         # "same" shape as faults, or "uniform"
    fault_model: str = "renewal"    # "renewal" or "superposed"
    n_procs: int | None = None      # required for the superposed model

    def __post_init__(self) -> None:
        if self.false_law not in ("same", "uniform"):
            raise ValueError(f"false_law must be 'same' or 'uniform', got {self.false_law!r}")
        if self.fault_model not in ("renewal", "superposed"):
            raise ValueError(
                f"fault_model must be 'renewal' or 'superposed', got {self.fault_model!r}")
        if self.fault_model == "superposed" and (self.n_procs is None or self.n_procs < 1):
            raise ValueError("the superposed fault model needs n_procs >= 1")
        if self.window < 0.0 or self.lead < 0.0:
            raise ValueError("window and lead must be nonnegative")

    def false_shape_law(self) -> FailureLaw:
        if self.false_law == "uniform":
            return FailureLaw.uniform_renewal(self.fault_law.mean)
        return self.fault_law


@dataclass(frozen=True)
class TraceEvent:
    """One merged event; ``time`` is the announcement time for
    predictions and the strike time for unpredicted faults."""

    time: float
    kind: int
    fault_time: float | None = None
    window_start: float | None = None


@dataclass(frozen=True)
class EventTrace:
    """Struct-of-arrays event trace plus provenance.

    ``ann_time`` orders the events (announcement for predictions, strike
    time for unpredicted faults).  ``trust_u`` holds one pre-drawn
    uniform per event, consumed by policies as the trust coin so that
    every strategy replays the identical randomness.
    """

    horizon: float
    window: float
    lead: float
    seed: int | None
    config: TraceConfig | None
    ann_time: np.ndarray
    kind: np.ndarray
    fault_time: np.ndarray
    window_start: np.ndarray
    trust_u: np.ndarray

    def __len__(self) -> int:
        return self.ann_time.size

    @property
    def events(self) -> Iterator[TraceEvent]:
        for i in range(len(self)):
            k = int(self.kind[i])
            yield TraceEvent(
                time=float(self.ann_time[i]),
                kind=k,
                fault_time=float(self.fault_time[i]) if k != KIND_FALSE_PRED else None,
                window_start=float(self.window_start[i]) if k != KIND_FAULT else None,
            )


def merge_traces(fault_times: np.ndarray, predicted: np.ndarray,
                 false_times: np.ndarray, pred: PredictorParams, lead: float,
                 rng_offsets: np.random.Generator,
                 rng_trust_true: np.random.Generator,
                 rng_trust_false: np.random.Generator,
                 horizon: float, seed: int | None = None,
                 config: TraceConfig | None = None) -> EventTrace:
    """Merge fault and false-prediction streams into one event trace.

    Predicted faults become window predictions whose start is drawn so
    the fault sits at the window-law position; unpredicted faults pass
    through; all events are sorted by announcement time with ties broken
    by kind (fault first) and then generation order.
    """
    fault_times = np.asarray(fault_times, dtype=np.float64)
    predicted = np.asarray(predicted, dtype=bool)
    false_times = np.asarray(false_times, dtype=np.float64)

    t_pred = fault_times[predicted]
    t_unpred = fault_times[~predicted]
    offsets = pred.window_law.offsets_from_uniform(
        rng_offsets.random(t_pred.size), pred.window)
    trust_true = rng_trust_true.random(t_pred.size)
    trust_false = rng_trust_false.random(false_times.size)

    ws_true = t_pred - offsets
    parts_ann = [t_unpred, ws_true - lead, false_times - lead]
    parts_kind = [
        np.full(t_unpred.size, KIND_FAULT, dtype=np.int8),
        np.full(t_pred.size, KIND_TRUE_PRED, dtype=np.int8),
        np.full(false_times.size, KIND_FALSE_PRED, dtype=np.int8),
    ]
    parts_ft = [t_unpred, t_pred, np.full(false_times.size, np.nan)]
    parts_ws = [t_unpred, ws_true, false_times]
    parts_u = [np.zeros(t_unpred.size), trust_true, trust_false]

    ann = np.concatenate(parts_ann)
    kind = np.concatenate(parts_kind)
    gen_idx = np.concatenate([np.arange(a.size) for a in parts_ann])
    order = np.lexsort((gen_idx, kind, ann))
    return EventTrace(
        horizon=horizon, window=pred.window, lead=lead, seed=seed,
        config=config,
        ann_time=ann[order],
        kind=kind[order],
        fault_time=np.concatenate(parts_ft)[order],
        window_start=np.concatenate(parts_ws)[order],
        trust_u=np.concatenate(parts_u)[order],
    )


# fixed stream order; changing it would silently change every trace
_STREAMS = 6
(_S_FAULTS, _S_TAGS, _S_OFFSETS, _S_TRUST_TRUE, _S_FALSE, _S_TRUST_FALSE) = range(_STREAMS)


def _streams(seed: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(_STREAMS)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def replicate_seed(base_seed: int, index: int) -> int:
    """Stable 64-bit seed for one replicate of an experiment."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def make_trace(cfg: TraceConfig, horizon: float, seed: int) -> EventTrace:
    """Generate a full event trace; bit-identical for equal arguments."""
    rngs = _streams(seed)
    faults, predicted = gen_fault_trace(
        cfg.fault_law, horizon, cfg.recall, rngs[_S_FAULTS], rngs[_S_TAGS],
        fault_model=cfg.fault_model, n_procs=cfg.n_procs)
    false_times = gen_false_prediction_trace(
        cfg.false_shape_law(), cfg.fault_law.mean, cfg.recall, cfg.precision,
        horizon, rngs[_S_FALSE])
    pred = PredictorParams(recall=cfg.recall, precision=cfg.precision,
                           window=cfg.window, window_law=cfg.window_law)
    return merge_traces(faults, predicted, false_times, pred, cfg.lead,
                        rngs[_S_OFFSETS], rngs[_S_TRUST_TRUE],
                        rngs[_S_TRUST_FALSE], horizon=horizon, seed=seed,
                        config=cfg)


@dataclass(frozen=True)
class TraceStats:
    """Event counts and the empirical inter-arrival means they imply."""

    n_events: int
    n_unpredicted: int
    n_true_pred: int
    n_false_pred: int
    horizon: float

    @property
    def n_faults(self) -> int:
        return self.n_unpredicted + self.n_true_pred

    @property
    def n_predictions(self) -> int:
        return self.n_true_pred + self.n_false_pred

    @property
    def mu_hat(self) -> float:
        return self.horizon / self.n_faults if self.n_faults else math.inf

    @property
    def mu_p_hat(self) -> float:
        return self.horizon / self.n_predictions if self.n_predictions else math.inf

    @property
    def mu_np_hat(self) -> float:
        return self.horizon / self.n_unpredicted if self.n_unpredicted else math.inf

    @property
    def mu_e_hat(self) -> float:
        return self.horizon / self.n_events if self.n_events else math.inf

    @property
    def recall_hat(self) -> float:
        return self.n_true_pred / self.n_faults if self.n_faults else math.nan

    @property
    def precision_hat(self) -> float:
        return self.n_true_pred / self.n_predictions if self.n_predictions else math.nan


def trace_stats(trace: EventTrace) -> TraceStats:
    kinds = trace.kind
    return TraceStats(
        n_events=int(kinds.size),
        n_unpredicted=int(np.count_nonzero(kinds == KIND_FAULT)),
        n_true_pred=int(np.count_nonzero(kinds == KIND_TRUE_PRED)),
        n_false_pred=int(np.count_nonzero(kinds == KIND_FALSE_PRED)),
        horizon=trace.horizon,
    )


# ---------------------------------------------------------------------------
# line-oriented export / import
#
# header: comment lines "# key value"; body: one event per line,
#   <time_s> <kind> [fault_time_s]
# with kind in {fault, true_pred, false_pred}.  Times are announcement
# times; a prediction's window start is time + lead.
# ---------------------------------------------------------------------------

def save_trace(trace: EventTrace, path) -> None:
    cfg = trace.config
    with open(path, "w") as fh:
        fh.write(f"# ckptsim-trace {TRACE_FORMAT_VERSION}\n")
        fh.write(f"# seed {trace.seed if trace.seed is not None else 'none'}\n")
        fh.write(f"# horizon {trace.horizon!r}\n")
        fh.write(f"# window {trace.window!r}\n")
        fh.write(f"# lead {trace.lead!r}\n")
        if cfg is not None:
            shape = cfg.fault_law.shape if cfg.fault_law.shape is not None else "none"
            fh.write(f"# fault_law {cfg.fault_law.kind} {cfg.fault_law.mean!r} {shape}\n")
            fh.write(f"# recall {cfg.recall!r}\n")
            fh.write(f"# precision {cfg.precision!r}\n")
            fh.write(f"# window_law {cfg.window_law.kind}"
                     f" {cfg.window_law.mean_offset if cfg.window_law.mean_offset is not None else 'none'}\n")
            fh.write(f"# false_law {cfg.false_law}\n")
            fh.write(f"# fault_model {cfg.fault_model}"
                     f" {cfg.n_procs if cfg.n_procs is not None else 'none'}\n")
        for ev in trace.events:
            token = _KIND_TOKEN[ev.kind]
            if ev.kind == KIND_TRUE_PRED:
                fh.write(f"{ev.time!r} {token} {ev.fault_time!r}\n")
            else:
                fh.write(f"{ev.time!r} {token}\n")


def load_trace(path) -> EventTrace:
    """Read a trace written by :func:`save_trace`.

    Trust coins are regenerated from the recorded seed with the same
    stream discipline as generation, so a saved-then-loaded trace
    replays identically; traces without a seed fall back to a 0.5 coin.
    """
    header: dict[str, list[str]] = {}
    rows: list[tuple[float, int, float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts:
                    header[parts[0]] = parts[1:]
                continue
            parts = line.split()
            t = float(parts[0])
            kind = _TOKEN_KIND[parts[1]]
            ft = float(parts[2]) if kind == KIND_TRUE_PRED else math.nan
            rows.append((t, kind, ft))

    horizon = float(header["horizon"][0])
    window = float(header["window"][0])
    lead = float(header["lead"][0])
    seed_txt = header.get("seed", ["none"])[0]
    seed = None if seed_txt == "none" else int(seed_txt)

    cfg = None
    if "fault_law" in header:
        kind_txt, mean_txt, shape_txt = header["fault_law"]
        law = FailureLaw(kind_txt, float(mean_txt),
                         None if shape_txt == "none" else float(shape_txt))
        wl_kind, wl_mean = header["window_law"]
        wl = WindowLaw(wl_kind, None if wl_mean == "none" else float(wl_mean))
        model, n_procs_txt = header.get("fault_model", ["renewal", "none"])
        cfg = TraceConfig(
            fault_law=law, recall=float(header["recall"][0]),
            precision=float(header["precision"][0]), window=window,
            lead=lead, window_law=wl, false_law=header["false_law"][0],
            fault_model=model,
            n_procs=None if n_procs_txt == "none" else int(n_procs_txt))

    ann = np.array([r[0] for r in rows], dtype=np.float64)
    kind = np.array([r[1] for r in rows], dtype=np.int8)
    ft_raw = np.array([r[2] for r in rows], dtype=np.float64)
    fault_time = np.where(kind == KIND_FAULT, ann, ft_raw)
    window_start = np.where(kind == KIND_FAULT, ann, ann + lead)

    trust = np.zeros(ann.size)
    if seed is not None:
        # trust coins were drawn one per prediction in generation order:
        # fault-time order for true predictions (window offsets can
        # reorder announcements), announcement order for false ones
        rngs = _streams(seed)
        for k, stream, key in ((KIND_TRUE_PRED, rngs[_S_TRUST_TRUE], fault_time),
                               (KIND_FALSE_PRED, rngs[_S_TRUST_FALSE], ann)):
            rows_idx = np.where(kind == k)[0]
            order = np.argsort(key[rows_idx], kind="stable")
            trust[rows_idx[order]] = stream.random(rows_idx.size)
    else:
        trust[kind != KIND_FAULT] = 0.5

    return EventTrace(horizon=horizon, window=window, lead=lead, seed=seed,
                      config=cfg, ann_time=ann, kind=kind,
                      fault_time=fault_time, window_start=window_start,
                      trust_u=trust)
