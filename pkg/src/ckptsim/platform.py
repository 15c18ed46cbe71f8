"""Platform and predictor parameters, and the event-rate algebra.

A platform is a set of ``n_procs`` components with individual MTBF
``mtbf_ind``; the whole machine then fails every ``mtbf_ind / n_procs``
seconds on average.  A fault predictor is characterized by its recall
(fraction of faults announced ahead of time), its precision (fraction of
announcements that correspond to real faults), and the length of the
time window in which an announced fault is expected to strike.

All durations are seconds (see :mod:`ckptsim.units`).  Rates that are
degenerate (no predictions at all, or no unpredicted faults) are
represented by ``math.inf`` mean inter-arrival times so downstream
formulas can branch on them explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "PlatformParams",
    "PredictorParams",
    "WindowLaw",
    "UNIFORM_IN_WINDOW",
    "AT_WINDOW_START",
    "RateSet",
    "platform_mtbf",
    "derive_rates",
    "multi_event_prob",
]


@dataclass(frozen=True)
class PlatformParams:
    """Machine size and the cost model of checkpoint/restart.

    ckpt_c / down_d / rec_r are the durations of taking a checkpoint,
    sitting idle after a fault, and restoring the last checkpoint.
    ``migrate_m`` is the optional cost of proactively migrating a task
    off a node that is predicted to fail.
    """

    n_procs: int
    mtbf_ind: float
    ckpt_c: float
    down_d: float
    rec_r: float
    migrate_m: float | None = None

    def __post_init__(self) -> None:
        if self.n_procs < 1:
            raise ValueError(f"n_procs must be >= 1, got {self.n_procs}")
        for name in ("mtbf_ind", "ckpt_c", "down_d", "rec_r"):
            v = getattr(self, name)
            if not (v > 0.0) or math.isinf(v):
                raise ValueError(f"{name} must be a positive finite duration, got {v}")
        if self.migrate_m is not None and not (self.migrate_m > 0.0):
            raise ValueError(f"migrate_m must be positive when given, got {self.migrate_m}")
        if self.ckpt_c > self.mtbf():
            raise ValueError(
                f"checkpoint length {self.ckpt_c}s exceeds the platform MTBF "
                f"{self.mtbf()}s; no admissible checkpointing period exists")

    def mtbf(self) -> float:
        """Platform-level mean time between faults, mtbf_ind / n_procs."""
        return self.mtbf_ind / self.n_procs


def platform_mtbf(params: PlatformParams) -> float:
    return params.mtbf()


@dataclass(frozen=True)
class WindowLaw:
    """Position of a real fault inside its prediction window [0, I].

    ``uniform`` places the fault uniformly in the window (mean I/2);
    ``start`` pins it at the window opening; ``custom`` only fixes the
    mean offset and draws uniformly on the widest interval inside
    [0, I] centered on that mean.
    """

    kind: str = "uniform"
    mean_offset: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "start", "custom"):
            raise ValueError(f"unknown window law {self.kind!r}")
        if self.kind == "custom":
            if self.mean_offset is None or self.mean_offset < 0.0:
                raise ValueError("custom window law needs a nonnegative mean_offset")
        elif self.mean_offset is not None:
            raise ValueError("mean_offset is only meaningful for the custom law")

    def expected_offset(self, window: float) -> float:
        if self.kind == "uniform":
            return window / 2.0
        if self.kind == "start":
            return 0.0
        if self.mean_offset > window:
            raise ValueError(
                f"custom mean offset {self.mean_offset}s lies outside the "
                f"{window}s prediction window")
        return self.mean_offset

    def offsets_from_uniform(self, u, window: float):
        """Map uniforms in [0,1) to fault offsets in [0, window]."""
        if self.kind == "uniform":
            return u * window
        if self.kind == "start":
            return u * 0.0
        e = self.expected_offset(window)
        lo = max(0.0, 2.0 * e - window)
        hi = min(2.0 * e, window)
        return lo + u * (hi - lo)


UNIFORM_IN_WINDOW = WindowLaw("uniform")
AT_WINDOW_START = WindowLaw("start")


@dataclass(frozen=True)
class PredictorParams:
    """Recall/precision of the predictor plus its announcement window.

    ``trust`` is the probability with which a policy acts on any single
    announcement; the analysis shows only the extremes 0 and 1 are ever
    optimal, but any value in [0,1] is accepted.
    """

    recall: float
    precision: float
    window: float = 0.0
    trust: float = 1.0
    window_law: WindowLaw = field(default=UNIFORM_IN_WINDOW)

    def __post_init__(self) -> None:
        if not 0.0 <= self.recall <= 1.0:
            raise ValueError(f"recall must lie in [0,1], got {self.recall}")
        if not 0.0 < self.precision <= 1.0:
            raise ValueError(f"precision must lie in (0,1], got {self.precision}")
        if not 0.0 <= self.trust <= 1.0:
            raise ValueError(f"trust must lie in [0,1], got {self.trust}")
        if self.window < 0.0:
            raise ValueError(f"window must be nonnegative, got {self.window}")
        # rejects a custom mean offset outside [0, window]
        self.window_law.expected_offset(self.window)

    def mean_window_offset(self) -> float:
        """Expected fault position in the window, given a fault occurs there."""
        return self.window_law.expected_offset(self.window)


@dataclass(frozen=True)
class RateSet:
    """Mean inter-arrival times of the three event populations.

    ``mu`` counts every fault, ``mu_p`` every prediction (true or
    false), ``mu_np`` every unpredicted fault, and ``mu_e`` every event
    of any kind.  The three satisfy 1/mu_e = 1/mu_p + 1/mu_np.
    """

    mu: float
    mu_p: float
    mu_np: float
    mu_e: float


def derive_rates(mu: float, pred: PredictorParams) -> RateSet:
    """Split the platform fault rate into predicted / unpredicted streams.

    A fraction ``recall`` of the faults is announced; announcements are
    correct with probability ``precision``, so predictions arrive with
    rate recall/(precision*mu).  recall=0 means no predictions ever
    (mu_p infinite) and recall=1 means no unpredicted faults (mu_np
    infinite).
    """
    if not mu > 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    r, p = pred.recall, pred.precision
    mu_np = math.inf if r == 1.0 else mu / (1.0 - r)
    mu_p = math.inf if r == 0.0 else p * mu / r
    mu_e = 1.0 / (1.0 / mu_p + 1.0 / mu_np)
    return RateSet(mu=mu, mu_p=mu_p, mu_np=mu_np, mu_e=mu_e)


def multi_event_prob(period: float, mean: float) -> float:
    """Probability that two or more events fall within one period.

    Event counts over a period are Poisson with parameter
    beta = period/mean, so P(>=2) = 1 - (1+beta)e^(-beta).  The waste
    formulas assume at most one event per period; keeping this
    probability small (beta <= 0.27 gives about 0.03) bounds the model
    error.
    """
    if period < 0.0 or not mean > 0.0:
        raise ValueError(f"need period >= 0 and mean > 0, got {period}, {mean}")
    beta = period / mean
    # algebraically 1 - (1+beta)e^(-beta); this form stays monotone for
    # tiny beta where the direct expression rounds to zero
    return -math.expm1(-beta) - beta * math.exp(-beta)
