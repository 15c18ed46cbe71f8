"""Optimal periodic checkpointing under fault prediction.

Closed-form waste models with period optimizers, a reproducible fault
and prediction trace generator, and a trace-driven discrete-event
simulator, plus a CLI experiment harness (``ckptsim``).
"""

from .platform import (PlatformParams, PredictorParams, RateSet, WindowLaw,
                       derive_rates, multi_event_prob, platform_mtbf)
from .strategies import Strategy, StrategySpec
from .traces import EventTrace, FailureLaw, TraceConfig, make_trace
from .units import format_duration, parse_duration
from .waste import OptimizedPlan, WasteQuery, optimize_all
from .engine import (BACKEND, JobSpec, SimOutcome, SimulationStallError,
                     best_period_search, run, run_replicates, run_seeded)

__version__ = "0.1.0"

__all__ = [
    "PlatformParams", "PredictorParams", "RateSet", "WindowLaw",
    "derive_rates", "multi_event_prob", "platform_mtbf",
    "Strategy", "StrategySpec",
    "EventTrace", "FailureLaw", "TraceConfig", "make_trace",
    "format_duration", "parse_duration",
    "OptimizedPlan", "WasteQuery", "optimize_all",
    "BACKEND", "JobSpec", "SimOutcome", "SimulationStallError",
    "best_period_search", "run", "run_replicates", "run_seeded",
    "__version__",
]
