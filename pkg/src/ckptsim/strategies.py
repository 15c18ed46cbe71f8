"""Strategy identities and per-run policy configuration.

Five policies can be simulated.  ``young`` checkpoints periodically and
ignores the predictor.  ``exact`` acts on exact-date announcements by
squeezing one extra checkpoint right before the predicted fault.  The
window policies handle an announced interval [t0, t0+I]: ``instant``
treats it like an exact date at t0, ``nockpt`` computes through the
window without checkpointing, and ``withckpt`` checkpoints inside the
window with its own shorter period T_P that divides I.

``migration`` exists only in the analytical waste model; it cannot be
simulated and is rejected here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = ["Strategy", "StrategySpec"]


class Strategy(str, Enum):
    YOUNG = "young"
    EXACT = "exact"
    INSTANT = "instant"
    NO_CKPT = "nockpt"
    WITH_CKPT = "withckpt"
    MIGRATION = "migration"

    @property
    def uses_predictions(self) -> bool:
        return self not in (Strategy.YOUNG,)

    @property
    def simulatable(self) -> bool:
        return self is not Strategy.MIGRATION


# engine-level codes shared by both simulation kernels
KERNEL_CODE = {
    Strategy.YOUNG: 0,
    Strategy.EXACT: 1,
    Strategy.INSTANT: 2,
    Strategy.NO_CKPT: 3,
    Strategy.WITH_CKPT: 4,
}


@dataclass(frozen=True)
class StrategySpec:
    """A concrete, runnable policy: strategy kind, periods and trust.

    ``trust_q`` is the probability of acting on any one announcement;
    ``young`` always runs with trust 0.  Period/platform consistency
    (T_R >= C, T_P dividing the window) is checked by the engine, which
    knows the checkpoint cost and the trace's window.
    """

    kind: Strategy
    period_tr: float
    period_tp: float | None = None
    trust_q: float = 1.0

    def __post_init__(self) -> None:
        if not self.kind.simulatable:
            raise ValueError(f"{self.kind.value} is analytical only and cannot be run")
        if not (self.period_tr > 0.0) or math.isinf(self.period_tr):
            raise ValueError(f"period_tr must be positive and finite, got {self.period_tr}")
        if self.kind is Strategy.WITH_CKPT:
            if self.period_tp is None or not self.period_tp > 0.0:
                raise ValueError("withckpt needs a positive period_tp")
        elif self.period_tp is not None:
            raise ValueError(f"{self.kind.value} does not take a period_tp")
        if not 0.0 <= self.trust_q <= 1.0:
            raise ValueError(f"trust_q must lie in [0,1], got {self.trust_q}")
        if self.kind is Strategy.YOUNG and self.trust_q != 0.0:
            object.__setattr__(self, "trust_q", 0.0)

    def validate_against(self, ckpt_c: float, window: float) -> None:
        """Check the periods against a platform's checkpoint cost and a
        trace's prediction window; raises ValueError on mismatch."""
        if self.period_tr < ckpt_c:
            raise ValueError(
                f"regular period {self.period_tr}s is shorter than the "
                f"checkpoint {ckpt_c}s")
        if self.kind is Strategy.WITH_CKPT:
            if self.period_tp < ckpt_c:
                raise ValueError(
                    f"proactive period {self.period_tp}s is shorter than the "
                    f"checkpoint {ckpt_c}s")
            if window < ckpt_c:
                raise ValueError(
                    f"window {window}s cannot hold a {ckpt_c}s checkpoint")
            ratio = window / self.period_tp
            if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                raise ValueError(
                    f"proactive period {self.period_tp}s does not divide the "
                    f"{window}s window a whole number of times")
