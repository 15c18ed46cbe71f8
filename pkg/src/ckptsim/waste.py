"""Closed-form waste models and their period optimizers.

Waste is the fraction of wall-clock time a platform spends on anything
other than useful work: checkpointing, redoing lost work, downtime,
recovery, or idling.  Each checkpointing strategy has a closed-form
expected waste as a function of its regular period ``T_R`` (and, for
the in-window strategy, the proactive period ``T_P``); this module
evaluates those forms and minimizes them.

The formulas assume at most one event (fault or prediction) per period.
"Capped" evaluation enforces that regime by bounding periods at
``alpha * mu`` (or ``alpha * mu_e - I`` when predictions are acted on);
"uncapped" evaluation drops the bound, which in practice matches the
trace-driven simulator far better on large platforms.

Two generic properties drive the optimizers and are relied on by tests:
at fixed periods the waste is affine in the trust probability ``q``
(so only q=0 or q=1 can be optimal), and at fixed ``q`` it is strictly
convex in ``T_R`` (so the extremal period is the unique zero of the
derivative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .platform import PlatformParams, PredictorParams, derive_rates
from .strategies import Strategy

__all__ = [
    "WasteQuery",
    "OptimizedPlan",
    "CapViolation",
    "waste_young",
    "waste_exact_date",
    "waste_migration",
    "waste_instant",
    "waste_nockpt",
    "waste_withckpt",
    "waste_of",
    "i_prime",
    "extremal_period",
    "branch_period",
    "opt_period_exact",
    "opt_period_tp",
    "proactive_period_waste",
    "dominance_nockpt",
    "uniform_dominance_window_threshold",
    "optimize_all",
]

DEFAULT_ALPHA = 0.27

_TIE_REL = 1e-12


class CapViolation(ValueError):
    """A capped query was evaluated at a period outside its valid domain."""


@dataclass(frozen=True)
class WasteQuery:
    """One evaluation point: platform, predictor, periods and mode.

    ``period_tp`` is only meaningful for the in-window checkpointing
    strategy.  ``capped`` selects domain enforcement; ``alpha`` tunes
    the validity bound.
    """

    platform: PlatformParams
    predictor: PredictorParams
    period_tr: float
    period_tp: float | None = None
    alpha: float = DEFAULT_ALPHA
    capped: bool = False

    def __post_init__(self) -> None:
        if not self.period_tr > 0.0:
            raise ValueError(f"period_tr must be positive, got {self.period_tr}")
        if self.period_tp is not None and not self.period_tp > 0.0:
            raise ValueError(f"period_tp must be positive, got {self.period_tp}")


@dataclass(frozen=True)
class OptimizedPlan:
    """Result of minimizing one strategy's waste.

    ``waste_star`` is clamped into [0, 1] for reporting; ``waste_raw``
    keeps the unclamped model value.  ``checkpoint_free`` marks the
    degenerate regime recall=1, q=1 where periodic checkpointing stops
    paying for itself and the optimal period diverges.
    """

    strategy: Strategy
    q_star: float
    t_r_star: float
    t_p_star: float | None
    waste_star: float
    waste_raw: float
    capped: bool
    checkpoint_free: bool = False


def _enforce_cap(query: WasteQuery, q: float) -> None:
    """Domain check for capped evaluation.

    With q=0 predictions are ignored and a period must fit inside
    alpha*mu; once predictions are acted on, a period plus the window
    must fit inside alpha*mu_e.
    """
    if not query.capped:
        return
    pf = query.platform
    mu = pf.mtbf()
    if query.period_tr < pf.ckpt_c:
        raise CapViolation(
            f"period {query.period_tr}s is shorter than the checkpoint {pf.ckpt_c}s")
    if q == 0.0:
        cap = query.alpha * mu
        if query.period_tr > cap:
            raise CapViolation(
                f"period {query.period_tr}s exceeds the q=0 validity bound {cap}s")
    else:
        rates = derive_rates(mu, query.predictor)
        cap = query.alpha * rates.mu_e - query.predictor.window
        if query.period_tr > cap:
            raise CapViolation(
                f"period {query.period_tr}s exceeds the q={q} validity bound {cap}s")


def waste_young(query: WasteQuery) -> float:
    """Waste of plain periodic checkpointing, predictions ignored."""
    _enforce_cap(query, 0.0)
    pf = query.platform
    mu = pf.mtbf()
    t = query.period_tr
    return pf.ckpt_c / t + (t / 2.0 + pf.down_d + pf.rec_r) / mu


def waste_exact_date(query: WasteQuery, q: float) -> float:
    """Waste under exact-date predictions trusted with probability q.

    A trusted correct prediction costs one extra checkpoint plus
    downtime and recovery but saves the half-period of lost work; a
    trusted false one costs just the checkpoint.
    """
    _enforce_cap(query, q)
    pf, pr = query.platform, query.predictor
    mu = pf.mtbf()
    t = query.period_tr
    return pf.ckpt_c / t + (
        (1.0 - pr.recall * q) * t / 2.0
        + pf.down_d + pf.rec_r
        + q * pr.recall / pr.precision * pf.ckpt_c
    ) / mu


def waste_migration(query: WasteQuery, q: float) -> float:
    """Waste when the proactive action is a migration instead of a checkpoint.

    A trusted prediction costs the migration M whether or not the fault
    is real, and a migrated task neither loses work nor pays downtime
    or recovery.
    """
    pf, pr = query.platform, query.predictor
    if pf.migrate_m is None:
        raise ValueError("platform has no migration cost configured")
    _enforce_cap(query, q)
    mu = pf.mtbf()
    t = query.period_tr
    return pf.ckpt_c / t + (
        (1.0 - pr.recall * q) * (t / 2.0 + pf.down_d + pf.rec_r)
        + q * pr.recall / pr.precision * pf.migrate_m
    ) / mu


def i_prime(pred: PredictorParams, q: float | None = None) -> float:
    """Mean time spent in proactive mode per prediction.

    A trusted false prediction keeps the policy proactive for the whole
    window; a trusted true one only until the fault strikes.
    """
    if q is None:
        q = pred.trust
    e = pred.mean_window_offset()
    return q * ((1.0 - pred.precision) * pred.window + pred.precision * e)


def waste_instant(query: WasteQuery, q: float) -> float:
    """Waste when a window prediction is treated as an exact date.

    The policy checkpoints right before the window opens and goes back
    to regular work, so a real fault at mean offset E into the window
    additionally loses min(E, T_R/2) of work.
    """
    _enforce_cap(query, q)
    pf, pr = query.platform, query.predictor
    mu = pf.mtbf()
    t = query.period_tr
    e = pr.mean_window_offset()
    return pf.ckpt_c / t + (
        (1.0 - pr.recall * q) * t / 2.0
        + pf.down_d + pf.rec_r
        + q * pr.recall / pr.precision * pf.ckpt_c
        + q * pr.recall * min(e, t / 2.0)
    ) / mu


def _window_terms(query: WasteQuery, q: float):
    pf, pr = query.platform, query.predictor
    mu = pf.mtbf()
    # rate forms 1/mu_p and 1/mu_np stay finite for recall 0 or 1
    f_p = pr.recall / (pr.precision * mu)
    f_np = (1.0 - pr.recall) / mu
    reg = 1.0 - i_prime(pr, q) * f_p  # fraction of time in regular mode
    return pf, pr, f_p, f_np, reg


def waste_nockpt(query: WasteQuery, q: float) -> float:
    """Waste when the policy computes through the window without checkpoints.

    Work done inside the window is useful but unprotected: a real fault
    at offset E loses it all, while a false prediction costs only the
    pre-window checkpoint.
    """
    _enforce_cap(query, q)
    pf, pr, f_p, f_np, reg = _window_terms(query, q)
    t = query.period_tr
    e = pr.mean_window_offset()
    return (
        (reg / t + q * f_p) * pf.ckpt_c
        + pr.precision * (1.0 - q) * f_p * t / 2.0
        + pr.precision * q * f_p * e
        + reg * f_np * t / 2.0
        + (pr.precision * f_p + reg * f_np) * (pf.down_d + pf.rec_r)
    )


def waste_withckpt(query: WasteQuery, q: float) -> float:
    """Waste when the window is checkpointed with its own period T_P.

    The fraction of time spent proactive pays C/T_P instead of C/T_R,
    and an in-window fault loses at most one proactive period, which the
    model charges in full (the value is an upper bound, taken here as
    the model's definition).
    """
    if query.period_tp is None:
        raise ValueError("in-window checkpointing needs period_tp")
    _enforce_cap(query, q)
    pf, pr, f_p, f_np, reg = _window_terms(query, q)
    t, tp = query.period_tr, query.period_tp
    ip = i_prime(pr, q)
    return (
        (reg / t + ip * f_p / tp + q * f_p) * pf.ckpt_c
        + pr.precision * (1.0 - q) * f_p * t / 2.0
        + pr.precision * q * f_p * tp
        + reg * f_np * t / 2.0
        + (pr.precision * f_p + reg * f_np) * (pf.down_d + pf.rec_r)
    )


def waste_of(strategy: Strategy, query: WasteQuery, q: float) -> float:
    """Dispatch to the strategy's waste function (Young forces q=0)."""
    if strategy is Strategy.YOUNG:
        return waste_young(query)
    if strategy is Strategy.EXACT:
        return waste_exact_date(query, q)
    if strategy is Strategy.MIGRATION:
        return waste_migration(query, q)
    if strategy is Strategy.INSTANT:
        return waste_instant(query, q)
    if strategy is Strategy.NO_CKPT:
        return waste_nockpt(query, q)
    if strategy is Strategy.WITH_CKPT:
        return waste_withckpt(query, q)
    raise ValueError(f"unknown strategy {strategy}")


# ---------------------------------------------------------------------------
# period optimizers
# ---------------------------------------------------------------------------

def extremal_period(strategy: Strategy, platform: PlatformParams,
                    pred: PredictorParams, q: float) -> float:
    """Unconstrained minimizer of the strategy's waste in T_R.

    Every waste form reduces to a*C/T + b*T/2 + const in T_R, so the
    extremum is sqrt(2*C*a/b).  Returns inf when the T coefficient
    vanishes (recall=1 fully trusted: no unpredicted faults remain, so
    longer periods are always better).
    """
    mu = platform.mtbf()
    c = platform.ckpt_c
    r, p = pred.recall, pred.precision
    if strategy is Strategy.YOUNG:
        q = 0.0
    if strategy in (Strategy.YOUNG, Strategy.EXACT, Strategy.MIGRATION):
        coeff = 1.0 - r * q
        return math.inf if coeff == 0.0 else math.sqrt(2.0 * mu * c / coeff)
    if strategy is Strategy.INSTANT:
        # the min(E, T/2) term makes the slope piecewise; compare both
        # regimes and keep the admissible candidate with smaller waste
        e = pred.mean_window_offset()
        coeff_hi = 1.0 - r * q            # regime T >= 2E
        t_hi = math.inf if coeff_hi == 0.0 else math.sqrt(2.0 * mu * c / coeff_hi)
        if t_hi >= 2.0 * e:
            return t_hi
        t_lo = math.sqrt(2.0 * mu * c)    # regime T < 2E: slope as with q=0
        return t_lo if t_lo <= 2.0 * e else 2.0 * e
    if strategy in (Strategy.NO_CKPT, Strategy.WITH_CKPT):
        f_p = r / (p * mu)
        f_np = (1.0 - r) / mu
        reg = 1.0 - i_prime(pred, q) * f_p
        slope = p * (1.0 - q) * f_p + reg * f_np
        if slope <= 0.0:
            return math.inf
        return math.sqrt(2.0 * c * reg / slope)
    raise ValueError(f"unknown strategy {strategy}")


def branch_period(strategy: Strategy, platform: PlatformParams,
                  pred: PredictorParams, q: float,
                  alpha: float = DEFAULT_ALPHA, capped: bool = True) -> float:
    """Optimal period for one trust branch, clamped to the valid domain.

    Uncapped mode returns the raw extremal period (this is what the
    simulator uses).  Capped mode clamps into [C, alpha*mu] for q=0 and
    [C, alpha*mu_e - I] otherwise.
    """
    t_extr = extremal_period(strategy, platform, pred, q)
    if not capped:
        return t_extr
    mu = platform.mtbf()
    if q == 0.0 or strategy is Strategy.YOUNG:
        cap = alpha * mu
    else:
        cap = alpha * derive_rates(mu, pred).mu_e - pred.window
    return min(cap, max(t_extr, platform.ckpt_c))


def proactive_period_waste(pred: PredictorParams, ckpt_c: float, t_p: float) -> float:
    """The T_P-dependent part of the in-window waste, up to a constant factor."""
    e = pred.mean_window_offset()
    k = ((1.0 - pred.precision) * pred.window + pred.precision * e) / pred.precision
    return k * ckpt_c / t_p + t_p


def opt_period_tp(pred: PredictorParams, ckpt_c: float) -> float:
    """Best proactive period that divides the window a whole number of times.

    The unconstrained optimum is sqrt(K*C) with
    K = ((1-p)I + p*E)/p; the window must hold an integer number of
    proactive periods, so the two nearest divisors are compared.  If
    both admissible divisors fall below C the shortest window division
    no finer than C is used instead.
    """
    window = pred.window
    if not window > 0.0:
        raise ValueError("proactive period needs a positive prediction window")
    if ckpt_c > window:
        raise ValueError(
            f"checkpoint {ckpt_c}s does not fit in the {window}s window")
    e = pred.mean_window_offset()
    k = ((1.0 - pred.precision) * window + pred.precision * e) / pred.precision
    t_extr = math.sqrt(k * ckpt_c)
    n_lo = math.floor(window / t_extr)
    candidates = [window / (n_lo + 1)]
    if n_lo >= 1:
        candidates.append(window / n_lo)
    best = min(candidates, key=lambda tp: proactive_period_waste(pred, ckpt_c, tp))
    if best < ckpt_c:
        # keep the divisibility constraint: coarsest division >= C
        best = window / math.floor(window / ckpt_c)
    return best


def dominance_nockpt(pred: PredictorParams, ckpt_c: float) -> bool:
    """True when skipping in-window checkpoints can never lose.

    The two window strategies differ by K*C/T_P + T_P - E evaluated at
    the optimal T_P = sqrt(K*C); the difference is nonnegative exactly
    when 2*sqrt(K*C) >= E, in which case checkpointing inside the
    window is pointless and the optimizer drops that strategy.
    """
    window = pred.window
    if not window > 0.0:
        raise ValueError("dominance test needs a positive prediction window")
    e = pred.mean_window_offset()
    k = ((1.0 - pred.precision) * window + pred.precision * e) / pred.precision
    return 2.0 * math.sqrt(k * ckpt_c) >= e


def uniform_dominance_window_threshold(precision: float, ckpt_c: float) -> float:
    """Largest window for which the no-checkpoint strategy dominates,
    under the uniform in-window fault law: 16*(1 - p/2)*C/p."""
    return 16.0 * (1.0 - precision / 2.0) * ckpt_c / precision


def _branch_plan(strategy: Strategy, platform: PlatformParams,
                 pred: PredictorParams, q: float, alpha: float, capped: bool,
                 t_p: float | None) -> OptimizedPlan:
    t = branch_period(strategy, platform, pred, q, alpha, capped)
    checkpoint_free = math.isinf(t)
    if checkpoint_free:
        # waste in the T -> inf limit: the C/T and T/2 terms vanish
        pf = platform
        mu = pf.mtbf()
        if strategy in (Strategy.EXACT, Strategy.INSTANT):
            raw = (pf.down_d + pf.rec_r + pred.recall / pred.precision * pf.ckpt_c) / mu
            if strategy is Strategy.INSTANT:
                raw += pred.recall * pred.mean_window_offset() / mu * q
        elif strategy is Strategy.MIGRATION:
            raw = pred.recall / pred.precision * pf.migrate_m / mu
        else:
            _, _, f_p, f_np, reg = _window_terms(
                WasteQuery(platform, pred, 1.0), q)
            raw = (pred.precision * f_p + reg * f_np) * (pf.down_d + pf.rec_r)
            raw += q * f_p * pf.ckpt_c
            if strategy is Strategy.NO_CKPT:
                raw += pred.precision * q * f_p * pred.mean_window_offset()
            else:
                ip = i_prime(pred, q)
                raw += ip * f_p / t_p * pf.ckpt_c + pred.precision * q * f_p * t_p
    else:
        query = WasteQuery(platform, pred, t, period_tp=t_p, alpha=alpha,
                           capped=False)
        raw = waste_of(strategy, query, q)
    return OptimizedPlan(
        strategy=strategy, q_star=q, t_r_star=t, t_p_star=t_p,
        waste_star=min(max(raw, 0.0), 1.0), waste_raw=raw,
        capped=capped, checkpoint_free=checkpoint_free)


def _best_plan(strategy: Strategy, platform: PlatformParams,
               pred: PredictorParams, alpha: float, capped: bool,
               t_p: float | None = None) -> OptimizedPlan:
    """Evaluate the q=0 and q=1 branches and keep the better one.

    The waste is affine in q at fixed periods, so no interior trust
    probability can beat both extremes.  Ties go to q=0 (fewer moving
    parts).
    """
    p0 = _branch_plan(strategy, platform, pred, 0.0, alpha, capped, t_p)
    if strategy is Strategy.YOUNG:
        return p0
    p1 = _branch_plan(strategy, platform, pred, 1.0, alpha, capped, t_p)
    if p1.waste_raw < p0.waste_raw * (1.0 - _TIE_REL) - _TIE_REL:
        return p1
    return p0


def opt_period_exact(platform: PlatformParams, pred: PredictorParams,
                     alpha: float = DEFAULT_ALPHA,
                     capped: bool = True) -> OptimizedPlan:
    """Optimal plan for the exact-date prediction strategy."""
    return _best_plan(Strategy.EXACT, platform, pred, alpha, capped)


def optimize_all(platform: PlatformParams, pred: PredictorParams,
                 alpha: float = DEFAULT_ALPHA, capped: bool = True,
                 skip_dominated: bool = True) -> list[OptimizedPlan]:
    """Best plan per strategy, sorted by increasing waste.

    The in-window checkpointing strategy is omitted when the window is
    too short to hold a checkpoint, and (optionally) when the dominance
    test proves it can never beat the no-checkpoint variant.  Migration
    appears only when the platform has a migration cost.
    """
    plans = [
        _best_plan(Strategy.YOUNG, platform, pred, alpha, capped),
        _best_plan(Strategy.EXACT, platform, pred, alpha, capped),
        _best_plan(Strategy.INSTANT, platform, pred, alpha, capped),
        _best_plan(Strategy.NO_CKPT, platform, pred, alpha, capped),
    ]
    if platform.migrate_m is not None:
        plans.append(_best_plan(Strategy.MIGRATION, platform, pred, alpha, capped))
    if pred.window >= platform.ckpt_c and pred.window > 0.0:
        if not (skip_dominated and dominance_nockpt(pred, platform.ckpt_c)):
            t_p = opt_period_tp(pred, platform.ckpt_c)
            plans.append(_best_plan(Strategy.WITH_CKPT, platform, pred, alpha,
                                    capped, t_p=t_p))
    plans.sort(key=lambda pl: pl.waste_raw)
    return plans
