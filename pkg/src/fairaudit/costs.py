"""Cost calculus for binary decisions.

A decision rule is judged by the asymmetric cost of its errors: a false
negative costs ``c`` times a false positive. The two central identities are

* the cost-minimising rule acts exactly when the outcome probability
  exceeds ``1/(1+c)`` (the optimal implied threshold), and
* conversely, a system whose marginal decisions sit at outcome probability
  ``t`` behaves as if it valued false negatives ``(1-t)/t`` times false
  positives (the implied cost ratio).

Both directions are kept polymorphic over Python's numeric tower: pass a
:class:`fractions.Fraction` and the arithmetic stays exact.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateClassError, UndefinedCostRatioError
from .validation import as_binary_array, as_float_array, check_finite_scalar

#: Cost of one false negative divided by the cost of one false positive.
CostRatio = float

CORRECTION_POLICIES = ("half-count", "none")


def apply_threshold(scores, threshold: float) -> np.ndarray:
    """Binary decisions 1{score >= threshold}; ties decide positive."""
    threshold = check_finite_scalar(threshold, "threshold")
    scores = as_float_array(scores, "scores", allow_empty=True)
    return (scores >= threshold).astype(np.int8)


def total_cost(decisions, outcomes, cost_ratio) -> float:
    """Total error cost FP + c*FN of decisions against realised outcomes."""
    c = _check_cost_ratio(cost_ratio)
    decisions = as_binary_array(decisions, "decisions", allow_empty=True)
    outcomes = as_binary_array(outcomes, "outcomes", allow_empty=True)
    if len(decisions) != len(outcomes):
        raise ValueError(
            f"length mismatch: {len(decisions)} decisions vs {len(outcomes)} outcomes"
        )
    fp = int(np.sum((decisions == 1) & (outcomes == 0)))
    fn = int(np.sum((decisions == 0) & (outcomes == 1)))
    return fp + c * fn


def optimal_implied_threshold(cost_ratio):
    """Outcome probability above which acting is cost-minimising: 1/(1+c)."""
    _check_cost_ratio(cost_ratio)
    return 1 / (1 + cost_ratio)


def implied_cost_ratio(implied_threshold):
    """Cost ratio under which ``implied_threshold`` is the optimal rule.

    Exact inverse of :func:`optimal_implied_threshold`. Thresholds of 0 or 1
    correspond to infinite or zero cost ratios and raise rather than clamp.
    """
    t = implied_threshold
    tf = float(t)
    if not math.isfinite(tf) or tf < 0 or tf > 1:
        raise ValueError(f"implied_threshold must be in [0, 1], got {t}")
    if tf == 0.0 or tf == 1.0:
        raise UndefinedCostRatioError(
            f"implied threshold {t} has no finite positive cost ratio"
        )
    if tf >= 0.5:
        # 1 - t is exact here; the quotient is then correctly rounded
        return (1 - t) / t
    return 1 / t - 1


@dataclass(frozen=True)
class ConfusionSummary:
    """Error counts and rates of binary predictions against ground truth.

    Counts are stored after any half-count correction, so they may be
    half-integral; the rate fields are always consistent with them
    (``fpr = fp/(fp+tn)``, ``fnr = fn/(fn+tp)``).
    """

    tp: float
    fp: float
    fn: float
    tn: float
    fpr: float
    fnr: float
    prevalence: float
    correction_applied: bool

    @property
    def total(self) -> float:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def positives(self) -> float:
        return self.tp + self.fn

    @property
    def negatives(self) -> float:
        return self.fp + self.tn


def confusion(predicted, truths, correction: str = "half-count") -> ConfusionSummary:
    """Confusion summary with optional repair of degenerate error rates.

    Under the ``"half-count"`` policy an observed rate of exactly 0 or 1 is
    replaced by ``1/(2n)`` or ``1 - 1/(2n)``, with ``n`` the relevant
    denominator, and ``correction_applied`` is set. A correction can repair
    a degenerate *rate*, not an absent *class*: if the ground truth has no
    positives or no negatives there is no denominator to correct with, so
    :class:`DegenerateClassError` is raised under either policy.
    """
    if correction not in CORRECTION_POLICIES:
        raise ValueError(
            f"correction must be one of {CORRECTION_POLICIES}, got {correction!r}"
        )
    predicted = as_binary_array(predicted, "predicted")
    truths = as_binary_array(truths, "truths")
    if len(predicted) != len(truths):
        raise ValueError(
            f"length mismatch: {len(predicted)} predictions vs {len(truths)} truths"
        )
    tp = int(np.sum((predicted == 1) & (truths == 1)))
    fp = int(np.sum((predicted == 1) & (truths == 0)))
    fn = int(np.sum((predicted == 0) & (truths == 1)))
    tn = int(np.sum((predicted == 0) & (truths == 0)))
    n_pos = tp + fn
    n_neg = fp + tn
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClassError(
            f"ground truth has {n_pos} positives and {n_neg} negatives; "
            "both classes are required"
        )
    fp_c, fn_c = float(fp), float(fn)
    corrected = False
    if correction == "half-count":
        if fp in (0, n_neg):
            fp_c = 0.5 if fp == 0 else n_neg - 0.5
            corrected = True
        if fn in (0, n_pos):
            fn_c = 0.5 if fn == 0 else n_pos - 0.5
            corrected = True
    return ConfusionSummary(
        tp=n_pos - fn_c,
        fp=fp_c,
        fn=fn_c,
        tn=n_neg - fp_c,
        fpr=fp_c / n_neg,
        fnr=fn_c / n_pos,
        prevalence=n_pos / (n_pos + n_neg),
        correction_applied=corrected,
    )


def _check_cost_ratio(c) -> "CostRatio":
    if not isinstance(c, numbers.Real):
        raise ValueError(f"cost ratio must be a real number, got {type(c).__name__}")
    cf = float(c)
    if not math.isfinite(cf) or cf <= 0:
        raise ValueError(f"cost ratio must be finite and > 0, got {c}")
    return c
