"""Signal-detection audit of human labelers against expert ground truth.

Labelers are modeled as thresholding a latent, normally distributed signal:
negatives produce signals ~ N(0, 1), positives ~ N(d', 1), and the labeler
reports positive when the signal crosses a criterion t. Observed error
rates then pin down both parameters,

    t  = quantile(1 - FPR),      d' = t - quantile(FNR),

and Bayes' rule converts the criterion into the outcome probability at the
margin (the implied threshold), from which the labeler's implied
false-negative/false-positive cost ratio follows.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from dataclasses import dataclass

from ._rng import replicate_generator
from .costs import ConfusionSummary, confusion
from .data import GroupSkip, LabelFrame
from .errors import AuditWarning, DegenerateClassError, DegenerateRateError
from .stats import resample_counts, std_normal_quantile
from .validation import (
    as_binary_array,
    as_group_columns,
    check_finite_scalar,
    check_probability,
    check_same_length,
)

from sklearn.base import BaseEstimator

_SQRT2 = math.sqrt(2.0)

LABEL_METRICS = ("implied_threshold", "cost_ratio", "criterion", "separation")


def sdt_fit(summary: ConfusionSummary) -> tuple[float, float]:
    """Invert observed error rates into (criterion, separation).

    Requires both rates strictly inside (0, 1); run :func:`confusion` with
    the half-count correction first if perfect rates are possible.
    """
    fpr, fnr = summary.fpr, summary.fnr
    if not (0.0 < fpr < 1.0 and 0.0 < fnr < 1.0):
        raise DegenerateRateError(
            f"error rates must lie strictly inside (0, 1) to invert the "
            f"signal-detection model; got fpr={fpr}, fnr={fnr}"
        )
    criterion = std_normal_quantile(1.0 - fpr)
    separation = criterion - std_normal_quantile(fnr)
    return criterion, separation


def _bayes_factor(criterion: float, separation: float, prevalence: float) -> float:
    t = check_finite_scalar(criterion, "criterion")
    d = check_finite_scalar(separation, "separation")
    phi = check_probability(prevalence, "prevalence")
    return (1.0 - phi) / phi * math.exp(-t * d + d * d / 2.0)


def sdt_implied_threshold(
    criterion: float, separation: float, prevalence: float
) -> float:
    """Outcome probability at the labeler's criterion, via Bayes' rule."""
    return 1.0 / (1.0 + _bayes_factor(criterion, separation, prevalence))


def sdt_cost_ratio(criterion: float, separation: float, prevalence: float) -> float:
    """Cost ratio that rationalises the labeler's criterion."""
    return _bayes_factor(criterion, separation, prevalence)


def dprime_from_auc(auc: float) -> float:
    """Separation implied by a ranking AUC: sqrt(2) * quantile(AUC)."""
    auc = check_probability(auc, "auc")
    return _SQRT2 * std_normal_quantile(auc)


@dataclass(frozen=True)
class SdtEstimate:
    """Fitted labeler model with the derived fairness quantities.

    ``separation`` below 0 means labels were anti-correlated with truth;
    the estimate is still reported (with a warning at construction site).
    ``low_confidence`` marks partitions with fewer ground-truth positives
    or negatives than the audit's minimum counts.
    """

    criterion: float
    separation: float
    prevalence: float
    implied_threshold: float
    cost_ratio: float
    confusion: ConfusionSummary
    low_confidence: bool

    def __post_init__(self):
        if not 0.0 < self.implied_threshold < 1.0:
            raise DegenerateRateError(
                f"implied threshold {self.implied_threshold} left (0, 1); "
                "inputs are too extreme for a meaningful estimate"
            )
        if not self.cost_ratio > 0.0:
            raise DegenerateRateError(f"cost ratio {self.cost_ratio} is not positive")


def fit_labeler_model(
    labels,
    truths,
    *,
    correction: str = "half-count",
    min_positives: int = 10,
    min_negatives: int = 10,
) -> SdtEstimate:
    """Fit the signal-detection model to one partition of label records."""
    summary = confusion(labels, truths, correction)
    criterion, separation = sdt_fit(summary)
    if separation < 0.0:
        warnings.warn(
            f"separation {separation:.3f} < 0: labels are anti-correlated "
            "with ground truth",
            AuditWarning,
            stacklevel=2,
        )
    phi = summary.prevalence
    return SdtEstimate(
        criterion=criterion,
        separation=separation,
        prevalence=phi,
        implied_threshold=sdt_implied_threshold(criterion, separation, phi),
        cost_ratio=sdt_cost_ratio(criterion, separation, phi),
        confusion=summary,
        low_confidence=bool(
            summary.positives < min_positives or summary.negatives < min_negatives
        ),
    )


def audit_labels(
    frame: LabelFrame,
    *,
    group_by=None,
    by_labeler: bool = False,
    correction: str = "half-count",
    min_positives: int = 10,
    min_negatives: int = 10,
) -> dict:
    """Per-partition labeler audits.

    Partitions the frame by the requested group dimensions, and/or by
    labeler, and fits the signal-detection model within each part. The
    prevalence entering Bayes' rule is the ground-truth positive fraction
    of that partition. Partitions whose confusion table cannot support the
    inversion come back as :class:`GroupSkip` entries; with no grouping at
    all, the single overall estimate is keyed by ``None``.
    """
    if not isinstance(frame, LabelFrame):
        raise ValueError(f"expected a LabelFrame, got {type(frame).__name__}")
    dims = list(group_by or [])
    if by_labeler and "labeler" not in dims:
        dims.append("labeler")
    if dims:
        partitions = frame.partition(dims)
    else:
        partitions = {None: np.arange(len(frame))}

    results: dict = {}
    for key, idx in partitions.items():
        try:
            results[key] = fit_labeler_model(
                frame.labels[idx],
                frame.truths[idx],
                correction=correction,
                min_positives=min_positives,
                min_negatives=min_negatives,
            )
        except (DegenerateClassError, DegenerateRateError) as exc:
            results[key] = GroupSkip(reason=str(exc), n=int(len(idx)))
    return results


class LabelAuditor(BaseEstimator):
    """Audit human labelers against expert ground truth.

    scikit-learn style estimator: ``fit(X, y)`` takes the labels under
    audit and the expert ground truth, and recovers each partition's
    criterion, separation, implied threshold and implied cost ratio.

    Parameters
    ----------
    correction : {"half-count", "none"}, default "half-count"
        Repair policy for observed error rates of exactly 0 or 1.
    min_positives, min_negatives : int, default 10
        Partitions with fewer ground-truth positives/negatives are flagged
        ``low_confidence``.
    by_labeler : bool, default False
        Also split partitions per labeler (requires ``labelers`` in fit).

    Attributes
    ----------
    estimate_ : SdtEstimate
        Set when fitting without groups or labeler splits.
    estimates_ : dict[GroupKey, SdtEstimate]
    skipped_ : dict[GroupKey, GroupSkip]
    """

    def __init__(
        self,
        *,
        correction: str = "half-count",
        min_positives: int = 10,
        min_negatives: int = 10,
        by_labeler: bool = False,
    ):
        self.correction = correction
        self.min_positives = min_positives
        self.min_negatives = min_negatives
        self.by_labeler = by_labeler

    def fit(self, X, y, groups=None, labelers=None):
        """Fit per-partition labeler models from labels ``X`` and truth ``y``."""
        labels = as_binary_array(X, "X")
        truths = as_binary_array(y, "y")
        n = check_same_length(("X", labels), ("y", truths))
        group_columns = as_group_columns(groups, n)
        if self.by_labeler and labelers is None:
            raise ValueError("by_labeler=True requires a labelers array in fit()")

        self.skipped_ = {}
        if not group_columns and not self.by_labeler:
            self.estimate_ = fit_labeler_model(
                labels,
                truths,
                correction=self.correction,
                min_positives=self.min_positives,
                min_negatives=self.min_negatives,
            )
            self.estimates_ = {}
            return self

        frame = LabelFrame(
            labels,
            truths,
            labelers if labelers is not None else np.full(n, "unknown"),
            np.arange(n).astype(str),
            group_columns,
        )
        results = audit_labels(
            frame,
            group_by=list(group_columns),
            by_labeler=self.by_labeler,
            correction=self.correction,
            min_positives=self.min_positives,
            min_negatives=self.min_negatives,
        )
        self.estimates_ = {
            k: v for k, v in results.items() if not isinstance(v, GroupSkip)
        }
        self.skipped_ = {k: v for k, v in results.items() if isinstance(v, GroupSkip)}
        return self

    # internal protocol used by compare.compare_groups
    frame_type = LabelFrame
    metrics = LABEL_METRICS

    def _point_metric(self, labels, truths, metric: str) -> float:
        estimate = fit_labeler_model(
            labels,
            truths,
            correction=self.correction,
            min_positives=self.min_positives,
            min_negatives=self.min_negatives,
        )
        return getattr(estimate, metric)

    def _metric_replicates(
        self, frame: LabelFrame, mask, metric: str, replicates: int,
        seed: int, tag: str,
    ) -> tuple[float, np.ndarray]:
        if metric not in self.metrics:
            raise ValueError(
                f"metric must be one of {self.metrics} for a label audit, got {metric!r}"
            )
        labels = frame.labels[mask]
        truths = frame.truths[mask]
        point = self._point_metric(labels, truths, metric)

        n = len(labels)
        cell = truths.astype(np.int64) * 2 + labels  # 0=TN 1=FP 2=FN 3=TP
        values = np.full(replicates, np.nan)
        for r in range(replicates):
            rng = replicate_generator(seed, tag, r)
            counts = resample_counts(rng, n)
            tn, fp, fn, tp = np.bincount(cell, weights=counts, minlength=4)
            values[r] = _metric_from_counts(
                fp, fn, tp + fn, fp + tn, self.correction, metric
            )
        return point, values


def _metric_from_counts(
    fp: float, fn: float, n_pos: float, n_neg: float, correction: str, metric: str
) -> float:
    """Scalar SDT metric from raw confusion counts; NaN when undefined."""
    if n_pos <= 0 or n_neg <= 0:
        return math.nan
    if correction == "half-count":
        fp = min(max(fp, 0.5), n_neg - 0.5)
        fn = min(max(fn, 0.5), n_pos - 0.5)
    fpr = fp / n_neg
    fnr = fn / n_pos
    if not (0.0 < fpr < 1.0 and 0.0 < fnr < 1.0):
        return math.nan
    criterion = std_normal_quantile(1.0 - fpr)
    if metric == "criterion":
        return criterion
    separation = criterion - std_normal_quantile(fnr)
    if metric == "separation":
        return separation
    phi = n_pos / (n_pos + n_neg)
    factor = (1.0 - phi) / phi * math.exp(
        -criterion * separation + separation * separation / 2.0
    )
    if metric == "cost_ratio":
        return factor
    return 1.0 / (1.0 + factor)
