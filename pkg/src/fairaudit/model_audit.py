"""Implied-threshold estimation for score-based decision systems.

A deployed rule acts when the model score crosses a decision threshold t.
The quantity that matters for cross-group comparison is not t itself but
the outcome probability at the margin, E[Y | s = t]. Simply averaging
outcomes in a window around t is biased whenever scores are unevenly
distributed across the window (the window mean then leans toward the dense
side), so the estimator here fits a local linear regression of outcomes on
centered scores with tricubic weights and reads off the intercept.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._rng import replicate_generator
from .costs import apply_threshold, implied_cost_ratio
from .data import DecisionFrame, GroupSkip
from .errors import (
    EmptyFitError,
    InsufficientDataError,
    UnstableStatisticError,
)
from .stats import (
    IntervalEstimate,
    percentile_interval,
    resample_counts,
    weighted_linear_fit,
)
from .validation import (
    as_binary_array,
    as_float_array,
    as_group_columns,
    check_finite_scalar,
    check_positive,
    check_probability,
    check_same_length,
    check_seed,
)

_GROWTH = 1.5  # geometric halfwidth growth during adaptive selection


@dataclass(frozen=True)
class WindowPolicy:
    """How to choose the half-width of the estimation window.

    Fixed mode (``halfwidth`` set) uses the given half-width verbatim.
    Adaptive mode grows the half-width geometrically from the smallest gap
    between distinct scores until the tricubic effective sample size reaches
    ``min_effective_n`` or the half-width hits ``max_halfwidth`` (by default
    the span needed to cover every record).
    """

    halfwidth: float | None = None
    min_effective_n: float = 200.0
    max_halfwidth: float | None = None

    def __post_init__(self):
        if self.halfwidth is not None:
            check_positive(self.halfwidth, "halfwidth")
            if self.max_halfwidth is not None:
                raise ValueError(
                    "halfwidth (fixed mode) and max_halfwidth (adaptive mode) "
                    "are mutually exclusive"
                )
        check_positive(self.min_effective_n, "min_effective_n")
        if self.max_halfwidth is not None:
            check_positive(self.max_halfwidth, "max_halfwidth")

    @property
    def mode(self) -> str:
        return "fixed" if self.halfwidth is not None else "adaptive"

    @classmethod
    def fixed(cls, halfwidth: float) -> "WindowPolicy":
        return cls(halfwidth=halfwidth)

    @classmethod
    def adaptive(
        cls, min_effective_n: float = 200.0, max_halfwidth: float | None = None
    ) -> "WindowPolicy":
        return cls(min_effective_n=min_effective_n, max_halfwidth=max_halfwidth)


@dataclass(frozen=True)
class IntervalConfig:
    """Bootstrap settings for per-estimate uncertainty intervals."""

    replicates: int = 500
    level: float = 0.95
    seed: int = 0
    stream_tag: str = "prevalence"

    def __post_init__(self):
        if self.replicates < 100:
            raise ValueError(f"replicates must be >= 100, got {self.replicates}")
        check_probability(self.level, "level")
        check_seed(self.seed)


@dataclass(frozen=True)
class PrevalenceEstimate:
    """Estimated outcome probability at the decision threshold.

    ``implied_threshold`` is the local-regression intercept, clamped into
    [0, 1] (``clamped`` set if that bit). ``degenerate`` marks a singular
    weighted design (single distinct score in the window), in which case the
    estimate is the weighted mean of outcomes.
    """

    implied_threshold: float
    slope: float
    halfwidth: float
    effective_n: float
    n_window: int
    degenerate: bool
    clamped: bool
    interval: IntervalEstimate | None = None


def tricubic_weight(score, threshold: float, halfwidth: float):
    """Tricubic kernel weight ``[1 - (|s-t|/d)^3]^3`` inside ``[t-d, t+d]``.

    Accepts a scalar or array of scores; weights are 0 outside the window.
    """
    threshold = check_finite_scalar(threshold, "threshold")
    halfwidth = check_positive(halfwidth, "halfwidth")
    s = np.asarray(score, dtype=float)
    u = np.minimum(np.abs(s - threshold) / halfwidth, 1.0)
    w = (1.0 - u**3) ** 3
    return float(w) if np.isscalar(score) else w


def naive_window_prevalence(scores, outcomes, lower: float, upper: float) -> float:
    """Unweighted mean outcome among records with ``lower <= s <= upper``."""
    lower = check_finite_scalar(lower, "lower")
    upper = check_finite_scalar(upper, "upper")
    if not lower < upper:
        raise ValueError(f"window bounds must satisfy lower < upper, got [{lower}, {upper}]")
    scores = as_float_array(scores, "scores")
    outcomes = as_binary_array(outcomes, "outcomes")
    check_same_length(("scores", scores), ("outcomes", outcomes))
    inside = (scores >= lower) & (scores <= upper)
    if not inside.any():
        raise InsufficientDataError(
            f"no records with score in [{lower}, {upper}]",
            {"lower": lower, "upper": upper, "n_window": 0},
        )
    return float(outcomes[inside].mean())


def _select_halfwidth(scores: np.ndarray, threshold: float, policy: WindowPolicy) -> float:
    if policy.halfwidth is not None:
        return policy.halfwidth
    cap = policy.max_halfwidth
    if cap is None:
        cap = float(np.abs(scores - threshold).max())
        if cap <= 0.0:  # every score sits exactly at the threshold
            cap = 1.0
    distinct = np.unique(scores)
    if len(distinct) < 2:
        return cap
    d = min(float(np.diff(distinct).min()), cap)
    while d < cap and _effective_n(scores, threshold, d) < policy.min_effective_n:
        d = min(d * _GROWTH, cap)
    return d


def _effective_n(scores: np.ndarray, threshold: float, halfwidth: float) -> float:
    w = tricubic_weight(scores, threshold, halfwidth)
    sw = w.sum()
    if sw <= 0.0:
        return 0.0
    return float(sw * sw / np.square(w).sum())


def prevalence_at_threshold(
    scores,
    outcomes,
    threshold: float,
    *,
    window: WindowPolicy | None = None,
    interval: IntervalConfig | None = None,
) -> PrevalenceEstimate:
    """Estimate the outcome probability at the decision threshold.

    Fits ``outcome ~ intercept + slope * (score - threshold)`` by weighted
    least squares with tricubic weights over the window chosen by
    ``window`` (adaptive by default). The intercept is the estimate; with
    ``interval`` set, a pairs bootstrap over whole records (window held
    fixed at the selected half-width) attaches a percentile interval.

    Raises
    ------
    InsufficientDataError
        If fewer than two records carry positive weight.
    """
    threshold = check_finite_scalar(threshold, "threshold")
    scores = as_float_array(scores, "scores")
    outcomes = as_binary_array(outcomes, "outcomes")
    n = check_same_length(("scores", scores), ("outcomes", outcomes))
    window = window or WindowPolicy()

    halfwidth = _select_halfwidth(scores, threshold, window)
    weights = tricubic_weight(scores, threshold, halfwidth)
    in_window = np.flatnonzero(weights > 0)
    if len(in_window) < 2:
        raise InsufficientDataError(
            f"only {len(in_window)} record(s) carry positive weight in "
            f"[{threshold - halfwidth}, {threshold + halfwidth}]",
            {
                "threshold": threshold,
                "halfwidth": halfwidth,
                "n_window": int(len(in_window)),
                "n_records": n,
            },
        )
    x = scores[in_window] - threshold
    y = outcomes[in_window].astype(float)
    w = weights[in_window]
    fit = weighted_linear_fit(x, y, w)
    estimate = min(max(fit.intercept, 0.0), 1.0)
    clamped = estimate != fit.intercept

    interval_estimate = None
    if interval is not None:
        values = _intercept_replicates(
            n, in_window, x, y, w,
            interval.replicates, interval.seed, interval.stream_tag,
        )
        ok = np.isfinite(values)
        failure_fraction = 1.0 - ok.sum() / interval.replicates
        if failure_fraction > 0.5:
            raise UnstableStatisticError(
                f"intercept undefined on {failure_fraction:.0%} of replicates",
                failure_fraction,
            )
        interval_estimate = percentile_interval(
            estimate, values[ok], interval.level, interval.replicates
        )

    return PrevalenceEstimate(
        implied_threshold=float(estimate),
        slope=fit.slope,
        halfwidth=float(halfwidth),
        effective_n=fit.effective_n,
        n_window=int(len(in_window)),
        degenerate=fit.degenerate,
        clamped=clamped,
        interval=interval_estimate,
    )


def _intercept_replicates(
    n: int,
    in_window: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    replicates: int,
    seed: int,
    tag: str,
) -> np.ndarray:
    """Clamped regression intercepts over pairs-bootstrap resamples.

    Resampling covers all n records of the dataset; only the multiplicities
    of in-window rows enter the weighted moments, so each replicate costs
    O(n) for the count vector plus O(window) for the fit. NaN marks
    replicates where the statistic is undefined (no window row drawn).
    """
    moments = np.column_stack((w, w * x, w * x * x, w * y, w * x * y))
    values = np.full(replicates, np.nan)
    for r in range(replicates):
        rng = replicate_generator(seed, tag, r)
        counts = resample_counts(rng, n)[in_window]
        if not counts.any():
            continue
        sw, swx, swxx, swy, swxy = counts @ moments
        if sw <= 0.0:
            continue
        denom = swxx - swx * swx / sw
        if denom > 0.0:
            slope = (swxy - swx * swy / sw) / denom
            intercept = (swy - slope * swx) / sw
        else:
            intercept = swy / sw
        values[r] = min(max(intercept, 0.0), 1.0)
    return values


def audit_model(
    frame: DecisionFrame,
    threshold: float,
    group_by=None,
    *,
    window: WindowPolicy | None = None,
    interval: IntervalConfig | None = None,
) -> dict:
    """Per-group implied-threshold estimates for a decision dataset.

    Partitions the frame on the given dimensions and runs
    :func:`prevalence_at_threshold` within each part. Groups whose windows
    cannot support a fit are returned as :class:`GroupSkip` entries with the
    failure reason; they are never silently dropped. With no ``group_by``
    the whole frame is audited under the key ``None``.
    """
    if not isinstance(frame, DecisionFrame):
        raise ValueError(f"expected a DecisionFrame, got {type(frame).__name__}")
    dims = list(group_by or [])
    if dims:
        partitions = frame.partition(dims)
    else:
        partitions = {None: np.arange(len(frame))}

    results: dict = {}
    for key, idx in partitions.items():
        tag = f"prevalence:{key.render() if key is not None else 'overall'}"
        cfg = (
            dataclasses.replace(interval, stream_tag=tag)
            if interval is not None
            else None
        )
        try:
            results[key] = prevalence_at_threshold(
                frame.scores[idx],
                frame.outcomes[idx],
                threshold,
                window=window,
                interval=cfg,
            )
        except (InsufficientDataError, EmptyFitError, UnstableStatisticError) as exc:
            results[key] = GroupSkip(reason=str(exc), n=int(len(idx)))
    return results


class ThresholdAuditor(BaseEstimator):
    """Audit the implied threshold of a fixed decision threshold.

    scikit-learn style estimator: ``fit(X, y)`` takes model scores and
    realised binary outcomes, and estimates the outcome probability at the
    decision threshold, overall or per subgroup.

    Parameters
    ----------
    threshold : float
        The deployed decision threshold (decisions are ``score >= t``).
    halfwidth : float, optional
        Fixed window half-width. Leave unset for adaptive selection.
    min_effective_n : float, default 200
        Adaptive mode: grow the window until the tricubic effective sample
        size reaches this value.
    max_halfwidth : float, optional
        Adaptive mode: stop growing here even if ``min_effective_n`` was
        not reached.
    replicates : int, optional
        Attach a pairs-bootstrap percentile interval with this many
        replicates to each estimate. ``None`` disables intervals.
    level : float, default 0.95
        Interval coverage level.
    seed : int, default 0
        Bootstrap seed.

    Attributes
    ----------
    estimate_ : PrevalenceEstimate
        Set when fitting without groups.
    estimates_ : dict[GroupKey, PrevalenceEstimate]
        Per-group estimates when fitting with groups.
    skipped_ : dict[GroupKey, GroupSkip]
        Groups that could not be audited, with reasons.
    """

    def __init__(
        self,
        threshold: float = 0.5,
        *,
        halfwidth: float | None = None,
        min_effective_n: float = 200.0,
        max_halfwidth: float | None = None,
        replicates: int | None = None,
        level: float = 0.95,
        seed: int = 0,
    ):
        self.threshold = threshold
        self.halfwidth = halfwidth
        self.min_effective_n = min_effective_n
        self.max_halfwidth = max_halfwidth
        self.replicates = replicates
        self.level = level
        self.seed = seed

    def _window(self) -> WindowPolicy:
        return WindowPolicy(
            halfwidth=self.halfwidth,
            min_effective_n=self.min_effective_n,
            max_halfwidth=self.max_halfwidth,
        )

    def _interval(self) -> IntervalConfig | None:
        if self.replicates is None:
            return None
        return IntervalConfig(
            replicates=self.replicates, level=self.level, seed=self.seed
        )

    def fit(self, X, y, groups=None):
        """Estimate implied thresholds from scores ``X`` and outcomes ``y``.

        ``groups`` may be a single array-like (one grouping dimension named
        ``"group"``) or a mapping of dimension name to array-like.
        """
        scores = as_float_array(X, "X")
        outcomes = as_binary_array(y, "y")
        check_same_length(("X", scores), ("y", outcomes))
        group_columns = as_group_columns(groups, len(scores))

        self.skipped_ = {}
        if not group_columns:
            self.estimate_ = prevalence_at_threshold(
                scores,
                outcomes,
                self.threshold,
                window=self._window(),
                interval=self._interval(),
            )
            self.estimates_ = {}
            return self

        frame = DecisionFrame(scores, outcomes, group_columns)
        results = audit_model(
            frame,
            self.threshold,
            group_by=list(group_columns),
            window=self._window(),
            interval=self._interval(),
        )
        self.estimates_ = {
            k: v for k, v in results.items() if not isinstance(v, GroupSkip)
        }
        self.skipped_ = {k: v for k, v in results.items() if isinstance(v, GroupSkip)}
        return self

    def predict(self, X) -> np.ndarray:
        """Binary decisions the audited rule makes on scores ``X``."""
        return apply_threshold(X, self.threshold)

    # internal protocol used by compare.compare_groups
    frame_type = DecisionFrame
    metrics = ("implied_threshold", "cost_ratio")

    def _point_metric(self, scores, outcomes, metric: str) -> float:
        estimate = prevalence_at_threshold(
            scores, outcomes, self.threshold, window=self._window()
        )
        return _model_metric(estimate.implied_threshold, metric)

    def _metric_replicates(
        self, frame: DecisionFrame, mask, metric: str, replicates: int,
        seed: int, tag: str,
    ) -> tuple[float, np.ndarray]:
        if metric not in self.metrics:
            raise ValueError(
                f"metric must be one of {self.metrics} for a model audit, got {metric!r}"
            )
        scores = frame.scores[mask]
        outcomes = frame.outcomes[mask]
        point = self._point_metric(scores, outcomes, metric)

        threshold = check_finite_scalar(self.threshold, "threshold")
        halfwidth = _select_halfwidth(scores, threshold, self._window())
        weights = tricubic_weight(scores, threshold, halfwidth)
        in_window = np.flatnonzero(weights > 0)
        intercepts = _intercept_replicates(
            len(scores), in_window,
            scores[in_window] - threshold,
            outcomes[in_window].astype(float),
            weights[in_window],
            replicates, seed, tag,
        )
        if metric == "implied_threshold":
            return point, intercepts
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(
                (intercepts > 0.0) & (intercepts < 1.0),
                (1.0 - intercepts) / intercepts,
                np.nan,
            )
        return point, ratios


def _model_metric(implied_threshold: float, metric: str) -> float:
    if metric == "implied_threshold":
        return implied_threshold
    if metric == "cost_ratio":
        return implied_cost_ratio(implied_threshold)
    raise ValueError(f"unknown model-audit metric {metric!r}")
