"""Pairwise cross-group comparison with stratified bootstrap intervals.

The fairness question is whether two groups face the same implied
threshold (equivalently, the same implied cost ratio). Point estimates are
compared with a stratified pairs bootstrap: records are resampled within
each group independently, the metric recomputed per replicate, and a
percentile interval placed on the per-replicate difference. Each group's
replicate streams depend only on (seed, group, replicate) so a group's
resamples are identical in every pair it participates in; comparing (A, B)
and (B, A) therefore yields exactly mirrored intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import apply_threshold, total_cost
from .data import DecisionFrame
from .errors import AuditError
from .groups import GroupKey
from .stats import IntervalEstimate, percentile_interval
from .validation import check_probability, check_seed


@dataclass(frozen=True)
class GroupComparison:
    """Difference in one audit metric between two groups."""

    group_a: GroupKey
    group_b: GroupKey
    metric: str
    estimate_a: float
    estimate_b: float
    difference: float
    interval: IntervalEstimate
    excludes_zero: bool


@dataclass(frozen=True)
class ComparisonFailure:
    """A pair whose metric could not be compared; other pairs are unaffected."""

    group_a: GroupKey
    group_b: GroupKey
    metric: str
    reason: str
    failure_fraction: float | None = None


def _as_key(value) -> GroupKey:
    if isinstance(value, GroupKey):
        return value
    return GroupKey.parse(str(value))


def compare_groups(
    data,
    auditor,
    pairs,
    *,
    metric: str = "implied_threshold",
    replicates: int = 500,
    level: float = 0.95,
    seed: int = 0,
) -> list:
    """Bootstrap comparisons of an audit metric across group pairs.

    Parameters
    ----------
    data : DecisionFrame or LabelFrame
        Must match the auditor's frame type.
    auditor : ThresholdAuditor or LabelAuditor
        Configured (unfitted) auditor defining the metric computation.
    pairs : sequence of (GroupKey or str, GroupKey or str)
        Group pairs to compare; strings are parsed as ``"dim=value|..."``.
    metric : str
        ``implied_threshold`` or ``cost_ratio`` for model audits; label
        audits additionally support ``criterion`` and ``separation``.

    Returns
    -------
    list of GroupComparison or ComparisonFailure
        One entry per requested pair, in order. A pair degrades to
        :class:`ComparisonFailure` when the metric is undefined on the full
        group data or on more than half of its bootstrap replicates.
    """
    if not isinstance(data, auditor.frame_type):
        raise ValueError(
            f"{type(auditor).__name__} audits {auditor.frame_type.__name__} data, "
            f"got {type(data).__name__}"
        )
    level = check_probability(level, "level")
    seed = check_seed(seed)
    if replicates < 100:
        raise ValueError(f"replicates must be >= 100, got {replicates}")

    keys = [(_as_key(a), _as_key(b)) for a, b in pairs]
    cache: dict[GroupKey, tuple] = {}

    def group_result(key: GroupKey):
        if key not in cache:
            mask = data.mask_for(key)
            if not mask.any():
                raise ValueError(f"no records match group {key}")
            try:
                cache[key] = auditor._metric_replicates(
                    data, mask, metric, replicates, seed, f"compare:{key.render()}"
                )
            except AuditError as exc:
                cache[key] = exc
        result = cache[key]
        if isinstance(result, AuditError):
            raise result
        return result

    out: list = []
    for key_a, key_b in keys:
        try:
            point_a, reps_a = group_result(key_a)
            point_b, reps_b = group_result(key_b)
        except AuditError as exc:
            out.append(
                ComparisonFailure(key_a, key_b, metric, reason=str(exc))
            )
            continue
        diffs = reps_a - reps_b
        ok = np.isfinite(diffs)
        failure_fraction = 1.0 - ok.sum() / replicates
        if failure_fraction > 0.5:
            out.append(
                ComparisonFailure(
                    key_a,
                    key_b,
                    metric,
                    reason=(
                        f"metric undefined on {failure_fraction:.0%} of replicates"
                    ),
                    failure_fraction=failure_fraction,
                )
            )
            continue
        difference = point_a - point_b
        interval = percentile_interval(difference, diffs[ok], level, replicates)
        out.append(
            GroupComparison(
                group_a=key_a,
                group_b=key_b,
                metric=metric,
                estimate_a=float(point_a),
                estimate_b=float(point_b),
                difference=float(difference),
                interval=interval,
                excludes_zero=not interval.contains(0.0),
            )
        )
    return out


def cost_of_policy_by_pair(
    frame: DecisionFrame,
    thresholds: dict,
    cost_ratios: dict,
) -> dict[GroupKey, float]:
    """Total decision cost within each composite-group cell.

    Useful when producer and consumer groups intersect: keys of
    ``thresholds``/``cost_ratios`` are composite group keys over the same
    dimensions (e.g. ``producer=x|consumer=y``), and each cell is scored
    with its own decision threshold and cost ratio.
    """
    if not isinstance(frame, DecisionFrame):
        raise ValueError(f"expected a DecisionFrame, got {type(frame).__name__}")
    thresholds = {_as_key(k): v for k, v in thresholds.items()}
    cost_ratios = {_as_key(k): v for k, v in cost_ratios.items()}
    dim_sets = {key.dimensions for key in thresholds} | {
        key.dimensions for key in cost_ratios
    }
    if len(dim_sets) != 1:
        raise ValueError(
            f"all cell parameters must share one dimension tuple, got {dim_sets}"
        )
    (dims,) = dim_sets

    costs: dict[GroupKey, float] = {}
    for key, idx in frame.partition(list(dims)).items():
        if key not in thresholds or key not in cost_ratios:
            raise ValueError(f"missing cell parameters for group {key}")
        decisions = apply_threshold(frame.scores[idx], thresholds[key])
        costs[key] = float(total_cost(decisions, frame.outcomes[idx], cost_ratios[key]))
    return costs
