"""Numeric kernel: standard-normal functions, weighted least squares, and a
seeded percentile-bootstrap engine.

These are the only statistical primitives the audits rely on; everything
else in the package is bookkeeping around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._rng import replicate_generator
from .errors import AuditError, EmptyFitError, UnstableStatisticError
from .validation import (
    as_float_array,
    check_finite_scalar,
    check_probability,
    check_same_length,
    check_seed,
)

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate to well below 1e-12 everywhere."""
    x = check_finite_scalar(x, "x")
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_density(x: float) -> float:
    """Standard normal density exp(-x^2/2)/sqrt(2*pi)."""
    x = check_finite_scalar(x, "x")
    return math.exp(-0.5 * x * x) * _INV_SQRT_2PI


# Rational minimax approximation (Acklam), |error| < 1.2e-9 before refinement.
_PPF_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_PPF_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_PPF_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_PPF_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
    3.754408661907416e+00,
)
_PPF_PLOW = 0.02425


def _ppf_raw(p: float) -> float:
    # lower tail / central regions only (p <= 0.5)
    if p < _PPF_PLOW:
        q = math.sqrt(-2.0 * math.log(p))
        a, b, c, d, e, f = _PPF_C
        g, h, i, j = _PPF_D
        return ((((((a * q + b) * q + c) * q + d) * q + e) * q + f)
                / ((((g * q + h) * q + i) * q + j) * q + 1.0))
    q = p - 0.5
    r = q * q
    a, b, c, d, e, f = _PPF_A
    g, h, i, j, k = _PPF_B
    return ((((((a * r + b) * r + c) * r + d) * r + e) * r + f) * q
            / (((((g * r + h) * r + i) * r + j) * r + k) * r + 1.0))


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF.

    Rational approximation plus one Newton step against the CDF; absolute
    error below 1e-12 for p in [1e-12, 1 - 1e-12].
    """
    p = check_finite_scalar(p, "p")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in the open interval (0, 1), got {p}")
    if p > 0.5:
        # 1 - p is exact for p >= 0.5, so the reflection loses nothing
        return -std_normal_quantile(1.0 - p)
    x = _ppf_raw(p)
    x -= (0.5 * math.erfc(-x / _SQRT2) - p) / (math.exp(-0.5 * x * x) * _INV_SQRT_2PI)
    return x


class LinearFit(NamedTuple):
    intercept: float
    slope: float
    effective_n: float
    degenerate: bool


def weighted_linear_fit(x, y, weights) -> LinearFit:
    """Weighted least-squares line minimising sum w*(y - b0 - b1*x)^2.

    Parameters
    ----------
    x, y : array-like
        Coordinates; must be finite.
    weights : array-like
        Nonnegative kernel weights; at least one must be positive.

    Returns
    -------
    LinearFit
        ``effective_n`` is the Kish effective sample size
        (sum w)^2 / sum(w^2). If every positive-weight x is identical the
        design is singular: the fit falls back to the weighted mean with
        slope 0 and the ``degenerate`` flag set.
    """
    x = as_float_array(x, "x")
    y = as_float_array(y, "y")
    w = as_float_array(weights, "weights")
    check_same_length(("x", x), ("y", y), ("weights", w))
    if (w < 0).any():
        raise ValueError("weights must be nonnegative")
    pos = w > 0
    if not pos.any():
        raise EmptyFitError("all weights are zero; nothing to fit")
    xp, yp, wp = x[pos], y[pos], w[pos]
    sw = wp.sum()
    effective_n = sw * sw / np.square(wp).sum()
    xbar = float(np.dot(wp, xp) / sw)
    ybar = float(np.dot(wp, yp) / sw)
    if xp.max() == xp.min():
        return LinearFit(ybar, 0.0, float(effective_n), True)
    dx = xp - xbar
    sxx = float(np.dot(wp, dx * dx))
    sxy = float(np.dot(wp, dx * (yp - ybar)))
    if sxx <= 0.0:
        return LinearFit(ybar, 0.0, float(effective_n), True)
    slope = sxy / sxx
    return LinearFit(ybar - slope * xbar, slope, float(effective_n), False)


@dataclass(frozen=True)
class IntervalEstimate:
    """Point estimate with a percentile-bootstrap interval."""

    point: float
    lower: float
    upper: float
    level: float
    replicates: int

    def __post_init__(self):
        check_probability(self.level, "level")
        if self.replicates <= 0:
            raise ValueError("replicates must be positive")
        if not self.lower <= self.point <= self.upper:
            raise ValueError(
                f"interval [{self.lower}, {self.upper}] does not bracket "
                f"point {self.point}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def percentile_interval(
    point: float, values: np.ndarray, level: float, replicates: int
) -> IntervalEstimate:
    """Percentile interval from replicate values, widened (if needed) so the
    full-data point always lies inside it."""
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(values, [alpha, 1.0 - alpha])
    return IntervalEstimate(
        point=float(point),
        lower=float(min(lower, point)),
        upper=float(max(upper, point)),
        level=float(level),
        replicates=int(replicates),
    )


def bootstrap_interval(
    statistic: Callable,
    records: Sequence | np.ndarray,
    replicates: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    *,
    tag: str = "bootstrap",
) -> IntervalEstimate:
    """Percentile bootstrap of ``statistic`` over resampled records.

    The statistic is evaluated once on the full data (the point estimate)
    and once per replicate on a same-size resample drawn with replacement.
    Replicate streams are independent pure functions of ``(seed, tag, r)``,
    so results are reproducible regardless of evaluation order.

    Raises
    ------
    UnstableStatisticError
        If the statistic is undefined (raises an :class:`AuditError`,
        an arithmetic error, or returns a non-finite value) on more than
        half the replicates.
    """
    n = len(records)
    if n == 0:
        raise ValueError("records must be nonempty")
    if replicates < 100:
        raise ValueError(f"replicates must be >= 100, got {replicates}")
    level = check_probability(level, "level")
    seed = check_seed(seed)

    point = float(statistic(records))
    is_array = isinstance(records, np.ndarray)
    values = np.full(replicates, np.nan)
    for r in range(replicates):
        rng = replicate_generator(seed, tag, r)
        idx = rng.integers(0, n, size=n)
        sample = records[idx] if is_array else [records[i] for i in idx]
        try:
            values[r] = float(statistic(sample))
        except (AuditError, ArithmeticError):
            continue
    ok = np.isfinite(values)
    failure_fraction = 1.0 - ok.sum() / replicates
    if failure_fraction > 0.5:
        raise UnstableStatisticError(
            f"statistic undefined on {failure_fraction:.0%} of replicates",
            failure_fraction,
        )
    return percentile_interval(point, values[ok], level, replicates)


def resample_counts(rng: np.random.Generator, n: int) -> np.ndarray:
    """Multiplicity vector of one with-replacement resample of n records."""
    return np.bincount(rng.integers(0, n, size=n), minlength=n)
