"""Synthetic generative models: ground-truth oracles for every estimator.

Everything here is seeded and deterministic, so tests can compare an
estimator's output against the known generating process. The risk-category
fixture uses exact rational arithmetic throughout, making its cost
comparisons and threshold ranges exact rather than approximate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._rng import data_generator
from .data import DecisionFrame, LabelFrame
from .groups import GroupKey
from .validation import check_finite_scalar, check_positive, check_probability

DENSITIES = ("uniform", "trunc-exp", "beta")
CALIBRATIONS = ("identity", "affine", "logistic", "constant")


def _as_key(group) -> GroupKey:
    if isinstance(group, GroupKey):
        return group
    if isinstance(group, dict):
        return GroupKey.from_pairs(group)
    return GroupKey.parse(str(group))


@dataclass(frozen=True)
class ScoreModel:
    """Score distribution on [0, 1] plus a score -> outcome-probability map.

    Densities: ``uniform``; ``trunc-exp`` with density proportional to
    exp(-rate * s) (mass piled at low scores, like rare-event classifiers);
    ``beta(alpha, beta)``.

    Calibrations: ``identity`` (calibrated scores, E[Y|s] = s); ``affine``
    with p = clip(scale * s + shift, 0, 1); ``logistic`` distorting the
    log-odds of s by p = expit(scale * logit(s) + shift); ``constant``
    ignoring the score entirely (p = level).
    """

    density: str = "uniform"
    rate: float = 8.0
    alpha: float = 2.0
    beta: float = 2.0
    calibration: str = "identity"
    shift: float = 0.0
    scale: float = 1.0
    level: float = 0.5

    def __post_init__(self):
        if self.density not in DENSITIES:
            raise ValueError(f"density must be one of {DENSITIES}, got {self.density!r}")
        if self.calibration not in CALIBRATIONS:
            raise ValueError(
                f"calibration must be one of {CALIBRATIONS}, got {self.calibration!r}"
            )
        if self.density == "trunc-exp":
            check_positive(self.rate, "rate")
        if self.density == "beta":
            check_positive(self.alpha, "alpha")
            check_positive(self.beta, "beta")
        check_finite_scalar(self.shift, "shift")
        check_finite_scalar(self.scale, "scale")
        if self.calibration == "constant":
            check_probability(self.level, "level", inclusive=True)

    def sample_scores(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.density == "uniform":
            return rng.random(n)
        if self.density == "trunc-exp":
            u = rng.random(n)
            lam = self.rate
            return -np.log1p(-u * (1.0 - np.exp(-lam))) / lam
        return rng.beta(self.alpha, self.beta, size=n)

    def density_at(self, scores) -> np.ndarray:
        s = np.asarray(scores, dtype=float)
        if self.density == "uniform":
            return np.ones_like(s)
        if self.density == "trunc-exp":
            lam = self.rate
            return lam * np.exp(-lam * s) / (1.0 - np.exp(-lam))
        from math import gamma

        a, b = self.alpha, self.beta
        norm = gamma(a + b) / (gamma(a) * gamma(b))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = norm * s ** (a - 1.0) * (1.0 - s) ** (b - 1.0)
        return np.nan_to_num(out, nan=0.0, posinf=0.0)

    def outcome_probability(self, scores) -> np.ndarray:
        s = np.asarray(scores, dtype=float)
        if self.calibration == "identity":
            return np.clip(s, 0.0, 1.0)
        if self.calibration == "affine":
            return np.clip(self.scale * s + self.shift, 0.0, 1.0)
        if self.calibration == "logistic":
            z = np.clip(s, 1e-12, 1.0 - 1e-12)
            logit = np.log(z / (1.0 - z))
            return 1.0 / (1.0 + np.exp(-(self.scale * logit + self.shift)))
        return np.full_like(s, self.level)


def gen_scored(model: ScoreModel, n: int, group, seed: int = 0) -> DecisionFrame:
    """Draw n scored decisions from the model for one group.

    Scores come from the model's density; each outcome is Bernoulli with
    the model's outcome probability at that score. The stream is a pure
    function of (seed, group), so distinct groups generated from the same
    seed are independent and every call is reproducible.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    key = _as_key(group)
    rng = data_generator(seed, f"gen-scored:{key.render()}")
    scores = model.sample_scores(rng, n)
    outcomes = (rng.random(n) < model.outcome_probability(scores)).astype(np.int8)
    columns = {dim: np.full(n, value) for dim, value in key.dims}
    return DecisionFrame(scores, outcomes, columns)


@dataclass(frozen=True, eq=False)
class SdtWorld:
    """Generative labeler world: prevalence, separation, criterion.

    ``overrides`` maps group keys to (prevalence, separation, criterion)
    triples for per-group parameterisation.
    """

    prevalence: float
    separation: float
    criterion: float
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        check_probability(self.prevalence, "prevalence")
        check_finite_scalar(self.separation, "separation")
        check_finite_scalar(self.criterion, "criterion")

    def params_for(self, group) -> tuple[float, float, float]:
        if group is not None:
            key = _as_key(group)
            for override_key, params in self.overrides.items():
                if _as_key(override_key) == key:
                    phi, d, t = params
                    return float(phi), float(d), float(t)
        return self.prevalence, self.separation, self.criterion


def gen_signals(
    prevalence: float, separation: float, n: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Latent signals and truths from the two-Gaussian mixture (no labels)."""
    check_probability(prevalence, "prevalence")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = data_generator(seed, "gen-signals")
    truths = (rng.random(n) < prevalence).astype(np.int8)
    signals = rng.standard_normal(n) + truths * separation
    return signals, truths


def gen_labels(
    world: SdtWorld, n: int, group, seed: int = 0, labeler: str = "labeler-0"
) -> LabelFrame:
    """Draw n label/ground-truth pairs from the labeler model for one group.

    Truth is Bernoulli(prevalence); the signal is normal with unit variance
    centered at 0 for negatives and at the separation for positives; the
    label fires when the signal reaches the criterion.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    key = _as_key(group)
    phi, separation, criterion = world.params_for(key)
    rng = data_generator(seed, f"gen-labels:{key.render()}")
    truths = (rng.random(n) < phi).astype(np.int8)
    signals = rng.standard_normal(n) + truths * separation
    labels = (signals >= criterion).astype(np.int8)
    items = np.array([f"{key.render()}#item{i}" for i in range(n)])
    columns = {dim: np.full(n, value) for dim, value in key.dims}
    return LabelFrame(labels, truths, np.full(n, labeler), items, columns)


def expected_cost_curve(
    model: ScoreModel, thresholds, cost_ratio: float, grid: int = 200_001
) -> np.ndarray:
    """Analytic per-record expected cost of thresholding at each value.

    Integrates FP mass (1 - p(s)) f(s) above the threshold and FN mass
    p(s) f(s) below it on a fine grid; accuracy is far below any sensible
    threshold-grid resolution.
    """
    check_positive(cost_ratio, "cost_ratio")
    thresholds = np.asarray(thresholds, dtype=float)
    s = np.linspace(0.0, 1.0, grid)
    f = model.density_at(s)
    p = model.outcome_probability(s)
    ds = s[1] - s[0]

    def cumulative(values: np.ndarray) -> np.ndarray:
        inner = np.concatenate(([0.0], np.cumsum((values[1:] + values[:-1]) * 0.5 * ds)))
        return inner

    fn_below = cumulative(p * f)
    fp_above = cumulative((1.0 - p) * f)
    fp_above = fp_above[-1] - fp_above
    cost = fp_above + cost_ratio * fn_below
    return np.interp(thresholds, s, cost)


@dataclass(frozen=True)
class RiskCategory:
    """A discrete risk tier: known outcome probability, patient count."""

    probability: Fraction
    count: int

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValueError(f"probability must be in [0, 1], got {self.probability}")
        if self.count <= 0:
            raise ValueError(f"count must be positive, got {self.count}")


@dataclass(frozen=True, eq=False)
class RiskCategoryFixture:
    """Groups of ordered risk categories with exactly known probabilities.

    Categories are ordered riskiest first. All cost arithmetic is exact
    (Fractions), so policy enumeration results are never tolerance-bound.
    """

    categories: dict[str, tuple[RiskCategory, ...]]

    def group(self, name: str) -> tuple[RiskCategory, ...]:
        return self.categories[name]

    def base_rate(self, name: str) -> Fraction:
        cats = self.group(name)
        total = sum(c.count for c in cats)
        return sum((c.probability * c.count for c in cats), Fraction(0)) / total

    def policy_cost(self, name: str, treated, cost_ratio) -> Fraction:
        """Exact expected cost of treating the given category indices."""
        treated = frozenset(treated)
        cost = Fraction(0)
        for i, cat in enumerate(self.group(name)):
            if i in treated:
                cost += (1 - cat.probability) * cat.count  # false positives
            else:
                cost += cost_ratio * cat.probability * cat.count  # false negatives
        return cost

    def all_policies(self, name: str):
        indices = range(len(self.group(name)))
        for r in range(len(self.group(name)) + 1):
            yield from (frozenset(c) for c in itertools.combinations(indices, r))

    def minimal_cost_policies(self, name: str, cost_ratio) -> list[frozenset]:
        """Exhaustive enumeration: every policy achieving the minimum cost."""
        costs = {
            policy: self.policy_cost(name, policy, cost_ratio)
            for policy in self.all_policies(name)
        }
        best = min(costs.values())
        return sorted((p for p, c in costs.items() if c == best), key=sorted)

    def threshold_policy(self, name: str, threshold) -> frozenset:
        """Treat categories whose outcome probability strictly exceeds the threshold."""
        return frozenset(
            i for i, cat in enumerate(self.group(name)) if cat.probability > threshold
        )

    def optimal_threshold_range(self, name: str, cost_ratio) -> tuple[Fraction, Fraction]:
        """Closed threshold interval reproducing the cost-minimising decisions.

        Bounded by the probabilities of the marginal categories: the
        riskiest untreated category below, the least risky treated category
        above. Thresholds strictly inside reproduce the optimal policy
        under either tie convention.
        """
        policies = self.minimal_cost_policies(name, cost_ratio)
        treated = policies[0]
        cats = self.group(name)
        treated_probs = [cats[i].probability for i in treated]
        untreated_probs = [
            cats[i].probability for i in range(len(cats)) if i not in treated
        ]
        lower = max(untreated_probs) if untreated_probs else Fraction(0)
        upper = min(treated_probs) if treated_probs else Fraction(1)
        return lower, upper

    def error_rates(self, name: str, treated) -> tuple[Fraction, Fraction]:
        """Exact (fnr, fpr) of a treatment policy on this group."""
        treated = frozenset(treated)
        fn = pos = fp = neg = Fraction(0)
        for i, cat in enumerate(self.group(name)):
            positives = cat.probability * cat.count
            negatives = (1 - cat.probability) * cat.count
            pos += positives
            neg += negatives
            if i in treated:
                fp += negatives
            else:
                fn += positives
        return fn / pos, fp / neg


#: Risk tiers shared by both patient groups, riskiest first. The marginal
#: tiers sit at 1/4 and 1/6 so the implied cost ratios at the treatment
#: boundaries are exactly 3 and 5; counts put the base rates near 26% and
#: 22% while keeping every tier's expected positive count integral.
_CATEGORY_PROBABILITIES = (
    Fraction(1, 2),
    Fraction(1, 4),
    Fraction(1, 6),
    Fraction(1, 10),
)
_FEMALE_COUNTS = (24, 28, 24, 20)
_MALE_COUNTS = (16, 20, 30, 30)


def cancer_fixture() -> RiskCategoryFixture:
    """Two patient groups across four shared risk tiers."""
    return RiskCategoryFixture(
        {
            "female": tuple(
                RiskCategory(p, c)
                for p, c in zip(_CATEGORY_PROBABILITIES, _FEMALE_COUNTS)
            ),
            "male": tuple(
                RiskCategory(p, c)
                for p, c in zip(_CATEGORY_PROBABILITIES, _MALE_COUNTS)
            ),
        }
    )
