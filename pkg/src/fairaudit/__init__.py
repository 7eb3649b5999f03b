"""fairaudit: implementation-fairness audits for binary decision systems.

Estimates, per subgroup, the implied decision threshold (the outcome
probability at the margin of the deployed rule) and the implied
false-negative/false-positive cost ratio — for machine-scored decisions
via local weighted regression at the decision threshold, and for human
labelers via signal detection theory — with seeded bootstrap uncertainty
and synthetic generative oracles.
"""

from .compare import (
    ComparisonFailure,
    GroupComparison,
    compare_groups,
    cost_of_policy_by_pair,
)
from .costs import (
    ConfusionSummary,
    CostRatio,
    apply_threshold,
    confusion,
    implied_cost_ratio,
    optimal_implied_threshold,
    total_cost,
)
from .data import (
    DecisionFrame,
    DecisionRecord,
    GroupSkip,
    LabelFrame,
    LabelRecord,
)
from .errors import (
    AuditError,
    AuditWarning,
    DegenerateClassError,
    DegenerateRateError,
    EmptyFitError,
    IngestError,
    InsufficientDataError,
    UndefinedCostRatioError,
    UnstableStatisticError,
)
from .groups import GroupKey
from .ingest import IngestResult, IngestSchema, ingest
from .label_audit import (
    LabelAuditor,
    SdtEstimate,
    audit_labels,
    dprime_from_auc,
    fit_labeler_model,
    sdt_cost_ratio,
    sdt_fit,
    sdt_implied_threshold,
)
from .model_audit import (
    IntervalConfig,
    PrevalenceEstimate,
    ThresholdAuditor,
    WindowPolicy,
    audit_model,
    naive_window_prevalence,
    prevalence_at_threshold,
    tricubic_weight,
)
from .simulate import (
    RiskCategory,
    RiskCategoryFixture,
    ScoreModel,
    SdtWorld,
    cancer_fixture,
    expected_cost_curve,
    gen_labels,
    gen_scored,
    gen_signals,
)
from .stats import (
    IntervalEstimate,
    LinearFit,
    bootstrap_interval,
    std_normal_cdf,
    std_normal_density,
    std_normal_quantile,
    weighted_linear_fit,
)

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "AuditWarning",
    "ComparisonFailure",
    "ConfusionSummary",
    "CostRatio",
    "DecisionFrame",
    "DecisionRecord",
    "DegenerateClassError",
    "DegenerateRateError",
    "EmptyFitError",
    "GroupComparison",
    "GroupKey",
    "GroupSkip",
    "IngestError",
    "IngestResult",
    "IngestSchema",
    "InsufficientDataError",
    "IntervalConfig",
    "IntervalEstimate",
    "LabelAuditor",
    "LabelFrame",
    "LabelRecord",
    "LinearFit",
    "PrevalenceEstimate",
    "RiskCategory",
    "RiskCategoryFixture",
    "ScoreModel",
    "SdtEstimate",
    "SdtWorld",
    "ThresholdAuditor",
    "UndefinedCostRatioError",
    "UnstableStatisticError",
    "WindowPolicy",
    "apply_threshold",
    "audit_labels",
    "audit_model",
    "bootstrap_interval",
    "cancer_fixture",
    "compare_groups",
    "confusion",
    "cost_of_policy_by_pair",
    "dprime_from_auc",
    "expected_cost_curve",
    "fit_labeler_model",
    "gen_labels",
    "gen_scored",
    "gen_signals",
    "implied_cost_ratio",
    "ingest",
    "naive_window_prevalence",
    "optimal_implied_threshold",
    "prevalence_at_threshold",
    "sdt_cost_ratio",
    "sdt_fit",
    "sdt_implied_threshold",
    "std_normal_cdf",
    "std_normal_density",
    "std_normal_quantile",
    "total_cost",
    "tricubic_weight",
    "weighted_linear_fit",
]
