"""Command-line front door.

Four subcommands: ``model-audit`` and ``label-audit`` estimate per-group
implied thresholds and cost ratios from a data file; ``compare`` puts
bootstrap intervals on cross-group differences; ``simulate`` emits
synthetic datasets from the generative models for pipeline testing.

Exit codes: 0 success, 2 input/configuration error, 3 degenerate data
(nothing estimable), 4 unstable bootstrap statistic.
"""

from __future__ import annotations

import argparse
import json
import sys

from .compare import ComparisonFailure, compare_groups
from .data import GroupSkip
from .errors import (
    AuditError,
    DegenerateClassError,
    DegenerateRateError,
    EmptyFitError,
    IngestError,
    InsufficientDataError,
    UnstableStatisticError,
)
from .ingest import IngestSchema, ingest, write_decisions_csv, write_labels_csv
from .label_audit import LabelAuditor, audit_labels
from .model_audit import IntervalConfig, ThresholdAuditor, WindowPolicy, audit_model
from .report import (
    build_report,
    comparison_entries,
    group_entries,
    render_markdown,
    report_json,
    write_text_atomic,
)
from .simulate import ScoreModel, SdtWorld, gen_labels, gen_scored

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_UNSTABLE = 4

_MODEL_DEFAULTS = {
    "group_by": None,
    "halfwidth": None,
    "min_effective_n": 200.0,
    "max_halfwidth": None,
    "replicates": None,
    "level": 0.95,
    "seed": 0,
    "null_policy": "reject-row",
    "reject_cap": 0.01,
    "format": "json",
    "out": None,
}
_LABEL_DEFAULTS = {
    "group_by": None,
    "by_labeler": False,
    "correction": "half-count",
    "min_positives": 10,
    "min_negatives": 10,
    "seed": 0,
    "null_policy": "reject-row",
    "reject_cap": 0.01,
    "format": "json",
    "out": None,
}
_COMPARE_DEFAULTS = {
    "audit": "model",
    "metric": "implied_threshold",
    "threshold": None,
    "halfwidth": None,
    "min_effective_n": 200.0,
    "max_halfwidth": None,
    "correction": "half-count",
    "min_positives": 10,
    "min_negatives": 10,
    "replicates": 500,
    "level": 0.95,
    "seed": 0,
    "null_policy": "reject-row",
    "reject_cap": 0.01,
    "format": "json",
    "out": None,
}
_SIMULATE_DEFAULTS = {
    "n": 1000,
    "group": "group=all",
    "seed": 0,
    "density": "uniform",
    "rate": 8.0,
    "alpha": 2.0,
    "beta": 2.0,
    "calibration": "identity",
    "shift": 0.0,
    "scale": 1.0,
    "level": 0.5,
    "prevalence": 0.2,
    "separation": 2.0,
    "criterion": 1.0,
    "labeler": "labeler-0",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairaudit",
        description="Implementation-fairness audits for binary decision systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_io(p):
        p.add_argument("--out", help="write the report here (default: stdout)")
        p.add_argument("--format", choices=("json", "markdown"),
                       help="report format (default json)")
        p.add_argument("--config", help="JSON file of default option values")
        p.add_argument("--seed", type=int, help="seed for all randomised steps")
        p.add_argument("--null-policy", choices=("reject-row", "fail"),
                       dest="null_policy", help="what to do with invalid rows")
        p.add_argument("--reject-cap", type=float, dest="reject_cap",
                       help="maximum tolerated rejected-row fraction")

    p = sub.add_parser("model-audit", help="audit a scored decision system")
    p.add_argument("data", help="decision file (CSV with header, or JSONL)")
    p.add_argument("--threshold", type=float, help="deployed decision threshold")
    p.add_argument("--group-by", dest="group_by",
                   help="comma-separated group dimensions to slice on")
    p.add_argument("--halfwidth", type=float, help="fixed window half-width")
    p.add_argument("--min-effective-n", type=float, dest="min_effective_n",
                   help="adaptive window: target effective sample size")
    p.add_argument("--max-halfwidth", type=float, dest="max_halfwidth",
                   help="adaptive window: half-width cap")
    p.add_argument("--replicates", type=int,
                   help="bootstrap replicates for per-group intervals")
    p.add_argument("--level", type=float, help="interval coverage level")
    common_io(p)

    p = sub.add_parser("label-audit", help="audit labelers against ground truth")
    p.add_argument("data", help="label file (CSV with header, or JSONL)")
    p.add_argument("--group-by", dest="group_by",
                   help="comma-separated group dimensions to slice on")
    p.add_argument("--by-labeler", action=argparse.BooleanOptionalAction,
                   dest="by_labeler", default=None,
                   help="also split every partition per labeler")
    p.add_argument("--correction", choices=("half-count", "none"),
                   help="policy for error rates of exactly 0 or 1")
    p.add_argument("--min-positives", type=int, dest="min_positives",
                   help="low-confidence flag below this many truth positives")
    p.add_argument("--min-negatives", type=int, dest="min_negatives",
                   help="low-confidence flag below this many truth negatives")
    common_io(p)

    p = sub.add_parser("compare", help="bootstrap comparison of two groups")
    p.add_argument("data", help="input file matching the audit kind")
    p.add_argument("--audit", choices=("model", "label"), help="audit kind")
    p.add_argument("--metric",
                   choices=("implied_threshold", "cost_ratio", "criterion",
                            "separation"))
    p.add_argument("--pair", nargs=2, action="append", metavar=("GROUP_A", "GROUP_B"),
                   help='group keys like "region=a" (repeatable)')
    p.add_argument("--threshold", type=float, help="decision threshold (model audit)")
    p.add_argument("--halfwidth", type=float)
    p.add_argument("--min-effective-n", type=float, dest="min_effective_n")
    p.add_argument("--max-halfwidth", type=float, dest="max_halfwidth")
    p.add_argument("--correction", choices=("half-count", "none"))
    p.add_argument("--min-positives", type=int, dest="min_positives")
    p.add_argument("--min-negatives", type=int, dest="min_negatives")
    p.add_argument("--replicates", type=int, help="bootstrap replicates")
    p.add_argument("--level", type=float, help="interval coverage level")
    common_io(p)

    p = sub.add_parser("simulate", help="emit a synthetic dataset")
    kind = p.add_subparsers(dest="kind", required=True)

    d = kind.add_parser("decisions", help="scored decisions from a score model")
    d.add_argument("--out", required=True, help="output CSV path")
    d.add_argument("--n", type=int, help="number of records")
    d.add_argument("--group", help='group key, e.g. "region=a"')
    d.add_argument("--seed", type=int)
    d.add_argument("--density", choices=("uniform", "trunc-exp", "beta"))
    d.add_argument("--rate", type=float, help="trunc-exp decay rate")
    d.add_argument("--alpha", type=float, help="beta density alpha")
    d.add_argument("--beta", type=float, help="beta density beta")
    d.add_argument("--calibration",
                   choices=("identity", "affine", "logistic", "constant"))
    d.add_argument("--shift", type=float, help="affine/logistic shift")
    d.add_argument("--scale", type=float, help="affine/logistic scale")
    d.add_argument("--level", type=float, help="constant calibration value")
    d.add_argument("--config", help="JSON file of default option values")

    lb = kind.add_parser("labels", help="labeler decisions from a latent-signal model")
    lb.add_argument("--out", required=True, help="output CSV path")
    lb.add_argument("--n", type=int, help="number of records")
    lb.add_argument("--group", help='group key, e.g. "region=a"')
    lb.add_argument("--seed", type=int)
    lb.add_argument("--prevalence", type=float, help="ground-truth positive fraction")
    lb.add_argument("--separation", type=float, help="signal separation between classes")
    lb.add_argument("--criterion", type=float, help="labeler decision criterion")
    lb.add_argument("--labeler", help="labeler identifier for the emitted records")
    lb.add_argument("--config", help="JSON file of default option values")

    return parser


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Layer option sources: defaults < config file < explicit flags."""
    options = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise IngestError(f"cannot read config file {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise IngestError(f"config file {config_path} must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in defaults:
                raise IngestError(f"unknown config key {key!r} in {config_path}")
            options[key] = value
    for key, value in vars(args).items():
        if key in ("command", "kind", "config") or value is None:
            continue
        options[key] = value
    return options


def _group_dims(options: dict) -> list[str]:
    raw = options.get("group_by")
    if not raw:
        return []
    if isinstance(raw, str):
        return [part.strip() for part in raw.split(",") if part.strip()]
    return [str(part) for part in raw]


def _window(options: dict) -> WindowPolicy:
    return WindowPolicy(
        halfwidth=options["halfwidth"],
        min_effective_n=options["min_effective_n"],
        max_halfwidth=options["max_halfwidth"],
    )


def _emit(report: dict, options: dict) -> None:
    if options["format"] == "markdown":
        text = render_markdown(report)
    else:
        text = report_json(report)
    if options["out"]:
        write_text_atomic(text, options["out"])
    else:
        sys.stdout.write(text)


def _config_echo(options: dict, keys) -> dict:
    return {k: options[k] for k in keys}


def _sizes(frame, dims: list[str]) -> dict:
    if not dims:
        return {None: len(frame)}
    return {key: len(idx) for key, idx in frame.partition(dims).items()}


def run_model_audit(options: dict) -> int:
    if options.get("threshold") is None:
        raise ValueError("--threshold is required for a model audit")
    schema = IngestSchema(
        kind="decisions",
        null_policy=options["null_policy"],
        max_rejection_fraction=options["reject_cap"],
    )
    loaded = ingest(options["data"], schema)
    dims = _group_dims(options)
    interval = (
        IntervalConfig(
            replicates=options["replicates"],
            level=options["level"],
            seed=options["seed"],
        )
        if options["replicates"]
        else None
    )
    results = audit_model(
        loaded.frame,
        options["threshold"],
        group_by=dims,
        window=_window(options),
        interval=interval,
    )
    entries, warnings = group_entries(results, _sizes(loaded.frame, dims))
    report = build_report(
        command="model-audit",
        config=_config_echo(
            options,
            ("threshold", "group_by", "halfwidth", "min_effective_n",
             "max_halfwidth", "replicates", "level", "null_policy", "reject_cap"),
        ),
        seed=options["seed"],
        input_info=loaded.input_info(),
        groups=entries,
        comparisons=[],
        warnings=warnings,
    )
    _emit(report, options)
    estimated = any(not isinstance(r, GroupSkip) for r in results.values())
    return EXIT_OK if estimated else EXIT_DEGENERATE


def run_label_audit(options: dict) -> int:
    schema = IngestSchema(
        kind="labels",
        null_policy=options["null_policy"],
        max_rejection_fraction=options["reject_cap"],
    )
    loaded = ingest(options["data"], schema)
    dims = _group_dims(options)
    results = audit_labels(
        loaded.frame,
        group_by=dims,
        by_labeler=options["by_labeler"],
        correction=options["correction"],
        min_positives=options["min_positives"],
        min_negatives=options["min_negatives"],
    )
    size_dims = dims + (
        ["labeler"] if options["by_labeler"] and "labeler" not in dims else []
    )
    entries, warnings = group_entries(results, _sizes(loaded.frame, size_dims))
    report = build_report(
        command="label-audit",
        config=_config_echo(
            options,
            ("group_by", "by_labeler", "correction", "min_positives",
             "min_negatives", "null_policy", "reject_cap"),
        ),
        seed=options["seed"],
        input_info=loaded.input_info(),
        groups=entries,
        comparisons=[],
        warnings=warnings,
    )
    _emit(report, options)
    estimated = any(not isinstance(r, GroupSkip) for r in results.values())
    return EXIT_OK if estimated else EXIT_DEGENERATE


def run_compare(options: dict) -> int:
    if not options.get("pair"):
        raise ValueError("at least one --pair is required")
    if options["audit"] == "model":
        if options.get("threshold") is None:
            raise ValueError("--threshold is required for model-audit comparisons")
        schema_kind = "decisions"
        auditor = ThresholdAuditor(
            threshold=options["threshold"],
            halfwidth=options["halfwidth"],
            min_effective_n=options["min_effective_n"],
            max_halfwidth=options["max_halfwidth"],
        )
    else:
        schema_kind = "labels"
        auditor = LabelAuditor(
            correction=options["correction"],
            min_positives=options["min_positives"],
            min_negatives=options["min_negatives"],
        )
    schema = IngestSchema(
        kind=schema_kind,
        null_policy=options["null_policy"],
        max_rejection_fraction=options["reject_cap"],
    )
    loaded = ingest(options["data"], schema)
    comparisons = compare_groups(
        loaded.frame,
        auditor,
        [tuple(pair) for pair in options["pair"]],
        metric=options["metric"],
        replicates=options["replicates"],
        level=options["level"],
        seed=options["seed"],
    )
    entries, warnings = comparison_entries(comparisons)
    report = build_report(
        command="compare",
        config=_config_echo(
            options,
            ("audit", "metric", "threshold", "halfwidth", "min_effective_n",
             "max_halfwidth", "correction", "min_positives", "min_negatives",
             "replicates", "level", "null_policy", "reject_cap"),
        ) | {"pairs": [list(pair) for pair in options["pair"]]},
        seed=options["seed"],
        input_info=loaded.input_info(),
        groups=[],
        comparisons=entries,
        warnings=warnings,
    )
    _emit(report, options)
    failures = [c for c in comparisons if isinstance(c, ComparisonFailure)]
    if any(f.failure_fraction is not None for f in failures):
        return EXIT_UNSTABLE
    if failures:
        return EXIT_DEGENERATE
    return EXIT_OK


def run_simulate(options: dict, kind: str) -> int:
    if kind == "decisions":
        model = ScoreModel(
            density=options["density"],
            rate=options["rate"],
            alpha=options["alpha"],
            beta=options["beta"],
            calibration=options["calibration"],
            shift=options["shift"],
            scale=options["scale"],
            level=options["level"],
        )
        frame = gen_scored(model, options["n"], options["group"], options["seed"])
        write_decisions_csv(frame, options["out"])
    else:
        world = SdtWorld(
            prevalence=options["prevalence"],
            separation=options["separation"],
            criterion=options["criterion"],
        )
        frame = gen_labels(
            world, options["n"], options["group"], options["seed"],
            labeler=options["labeler"],
        )
        write_labels_csv(frame, options["out"])
    sys.stdout.write(f"wrote {len(frame)} records to {options['out']}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "model-audit":
            return run_model_audit(_resolve(args, _MODEL_DEFAULTS))
        if args.command == "label-audit":
            return run_label_audit(_resolve(args, _LABEL_DEFAULTS))
        if args.command == "compare":
            return run_compare(_resolve(args, _COMPARE_DEFAULTS))
        return run_simulate(_resolve(args, _SIMULATE_DEFAULTS), args.kind)
    except (IngestError, ValueError) as exc:
        print(f"fairaudit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateClassError, DegenerateRateError, InsufficientDataError,
            EmptyFitError) as exc:
        print(f"fairaudit: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except UnstableStatisticError as exc:
        print(f"fairaudit: unstable statistic: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except AuditError as exc:
        print(f"fairaudit: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"fairaudit: i/o error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
