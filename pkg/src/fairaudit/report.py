"""Audit report assembly, serialisation, and rendering.

A report is a plain JSON document that fully determines its own
reproduction: tool version, configuration echo, input digest, and seed.
Every warning-producing condition raised by the estimators (corrections,
clamps, degenerate fits, low-confidence partitions, skipped groups)
surfaces in the top-level ``warnings`` list; nothing is silent.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from .compare import ComparisonFailure, GroupComparison
from .data import GroupSkip
from .errors import UndefinedCostRatioError
from .label_audit import SdtEstimate
from .model_audit import PrevalenceEstimate
from .stats import IntervalEstimate

TOOL_NAME = "fairaudit"


def _tool_version() -> str:
    from . import __version__

    return __version__


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _native(value):
    """Recursively convert numpy scalars/arrays so json can serialise them."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_native(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_native(v) for v in value]
    return value


def _render_group(key) -> str:
    return "overall" if key is None else key.render()


def interval_payload(interval: IntervalEstimate | None):
    if interval is None:
        return None
    return {
        "point": interval.point,
        "lower": interval.lower,
        "upper": interval.upper,
        "level": interval.level,
        "replicates": interval.replicates,
    }


def model_estimate_payload(estimate: PrevalenceEstimate) -> dict:
    try:
        ratio = (
            (1.0 - estimate.implied_threshold) / estimate.implied_threshold
            if 0.0 < estimate.implied_threshold < 1.0
            else None
        )
    except UndefinedCostRatioError:
        ratio = None
    return {
        "kind": "model",
        "implied_threshold": estimate.implied_threshold,
        "implied_cost_ratio": ratio,
        "slope": estimate.slope,
        "halfwidth": estimate.halfwidth,
        "effective_n": estimate.effective_n,
        "n_window": estimate.n_window,
        "degenerate": estimate.degenerate,
        "clamped": estimate.clamped,
        "interval": interval_payload(estimate.interval),
    }


def label_estimate_payload(estimate: SdtEstimate) -> dict:
    summary = estimate.confusion
    return {
        "kind": "label",
        "criterion": estimate.criterion,
        "separation": estimate.separation,
        "prevalence": estimate.prevalence,
        "implied_threshold": estimate.implied_threshold,
        "cost_ratio": estimate.cost_ratio,
        "low_confidence": estimate.low_confidence,
        "confusion": {
            "tp": summary.tp,
            "fp": summary.fp,
            "fn": summary.fn,
            "tn": summary.tn,
            "fpr": summary.fpr,
            "fnr": summary.fnr,
            "prevalence": summary.prevalence,
            "correction_applied": summary.correction_applied,
        },
    }


def _estimate_payload(result) -> dict:
    if isinstance(result, PrevalenceEstimate):
        return model_estimate_payload(result)
    if isinstance(result, SdtEstimate):
        return label_estimate_payload(result)
    raise TypeError(f"cannot serialise estimate of type {type(result).__name__}")


def group_entries(results: dict, sizes: dict) -> tuple[list, list]:
    """Serialise per-group audit results; returns (entries, warnings)."""
    entries = []
    warnings: list[str] = []
    for key in sorted(results, key=_render_group):
        result = results[key]
        name = _render_group(key)
        n = int(sizes.get(key, 0))
        if isinstance(result, GroupSkip):
            entries.append(
                {"group": name, "n": result.n, "estimate": None,
                 "skipped": {"reason": result.reason}}
            )
            warnings.append(f"group {name}: skipped: {result.reason}")
            continue
        payload = _estimate_payload(result)
        entries.append(
            {"group": name, "n": n, "estimate": payload, "skipped": None}
        )
        if payload.get("clamped"):
            warnings.append(f"group {name}: intercept clamped into [0, 1]")
        if payload.get("degenerate"):
            warnings.append(f"group {name}: degenerate weighted design (single distinct score)")
        if payload.get("kind") == "model" and payload.get("implied_cost_ratio") is None:
            warnings.append(
                f"group {name}: implied cost ratio undefined at threshold "
                f"{payload['implied_threshold']}"
            )
        if payload.get("low_confidence"):
            warnings.append(f"group {name}: low confidence (below minimum class counts)")
        if payload.get("kind") == "label":
            if payload["confusion"]["correction_applied"]:
                warnings.append(f"group {name}: half-count rate correction applied")
            if payload["separation"] < 0:
                warnings.append(
                    f"group {name}: separation < 0 (labels anti-correlated with truth)"
                )
    return entries, warnings


def comparison_entries(comparisons: list) -> tuple[list, list]:
    entries = []
    warnings: list[str] = []
    for comp in comparisons:
        if isinstance(comp, ComparisonFailure):
            entries.append(
                {
                    "group_a": comp.group_a.render(),
                    "group_b": comp.group_b.render(),
                    "metric": comp.metric,
                    "failed": True,
                    "reason": comp.reason,
                    "failure_fraction": comp.failure_fraction,
                    "estimate_a": None,
                    "estimate_b": None,
                    "difference": None,
                    "interval": None,
                    "excludes_zero": None,
                }
            )
            warnings.append(
                f"comparison {comp.group_a.render()} vs {comp.group_b.render()}: "
                f"failed: {comp.reason}"
            )
        elif isinstance(comp, GroupComparison):
            entries.append(
                {
                    "group_a": comp.group_a.render(),
                    "group_b": comp.group_b.render(),
                    "metric": comp.metric,
                    "failed": False,
                    "reason": None,
                    "failure_fraction": None,
                    "estimate_a": comp.estimate_a,
                    "estimate_b": comp.estimate_b,
                    "difference": comp.difference,
                    "interval": interval_payload(comp.interval),
                    "excludes_zero": comp.excludes_zero,
                }
            )
        else:
            raise TypeError(f"cannot serialise comparison of type {type(comp).__name__}")
    return entries, warnings


def build_report(
    *,
    command: str,
    config: dict,
    seed: int,
    input_info: dict | None,
    groups: list,
    comparisons: list,
    warnings: list,
) -> dict:
    return _native(
        {
            "tool": {"name": TOOL_NAME, "version": _tool_version()},
            "command": command,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "seed": seed,
            "config": config,
            "input": input_info,
            "results": {"groups": groups, "comparisons": comparisons},
            "warnings": warnings,
        }
    )


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_schema() -> dict:
    text = (
        resources.files("fairaudit").joinpath("schemas/report.schema.json").read_text()
    )
    return json.loads(text)


def render_markdown(report: dict) -> str:
    """Human-readable mirror of the JSON report."""
    lines = [
        f"# {TOOL_NAME} report: {report['command']}",
        "",
        f"- tool version: {report['tool']['version']}",
        f"- created at: {report['created_at']}",
        f"- seed: {report['seed']}",
    ]
    if report.get("input"):
        info = report["input"]
        lines += [
            f"- input: `{info['path']}` (sha256 `{info['sha256'][:16]}…`, "
            f"{info['rows']} rows, {info['rejected']} rejected)",
        ]
    lines += ["", "## Configuration", ""]
    for k in sorted(report["config"]):
        lines.append(f"- {k}: {report['config'][k]}")

    groups = report["results"]["groups"]
    if groups:
        lines += ["", "## Group estimates", ""]
        kind = next(
            (g["estimate"]["kind"] for g in groups if g["estimate"]), "model"
        )
        if kind == "model":
            lines.append(
                "| group | n | implied threshold | implied cost ratio | "
                "interval | halfwidth | eff. n | flags |"
            )
            lines.append("|---|---|---|---|---|---|---|---|")
            for g in groups:
                if g["skipped"]:
                    lines.append(
                        f"| {g['group']} | {g['n']} | skipped | | | | | "
                        f"{g['skipped']['reason']} |"
                    )
                    continue
                e = g["estimate"]
                interval = e["interval"]
                span = (
                    f"[{interval['lower']:.4f}, {interval['upper']:.4f}]"
                    if interval
                    else ""
                )
                ratio = (
                    f"{e['implied_cost_ratio']:.4f}"
                    if e["implied_cost_ratio"] is not None
                    else "undefined"
                )
                flags = ", ".join(
                    f for f in ("clamped", "degenerate") if e[f]
                )
                lines.append(
                    f"| {g['group']} | {g['n']} | {e['implied_threshold']:.4f} | "
                    f"{ratio} | {span} | {e['halfwidth']:.4g} | "
                    f"{e['effective_n']:.1f} | {flags} |"
                )
        else:
            lines.append(
                "| group | n | criterion | separation | prevalence | "
                "implied threshold | cost ratio | flags |"
            )
            lines.append("|---|---|---|---|---|---|---|---|")
            for g in groups:
                if g["skipped"]:
                    lines.append(
                        f"| {g['group']} | {g['n']} | skipped | | | | | "
                        f"{g['skipped']['reason']} |"
                    )
                    continue
                e = g["estimate"]
                flags = ", ".join(
                    f
                    for f in ("low_confidence",)
                    if e[f]
                ) + (
                    ", corrected" if e["confusion"]["correction_applied"] else ""
                )
                lines.append(
                    f"| {g['group']} | {g['n']} | {e['criterion']:.4f} | "
                    f"{e['separation']:.4f} | {e['prevalence']:.4f} | "
                    f"{e['implied_threshold']:.4f} | {e['cost_ratio']:.4f} | "
                    f"{flags.strip(', ')} |"
                )

    comparisons = report["results"]["comparisons"]
    if comparisons:
        lines += ["", "## Comparisons", ""]
        lines.append(
            "| group a | group b | metric | a | b | difference | interval | "
            "excludes zero |"
        )
        lines.append("|---|---|---|---|---|---|---|---|")
        for c in comparisons:
            if c["failed"]:
                lines.append(
                    f"| {c['group_a']} | {c['group_b']} | {c['metric']} | "
                    f"failed | | | {c['reason']} | |"
                )
                continue
            interval = c["interval"]
            lines.append(
                f"| {c['group_a']} | {c['group_b']} | {c['metric']} | "
                f"{c['estimate_a']:.4f} | {c['estimate_b']:.4f} | "
                f"{c['difference']:.4f} | "
                f"[{interval['lower']:.4f}, {interval['upper']:.4f}] | "
                f"{'yes' if c['excludes_zero'] else 'no'} |"
            )

    if report["warnings"]:
        lines += ["", "## Warnings", ""]
        lines += [f"- {w}" for w in report["warnings"]]
    lines.append("")
    return "\n".join(lines)


def write_text_atomic(text: str, path) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partially written report."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fairaudit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
