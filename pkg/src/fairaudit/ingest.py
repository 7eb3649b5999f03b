"""File ingestion with row-level validation.

Two on-disk formats are accepted: delimited text with a header row (comma,
semicolon or tab separated) and line-delimited JSON objects with the same
field names. Decision data needs ``score`` and ``outcome`` columns; label
data needs ``label``, ``truth``, ``labeler`` and ``item``. Any remaining
columns are treated as group dimensions unless the schema restricts them.

Bad rows are either counted and dropped with a reason (``reject-row``, the
default) or abort the run (``fail``); a run whose rejection fraction
exceeds the configured cap fails either way.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .data import DecisionFrame, LabelFrame
from .errors import IngestError
from .report import file_digest

NULL_POLICIES = ("reject-row", "fail")
KINDS = ("decisions", "labels")

_RESERVED_CHARS = ("|", "=")


@dataclass(frozen=True)
class IngestSchema:
    """Column mapping and row-rejection policy for one input file."""

    kind: str
    score_column: str = "score"
    outcome_column: str = "outcome"
    label_column: str = "label"
    truth_column: str = "truth"
    labeler_column: str = "labeler"
    item_column: str = "item"
    group_columns: tuple[str, ...] | None = None
    null_policy: str = "reject-row"
    max_rejection_fraction: float = 0.01

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.null_policy not in NULL_POLICIES:
            raise ValueError(
                f"null_policy must be one of {NULL_POLICIES}, got {self.null_policy!r}"
            )
        if not 0.0 <= self.max_rejection_fraction <= 1.0:
            raise ValueError("max_rejection_fraction must be in [0, 1]")

    @property
    def required_columns(self) -> tuple[str, ...]:
        if self.kind == "decisions":
            return (self.score_column, self.outcome_column)
        return (
            self.label_column,
            self.truth_column,
            self.labeler_column,
            self.item_column,
        )


@dataclass
class IngestResult:
    frame: DecisionFrame | LabelFrame
    path: str
    digest: str
    n_rows: int
    n_accepted: int
    n_rejected: int
    rejection_reasons: dict[str, int] = field(default_factory=dict)

    def input_info(self) -> dict:
        return {
            "path": self.path,
            "sha256": self.digest,
            "rows": self.n_rows,
            "rejected": self.n_rejected,
            "rejection_reasons": dict(self.rejection_reasons),
        }


def _parse_binary(raw, column: str) -> int:
    if raw is None:
        raise ValueError(f"missing value in column {column!r}")
    if isinstance(raw, bool):
        return int(raw)
    if isinstance(raw, (int, float)):
        value = float(raw)
    else:
        text = str(raw).strip()
        if not text:
            raise ValueError(f"missing value in column {column!r}")
        try:
            value = float(text)
        except ValueError:
            raise ValueError(f"non-numeric value {text!r} in column {column!r}") from None
    if value not in (0.0, 1.0):
        raise ValueError(f"value {raw!r} in column {column!r} is not binary (0/1)")
    return int(value)


def _parse_score(raw, column: str) -> float:
    if raw is None:
        raise ValueError(f"missing value in column {column!r}")
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        value = float(raw)
    else:
        text = str(raw).strip()
        if not text:
            raise ValueError(f"missing value in column {column!r}")
        try:
            value = float(text)
        except ValueError:
            raise ValueError(f"non-numeric score {text!r} in column {column!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite score in column {column!r}")
    return value


def _parse_text(raw, column: str) -> str:
    if raw is None:
        raise ValueError(f"missing value in column {column!r}")
    text = str(raw).strip()
    if not text:
        raise ValueError(f"missing value in column {column!r}")
    return text


def _parse_category(raw, column: str) -> str:
    text = _parse_text(raw, column)
    for ch in _RESERVED_CHARS:
        if ch in text:
            raise ValueError(
                f"value {text!r} in column {column!r} contains reserved character {ch!r}"
            )
    return text


def _iter_rows(path):
    """Yield (row_number, dict) from csv-with-header or json-lines input."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".jsonl", ".ndjson"):
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"{path}: line {i}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise IngestError(f"{path}: line {i}: expected a JSON object")
                yield i, obj
        return
    with open(path, encoding="utf-8", newline="") as fh:
        sample = fh.read(65536)
        fh.seek(0)
        try:
            dialect = csv.Sniffer().sniff(sample, delimiters=",;\t")
        except csv.Error:
            dialect = csv.excel
        reader = csv.DictReader(fh, dialect=dialect)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        for i, row in enumerate(reader, start=2):  # header is line 1
            yield i, row


def _field_names(path) -> list[str]:
    for _, row in _iter_rows(path):
        return list(row.keys())
    raise IngestError(f"{path}: no data rows")


def ingest(path, schema: IngestSchema) -> IngestResult:
    """Read, validate and column-ise one input file.

    Raises
    ------
    IngestError
        Missing file or columns, zero accepted rows, a bad row under the
        ``fail`` policy, or a rejection fraction above the schema's cap.
    """
    if not os.path.exists(path):
        raise IngestError(f"input file not found: {path}")
    digest = file_digest(path)

    names = _field_names(path)
    missing = [c for c in schema.required_columns if c not in names]
    if missing:
        raise IngestError(f"{path}: missing required column(s) {missing}")
    if schema.group_columns is not None:
        absent = [c for c in schema.group_columns if c not in names]
        if absent:
            raise IngestError(f"{path}: missing group column(s) {absent}")
        group_cols = list(schema.group_columns)
    else:
        group_cols = [c for c in names if c not in schema.required_columns]

    accepted: list[tuple] = []
    reasons: dict[str, int] = {}
    n_rows = 0
    for line_no, row in _iter_rows(path):
        n_rows += 1
        try:
            accepted.append(_parse_row(row, schema, group_cols))
        except ValueError as exc:
            if schema.null_policy == "fail":
                raise IngestError(f"{path}: line {line_no}: {exc}") from exc
            reason = str(exc)
            reasons[reason] = reasons.get(reason, 0) + 1

    n_rejected = n_rows - len(accepted)
    if n_rows == 0:
        raise IngestError(f"{path}: no data rows")
    if n_rejected / n_rows > schema.max_rejection_fraction:
        raise IngestError(
            f"{path}: rejected {n_rejected}/{n_rows} rows "
            f"(cap {schema.max_rejection_fraction:.1%}); reasons: {reasons}"
        )
    if not accepted:
        raise IngestError(f"{path}: all rows rejected: {reasons}")

    frame = _build_frame(accepted, schema, group_cols)
    return IngestResult(
        frame=frame,
        path=str(path),
        digest=digest,
        n_rows=n_rows,
        n_accepted=len(accepted),
        n_rejected=n_rejected,
        rejection_reasons=reasons,
    )


def _parse_row(row: dict, schema: IngestSchema, group_cols: list[str]) -> tuple:
    groups = tuple(_parse_category(row.get(c), c) for c in group_cols)
    if schema.kind == "decisions":
        return (
            _parse_score(row.get(schema.score_column), schema.score_column),
            _parse_binary(row.get(schema.outcome_column), schema.outcome_column),
            groups,
        )
    return (
        _parse_binary(row.get(schema.label_column), schema.label_column),
        _parse_binary(row.get(schema.truth_column), schema.truth_column),
        _parse_category(row.get(schema.labeler_column), schema.labeler_column),
        _parse_text(row.get(schema.item_column), schema.item_column),
        groups,
    )


def _build_frame(rows: list[tuple], schema: IngestSchema, group_cols: list[str]):
    def group_dict(offset: int) -> dict[str, np.ndarray]:
        return {
            c: np.array([r[offset][j] for r in rows])
            for j, c in enumerate(group_cols)
        }

    if schema.kind == "decisions":
        return DecisionFrame(
            np.array([r[0] for r in rows], dtype=float),
            np.array([r[1] for r in rows], dtype=np.int8),
            group_dict(2),
        )
    return LabelFrame(
        np.array([r[0] for r in rows], dtype=np.int8),
        np.array([r[1] for r in rows], dtype=np.int8),
        np.array([r[2] for r in rows]),
        np.array([r[3] for r in rows]),
        group_dict(4),
    )


def write_decisions_csv(frame: DecisionFrame, path) -> None:
    """Emit a frame in the same format :func:`ingest` reads back."""
    _write_csv(
        path,
        ["score", "outcome", *frame.groups],
        (
            [repr(float(frame.scores[i])), int(frame.outcomes[i])]
            + [frame.groups[d][i] for d in frame.groups]
            for i in range(len(frame))
        ),
    )


def write_labels_csv(frame: LabelFrame, path) -> None:
    _write_csv(
        path,
        ["label", "truth", "labeler", "item", *frame.groups],
        (
            [
                int(frame.labels[i]),
                int(frame.truths[i]),
                frame.labelers[i],
                frame.items[i],
            ]
            + [frame.groups[d][i] for d in frame.groups]
            for i in range(len(frame))
        ),
    )


def _write_csv(path, header: list[str], rows) -> None:
    import tempfile

    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fairaudit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
