"""Record types and columnar containers for audit datasets.

The row-level dataclasses (:class:`DecisionRecord`, :class:`LabelRecord`)
are the interchange format; the frames hold the same data columnarly so the
estimators can stay vectorised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import GroupKey
from .validation import (
    as_binary_array,
    as_float_array,
    as_str_array,
    check_same_length,
)


@dataclass(frozen=True)
class DecisionRecord:
    """One scored decision: model score, realised binary outcome, subgroup."""

    score: float
    outcome: int
    group: GroupKey


@dataclass(frozen=True)
class LabelRecord:
    """One human label paired with expert ground truth for the same item."""

    label: int
    truth: int
    labeler: str
    item: str
    group: GroupKey


def _check_group_columns(groups: dict, n: int) -> dict[str, np.ndarray]:
    out = {}
    for dim, column in groups.items():
        arr = as_str_array(column, f"groups[{dim!r}]")
        if len(arr) != n:
            raise ValueError(f"groups[{dim!r}] has length {len(arr)}, expected {n}")
        out[str(dim)] = arr
    return out


def _partition(columns: list[np.ndarray], dims: list[str]) -> dict[GroupKey, np.ndarray]:
    """Index arrays per distinct combination of the given columns."""
    n = len(columns[0])
    codes = np.zeros(n, dtype=np.int64)
    uniques = []
    stride = 1
    for col in columns:
        vals, inv = np.unique(col, return_inverse=True)
        codes += stride * inv
        uniques.append(vals)
        stride *= len(vals)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]
    boundaries = np.flatnonzero(np.diff(sorted_codes)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    out: dict[GroupKey, np.ndarray] = {}
    for s, e in zip(starts, ends):
        idx = order[s:e]
        code = sorted_codes[s]
        pairs = []
        for dim, vals in zip(dims, uniques):
            pairs.append((dim, str(vals[code % len(vals)])))
            code //= len(vals)
        out[GroupKey(tuple(pairs))] = np.sort(idx)
    return out


class _FrameBase:
    groups: dict[str, np.ndarray]

    def _columns_for(self, dimensions: list[str]) -> list[np.ndarray]:
        missing = [d for d in dimensions if d not in self._all_dims()]
        if missing:
            raise ValueError(
                f"unknown grouping dimension(s) {missing}; "
                f"available: {sorted(self._all_dims())}"
            )
        return [self._dim_column(d) for d in dimensions]

    def _all_dims(self) -> set[str]:
        return set(self.groups)

    def _dim_column(self, dim: str) -> np.ndarray:
        return self.groups[dim]

    def partition(self, dimensions) -> dict[GroupKey, np.ndarray]:
        """Map each distinct projected group key to its (sorted) row indices."""
        dims = list(dimensions)
        if not dims:
            raise ValueError("partition requires at least one dimension")
        return _partition(self._columns_for(dims), dims)

    def mask_for(self, key: GroupKey) -> np.ndarray:
        """Boolean row mask matching every dimension of the key."""
        mask = np.ones(len(self), dtype=bool)
        for dim, value in key.dims:
            column = self._columns_for([dim])[0]
            mask &= column == value
        return mask


@dataclass
class DecisionFrame(_FrameBase):
    """Columnar set of scored decisions."""

    scores: np.ndarray
    outcomes: np.ndarray
    groups: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.scores = as_float_array(self.scores, "scores")
        self.outcomes = as_binary_array(self.outcomes, "outcomes")
        n = check_same_length(("scores", self.scores), ("outcomes", self.outcomes))
        self.groups = _check_group_columns(self.groups, n)

    def __len__(self) -> int:
        return len(self.scores)

    def subset(self, index) -> "DecisionFrame":
        return DecisionFrame(
            self.scores[index],
            self.outcomes[index],
            {d: col[index] for d, col in self.groups.items()},
        )

    def to_records(self) -> list[DecisionRecord]:
        dims = list(self.groups)
        return [
            DecisionRecord(
                float(self.scores[i]),
                int(self.outcomes[i]),
                GroupKey(tuple((d, str(self.groups[d][i])) for d in dims)),
            )
            for i in range(len(self))
        ]

    @classmethod
    def from_records(cls, records) -> "DecisionFrame":
        records = list(records)
        if not records:
            raise ValueError("records must be nonempty")
        dims = records[0].group.dimensions
        return cls(
            np.array([r.score for r in records], dtype=float),
            np.array([r.outcome for r in records], dtype=np.int8),
            {d: np.array([r.group.get(d) for r in records]) for d in dims},
        )

    @classmethod
    def concat(cls, frames) -> "DecisionFrame":
        frames = list(frames)
        dims = list(frames[0].groups)
        if any(list(f.groups) != dims for f in frames):
            raise ValueError("frames must share the same group dimensions")
        return cls(
            np.concatenate([f.scores for f in frames]),
            np.concatenate([f.outcomes for f in frames]),
            {d: np.concatenate([f.groups[d] for f in frames]) for d in dims},
        )


@dataclass
class LabelFrame(_FrameBase):
    """Columnar set of (label, ground truth) pairs with provenance."""

    labels: np.ndarray
    truths: np.ndarray
    labelers: np.ndarray
    items: np.ndarray
    groups: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.labels = as_binary_array(self.labels, "labels")
        self.truths = as_binary_array(self.truths, "truths")
        self.labelers = as_str_array(self.labelers, "labelers")
        self.items = as_str_array(self.items, "items")
        n = check_same_length(
            ("labels", self.labels),
            ("truths", self.truths),
            ("labelers", self.labelers),
            ("items", self.items),
        )
        self.groups = _check_group_columns(self.groups, n)

    def __len__(self) -> int:
        return len(self.labels)

    def _all_dims(self) -> set[str]:
        return set(self.groups) | {"labeler"}

    def _dim_column(self, dim: str) -> np.ndarray:
        # "labeler" acts as an implicit grouping dimension
        return self.labelers if dim == "labeler" else self.groups[dim]

    def subset(self, index) -> "LabelFrame":
        return LabelFrame(
            self.labels[index],
            self.truths[index],
            self.labelers[index],
            self.items[index],
            {d: col[index] for d, col in self.groups.items()},
        )

    def to_records(self) -> list[LabelRecord]:
        dims = list(self.groups)
        return [
            LabelRecord(
                int(self.labels[i]),
                int(self.truths[i]),
                str(self.labelers[i]),
                str(self.items[i]),
                GroupKey(tuple((d, str(self.groups[d][i])) for d in dims)),
            )
            for i in range(len(self))
        ]

    @classmethod
    def from_records(cls, records) -> "LabelFrame":
        records = list(records)
        if not records:
            raise ValueError("records must be nonempty")
        dims = records[0].group.dimensions
        return cls(
            np.array([r.label for r in records], dtype=np.int8),
            np.array([r.truth for r in records], dtype=np.int8),
            np.array([r.labeler for r in records]),
            np.array([r.item for r in records]),
            {d: np.array([r.group.get(d) for r in records]) for d in dims},
        )

    @classmethod
    def concat(cls, frames) -> "LabelFrame":
        frames = list(frames)
        dims = list(frames[0].groups)
        if any(list(f.groups) != dims for f in frames):
            raise ValueError("frames must share the same group dimensions")
        return cls(
            np.concatenate([f.labels for f in frames]),
            np.concatenate([f.truths for f in frames]),
            np.concatenate([f.labelers for f in frames]),
            np.concatenate([f.items for f in frames]),
            {d: np.concatenate([f.groups[d] for f in frames]) for d in dims},
        )


@dataclass(frozen=True)
class GroupSkip:
    """Placeholder result for a partition that could not be audited."""

    reason: str
    n: int
