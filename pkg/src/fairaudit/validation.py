"""Input validation helpers shared across the estimators.

Rough analogue of scikit-learn's ``check_array`` family, specialised to the
shapes this library works with: 1-d float score arrays, strictly binary
outcome arrays, probability scalars, and per-record group columns.
"""

from __future__ import annotations

import math
import numbers

import numpy as np


def as_float_array(values, name: str, *, allow_empty: bool = False) -> np.ndarray:
    """Coerce to a finite 1-d float64 array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_binary_array(values, name: str, *, allow_empty: bool = False) -> np.ndarray:
    """Coerce to a 1-d int8 array of {0, 1}."""
    arr = np.asarray(values)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if arr.dtype == bool:
        return arr.astype(np.int8)
    numeric = np.asarray(arr, dtype=float)
    if numeric.size and not np.isin(numeric, (0.0, 1.0)).all():
        bad = numeric[~np.isin(numeric, (0.0, 1.0))][:3]
        raise ValueError(f"{name} must be binary (0/1); found {bad.tolist()}")
    return numeric.astype(np.int8)


def as_str_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr.astype(str)


def check_same_length(*named_arrays: tuple[str, np.ndarray]) -> int:
    """Assert all arrays share one length; returns it."""
    lengths = {name: len(arr) for name, arr in named_arrays}
    distinct = set(lengths.values())
    if len(distinct) > 1:
        raise ValueError(f"length mismatch: {lengths}")
    return distinct.pop()


def check_finite_scalar(value, name: str) -> float:
    if not isinstance(value, numbers.Real):
        raise ValueError(f"{name} must be a real number, got {type(value).__name__}")
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"{name} must be finite, got {out}")
    return out


def check_positive(value, name: str) -> float:
    out = check_finite_scalar(value, name)
    if out <= 0:
        raise ValueError(f"{name} must be > 0, got {out}")
    return out


def check_probability(value, name: str, *, inclusive: bool = False) -> float:
    out = check_finite_scalar(value, name)
    if inclusive:
        if not 0.0 <= out <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {out}")
    elif not 0.0 < out < 1.0:
        raise ValueError(f"{name} must be in the open interval (0, 1), got {out}")
    return out


def check_seed(seed, name: str = "seed") -> int:
    if not isinstance(seed, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def as_group_columns(groups, n: int) -> dict[str, np.ndarray]:
    """Normalise a grouping argument to ``{dimension: str array of length n}``.

    Accepts a single array-like (stored under dimension ``"group"``) or a
    mapping of dimension name to array-like.
    """
    if groups is None:
        return {}
    if isinstance(groups, dict):
        out = {}
        for dim, column in groups.items():
            arr = as_str_array(column, f"groups[{dim!r}]")
            if len(arr) != n:
                raise ValueError(
                    f"groups[{dim!r}] has length {len(arr)}, expected {n}"
                )
            out[str(dim)] = arr
        return out
    arr = as_str_array(groups, "groups")
    if len(arr) != n:
        raise ValueError(f"groups has length {len(arr)}, expected {n}")
    return {"group": arr}
