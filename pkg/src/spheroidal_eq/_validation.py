"""Input validation shared by the estimator facade and the CLI."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DomainError


def check_points(X, n: int | None = None, min_samples: int = 1, name: str = "X") -> np.ndarray:
    """2-d float array of points, optionally with exactly ``n`` columns."""
    try:
        arr = check_array(X, dtype=np.float64, ensure_min_samples=min_samples, input_name=name)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    if n is not None and arr.shape[1] != n:
        raise DomainError(f"{name} has {arr.shape[1]} columns, expected n={n}")
    return arr


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_positive_float(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a number, got {value!r}") from exc
    if not (v > 0 and np.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return v
