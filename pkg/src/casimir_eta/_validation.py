"""Small input-validation helpers used across modules."""

import numpy as np

from .exceptions import DomainError


def check_positive(value, name):
    """Return ``value`` as float, raising :class:`DomainError` unless > 0."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be non-negative and finite, got {value!r}")
    return value


def as_positive_array(values, name):
    """Convert to a float ndarray and require every entry to be > 0."""
    arr = np.asarray(values, dtype=float)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise DomainError(f"{name} must be positive and finite")
    return arr


def as_nonnegative_array(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr >= 0.0)):
        raise DomainError(f"{name} must be non-negative and finite")
    return arr


def as_1d(X, name="X"):
    """Accept a scalar, a 1-D array or an ``(n, 1)`` column and return 1-D."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1)
    if arr.ndim == 2 and arr.shape[1] == 1:
        return arr[:, 0]
    if arr.ndim != 1:
        raise DomainError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
    return arr
