"""Input validation helpers for array-shaped inputs."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import NegativeEntry, NonPositiveExpected


def check_tables(X, counts=False):
    """Validate an ``(m, 4)`` array of tables in cell order 00, 01, 10, 11."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 4:
        raise ValueError(f"expected 4 columns (n00, n01, n10, n11), got {X.shape[1]}")
    if np.any(X < 0):
        raise NegativeEntry("tables must be non-negative")
    if counts and np.any(X != np.round(X)):
        raise ValueError("counts must be integers")
    return X


def check_pairs(X):
    """Validate an ``(m, 2)`` array of ``(n, e)``: observed and expected joint counts."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected 2 columns (n, e), got {X.shape[1]}")
    if np.any(X[:, 0] < 0):
        raise ValueError("observed counts must be non-negative")
    if np.any(X[:, 1] <= 0):
        raise NonPositiveExpected("expected counts must be positive")
    return X


def pairs_from_tables(X):
    """``(n11, E11)`` for each count row; rows with a zero margin get ``e = nan``."""
    X = check_tables(X, counts=True)
    n = X.sum(axis=1)
    row1 = X[:, 2] + X[:, 3]
    col1 = X[:, 1] + X[:, 3]
    with np.errstate(invalid="ignore", divide="ignore"):
        e = np.where((n > 0) & (row1 > 0) & (col1 > 0), row1 * col1 / n, np.nan)
    return np.column_stack([X[:, 3], e])
