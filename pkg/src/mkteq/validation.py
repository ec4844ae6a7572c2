"""Input validation helpers for the estimator-facing API."""

from __future__ import annotations

import numpy as np

from .population import Population


def check_features_labels(X, y, sample_weight=None):
    """Coerce (X, y, sample_weight) to validated arrays.

    X becomes a 2-d float64 array (a 1-d input is treated as a single
    feature column), y a binary uint8 vector, sample_weight a nonnegative
    float64 vector or None. Shapes must agree and values must be finite.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got ndim={X.ndim}")
    if not np.isfinite(X).all():
        raise ValueError("X contains non-finite values")
    y = np.asarray(y).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("y must contain only 0/1 labels")
    y = y.astype(np.uint8)
    if sample_weight is not None:
        sample_weight = np.asarray(sample_weight, dtype=np.float64).reshape(-1)
        if sample_weight.shape[0] != X.shape[0]:
            raise ValueError("sample_weight length does not match X")
        if not np.isfinite(sample_weight).all() or (sample_weight < 0).any():
            raise ValueError("sample_weight must be finite and nonnegative")
    return X, y, sample_weight


def as_population(X, y, sample_weight=None) -> Population:
    """Validated population from estimator-style (X, y, sample_weight)."""
    X, y, sample_weight = check_features_labels(X, y, sample_weight)
    return Population(X, y, sample_weight)
