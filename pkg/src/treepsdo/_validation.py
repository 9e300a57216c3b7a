"""Input validation shared by the estimators."""
import numbers

import numpy as np

__all__ = ["check_complex_array", "check_positive_int", "check_n_features"]


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_complex_array(X, name="X", ndim=2):
    """Complex ``ndim``-array with finite entries.

    scikit-learn's ``check_array`` rejects complex input, which is the natural
    type here, so this does the equivalent checks by hand.  A 1-D input to a
    2-D check is treated as a single sample.
    """
    X = np.asarray(X)
    if X.dtype == object or not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise TypeError(f"{name} must be numeric, got dtype {X.dtype}")
    X = X.astype(complex, copy=False)
    if ndim == 2 and X.ndim == 1:
        X = X[None, :]
    if X.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {X.shape}")
    if X.size and not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinity")
    return X


def check_n_features(X, expected, what):
    if X.shape[-1] != expected:
        raise ValueError(f"expected {expected} {what} per sample, got {X.shape[-1]}")
