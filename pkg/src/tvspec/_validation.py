"""Input checks shared by the estimator classes."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .timeseries import TimeSeries


def check_series_matrix(X, min_length=4):
    """2-D float array with one series per row, at least two rows."""
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], TimeSeries):
        lengths = {len(x) for x in X}
        if len(lengths) != 1:
            raise ValueError("all series must have the same length")
        X = np.vstack([x.samples for x in X])
    return check_array(X, dtype=float, ensure_min_samples=2, ensure_min_features=min_length)


def check_record(x):
    """1-D finite float array; a :class:`TimeSeries` passes through its samples."""
    if isinstance(x, TimeSeries):
        return x.samples
    arr = check_array(np.asarray(x, dtype=float).reshape(1, -1), dtype=float, ensure_min_features=2)
    return arr.ravel()


def check_square(D):
    D = check_array(D, dtype=float)
    if D.shape[0] != D.shape[1]:
        raise ValueError(f"precomputed dissimilarities must be square, got {D.shape}")
    return D
