"""Summary statistics used to score MC dropout runs."""

import numpy as np
from scipy import stats

from .exceptions import ValidationError


def _validate_inputs(a: np.ndarray, b: np.ndarray) -> None:
    """Validate inputs to paired metric functions."""
    if a.shape != b.shape:
        raise ValidationError(f"Shape mismatch: {a.shape} != {b.shape}")
    if len(a) == 0:
        raise ValidationError("Empty arrays are not supported")


def coefficient_of_variation(values: np.ndarray) -> float:
    """std/|mean| of a set of values; 0 for all-zero input."""
    values = np.asarray(values, dtype=float).reshape(-1)
    mean = np.mean(values)
    if mean == 0:
        return 0.0 if np.all(values == 0) else float('inf')
    return float(np.std(values) / abs(mean))


def weight_dispersion(weights: np.ndarray) -> float:
    """Spread of parallel weights around their common value.

    Dropout-trained parallel weights drift toward a shared value; this is
    std(w)/|mean(w)| over the given weights.
    """
    return coefficient_of_variation(weights)


def pearson_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson r, NaN when either input is constant."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    _validate_inputs(a, b)
    if len(a) < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
        return float('nan')
    return float(stats.pearsonr(a, b)[0])


def relative_error(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)
