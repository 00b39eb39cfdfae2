"""Exact output moments by summing over every dropout mask."""

from typing import Tuple

import numpy as np

from core.dtypes import ENUMERATION_LIMIT, FLOAT_DTYPE
from core.exceptions import BoundExceededError, DimensionalityError
from core.validation import check_array, check_positive_int, check_probability

# Masks are materialized 2**16 at a time
_CHUNK_BITS = 16


def _mask_chunks(K: int):
    """Yield (masks, ones_count) blocks covering all 2**K binary masks."""
    bits = np.arange(K, dtype=np.int64)
    total = 1 << K
    chunk = 1 << min(K, _CHUNK_BITS)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        masks = ((codes[:, None] >> bits) & 1).astype(FLOAT_DTYPE)
        yield masks, masks.sum(axis=1)


def _validate(K: int, p_d: float, weights) -> Tuple[int, float, np.ndarray]:
    K = check_positive_int(K, 'K')
    if K > ENUMERATION_LIMIT:
        raise BoundExceededError(
            f"Enumeration is limited to K <= {ENUMERATION_LIMIT}, got K={K}",
            K=K, limit=ENUMERATION_LIMIT)
    p_d = check_probability(p_d, 'p_d')
    weights = check_array(weights, name='weights').reshape(-1)
    if weights.size != K:
        raise DimensionalityError(f"Expected {K} weights, got {weights.size}")
    return K, p_d, weights


def _moment_sums(K: int, p_d: float, weights: np.ndarray, center: float):
    p = 1.0 - p_d
    total_prob = s1 = s2 = 0.0
    for masks, ones in _mask_chunks(K):
        prob = p ** ones * p_d ** (K - ones)
        f = masks @ weights - center
        total_prob += prob.sum()
        s1 += prob @ f
        s2 += prob @ (f * f)
    return total_prob, s1, s2


def enumerate_moments(K: int, p_d: float, weights) -> Tuple[float, float]:
    """Exact (E[f], Var[f]) of f = sum_k d_k w_k over all 2**K masks.

    Each mask is weighted by p**ones * p_d**zeros. Weights need not be
    equal.

    Raises:
        BoundExceededError: If K exceeds the enumeration limit
    """
    K, p_d, weights = _validate(K, p_d, weights)
    _, mean, _ = _moment_sums(K, p_d, weights, 0.0)
    # Second pass around the mean keeps the variance free of cancellation
    _, _, var = _moment_sums(K, p_d, weights, mean)
    return float(mean), float(max(var, 0.0))


def enumerate_squared_error(K: int, p_d: float, weights, y_bar: float) -> float:
    """Exact E[(f - y_bar)^2] over all 2**K masks."""
    K, p_d, weights = _validate(K, p_d, weights)
    _, _, s2 = _moment_sums(K, p_d, weights, float(y_bar))
    return float(s2)
