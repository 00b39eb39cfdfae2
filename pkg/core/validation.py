"""Input validation utilities."""

import numpy as np
from typing import Optional, Sequence
from .exceptions import ValidationError, DimensionalityError, ParameterError, NumericOverflowError
from .dtypes import FLOAT_DTYPE, Vector


def check_array(X: Vector,
                ensure_2d: bool = False,
                allow_empty: bool = False,
                name: str = 'array') -> np.ndarray:
    """Validate array input and convert it to float64."""
    try:
        X = np.asarray(X, dtype=FLOAT_DTYPE)
    except Exception as e:
        raise ValidationError(f"Error converting {name} to numpy array: {e}")

    if X.ndim == 0:
        X = X.reshape(1)

    if ensure_2d:
        if X.ndim == 1:
            X = X.reshape(1, -1)
        elif X.ndim != 2:
            raise DimensionalityError(
                f"Expected 1D or 2D {name}, got {X.ndim}D array instead"
            )

    if not allow_empty and X.size == 0:
        raise ValidationError(f"{name} must not be empty")

    return X


def check_same_length(a: np.ndarray, b: np.ndarray,
                      names: Sequence[str] = ('a', 'b')) -> None:
    """Raise if two arrays differ in shape."""
    if a.shape != b.shape:
        raise DimensionalityError(
            f"{names[0]} and {names[1]} have incompatible shapes: {a.shape} vs {b.shape}"
        )


def check_probability(value: float, name: str = 'p_d',
                      allow_one: bool = False) -> float:
    """Validate a probability in [0, 1) (or [0, 1] when allow_one)."""
    value = float(value)
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not (0.0 <= value and upper_ok):
        bound = '[0, 1]' if allow_one else '[0, 1)'
        raise ParameterError(f"{name} must be in {bound}, got {value}", parameter=name)
    return value


def check_positive_int(value: int, name: str) -> int:
    """Validate a strictly positive integer."""
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value}",
                             parameter=name)
    return int(value)


def check_finite(X: np.ndarray, what: str = 'value',
                 layer: Optional[int] = None) -> np.ndarray:
    """Raise NumericOverflowError if X contains NaN or inf."""
    if not np.all(np.isfinite(X)):
        details = {} if layer is None else {'layer': layer}
        raise NumericOverflowError(f"Non-finite {what} encountered", **details)
    return X


def check_knots(knots: Sequence[Sequence[float]], name: str = 'knots') -> np.ndarray:
    """Validate (x, y) knots of a piecewise-linear shape on [0, 1].

    The xs must be strictly increasing from 0 to 1 and every value finite.

    Returns:
        Array of shape (n_knots, 2)
    """
    try:
        points = np.asarray(knots, dtype=FLOAT_DTYPE)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} must be a list of (x, y) pairs: {e}")
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 2:
        raise ValidationError(f"{name} must hold at least two (x, y) pairs")
    if not np.all(np.isfinite(points)):
        raise ValidationError(f"{name} must be finite")
    xs = points[:, 0]
    if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
        raise ValidationError(f"{name} xs must increase strictly from 0 to 1")
    return points
