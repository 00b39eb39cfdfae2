"""Seeded generators for the constant-target and 1D function datasets.

Function datasets live on x in [0, 1] with y in [0, 1]:

- diamond:  y = 0.5 + (0.5 - |x - 0.5|) u, u ~ Uniform(-1, 1); E[y | x] = 0.5
- saw:      y = frac(3x), a three-tooth sawtooth
- triangle: y = 1 - 2 |x - 0.5|, apex at x = 0.5
- line:     y = x
- square:   y = 1 if frac(2x) < 0.5 else 0

All shapes except diamond are noise-free. A list of (x, y) knots replaces a
shape with the noise-free piecewise-linear curve through them.
"""

from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from core import get_logger
from core.data import Dataset
from core.exceptions import ParameterError, ValidationError
from core.validation import check_knots, check_positive_int

logger = get_logger(__name__)

GENERATOR_VERSION = '1'


def _saw(x: np.ndarray) -> np.ndarray:
    return np.mod(3.0 * x, 1.0)


def _triangle(x: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.abs(x - 0.5)


def _line(x: np.ndarray) -> np.ndarray:
    return x.copy()


def _square(x: np.ndarray) -> np.ndarray:
    return (np.mod(2.0 * x, 1.0) < 0.5).astype(float)


def _diamond_mean(x: np.ndarray) -> np.ndarray:
    return np.full_like(x, 0.5)


def _diamond_halfwidth(x: np.ndarray) -> np.ndarray:
    return 0.5 - np.abs(x - 0.5)


# Noise-free targets; for diamond this is the conditional mean
SHAPE_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    'diamond': _diamond_mean,
    'saw': _saw,
    'triangle': _triangle,
    'line': _line,
    'square': _square,
}

Knots = Sequence[Sequence[float]]


def knot_shape(knots: Knots) -> Callable[[np.ndarray], np.ndarray]:
    """Piecewise-linear shape through (x, y) knots covering [0, 1]."""
    points = check_knots(knots)
    return lambda x: np.interp(x, points[:, 0], points[:, 1])


def _shape_function(shape: str, knots: Optional[Knots]) -> Callable[[np.ndarray], np.ndarray]:
    if knots is not None:
        return knot_shape(knots)
    if shape not in SHAPE_FUNCTIONS:
        raise ValidationError(f"Unknown shape: {shape!r}", shape=shape)
    return SHAPE_FUNCTIONS[shape]


def shape_target(shape: str, xs: np.ndarray, knots: Optional[Knots] = None) -> np.ndarray:
    """E[y | x] of a shape at the given points.

    ``knots`` replaces the named shape's definition.
    """
    return _shape_function(shape, knots)(np.asarray(xs, dtype=float))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def gen_gaussian(mu: float, sigma: float, n: int, seed: int) -> Dataset:
    """n i.i.d. N(mu, sigma^2) targets without inputs.

    Raises:
        ParameterError: If sigma is negative
    """
    n = check_positive_int(n, 'n')
    if sigma < 0:
        raise ParameterError(f"sigma must be non-negative, got {sigma}", parameter='sigma')
    ys = _rng(seed).normal(mu, sigma, n) if sigma > 0 else np.full(n, float(mu))
    logger.debug(f"Generated gaussian dataset N({mu}, {sigma}) with n={n}")
    return Dataset(ys=ys, generator_id='gaussian', seed=int(seed),
                   params={'mu': float(mu), 'sigma': float(sigma),
                           'version': GENERATOR_VERSION})


def gen_function(shape: str, n: int, seed: int, knots: Optional[Knots] = None) -> Dataset:
    """n samples of a 1D shape with x ~ Uniform[0, 1].

    Given ``knots``, targets follow the piecewise-linear shape through them
    without noise, whatever ``shape`` names; ``shape`` is then only the
    dataset's id.

    Raises:
        ValidationError: If the shape id is unknown or the knots are invalid
    """
    func = _shape_function(shape, knots)
    n = check_positive_int(n, 'n')
    rng = _rng(seed)
    xs = rng.uniform(0.0, 1.0, n)
    ys = func(xs)
    params: Dict[str, Any] = {'shape': shape, 'version': GENERATOR_VERSION}
    if knots is not None:
        params['knots'] = [[float(x), float(y)] for x, y in knots]
    elif shape == 'diamond':
        ys = ys + _diamond_halfwidth(xs) * rng.uniform(-1.0, 1.0, n)
    logger.debug(f"Generated {shape} dataset with n={n}")
    return Dataset(ys=ys, xs=xs, generator_id=shape, seed=int(seed), params=params)
