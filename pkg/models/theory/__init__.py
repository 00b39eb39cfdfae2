"""Closed-form and enumerated moments of the single-layer dropout model."""

from .single_layer import (
    SingleLayerSpec,
    TheoryPrediction,
    optimal_weight,
    moments_for_weight,
    predict_moments,
    expected_mse,
    mse_derivative,
    theory_sweep,
)
from .enumeration import enumerate_moments, enumerate_squared_error

__all__ = [
    'SingleLayerSpec',
    'TheoryPrediction',
    'optimal_weight',
    'moments_for_weight',
    'predict_moments',
    'expected_mse',
    'mse_derivative',
    'theory_sweep',
    'enumerate_moments',
    'enumerate_squared_error',
]
