"""Common data types and constants."""

from typing import Union, Sequence
import numpy as np

# Type variables
Vector = Union[np.ndarray, Sequence[float]]

# All arithmetic runs in 64-bit floats
FLOAT_DTYPE = np.float64

# Constants
EPSILON = 1e-8
UINT64_MAX = 2 ** 64 - 1

SUPPORTED_SCALINGS = ['none', 'inverted']
SUPPORTED_SHAPES = ['diamond', 'saw', 'triangle', 'line', 'square']
SUPPORTED_SCENARIOS = ['single', 'mlp', 'grid']

# Exact enumeration over 2**K masks is capped here
ENUMERATION_LIMIT = 20

# MC samples are drawn in fixed blocks; a block is the unit of work and of
# RNG stream derivation
MC_BLOCK_SIZE = 4096
HISTOGRAM_BINS = 100

# Single-layer experiment
DEFAULT_UNITS = 500
DEFAULT_SINGLE_EPOCHS = 600
# Single-layer training steps more gently than the Adam defaults
DEFAULT_SINGLE_BATCH_SIZE = 64
DEFAULT_SINGLE_LEARNING_RATE = 1.2e-4
DEFAULT_SINGLE_SAMPLES = 1_000_000

# Non-linear experiment
DEFAULT_MLP_HIDDEN = [64, 64]
DEFAULT_MLP_EPOCHS = 1000
DEFAULT_MLP_SAMPLES = 300
DEFAULT_MLP_DATASET_SIZE = 32000
DEFAULT_GRID_POINTS = 101

# Default configurations
DEFAULT_ADAM_CONFIG = {
    'learning_rate': 1e-3,
    'beta1': 0.9,
    'beta2': 0.999,
    'epsilon': EPSILON
}

DEFAULT_TRAINING_CONFIG = {
    'batch_size': 32,
    'epochs': 600,
    'shuffle_seed': 0,
}
