"""Core components of the MC-dropout lab."""

__version__ = '0.1.0'

from .base import Layer, Params
from .config import (
    AdamConfig, TrainConfig, DatasetConfig, NetworkConfig, SeedConfig,
    GridConfig, ExperimentConfig, ConfigManager
)
from .exceptions import (
    MCDLabError, ValidationError, DimensionalityError, ParameterError,
    BoundExceededError, ConfigurationError, NumericOverflowError,
    TrainingDivergedError
)
from .validation import (
    check_array, check_same_length, check_probability, check_positive_int,
    check_finite, check_knots
)
from .callbacks import Callback, ProgressBar, CallbackList
from .logging import get_logger, set_log_level, TrainingLogger
from .metrics import (
    coefficient_of_variation, weight_dispersion, pearson_correlation,
    relative_error
)
from .dtypes import (
    Vector, FLOAT_DTYPE, EPSILON,
    SUPPORTED_SCALINGS, SUPPORTED_SHAPES, SUPPORTED_SCENARIOS,
    DEFAULT_ADAM_CONFIG, DEFAULT_TRAINING_CONFIG
)
from .data import Dataset, load_dataset, save_dataset

__all__ = [
    # Base classes
    'Layer', 'Params',

    # Configuration
    'AdamConfig', 'TrainConfig', 'DatasetConfig', 'NetworkConfig',
    'SeedConfig', 'GridConfig', 'ExperimentConfig', 'ConfigManager',

    # Exceptions
    'MCDLabError', 'ValidationError', 'DimensionalityError', 'ParameterError',
    'BoundExceededError', 'ConfigurationError', 'NumericOverflowError',
    'TrainingDivergedError',

    # Validation
    'check_array', 'check_same_length', 'check_probability',
    'check_positive_int', 'check_finite', 'check_knots',

    # Callbacks
    'Callback', 'ProgressBar', 'CallbackList',

    # Logging
    'get_logger', 'set_log_level', 'TrainingLogger',

    # Metrics
    'coefficient_of_variation', 'weight_dispersion', 'pearson_correlation',
    'relative_error',

    # Types and Constants
    'Vector', 'FLOAT_DTYPE', 'EPSILON',
    'SUPPORTED_SCALINGS', 'SUPPORTED_SHAPES', 'SUPPORTED_SCENARIOS',
    'DEFAULT_ADAM_CONFIG', 'DEFAULT_TRAINING_CONFIG',

    # Data
    'Dataset', 'load_dataset', 'save_dataset',
]
