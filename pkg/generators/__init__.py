"""Dataset generators."""

from .synthetic import (
    GENERATOR_VERSION,
    SHAPE_FUNCTIONS,
    gen_gaussian,
    gen_function,
    knot_shape,
    shape_target,
)

__all__ = [
    'GENERATOR_VERSION',
    'SHAPE_FUNCTIONS',
    'gen_gaussian',
    'gen_function',
    'knot_shape',
    'shape_target',
]
