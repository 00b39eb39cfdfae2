"""Optimization algorithms package."""

from .base import Adam, adam_step

__all__ = [
    'Adam',
    'adam_step',
]
