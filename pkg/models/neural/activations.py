"""Activation function implementations."""

from dataclasses import dataclass
import numpy as np
from typing import Any, Dict, Optional, Tuple

from core import Layer
from core.base import Params


@dataclass(frozen=True)
class ReLU(Layer):
    """ReLU activation layer."""

    kind = 'relu'

    def output_dim(self, input_dim: int) -> int:
        return input_dim

    def forward(self, params: Params, x: np.ndarray,
                mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Any]:
        active = x > 0
        return np.where(active, x, 0.0), active

    def backward(self, params: Params, cache: Any,
                 upstream: np.ndarray) -> Tuple[np.ndarray, Params]:
        return upstream * cache, {}

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind}

