"""Dense and dropout layer definitions."""

from dataclasses import dataclass
import numpy as np
from typing import Any, Dict, Optional, Tuple

from core import Layer
from core.base import Params
from core.dtypes import FLOAT_DTYPE
from core.exceptions import DimensionalityError, ValidationError
from .dropout import DropoutSpec, apply_mask


@dataclass(frozen=True)
class Dense(Layer):
    """Fully connected layer computing x @ W (+ b).

    W has shape (in_dim, out_dim); the optional bias has shape (out_dim,).
    """
    in_dim: int
    out_dim: int
    has_bias: bool = True

    trainable = True
    kind = 'dense'

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ValidationError(
                f"Dense dims must be positive, got ({self.in_dim}, {self.out_dim})")

    def output_dim(self, input_dim: int) -> int:
        if input_dim != self.in_dim:
            raise DimensionalityError(
                f"Dense layer expects {self.in_dim} inputs, got {input_dim}")
        return self.out_dim

    def init_params(self, rng: np.random.Generator) -> Params:
        """Uniform weights in +-sqrt(1/fan_in), zero bias."""
        limit = np.sqrt(1.0 / self.in_dim)
        params = {'W': rng.uniform(-limit, limit, (self.in_dim, self.out_dim))}
        if self.has_bias:
            params['b'] = np.zeros(self.out_dim, dtype=FLOAT_DTYPE)
        return params

    def forward(self, params: Params, x: np.ndarray,
                mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Any]:
        z = x @ params['W']
        if self.has_bias:
            z = z + params['b']
        return z, x

    def backward(self, params: Params, cache: Any,
                 upstream: np.ndarray) -> Tuple[np.ndarray, Params]:
        x = cache
        grads = {'W': x.T @ upstream}
        if self.has_bias:
            grads['b'] = upstream.sum(axis=0)
        return upstream @ params['W'].T, grads

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'in_dim': self.in_dim, 'out_dim': self.out_dim,
                'has_bias': self.has_bias}


@dataclass(frozen=True)
class Dropout(Layer):
    """Dropout layer; the mask is supplied by the caller on every pass."""
    spec: DropoutSpec

    kind = 'dropout'

    def output_dim(self, input_dim: int) -> int:
        return input_dim

    def forward(self, params: Params, x: np.ndarray,
                mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Any]:
        if mask is None:
            return x, None
        # A single mask row is shared by every sample of the batch
        try:
            mask = np.broadcast_to(mask, x.shape)
        except ValueError:
            raise DimensionalityError(f"Mask shape {np.shape(mask)} does not fit input {x.shape}")
        return apply_mask(x, mask, self.spec), mask

    def backward(self, params: Params, cache: Any,
                 upstream: np.ndarray) -> Tuple[np.ndarray, Params]:
        if cache is None:
            return upstream, {}
        return apply_mask(upstream, cache, self.spec), {}

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'p_d': self.spec.p_d, 'scaling': self.spec.scaling}
