"""Core interfaces and base classes for the network engine."""

from abc import ABC, abstractmethod
import numpy as np
from typing import Optional, Dict, Any, Tuple

from .logging import get_logger

# Configure logging
logger = get_logger(__name__)

Params = Dict[str, np.ndarray]


class Layer(ABC):
    """Base class for neural network layer definitions.

    A layer definition is immutable and holds no parameters or activations:
    parameters are passed in from a NetworkState and whatever the backward
    pass needs is returned from ``forward`` as an opaque cache. This keeps
    forward and backward pure functions of their inputs.
    """

    trainable: bool = False
    kind: str = 'layer'

    @abstractmethod
    def output_dim(self, input_dim: int) -> int:
        """Width of the layer output given the width of its input.

        Raises:
            DimensionalityError: If input_dim is incompatible with the layer
        """

    @abstractmethod
    def forward(self, params: Params, x: np.ndarray,
                mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Any]:
        """Forward pass computation.

        Args:
            params: Layer parameters (empty for parameter-free layers)
            x: Layer inputs of shape (batch, input_dim)
            mask: Binary mask, only used by dropout layers

        Returns:
            Tuple of (outputs, cache for the backward pass)
        """

    @abstractmethod
    def backward(self, params: Params, cache: Any,
                 upstream: np.ndarray) -> Tuple[np.ndarray, Params]:
        """Backward pass computation.

        Args:
            params: Layer parameters used in the forward pass
            cache: Cache returned by ``forward``
            upstream: Gradient w.r.t. the layer output, shape (batch, output_dim)

        Returns:
            Tuple of (gradient w.r.t. the layer input, parameter gradients)
        """

    def init_params(self, rng: np.random.Generator) -> Params:
        """Initial parameter values; parameter-free layers return {}."""
        return {}

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON-serializable description of the layer."""
