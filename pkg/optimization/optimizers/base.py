"""Base optimizer implementations."""

from typing import List, Optional
import numpy as np

from core import get_logger
from core.base import Params
from core.config import AdamConfig
from core.exceptions import DimensionalityError, NumericOverflowError
from models.neural.network import Gradient, NetworkState

logger = get_logger(__name__)


class Adam:
    """Adam optimizer with bias-corrected moment estimates.

    The first/second moment accumulators are shaped like the NetworkState
    and start at zero; ``step_count`` is incremented once per update.
    """

    def __init__(self, config: Optional[AdamConfig] = None):
        self.config = config or AdamConfig()
        self.m: Optional[List[Params]] = None  # First moment
        self.v: Optional[List[Params]] = None  # Second moment
        self.step_count = 0

    @property
    def learning_rate(self) -> float:
        return self.config.learning_rate

    def reset_state(self) -> None:
        """Reset optimizer state."""
        self.m = None
        self.v = None
        self.step_count = 0

    def _validate_inputs(self, state: NetworkState, grad: Gradient) -> None:
        if len(state.params) != len(grad.params):
            raise DimensionalityError(
                f"Gradient has {len(grad.params)} layers, state has {len(state.params)}")
        for i, (p, g) in enumerate(zip(state.params, grad.params)):
            if p.keys() != g.keys() or any(p[k].shape != g[k].shape for k in p):
                raise DimensionalityError(f"Gradient does not match parameters of layer {i}",
                                          layer=i)
            for name, value in g.items():
                if not np.all(np.isfinite(value)):
                    raise NumericOverflowError(f"Non-finite gradient for {name} in layer {i}",
                                               layer=i)

    def step(self, state: NetworkState, grad: Gradient, inplace: bool = False) -> NetworkState:
        """Apply one Adam update.

        Args:
            state: Current parameters
            grad: Gradient shaped like ``state``
            inplace: Update ``state`` itself instead of a copy

        Returns:
            The updated state

        Raises:
            DimensionalityError: If grad and state are not congruent
            NumericOverflowError: If the gradient contains NaN or inf
        """
        self._validate_inputs(state, grad)
        if self.m is None:
            self.m = [{k: np.zeros_like(v) for k, v in p.items()} for p in state.params]
            self.v = [{k: np.zeros_like(v) for k, v in p.items()} for p in state.params]

        cfg = self.config
        self.step_count += 1
        bc1 = 1.0 - cfg.beta1 ** self.step_count
        bc2 = 1.0 - cfg.beta2 ** self.step_count

        new_state = state if inplace else state.copy()
        for params, grads, m, v in zip(new_state.params, grad.params, self.m, self.v):
            for k, g in grads.items():
                m[k] *= cfg.beta1
                m[k] += (1.0 - cfg.beta1) * g
                v[k] *= cfg.beta2
                v[k] += (1.0 - cfg.beta2) * (g * g)
                m_hat = m[k] / bc1
                v_hat = v[k] / bc2
                params[k] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
        return new_state


def adam_step(state: NetworkState, grad: Gradient, optimizer: Adam) -> NetworkState:
    """Functional form of Adam.step; returns a new state."""
    return optimizer.step(state, grad)
