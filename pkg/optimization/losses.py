"""Loss functions."""

import numpy as np

from core.exceptions import ValidationError
from core.validation import check_array, check_same_length


def _validate_inputs(pred: np.ndarray, target: np.ndarray):
    pred = check_array(pred, allow_empty=True, name='pred')
    target = check_array(target, allow_empty=True, name='target')
    check_same_length(pred, target, names=('pred', 'target'))
    if pred.size == 0:
        raise ValidationError("MSE needs at least one element")
    return pred, target


def mse_loss(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean squared residual over all elements."""
    pred, target = _validate_inputs(pred, target)
    return float(np.mean((pred - target) ** 2))


class MSELoss:
    """Mean squared error loss with its gradient w.r.t. the predictions."""

    name = 'mse'

    def __call__(self, pred: np.ndarray, target: np.ndarray) -> float:
        return mse_loss(pred, target)

    def gradient(self, pred: np.ndarray, target: np.ndarray) -> np.ndarray:
        """d/dpred of mse_loss: 2 (pred - target) / m."""
        pred, target = _validate_inputs(pred, target)
        return 2.0 * (pred - target) / pred.size
