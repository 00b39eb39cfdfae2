"""Losses, optimizers and the training loop."""

from .optimizers import Adam, adam_step
from .losses import MSELoss, mse_loss
from .training import LossTrace, epoch_permutation, train

__all__ = [
    'Adam',
    'adam_step',
    'MSELoss',
    'mse_loss',
    'LossTrace',
    'epoch_permutation',
    'train',
]
