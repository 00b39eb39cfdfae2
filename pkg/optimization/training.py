"""Mini-batch training of dropout networks with MSE loss and Adam."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core import get_logger
from core.callbacks import CallbackList
from core.config import AdamConfig, TrainConfig
from core.data import Dataset
from core.exceptions import NumericOverflowError, TrainingDivergedError, ValidationError
from models.neural.dropout import MaskSource
from models.neural.network import NetworkDef, NetworkState, backward_pass, forward_pass
from .losses import MSELoss
from .optimizers.base import Adam
from utils.decorators import timer
from utils.io import save_csv

logger = get_logger(__name__)


@dataclass
class LossTrace:
    """Per-epoch mean training loss."""
    losses: List[float] = field(default_factory=list)

    def append(self, loss: float) -> None:
        self.losses.append(float(loss))

    @property
    def final(self) -> float:
        return self.losses[-1] if self.losses else float('nan')

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write ``epoch,mean_loss`` rows, epochs counted from 1."""
        return save_csv(enumerate(self.losses, start=1), path,
                        header=['epoch', 'mean_loss'])


def epoch_permutation(shuffle_seed: int, epoch: int, n: int) -> np.ndarray:
    """Sample order of one epoch; depends only on (shuffle_seed, epoch)."""
    seq = np.random.SeedSequence(int(shuffle_seed), spawn_key=(int(epoch),))
    return np.random.Generator(np.random.PCG64(seq)).permutation(n)


@timer
def train(net_def: NetworkDef,
          state: NetworkState,
          dataset: Union[Dataset, Tuple[np.ndarray, np.ndarray]],
          train_cfg: Optional[TrainConfig] = None,
          adam_cfg: Optional[AdamConfig] = None,
          mask_source: Optional[MaskSource] = None,
          callbacks: Optional[Sequence] = None) -> Tuple[NetworkState, LossTrace]:
    """Train a dropout network by mini-batch Adam on the MSE loss.

    Every sample gets a fresh dropout mask on every forward pass. Epoch
    ``e`` shuffles with stream (shuffle_seed, e) and draws its masks from
    ``mask_source`` with draw index ``e``, so the result depends only on the
    seeds, the configs and the data. The last partial batch of an epoch is
    used.

    Args:
        net_def: Architecture
        state: Initial parameters (not modified)
        dataset: A Dataset, or an (inputs, targets) pair of 2D arrays
        train_cfg: Epochs, batch size and shuffle seed
        adam_cfg: Optimizer hyperparameters
        mask_source: Source of dropout masks
        callbacks: Objects with on_train_begin/on_epoch_end/on_train_end hooks

    Returns:
        Tuple of (trained state, per-epoch loss trace)

    Raises:
        TrainingDivergedError: If the loss becomes non-finite
    """
    train_cfg = train_cfg or TrainConfig()
    mask_source = mask_source or MaskSource(state.rng_seed)
    net_def.validate()
    state.check_shapes(net_def)

    if isinstance(dataset, Dataset):
        inputs, targets = dataset.inputs(net_def.input_dim), dataset.targets()
    else:
        inputs, targets = (np.asarray(a, dtype=float) for a in dataset)
    if len(inputs) == 0 or len(inputs) != len(targets):
        raise ValidationError("Training data must be non-empty with one target per input")
    targets = targets.reshape(len(targets), -1)

    n = len(inputs)
    batch_size = min(train_cfg.batch_size, n)
    optimizer = Adam(adam_cfg)
    loss_fn = MSELoss()
    trace = LossTrace()
    callbacks = CallbackList(callbacks)
    state = state.copy()

    logger.debug(f"Training on {n} samples for {train_cfg.epochs} epochs "
                 f"(batch_size={batch_size})")
    callbacks.on_train_begin({'n': n, 'epochs': train_cfg.epochs})
    for epoch in range(train_cfg.epochs):
        order = epoch_permutation(train_cfg.shuffle_seed, epoch, n)
        mask_rng = mask_source.generator(epoch)
        total = 0.0
        try:
            for start in range(0, n, batch_size):
                idx = order[start:start + batch_size]
                xb, yb = inputs[idx], targets[idx]
                masks = net_def.draw_masks_from(mask_rng, batch=len(idx))
                pred, caches, _ = forward_pass(state, net_def, xb, masks)
                loss = loss_fn(pred, yb)
                if not np.isfinite(loss):
                    raise TrainingDivergedError(f"Loss became non-finite in epoch {epoch + 1}",
                                                epoch=epoch + 1)
                total += loss * len(idx)
                grad = backward_pass(state, net_def, caches, loss_fn.gradient(pred, yb))
                optimizer.step(state, grad, inplace=True)
        except NumericOverflowError as e:
            raise TrainingDivergedError(f"Training diverged in epoch {epoch + 1}: {e.message}",
                                        epoch=epoch + 1, **e.details)

        epoch_loss = total / n
        trace.append(epoch_loss)
        callbacks.on_epoch_end(epoch, {'loss': epoch_loss})

    callbacks.on_train_end({'loss': trace.final})
    return state, trace
