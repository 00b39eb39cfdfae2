"""Training callbacks for monitoring and control."""

from typing import Dict, Optional, Sequence
from tqdm import tqdm


class Callback:
    """Base class for callbacks."""

    def __init__(self):
        self.__name__ = self.__class__.__name__

    def on_train_begin(self, logs: Optional[Dict] = None) -> None:
        pass

    def on_train_end(self, logs: Optional[Dict] = None) -> None:
        pass

    def on_epoch_end(self, epoch: int, logs: Optional[Dict] = None) -> None:
        pass


class ProgressBar(Callback):
    """tqdm progress bar over epochs."""

    def __init__(self, total: int, desc: str = 'train', disable: bool = False):
        super().__init__()
        self.total = total
        self.desc = desc
        self.disable = disable
        self._bar = None

    def on_train_begin(self, logs: Optional[Dict] = None) -> None:
        self._bar = tqdm(total=self.total, desc=self.desc, disable=self.disable,
                         leave=False)

    def on_epoch_end(self, epoch: int, logs: Optional[Dict] = None) -> None:
        if self._bar is None:
            return
        self._bar.update(1)
        if logs and 'loss' in logs:
            self._bar.set_postfix(loss=f"{logs['loss']:.4g}")

    def on_train_end(self, logs: Optional[Dict] = None) -> None:
        if self._bar is not None:
            self._bar.close()
            self._bar = None


class CallbackList:
    """Dispatches hooks to a sequence of callbacks.

    Any object exposing the hook methods is accepted, so TrainingLogger can
    be passed directly.
    """

    def __init__(self, callbacks: Optional[Sequence] = None):
        self.callbacks = list(callbacks or [])

    def on_train_begin(self, logs: Optional[Dict] = None) -> None:
        for cb in self.callbacks:
            cb.on_train_begin(logs)

    def on_epoch_end(self, epoch: int, logs: Optional[Dict] = None) -> None:
        for cb in self.callbacks:
            cb.on_epoch_end(epoch, logs)

    def on_train_end(self, logs: Optional[Dict] = None) -> None:
        for cb in self.callbacks:
            cb.on_train_end(logs)
