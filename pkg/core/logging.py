"""Logging configuration and utilities."""

import logging
import sys
from typing import Optional, Dict, List
from pathlib import Path

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Level for loggers created after set_log_level
_default_level: int = logging.INFO


def get_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """Get or create logger with consistent formatting.

    Log lines go to stderr; stdout is left to command output.
    """
    logger = logging.getLogger(name)

    if not logger.handlers:
        logger.setLevel(_default_level if level is None else level)

        # Console handler
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.NOTSET)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT))

        logger.addHandler(console_handler)
        logger.propagate = False

    return logger


def set_log_level(level: str) -> None:
    """Set the level on every logger created through get_logger, now and later."""
    global _default_level
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    _default_level = numeric
    for name, logger in logging.Logger.manager.loggerDict.items():
        if isinstance(logger, logging.Logger) and logger.handlers and not logger.propagate:
            logger.setLevel(numeric)


class TrainingLogger:
    """Logger for model training progress.

    Keeps the per-epoch history and, when a log directory is given, mirrors
    the epoch lines into ``<log_dir>/<run_name>.log``.
    """

    def __init__(self, run_name: str, log_dir: Optional[str] = None,
                 every: int = 1):
        self.run_name = run_name
        self.every = max(1, every)
        self.logger = get_logger(f"training.{run_name}")
        self.history: Dict[str, List[float]] = {'loss': []}
        self._file_handler = None

        if log_dir is not None:
            self.log_dir = Path(log_dir)
            self.log_dir.mkdir(parents=True, exist_ok=True)
            self._file_handler = logging.FileHandler(self.log_dir / f"{run_name}.log")
            self._file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            self.logger.addHandler(self._file_handler)

    def log_epoch(self, epoch: int, metrics: Dict[str, float]) -> None:
        """Log metrics for an epoch."""
        for metric, value in metrics.items():
            self.history.setdefault(metric, []).append(value)
        if (epoch + 1) % self.every != 0:
            return
        msg = f"Epoch {epoch + 1:3d}"
        for metric, value in metrics.items():
            msg += f" - {metric}: {value:.4f}"
        self.logger.info(msg)

    # Callback hooks, see core.callbacks
    def on_train_begin(self, logs: Optional[Dict] = None) -> None:
        self.logger.info(f"Starting training run {self.run_name}")

    def on_epoch_end(self, epoch: int, logs: Optional[Dict] = None) -> None:
        self.log_epoch(epoch, dict(logs or {}))

    def on_train_end(self, logs: Optional[Dict] = None) -> None:
        final = self.history['loss'][-1] if self.history['loss'] else float('nan')
        self.logger.info(f"Finished {self.run_name} - final loss: {final:.6f}")
        if self._file_handler is not None:
            self.logger.removeHandler(self._file_handler)
            self._file_handler.close()
            self._file_handler = None
