"""Core data structures and dataset handling."""

import numpy as np
from typing import Any, Dict, Optional, Union
from dataclasses import dataclass, field
from pathlib import Path

from .dtypes import FLOAT_DTYPE
from .exceptions import ValidationError


@dataclass(frozen=True)
class Dataset:
    """Container for (x, y) samples with generator provenance.

    ``xs`` is None for the constant-target datasets, whose samples carry no
    input. ``y_bar`` is computed once at construction.
    """
    ys: np.ndarray
    xs: Optional[np.ndarray] = None
    generator_id: str = 'external'
    seed: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    y_bar: float = field(init=False)

    def __post_init__(self):
        ys = np.asarray(self.ys, dtype=FLOAT_DTYPE).reshape(-1)
        if ys.size == 0:
            raise ValidationError("Dataset must contain at least one sample")
        if not np.all(np.isfinite(ys)):
            raise ValidationError("ys must be finite")
        object.__setattr__(self, 'ys', ys)
        if self.xs is not None:
            xs = np.asarray(self.xs, dtype=FLOAT_DTYPE).reshape(-1)
            if xs.shape != ys.shape:
                raise ValidationError(
                    f"xs and ys have incompatible shapes: {xs.shape} vs {ys.shape}")
            if not np.all(np.isfinite(xs)):
                raise ValidationError("xs must be finite")
            if np.any((xs < 0) | (xs > 1)):
                raise ValidationError("xs must lie in [0, 1]")
            object.__setattr__(self, 'xs', xs)
        object.__setattr__(self, 'y_bar', float(np.mean(ys)))

    @property
    def n(self) -> int:
        return int(self.ys.size)

    @property
    def y_var(self) -> float:
        return float(np.var(self.ys, ddof=1)) if self.n > 1 else 0.0

    def inputs(self, input_dim: int) -> np.ndarray:
        """Network inputs, one row per sample.

        Constant-target datasets feed the value 1 to every input unit; this
        turns a single Dense layer into the plain sum of its masked weights.
        """
        if self.xs is None:
            return np.ones((self.n, input_dim), dtype=FLOAT_DTYPE)
        if input_dim != 1:
            raise ValidationError(f"Datasets with xs feed 1 input, got input_dim={input_dim}")
        return self.xs.reshape(-1, 1)

    def targets(self) -> np.ndarray:
        return self.ys.reshape(-1, 1)

    def provenance(self) -> Dict[str, Any]:
        return {
            'generator_id': self.generator_id,
            'seed': self.seed,
            'n': self.n,
            'y_bar': self.y_bar,
            'params': dict(self.params),
        }


def save_dataset(dataset: Dataset, filepath: Union[str, Path]) -> Path:
    """Write ``x,y`` CSV plus a ``.json`` provenance sidecar.

    Constant-target datasets leave the x column empty.
    """
    from utils.io import save_csv, save_json

    filepath = Path(filepath)
    xs = dataset.xs if dataset.xs is not None else [''] * dataset.n
    save_csv(zip(xs, dataset.ys), filepath, header=['x', 'y'])
    save_json(dataset.provenance(), filepath.with_suffix('.json'))
    return filepath


def load_dataset(filepath: Union[str, Path]) -> Dataset:
    """Read a dataset written by save_dataset.

    Blank lines are skipped. Either every row carries an x or none does.

    Raises:
        ValidationError: On a missing file, a bad header or a malformed row
    """
    from utils.io import load_json, read_csv

    filepath = Path(filepath)
    header, rows = read_csv(filepath)
    if header != ['x', 'y']:
        raise ValidationError(f"Unexpected dataset header: {','.join(header)!r}")
    xs, ys = [], []
    for index, row in enumerate(rows, start=1):
        if len(row) != 2:
            raise ValidationError(f"Expected 2 fields, got {len(row)}", row=index)
        try:
            xs.append(float(row[0]) if row[0].strip() else None)
            ys.append(float(row[1]))
        except ValueError:
            raise ValidationError(f"Non-numeric value in {row!r}", row=index)

    missing = [x is None for x in xs]
    if any(missing) and not all(missing):
        raise ValidationError("x must be given on every row or on none",
                              row=missing.index(not missing[0]) + 1)

    sidecar = filepath.with_suffix('.json')
    provenance: Dict[str, Any] = load_json(sidecar) if sidecar.exists() else {}
    return Dataset(
        ys=np.array(ys),
        xs=None if all(missing) else np.array(xs, dtype=FLOAT_DTYPE),
        generator_id=provenance.get('generator_id', 'external'),
        seed=provenance.get('seed'),
        params=provenance.get('params', {}),
    )
