"""Bernoulli dropout masks.

Masks follow the convention d_k ~ Bernoulli(p) with p = 1 - p_d the keep
probability. The default scaling is 'none': kept activations are passed
through unchanged at train and test time, which is the formulation the
closed-form results in models.theory assume. 'inverted' divides kept
activations by p and is only meant for contrast runs.
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union
import numpy as np

from core import get_logger
from core.dtypes import FLOAT_DTYPE, SUPPORTED_SCALINGS
from core.exceptions import ParameterError
from core.validation import check_array, check_same_length, check_probability, check_positive_int

logger = get_logger(__name__)


@dataclass(frozen=True)
class DropoutSpec:
    """Drop probability and scaling mode of one dropout layer."""
    p_d: float
    scaling: str = 'none'

    def __post_init__(self):
        object.__setattr__(self, 'p_d', check_probability(self.p_d, 'p_d'))
        if self.scaling not in SUPPORTED_SCALINGS:
            raise ParameterError(f"Unsupported dropout scaling: {self.scaling}",
                                 parameter='scaling')

    @property
    def keep_prob(self) -> float:
        return 1.0 - self.p_d

    @property
    def scale(self) -> float:
        return 1.0 / self.keep_prob if self.scaling == 'inverted' else 1.0


@dataclass(frozen=True)
class MaskSource:
    """Seeded, splittable source of Bernoulli masks.

    Every draw is addressed by (seed, stream, draw_index) and gets its own
    counter-based Philox generator, so any draw can be reproduced without
    replaying the ones before it and independent streams can be handed to
    different workers.
    """
    seed: int
    stream: Tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ParameterError("seed must be a 64-bit unsigned integer", parameter='seed')
        if any(int(k) < 0 for k in self.stream):
            raise ParameterError("stream keys must be non-negative", parameter='stream')

    def split(self, *keys: int) -> 'MaskSource':
        """Child source with an extended stream key."""
        return MaskSource(self.seed, self.stream + tuple(int(k) for k in keys))

    def generator(self, draw_index: int = 0) -> np.random.Generator:
        seq = np.random.SeedSequence(int(self.seed),
                                     spawn_key=self.stream + (int(draw_index),))
        return np.random.Generator(np.random.Philox(seq))


def bernoulli_mask(spec: DropoutSpec, shape: Union[int, Tuple[int, ...]],
                   rng: np.random.Generator) -> np.ndarray:
    """Binary float mask with P(entry = 1) = 1 - p_d, drawn from rng."""
    return (rng.random(shape) < spec.keep_prob).astype(FLOAT_DTYPE)


def draw_mask(spec: DropoutSpec, width: int, source: MaskSource,
              draw_index: int = 0, batch: Optional[int] = None) -> np.ndarray:
    """Draw one mask of ``width`` units (or ``batch`` masks as rows).

    Args:
        spec: Dropout spec
        width: Number of units
        source: Mask source
        draw_index: Index of the draw within the source's stream
        batch: When given, return a (batch, width) array of independent masks

    Returns:
        Binary float array
    """
    width = check_positive_int(width, 'width')
    shape = (width,) if batch is None else (check_positive_int(batch, 'batch'), width)
    return bernoulli_mask(spec, shape, source.generator(draw_index))


def apply_mask(x: np.ndarray, mask: np.ndarray, spec: DropoutSpec) -> np.ndarray:
    """Multiply x by a binary mask, rescaling kept units in inverted mode.

    Raises:
        DimensionalityError: If x and mask shapes differ
    """
    x = check_array(x, name='x')
    mask = check_array(mask, name='mask')
    check_same_length(x, mask, names=('x', 'mask'))
    if spec.scaling == 'inverted':
        return x * mask * spec.scale
    return x * mask
