"""
Monte-Carlo Dropout Estimation
==============================

Repeated stochastic forward passes with dropout active, summarized as a
predictive mean, an unbiased (S - 1) sample variance and sigma bands.

Samples are drawn in fixed blocks of ``MC_BLOCK_SIZE``. Block ``b`` of a
point takes its masks from ``mask_source.generator(b)``, and block
statistics (count, mean, M2) are merged in block order, so a result depends
only on the seed and S, never on the number of workers.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core import get_logger
from core.dtypes import HISTOGRAM_BINS, MC_BLOCK_SIZE
from core.exceptions import ParameterError, ValidationError
from core.validation import check_array
from models.neural.dropout import MaskSource
from models.neural.network import NetworkDef, NetworkState, forward
from utils.decorators import timer
from utils.io import save_csv, save_json
from utils.parallel import parallel_map

logger = get_logger(__name__)


@dataclass
class RunningMoments:
    """Streaming count/mean/M2 with an order-fixed pairwise merge."""
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_samples(cls, values: np.ndarray) -> 'RunningMoments':
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size == 0:
            return cls()
        if np.ptp(values) == 0:
            # Identical outputs: exact mean and zero spread
            return cls(int(values.size), float(values[0]), 0.0)
        mean = float(values.mean())
        return cls(int(values.size), mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: 'RunningMoments') -> 'RunningMoments':
        if other.count == 0:
            return RunningMoments(self.count, self.mean, self.m2)
        if self.count == 0:
            return RunningMoments(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return RunningMoments(n, mean, m2)

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return 0.0
        return max(self.m2 / (self.count - 1), 0.0)


@dataclass
class Histogram:
    """Fixed-range histogram of MC outputs; out-of-range counts kept apart."""
    edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0

    @classmethod
    def empty(cls, value_range: Tuple[float, float], bins: int = HISTOGRAM_BINS) -> 'Histogram':
        lo, hi = value_range
        if not hi > lo:
            raise ParameterError(f"Histogram range must be increasing, got {value_range}")
        return cls(np.linspace(lo, hi, bins + 1), np.zeros(bins, dtype=np.int64))

    def add(self, values: np.ndarray) -> None:
        counts, _ = np.histogram(values, bins=self.edges)
        self.counts += counts
        self.underflow += int(np.sum(values < self.edges[0]))
        self.overflow += int(np.sum(values > self.edges[-1]))

    def merge(self, other: 'Histogram') -> 'Histogram':
        return Histogram(self.edges, self.counts + other.counts,
                         self.underflow + other.underflow, self.overflow + other.overflow)

    def to_csv(self, path: Union[str, Path]) -> Path:
        return write_histogram_csv(path, self.edges, self.counts)


def write_histogram_csv(path: Union[str, Path], edges: np.ndarray, counts: np.ndarray) -> Path:
    rows = ((left, right, int(count))
            for left, right, count in zip(edges[:-1], edges[1:], counts))
    return save_csv(rows, path, header=['bin_left', 'bin_right', 'count'])


@dataclass(frozen=True)
class MCRecord:
    """MC summary at one input point."""
    x: float
    sample_mean: float
    sample_variance: float

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sample_variance))

    @property
    def bands(self) -> Tuple[float, float, float]:
        """Half-widths of the sigma, 2 sigma and 3 sigma bands."""
        s = self.sigma
        return s, 2.0 * s, 3.0 * s

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x': self.x,
            'sample_mean': self.sample_mean,
            'sample_variance': self.sample_variance,
            'bands': list(self.bands),
        }


@dataclass
class MCResult:
    """MC summaries over a set of input points."""
    records: List[MCRecord]
    samples: int
    seed: int
    stream: Tuple[int, ...] = ()
    histogram: Optional[Histogram] = field(default=None, repr=False)

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.records])

    @property
    def means(self) -> np.ndarray:
        return np.array([r.sample_mean for r in self.records])

    @property
    def variances(self) -> np.ndarray:
        return np.array([r.sample_variance for r in self.records])

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(self.variances)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'samples': self.samples,
            'seed': int(self.seed),
            'stream': list(self.stream),
            'records': [r.to_dict() for r in self.records],
        }

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write ``x,mean,sigma`` rows."""
        rows = ((r.x, r.sample_mean, r.sigma) for r in self.records)
        return save_csv(rows, path, header=['x', 'mean', 'sigma'])

    def to_json(self, path: Union[str, Path]) -> Path:
        return save_json(self.to_dict(), path, sort_keys=False)


def summarize_outputs(x: float, outputs: np.ndarray) -> MCRecord:
    """MCRecord from an explicit array of sampled outputs."""
    outputs = np.asarray(outputs, dtype=float).reshape(-1)
    if outputs.size < 2:
        raise ValidationError("At least 2 samples are needed for a variance")
    moments = RunningMoments.from_samples(outputs)
    return MCRecord(float(x), moments.mean, moments.variance)


def _block_sizes(S: int) -> List[int]:
    full, rest = divmod(S, MC_BLOCK_SIZE)
    return [MC_BLOCK_SIZE] * full + ([rest] if rest else [])


def _run_block(args, net_def: NetworkDef, state: NetworkState, x: np.ndarray,
               mask_source: MaskSource,
               hist_range: Optional[Tuple[float, float]], bins: int):
    block, count = args
    masks = net_def.draw_masks_from(mask_source.generator(block), batch=count)
    batch = np.broadcast_to(x, (count, x.size))
    outputs = forward(state, net_def, batch, masks)[:, 0]
    hist = None
    if hist_range is not None:
        hist = Histogram.empty(hist_range, bins)
        hist.add(outputs)
    return RunningMoments.from_samples(outputs), hist


def _scalar_x(x: np.ndarray) -> float:
    return float(x[0]) if x.size == 1 else float('nan')


def mc_sample(net_def: NetworkDef, state: NetworkState, x, S: int,
              mask_source: MaskSource, workers: int = 1,
              hist_range: Optional[Tuple[float, float]] = None,
              bins: int = HISTOGRAM_BINS,
              show_progress: bool = False) -> Tuple[MCRecord, Optional[Histogram]]:
    """S masked forward passes at input x.

    Args:
        net_def: Architecture (single output)
        state: Parameters
        x: Input vector of length input_dim
        S: Number of samples, at least 2
        mask_source: Source of the per-block mask streams
        workers: Worker threads for the blocks
        hist_range: When given, also histogram the outputs over this range
        bins: Histogram bin count

    Returns:
        Tuple of (record, histogram or None). ``record.x`` is the scalar
        input for 1-input networks and NaN otherwise.

    Raises:
        ValidationError: If S < 2 or the network has more than one output
    """
    if int(S) != S or S < 2:
        raise ValidationError(f"S must be an integer >= 2, got {S}", S=S)
    if net_def.output_dim != 1:
        raise ValidationError("MC estimation needs a single-output network")
    x = check_array(x, name='x').reshape(-1)
    if x.size != net_def.input_dim:
        raise ValidationError(f"Expected input of width {net_def.input_dim}, got {x.size}")

    blocks = list(enumerate(_block_sizes(int(S))))
    results = parallel_map(_run_block, blocks, n_jobs=workers,
                           show_progress=show_progress, desc='mc',
                           net_def=net_def, state=state, x=x,
                           mask_source=mask_source, hist_range=hist_range, bins=bins)

    moments = RunningMoments()
    hist = Histogram.empty(hist_range, bins) if hist_range is not None else None
    for block_moments, block_hist in results:
        moments = moments.merge(block_moments)
        if hist is not None:
            hist = hist.merge(block_hist)

    return MCRecord(_scalar_x(x), moments.mean, moments.variance), hist


@timer
def mc_curve(net_def: NetworkDef, state: NetworkState, xs: Sequence[float], S: int,
             mask_source: MaskSource, workers: int = 1,
             show_progress: bool = False) -> MCResult:
    """mc_sample at every grid point of a 1-input network.

    Point ``i`` uses ``mask_source.split(i)``, so masks are fresh and
    independent per point and per sample.
    """
    xs = check_array(xs, name='xs').reshape(-1)
    if net_def.input_dim != 1:
        raise ValidationError("mc_curve needs a 1-input network")

    def point(args):
        i, x = args
        record, _ = mc_sample(net_def, state, [x], S, mask_source.split(i))
        return record

    records = parallel_map(point, list(enumerate(xs)), n_jobs=workers,
                           show_progress=show_progress, desc='mc curve')
    logger.debug(f"MC curve over {len(xs)} points with S={S}")
    return MCResult(records, int(S), mask_source.seed, mask_source.stream)
