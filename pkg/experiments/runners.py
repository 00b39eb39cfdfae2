"""
Experiment Runners
==================

End-to-end runs: generate data, train, MC-sample, write artifacts.

A run writes into ``<out_dir>/<name>/``:

- ``config.json``      canonical config (its SHA-256 is the config hash)
- ``metadata.json``    config, seeds, code and library versions
- ``dataset.csv``      training data (plus ``dataset.json`` provenance)
- ``network.json``     trained network
- ``loss_trace.csv``   per-epoch mean loss
- ``mc.csv`` / ``mc.json``   MC records
- ``run.json``         the RunReport

Single runs add ``mc_histogram.csv`` and ``dataset_histogram.csv``; mlp
runs add ``target.csv`` with the noise-free shape. CSV files hold no
timestamps or timings, so identical configs give byte-identical CSVs.
"""

import dataclasses
import itertools
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy

from core import __version__, get_logger
from core.callbacks import ProgressBar
from core.config import ConfigManager, ExperimentConfig
from core.data import Dataset, save_dataset
from core.dtypes import HISTOGRAM_BINS
from core.exceptions import TrainingDivergedError, ValidationError
from core.logging import TrainingLogger
from core.metrics import (
    coefficient_of_variation, pearson_correlation, relative_error, weight_dispersion,
)
from generators import gen_function, gen_gaussian, shape_target
from models.neural.dropout import MaskSource
from models.neural.network import NetworkDef, NetworkState, init_network, save_network
from models.theory import SingleLayerSpec, predict_moments
from models.uncertainty import MCResult, mc_curve, mc_sample, write_histogram_csv
from optimization.training import train
from utils.io import load_json, save_csv, save_json

logger = get_logger(__name__)

STATUS_OK = 'ok'
STATUS_FAILED = 'failed'


@dataclass
class RunReport:
    """Outcome of one run, persisted as ``run.json``.

    ``files`` maps artifact names to paths relative to ``run_dir``.
    ``theory`` is only filled for single runs.
    """
    scenario: str
    name: str
    p_d: float
    dataset: str
    run_dir: str
    config_hash: str
    status: str = STATUS_OK
    theory: Optional[Dict[str, float]] = None
    experimental: Dict[str, Any] = field(default_factory=dict)
    files: Dict[str, str] = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    last_layer_bias: Optional[bool] = None
    wall_clock: float = 0.0
    error: Optional[Dict[str, Any]] = None

    def path(self, artifact: str) -> Path:
        return Path(self.run_dir) / self.files[artifact]

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunReport':
        if not isinstance(data, dict):
            raise ValidationError(f"Run report must be a JSON object, got {type(data).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        try:
            return cls(**{k: v for k, v in data.items() if k in known})
        except TypeError as e:
            raise ValidationError(f"Malformed run report: {e}")

    def save(self) -> Path:
        return save_json(self.to_dict(), Path(self.run_dir) / 'run.json')


def load_report(path: Union[str, Path]) -> RunReport:
    """Read a RunReport from ``run.json`` or from the run directory holding it."""
    path = Path(path)
    if path.is_dir():
        path = path / 'run.json'
    return RunReport.from_dict(load_json(path))


def build_dataset(cfg: ExperimentConfig) -> Dataset:
    ds = cfg.dataset
    if ds.kind == 'gaussian':
        return gen_gaussian(ds.mu, ds.sigma, ds.n, ds.seed)
    return gen_function(ds.kind, ds.n, ds.seed, knots=ds.knots)


def build_network(cfg: ExperimentConfig) -> NetworkDef:
    net = cfg.network
    if cfg.scenario == 'single':
        return NetworkDef.single_layer(net.units, cfg.p_d, net.scaling)
    return NetworkDef.mlp(net.hidden, cfg.p_d, last_layer_bias=net.last_layer_bias,
                          scaling=net.scaling)


def run_metadata(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Everything needed to re-execute a run."""
    return {
        'config': cfg.to_dict(),
        'config_hash': ConfigManager.config_hash(cfg),
        'seeds': dataclasses.asdict(cfg.seeds),
        'code_version': __version__,
        'python_version': platform.python_version(),
        'numpy_version': np.__version__,
        'scipy_version': scipy.__version__,
    }


def _start_run(cfg: ExperimentConfig) -> Tuple[Path, RunReport]:
    run_dir = cfg.run_dir
    run_dir.mkdir(parents=True, exist_ok=True)
    ConfigManager.save_config(cfg.to_dict(), run_dir / 'config.json')
    save_json(run_metadata(cfg), run_dir / 'metadata.json')
    report = RunReport(
        scenario=cfg.scenario,
        name=cfg.name,
        p_d=cfg.p_d,
        dataset=cfg.dataset.label,
        run_dir=str(run_dir),
        config_hash=ConfigManager.config_hash(cfg),
        seeds=dataclasses.asdict(cfg.seeds),
        last_layer_bias=None if cfg.scenario == 'single' else cfg.network.last_layer_bias,
        files={'config': 'config.json', 'metadata': 'metadata.json'},
    )
    return run_dir, report


def _train(cfg: ExperimentConfig, net_def: NetworkDef, dataset: Dataset,
           report: RunReport, started: float,
           show_progress: bool) -> NetworkState:
    """Train, or write a failed report and re-raise on divergence."""
    state = init_network(net_def, cfg.seeds.init)
    callbacks = [TrainingLogger(cfg.name, every=cfg.train.log_every),
                 ProgressBar(cfg.train.epochs, desc=cfg.name, disable=not show_progress)]
    try:
        state, trace = train(net_def, state, dataset, cfg.train, cfg.adam,
                             MaskSource(cfg.seeds.mask), callbacks)
    except TrainingDivergedError as e:
        logger.error(f"Run {cfg.name} failed: {e}")
        report.status = STATUS_FAILED
        report.error = e.to_dict()
        report.wall_clock = time.perf_counter() - started
        report.save()
        raise

    run_dir = Path(report.run_dir)
    save_network(net_def, state, run_dir / 'network.json')
    trace.to_csv(run_dir / 'loss_trace.csv')
    report.files.update({'network': 'network.json', 'loss_trace': 'loss_trace.csv'})
    report.experimental['final_loss'] = trace.final
    return state


def exact_output_moments(net_def: NetworkDef, state: NetworkState) -> Tuple[float, float]:
    """Mean and variance of the single-layer output for the trained weights.

    With input 1 the output is sum_k d_k s w_k, s the dropout scale, so the
    moments follow from the weights without sampling.
    """
    spec = net_def.layers[net_def.dropout_indices[0]].spec
    w = state.dense_weights(net_def)[:, 0]
    p, s = spec.keep_prob, spec.scale
    return float(s * p * w.sum()), float(s * s * p * (1.0 - p) * np.sum(w * w))


def _histogram_range(mean: float, var: float) -> Tuple[float, float]:
    half = 6.0 * np.sqrt(var) if var > 0 else 0.5
    return mean - half, mean + half


def run_single(cfg: ExperimentConfig, show_progress: bool = False) -> RunReport:
    """Single-layer linear run: theory vs trained weights vs MC variance.

    Raises:
        ValidationError: If the config is not a single-layer scenario
        TrainingDivergedError: After writing a report with failed status
    """
    if cfg.scenario != 'single':
        raise ValidationError(f"run_single needs scenario 'single', got {cfg.scenario!r}")
    started = time.perf_counter()
    run_dir, report = _start_run(cfg)

    dataset = build_dataset(cfg)
    save_dataset(dataset, run_dir / 'dataset.csv')
    counts, edges = np.histogram(dataset.ys, bins=HISTOGRAM_BINS)
    write_histogram_csv(run_dir / 'dataset_histogram.csv', edges, counts)
    report.files.update({'dataset': 'dataset.csv', 'dataset_histogram': 'dataset_histogram.csv'})

    # Theory columns use the distribution mean, not the sample mean
    prediction = predict_moments(SingleLayerSpec(cfg.network.units, cfg.p_d, cfg.dataset.mu))
    report.theory = {'w': prediction.w_opt, 'mean_f': prediction.mean_f,
                     'var_f': prediction.var_f}

    net_def = build_network(cfg)
    state = _train(cfg, net_def, dataset, report, started, show_progress)

    weights = state.dense_weights(net_def)[:, 0]
    exact_mean, exact_var = exact_output_moments(net_def, state)
    record, hist = mc_sample(net_def, state, np.ones(net_def.input_dim), cfg.samples,
                             MaskSource(cfg.seeds.mc), workers=cfg.workers,
                             hist_range=_histogram_range(exact_mean, exact_var),
                             show_progress=show_progress)
    result = MCResult([record], cfg.samples, cfg.seeds.mc, histogram=hist)
    result.to_csv(run_dir / 'mc.csv')
    result.to_json(run_dir / 'mc.json')
    hist.to_csv(run_dir / 'mc_histogram.csv')
    report.files.update({'mc': 'mc.csv', 'mc_json': 'mc.json', 'mc_histogram': 'mc_histogram.csv'})

    report.experimental.update({
        'w_mean': float(weights.mean()),
        'w_std': float(weights.std()),
        'w_rel_error': relative_error(float(weights.mean()), prediction.w_opt),
        'weight_dispersion': weight_dispersion(weights),
        'mc_mean': record.sample_mean,
        'mc_variance': record.sample_variance,
        'exact_mean': exact_mean,
        'exact_variance': exact_var,
        'data_mean': dataset.y_bar,
        'data_variance': dataset.y_var,
    })
    report.wall_clock = time.perf_counter() - started
    report.save()
    logger.info(f"{cfg.name}: w {report.experimental['w_mean']:.4f} (theory {prediction.w_opt:.4f}), "
                f"Var[f] {record.sample_variance:.4f} (theory {prediction.var_f:.4f})")
    return report


def curve_summary(result: MCResult, target: Optional[np.ndarray] = None) -> Dict[str, float]:
    """Band statistics of an MC curve.

    ``target_mse`` compares the MC mean with the noise-free shape when one
    is given.
    """
    sigmas, means = result.sigmas, result.means
    summary = {
        'mean_sigma': float(sigmas.mean()),
        'sigma_cv': coefficient_of_variation(sigmas),
        'sigma_abs_mean_corr': pearson_correlation(sigmas, np.abs(means)),
    }
    if target is not None:
        summary['target_mse'] = float(np.mean((means - target) ** 2))
    return summary


def run_mlp(cfg: ExperimentConfig, show_progress: bool = False) -> RunReport:
    """Non-linear network on a 1D shape, MC curve over an x grid on [0, 1].

    Raises:
        ValidationError: If the config is not an mlp scenario
        TrainingDivergedError: After writing a report with failed status
    """
    if cfg.scenario != 'mlp':
        raise ValidationError(f"run_mlp needs scenario 'mlp', got {cfg.scenario!r}")
    started = time.perf_counter()
    run_dir, report = _start_run(cfg)

    dataset = build_dataset(cfg)
    save_dataset(dataset, run_dir / 'dataset.csv')
    report.files['dataset'] = 'dataset.csv'

    net_def = build_network(cfg)
    state = _train(cfg, net_def, dataset, report, started, show_progress)

    xs = np.linspace(0.0, 1.0, cfg.grid_points)
    result = mc_curve(net_def, state, xs, cfg.samples, MaskSource(cfg.seeds.mc),
                      workers=cfg.workers, show_progress=show_progress)
    result.to_csv(run_dir / 'mc.csv')
    result.to_json(run_dir / 'mc.json')
    target = shape_target(cfg.dataset.kind, xs, knots=cfg.dataset.knots)
    save_csv(zip(xs, target), run_dir / 'target.csv', header=['x', 'target'])
    report.files.update({'mc': 'mc.csv', 'mc_json': 'mc.json', 'target': 'target.csv'})

    report.experimental.update(curve_summary(result, target))
    report.wall_clock = time.perf_counter() - started
    report.save()
    logger.info(f"{cfg.name}: mean sigma {report.experimental['mean_sigma']:.4f}, "
                f"sigma CV {report.experimental['sigma_cv']:.3f}")
    return report


def grid_configs(cfg: ExperimentConfig,
                 shapes: Optional[Sequence[str]] = None,
                 p_ds: Optional[Sequence[float]] = None,
                 biases: Optional[Sequence[bool]] = None) -> List[ExperimentConfig]:
    """mlp configs for every shape x p_d x last-layer-bias variant.

    Variants are written below the grid's own run directory.
    """
    grid = cfg.grid
    shapes = list(shapes if shapes is not None else grid.shapes)
    p_ds = list(p_ds if p_ds is not None else grid.p_ds)
    biases = list(biases if biases is not None else grid.biases)
    configs = []
    for shape, p_d, bias in itertools.product(shapes, p_ds, biases):
        configs.append(dataclasses.replace(
            cfg,
            scenario='mlp',
            p_d=p_d,
            dataset=dataclasses.replace(cfg.dataset, kind=shape),
            network=dataclasses.replace(cfg.network, last_layer_bias=bias),
            out_dir=str(cfg.run_dir),
            name=None,
            grid=None,
        ))
    return configs


def run_grid(cfg: ExperimentConfig,
             shapes: Optional[Sequence[str]] = None,
             p_ds: Optional[Sequence[float]] = None,
             biases: Optional[Sequence[bool]] = None,
             show_progress: bool = False) -> List[RunReport]:
    """Run the mlp scenario over a grid of variants and tabulate them."""
    from .report import report_table

    configs = grid_configs(cfg, shapes, p_ds, biases)
    logger.info(f"Running grid of {len(configs)} variants into {cfg.run_dir}")
    reports = [run_mlp(c, show_progress=show_progress) for c in configs]
    report_table(reports, cfg.run_dir / 'grid_table')
    return reports


def run_experiment(cfg: ExperimentConfig,
                   show_progress: bool = False) -> Union[RunReport, List[RunReport]]:
    """Dispatch on ``cfg.scenario``."""
    if cfg.scenario == 'single':
        return run_single(cfg, show_progress=show_progress)
    if cfg.scenario == 'mlp':
        return run_mlp(cfg, show_progress=show_progress)
    return run_grid(cfg, show_progress=show_progress)
