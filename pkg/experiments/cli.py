"""
Command-line interface.

Subcommands::

    mcd-lab gen-data --kind gaussian --mu 10 --sigma 1 --n 3200 --seed 0
    mcd-lab theory --units 500 --p-d 0.2 --y-bar 10
    mcd-lab theory --sweep --units 10 100 500 --p-d 0.1 0.2 0.5
    mcd-lab train --data runs/data/dataset.csv --p-d 0.5
    mcd-lab mc-eval --network runs/train/network.json --samples 100000
    mcd-lab run configs/single_p02_sigma1.toml
    mcd-lab report runs/single_0.2_1 runs/single_0.5_1

A ``--seed`` S expands to init seed S, mask seed S + 1 and MC seed S + 2.
Failures print the error as JSON on stdout and exit with status 1.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from core import get_logger, set_log_level
from core.callbacks import ProgressBar
from core.config import AdamConfig, ConfigManager, SeedConfig, TrainConfig
from core.data import load_dataset, save_dataset
from core.dtypes import (
    DEFAULT_GRID_POINTS, DEFAULT_MLP_HIDDEN, DEFAULT_SINGLE_EPOCHS, DEFAULT_UNITS,
    SUPPORTED_SCALINGS, SUPPORTED_SHAPES,
)
from core.exceptions import MCDLabError, ValidationError
from core.logging import TrainingLogger
from generators import gen_function, gen_gaussian
from models.neural.dropout import MaskSource
from models.neural.network import NetworkDef, init_network, load_network, save_network
from models.theory import SingleLayerSpec, predict_moments, theory_sweep
from models.uncertainty import MCResult, mc_curve, mc_sample
from optimization.training import train
from utils.io import save_csv, save_json
from .report import report_table
from .runners import run_experiment

logger = get_logger(__name__)


def _seed_config(seed: int) -> SeedConfig:
    return SeedConfig(init=seed, mask=seed + 1, mc=seed + 2)


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True, default=str))


def _knot(text: str) -> List[float]:
    try:
        x, y = (float(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}")
    return [x, y]


def cmd_gen_data(args: argparse.Namespace) -> int:
    if args.kind == 'gaussian':
        if args.knots:
            raise ValidationError("--knots needs a function shape")
        dataset = gen_gaussian(args.mu, args.sigma, args.n, args.seed)
    else:
        dataset = gen_function(args.kind, args.n, args.seed, knots=args.knots)
    path = save_dataset(dataset, Path(args.out_dir) / args.output)
    _print_json({'dataset': str(path), **dataset.provenance()})
    return 0


def cmd_theory(args: argparse.Namespace) -> int:
    if args.sweep:
        rows = theory_sweep(args.units, args.p_d, args.y_bar)
        columns = list(rows[0])
        path = save_csv(([row[c] for c in columns] for row in rows),
                        Path(args.out_dir) / 'theory_sweep.csv', header=columns)
        _print_json({'sweep': str(path), 'rows': len(rows)})
        return 0
    results = []
    for units in args.units:
        for p_d in args.p_d:
            spec = SingleLayerSpec(units, p_d, args.y_bar)
            results.append({'K': spec.K, 'p_d': spec.p_d, 'y_bar': spec.y_bar,
                            **predict_moments(spec).to_dict()})
    _print_json(results[0] if len(results) == 1 else results)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    if dataset.xs is None:
        net_def = NetworkDef.single_layer(args.units, args.p_d, args.scaling)
    else:
        net_def = NetworkDef.mlp(args.hidden, args.p_d, last_layer_bias=args.bias,
                                 scaling=args.scaling)
    seeds = _seed_config(args.seed)
    train_cfg = TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                            shuffle_seed=args.seed, log_every=args.log_every)
    adam_cfg = AdamConfig(learning_rate=args.learning_rate)
    callbacks = [TrainingLogger('train', every=args.log_every),
                 ProgressBar(args.epochs, disable=not args.progress)]

    state = init_network(net_def, seeds.init)
    state, trace = train(net_def, state, dataset, train_cfg, adam_cfg,
                         MaskSource(seeds.mask), callbacks)

    out_dir = Path(args.out_dir)
    network_path = save_network(net_def, state, out_dir / 'network.json')
    trace_path = trace.to_csv(out_dir / 'loss_trace.csv')
    _print_json({'network': str(network_path), 'loss_trace': str(trace_path),
                 'final_loss': trace.final})
    return 0


def cmd_mc_eval(args: argparse.Namespace) -> int:
    net_def, state = load_network(args.network)
    source = MaskSource(args.seed)
    if net_def.input_dim == 1:
        xs = np.linspace(0.0, 1.0, args.grid_points)
        result = mc_curve(net_def, state, xs, args.samples, source,
                          workers=args.workers, show_progress=args.progress)
    else:
        record, _ = mc_sample(net_def, state, np.ones(net_def.input_dim), args.samples,
                              source, workers=args.workers, show_progress=args.progress)
        result = MCResult([record], args.samples, args.seed)

    out_dir = Path(args.out_dir)
    csv_path = result.to_csv(out_dir / 'mc.csv')
    json_path = result.to_json(out_dir / 'mc.json')
    _print_json({'mc': str(csv_path), 'mc_json': str(json_path),
                 'points': len(result.records)})
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    raw = ConfigManager.load_config(args.config)
    cfg = ConfigManager.load_experiment(args.config)
    overrides = {}
    if args.seed is not None:
        overrides['seeds'] = _seed_config(args.seed)
    if args.out_dir is not None:
        overrides['out_dir'] = args.out_dir
    if args.samples is not None:
        overrides['samples'] = args.samples
    if args.workers is not None:
        overrides['workers'] = args.workers
    if overrides:
        # Keep an explicit name; otherwise derive it again
        overrides.setdefault('name', raw.get('name'))
        cfg = dataclasses.replace(cfg, **overrides)

    result = run_experiment(cfg, show_progress=args.progress)
    reports = result if isinstance(result, list) else [result]
    _print_json([r.to_dict() for r in reports] if len(reports) > 1 else reports[0].to_dict())
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    table = report_table(args.runs, path=args.output)
    sys.stdout.write(table.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mcd-lab',
        description='Monte-Carlo dropout variance experiments')
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Level of the package loggers')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('gen-data', help='Generate a dataset CSV')
    p.add_argument('--kind', default='gaussian',
                   help=f"gaussian, one of {', '.join(SUPPORTED_SHAPES)} or a name for --knots")
    p.add_argument('--knots', type=_knot, nargs='+', default=None, metavar='X,Y',
                   help='Piecewise-linear shape replacing the named one')
    p.add_argument('--n', type=int, default=3200)
    p.add_argument('--mu', type=float, default=10.0)
    p.add_argument('--sigma', type=float, default=1.0)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out-dir', default='runs/data')
    p.add_argument('--output', default='dataset.csv', help='File name inside --out-dir')
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser('theory', help='Closed-form single-layer predictions')
    p.add_argument('--units', type=int, nargs='+', default=[DEFAULT_UNITS], help='K values')
    p.add_argument('--p-d', type=float, nargs='+', default=[0.2, 0.5])
    p.add_argument('--y-bar', type=float, default=10.0)
    p.add_argument('--sweep', action='store_true', help='Write the (K, p_d) grid as CSV')
    p.add_argument('--out-dir', default='runs')
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser('train', help='Train a network on a dataset CSV')
    p.add_argument('--data', required=True)
    p.add_argument('--p-d', type=float, required=True)
    p.add_argument('--units', type=int, default=DEFAULT_UNITS)
    p.add_argument('--hidden', type=int, nargs='+', default=list(DEFAULT_MLP_HIDDEN))
    p.add_argument('--bias', action='store_true', help='Bias on the last Dense layer')
    p.add_argument('--scaling', default='none', choices=SUPPORTED_SCALINGS)
    p.add_argument('--epochs', type=int, default=DEFAULT_SINGLE_EPOCHS)
    p.add_argument('--batch-size', type=int, default=32)
    p.add_argument('--learning-rate', type=float, default=1e-3)
    p.add_argument('--log-every', type=int, default=50)
    p.add_argument('--seed', type=int, default=1)
    p.add_argument('--out-dir', default='runs/train')
    p.add_argument('--progress', action='store_true')
    p.set_defaults(func=cmd_train)

    p = sub.add_parser('mc-eval', help='MC-dropout evaluation of a saved network')
    p.add_argument('--network', required=True)
    p.add_argument('--samples', type=int, default=300)
    p.add_argument('--grid-points', type=int, default=DEFAULT_GRID_POINTS)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--seed', type=int, default=3)
    p.add_argument('--out-dir', default='runs/mc')
    p.add_argument('--progress', action='store_true')
    p.set_defaults(func=cmd_mc_eval)

    p = sub.add_parser('run', help='Run an experiment from a TOML config')
    p.add_argument('config')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out-dir', default=None)
    p.add_argument('--samples', type=int, default=None)
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--progress', action='store_true')
    p.set_defaults(func=cmd_run)

    p = sub.add_parser('report', help='Tabulate finished runs')
    p.add_argument('runs', nargs='+', help='Run directories or run.json files')
    p.add_argument('--output', default=None,
                   help='Write <output>.csv and <output>.txt as well')
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_log_level(args.log_level)
    try:
        return args.func(args)
    except MCDLabError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        _print_json(e.to_dict())
        return 1
    except OSError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        _print_json({'error': type(e).__name__, 'message': str(e),
                     'path': e.filename})
        return 1


if __name__ == '__main__':
    sys.exit(main())
