"""Experiment runners, reports and the command-line interface."""

from .runners import (
    RunReport,
    build_dataset,
    build_network,
    curve_summary,
    exact_output_moments,
    grid_configs,
    load_report,
    run_experiment,
    run_grid,
    run_metadata,
    run_mlp,
    run_single,
)
from .report import ReportTable, report_table

__all__ = [
    'RunReport',
    'build_dataset',
    'build_network',
    'curve_summary',
    'exact_output_moments',
    'grid_configs',
    'load_report',
    'run_experiment',
    'run_grid',
    'run_metadata',
    'run_mlp',
    'run_single',
    'ReportTable',
    'report_table',
]
