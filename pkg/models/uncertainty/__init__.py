"""Monte-Carlo dropout estimation."""

from .mc_dropout import (
    MCRecord,
    MCResult,
    Histogram,
    RunningMoments,
    mc_sample,
    mc_curve,
    summarize_outputs,
    write_histogram_csv,
)

__all__ = [
    'MCRecord',
    'MCResult',
    'Histogram',
    'RunningMoments',
    'mc_sample',
    'mc_curve',
    'summarize_outputs',
    'write_histogram_csv',
]
