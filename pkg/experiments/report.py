"""Tables over run reports."""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

from core import get_logger
from core.exceptions import ValidationError
from utils.io import save_csv, write_text
from .runners import RunReport, load_report

logger = get_logger(__name__)

SINGLE_COLUMNS = ['p_d', 'dataset', 'w_theory', 'var_theory', 'w_exp', 'var_exp']
MLP_COLUMNS = ['p_d', 'dataset', 'bias', 'mean_sigma', 'sigma_cv',
               'sigma_abs_mean_corr', 'target_mse']


@dataclass
class ReportTable:
    columns: List[str]
    rows: List[List[Any]]

    def to_text(self, precision: int = 3) -> str:
        """Aligned text, floats rounded to ``precision`` decimals."""
        def fmt(v):
            return f"{v:.{precision}f}" if isinstance(v, float) else str(v)

        cells = [self.columns] + [[fmt(v) for v in row] for row in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = ['  '.join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
        return '\n'.join(lines) + '\n'

    def save(self, path: Union[str, Path]) -> List[Path]:
        """Write ``<path>.csv`` and ``<path>.txt``."""
        path = Path(path)
        csv_path = save_csv(self.rows, path.with_suffix('.csv'), header=self.columns)
        txt_path = write_text(self.to_text(), path.with_suffix('.txt'))
        return [csv_path, txt_path]


def _get(section: Optional[dict], key: str) -> float:
    if not section or section.get(key) is None:
        return float('nan')
    return float(section[key])


def _row(report: RunReport) -> List[Any]:
    exp = report.experimental
    if report.scenario == 'single':
        return [report.p_d, report.dataset,
                _get(report.theory, 'w'), _get(report.theory, 'var_f'),
                _get(exp, 'w_mean'), _get(exp, 'mc_variance')]
    bias = 'on' if report.last_layer_bias else 'off'
    return [report.p_d, report.dataset, bias,
            _get(exp, 'mean_sigma'), _get(exp, 'sigma_cv'),
            _get(exp, 'sigma_abs_mean_corr'), _get(exp, 'target_mse')]


def report_table(reports: Sequence[Union[RunReport, str, Path]],
                 path: Optional[Union[str, Path]] = None) -> ReportTable:
    """Theory-vs-experiment table, one row per report.

    Single-layer reports give (p_d, dataset, w_theory, var_theory, w_exp,
    var_exp); mlp reports give their band statistics instead. Reports may be
    given as RunReport objects or run directories.

    Raises:
        ValidationError: If no report is given or scenarios are mixed
    """
    reports = [r if isinstance(r, RunReport) else load_report(r) for r in reports]
    if not reports:
        raise ValidationError("report_table needs at least one report")
    scenarios = sorted({r.scenario for r in reports})
    if len(scenarios) > 1:
        raise ValidationError(f"Cannot tabulate mixed scenarios: {scenarios}",
                              scenarios=scenarios)

    columns = SINGLE_COLUMNS if scenarios[0] == 'single' else MLP_COLUMNS
    table = ReportTable(list(columns), [_row(r) for r in reports])
    if path is not None:
        table.save(path)
        logger.info(f"Wrote table of {len(reports)} runs to {path}")
    return table
