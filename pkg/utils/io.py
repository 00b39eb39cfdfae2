"""Input/output utilities for run artifacts."""

import csv
import json
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
from pathlib import Path

import numpy as np

from core import get_logger
from core.exceptions import ValidationError

logger = get_logger(__name__)


def _to_builtin(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def save_json(data: Dict[str, Any], path: Union[str, Path], sort_keys: bool = True) -> Path:
    """Write ``data`` as indented JSON, converting numpy scalars and arrays."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, 'w') as f:
            json.dump(data, f, indent=2, sort_keys=sort_keys, default=_to_builtin)
        logger.debug(f"JSON saved to {path}")
    except (OSError, TypeError) as e:
        logger.error(f"Error saving {path}: {e}")
        raise
    return path


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"File not found: {path}", path=str(path))
    try:
        with open(path) as f:
            return json.load(f)
    except ValueError as e:
        raise ValidationError(f"Malformed JSON in {path}: {e}", path=str(path))


def save_csv(rows: Iterable[Sequence[Any]], path: Union[str, Path],
             header: Optional[Sequence[str]] = None) -> Path:
    """Write rows to CSV. Floats are written with ``repr`` so they round-trip."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        if header is not None:
            writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                             for v in row])
    logger.debug(f"CSV saved to {path}")
    return path


def write_text(text: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def read_csv(path: Union[str, Path]) -> Tuple[List[str], List[List[str]]]:
    """Read a CSV written by ``save_csv`` into its header and string rows.

    Blank lines are skipped.

    Raises:
        ValidationError: If the file is missing or empty
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"File not found: {path}", path=str(path))
    with open(path, newline='') as f:
        rows = [row for row in csv.reader(f) if row]
    if not rows:
        raise ValidationError(f"Empty CSV file: {path}", path=str(path))
    return rows[0], rows[1:]
