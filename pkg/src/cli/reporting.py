"""
Report Serialization
Description: Turns report rows into CSV or JSON-lines text with fixed headers.

Floats are written with 6 significant digits, integers exactly, missing values
as empty CSV cells or JSON null. Booleans are 'true'/'false' in both formats.
"""

import math
import sys
from typing import Iterable, List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from .config import OutputFormat


def _cell(value, fmt: OutputFormat):
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value) if fmt is OutputFormat.JSONL else ('true' if value else 'false')
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return None
        return float(f'{value:.6g}') if fmt is OutputFormat.JSONL else f'{value:.6g}'
    return value


def to_frame(rows: Iterable[dict], header: Sequence[str], fmt: OutputFormat) -> pd.DataFrame:
    """Rows restricted to header, in header order, with cells normalised."""
    data = [[_cell(row.get(name), fmt) for name in header] for row in rows]
    return pd.DataFrame(data, columns=list(header), dtype=object)


def format_rows(rows: Iterable[dict], header: Sequence[str], fmt: OutputFormat = OutputFormat.CSV) -> str:
    fmt = OutputFormat(fmt)
    frame = to_frame(rows, header, fmt)
    if fmt is OutputFormat.CSV:
        return frame.to_csv(index=False, lineterminator='\n')
    if frame.empty:
        return ''
    text = frame.to_json(orient='records', lines=True, double_precision=15)
    return text if text.endswith('\n') else text + '\n'


def write_report(rows: Iterable[dict], header: Sequence[str], fmt: OutputFormat = OutputFormat.CSV,
                 stream: Optional[TextIO] = None) -> None:
    (stream or sys.stdout).write(format_rows(rows, header, fmt))


def render_steps(steps: List[dict], stream: Optional[TextIO] = None) -> None:
    """Print step dictionaries the way the verbose mode shows them."""
    out = stream or sys.stderr
    out.write(f"{'=' * 50}\n")
    for step in steps:
        out.write(f"[{step['step_number']}] {step['title']}: {step['description']}\n")
        if step.get('details'):
            out.write(f"      {step['details']}\n")
    out.write(f"{'=' * 50}\n")
