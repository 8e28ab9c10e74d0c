"""CSV input and output."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence

import numpy as np

from .empirical import StepFunction
from .gaussian import BridgePath


def read_sample_csv(path, header: bool = False) -> np.ndarray:
    """Single-column CSV of observations; ``header=True`` skips the first row."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if header:
        rows = rows[1:]
    values = []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        if not row or not row[0].strip():
            continue
        if len(row) != 1:
            raise ValueError(f"{path}:{lineno}: expected a single column, got {len(row)}")
        try:
            values.append(float(row[0]))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a number: {row[0]!r}") from None
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError(f"{path}: no observations")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{path}: observations must be finite")
    return x


def write_table_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def write_step_function_csv(path, f: StepFunction) -> None:
    write_table_csv(path, ("jump_point", "cum_value"), zip(f.jump_points, f.cum_values))


def write_path_csv(path, p: BridgePath) -> None:
    write_table_csv(path, ("grid", "value"), zip(p.grid, p.values))
