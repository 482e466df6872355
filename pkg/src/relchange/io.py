"""CSV ingestion and emission of cycle tables and plot-ready artifacts.

A cycle table is one cycle per row at native sampling; ragged rows are
linearly resampled onto a uniform grid over normalized cycle time [0, 1].
All files are UTF-8 CSV with LF line endings and '.' decimal separator.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .fda import FunctionalSeries, Grid

__all__ = ["ingest_csv", "write_series_csv", "write_columns_csv"]


class CsvFormatError(ValueError):
    pass


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _parse_rows(path: Path) -> list[list[float]]:
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r, record in enumerate(csv.reader(fh)):
            cells = [c.strip() for c in record if c.strip() != ""]
            if not cells:
                continue
            if r == 0 and not any(_is_number(c) for c in cells):
                continue  # header naming grid fractions
            parsed = []
            for c, cell in enumerate(cells):
                if not _is_number(cell):
                    raise CsvFormatError(
                        f"{path}: non-numeric cell at row {r + 1}, column {c + 1}: {cell!r}"
                    )
                parsed.append(float(cell))
            rows.append(parsed)
    return rows


def ingest_csv(path: str | Path, grid_size: int = 100) -> FunctionalSeries:
    """Read a cycle table; resample rows to `grid_size` points on [0, 1].

    Rows whose length already equals grid_size pass through unchanged; a
    fully non-numeric first row is treated as a header and skipped.
    """
    path = Path(path)
    rows = _parse_rows(path)
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: need at least 2 data rows, got {len(rows)}")
    grid = Grid.uniform(grid_size)
    out = np.empty((len(rows), grid_size))
    for j, row in enumerate(rows):
        if len(row) < 2:
            raise CsvFormatError(f"{path}: row {j + 1} has fewer than 2 samples")
        if len(row) == grid_size:
            out[j] = row
        else:
            native = np.linspace(0.0, 1.0, len(row))
            out[j] = np.interp(grid.points, native, row)
    return FunctionalSeries(grid, out)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_series_csv(path: str | Path, values: np.ndarray) -> None:
    """One row per curve, full-precision floats, LF line endings."""
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        for row in np.atleast_2d(values):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_columns_csv(path: str | Path, header: list[str], columns: list[np.ndarray]) -> None:
    """Named columns, one record per grid point / lag."""
    rows = zip(*columns)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
