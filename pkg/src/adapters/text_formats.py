"""
Byte-stable text outputs: CSV tables and ASCII PGM heat maps.

CSV files use ',' separators, '.' decimals (``repr`` of floats), LF line
endings and a fixed header row.
"""
import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from src.utils.resources import ensure_parent_exists

PathLike = Union[str, Path]


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    target = ensure_parent_exists(path)
    with open(target, "w", encoding="utf-8", newline="") as handle:
        handle.write(render_csv(header, rows))
    return target


def render_pgm(values: np.ndarray, max_value: int = 255) -> str:
    """P2 PGM with cells scaled by the grid maximum; an all-zero grid stays zero"""
    grid = np.asarray(values, dtype=np.float64)
    height, width = grid.shape
    peak = grid.max() if grid.size else 0.0
    if peak > 0:
        scaled = np.rint(np.clip(grid, 0.0, None) / peak * max_value).astype(int)
    else:
        scaled = np.zeros(grid.shape, dtype=int)
    lines = ["P2", f"{width} {height}", str(max_value)]
    lines.extend(" ".join(str(v) for v in row) for row in scaled)
    return "\n".join(lines) + "\n"


def write_pgm(path: PathLike, values: np.ndarray, max_value: int = 255) -> Path:
    target = ensure_parent_exists(path)
    with open(target, "w", encoding="ascii", newline="") as handle:
        handle.write(render_pgm(values, max_value))
    return target


def write_grid_csv(path: PathLike, values: np.ndarray) -> Path:
    """Raw heat-grid floats, one grid row per line"""
    grid = np.asarray(values)
    header = [f"c{c}" for c in range(grid.shape[1])]
    return write_csv(path, header, grid.tolist())
