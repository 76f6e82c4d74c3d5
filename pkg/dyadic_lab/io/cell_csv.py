"""CellFunction persistence: first line ``n,L``, then one value per line in row-major order."""

import csv
import logging
from pathlib import Path

import numpy as np

from dyadic_lab.core.types import CellFunction, DomainError, GridSpec

logger = logging.getLogger(__name__)


def write_cell_csv(f: CellFunction, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f.spec.n, f.spec.L])
        writer.writerows([format(float(v), ".17g")] for v in f.values)
    logger.debug(f"wrote {f.spec.cells} cells to {path}")
    return path


def read_cell_csv(path: str | Path) -> CellFunction:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows or len(rows[0]) != 2:
        raise DomainError(f"{path}: first line must hold 'n,L'")
    spec = GridSpec(int(rows[0][0]), int(rows[0][1]))
    values = np.array([float(row[0]) for row in rows[1:]])
    if values.size != spec.cells:
        raise DomainError(f"{path}: expected {spec.cells} values for n={spec.n}, L={spec.L}, found {values.size}")
    return CellFunction(spec, values)
