"""Cartesian sweep over the configured axes, with optional (L, ratio) plot data and cell exports."""

import logging
from pathlib import Path

from dyadic_lab.io.cell_csv import write_cell_csv
from dyadic_lab.io.reports import write_csv
from dyadic_lab.schemas import ExperimentConfig
from dyadic_lab.services.experiment_service import columns, plot_series, run_sweep, sweep_cells

logger = logging.getLogger(__name__)


def plot_file_name(alpha: float, k: int, pair: int, b: int) -> str:
    return f"plot_alpha{alpha:g}_k{k}_w{pair}_b{b}.csv"


def run(config: ExperimentConfig, out: Path, seed: int, threads: int) -> int:
    rows = run_sweep(config, seed=seed, threads=threads)
    config_hash = config.config_hash()
    write_csv(out / "sweep.csv", columns(config), rows, config_hash, seed)
    if config.plot_data:
        for (alpha, k, pair, b), series in plot_series(config, rows).items():
            points = [{"L": level, "ratio": ratio} for level, ratio in series]
            write_csv(out / plot_file_name(alpha, k, pair, b), ("L", "ratio"), points, config_hash, seed)
    if config.export_cells:
        cells = sweep_cells(config)
        for name, f in cells.items():
            write_cell_csv(f, out / "cells" / name)
        logger.info(f"Exported {len(cells)} cell functions to {out / 'cells'}")
    return 0
