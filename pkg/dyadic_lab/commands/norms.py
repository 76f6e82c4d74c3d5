"""Two-weight norm table for every configured point."""

import logging
from pathlib import Path

from dyadic_lab.io.reports import write_csv
from dyadic_lab.schemas import ExperimentConfig
from dyadic_lab.services.experiment_service import columns, run_sweep

logger = logging.getLogger(__name__)


def run(config: ExperimentConfig, out: Path, seed: int, threads: int) -> int:
    rows = run_sweep(config, seed=seed, threads=threads)
    write_csv(out / "norms.csv", columns(config), rows, config.config_hash(), seed)
    return 0
