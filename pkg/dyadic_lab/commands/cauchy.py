"""Contour-integral commutators against the binomial expansion."""

import logging
from pathlib import Path

from dyadic_lab.io.reports import write_csv, write_json
from dyadic_lab.schemas import ExperimentConfig
from dyadic_lab.services.experiment_service import CAUCHY_COLUMNS, run_cauchy

logger = logging.getLogger(__name__)


def run(config: ExperimentConfig, out: Path, seed: int, threads: int) -> int:
    result = run_cauchy(config, seed=seed)
    write_csv(out / "cauchy.csv", CAUCHY_COLUMNS, result.rows, config.config_hash(), seed)
    write_json(out / "contour_report.json", {"config_hash": config.config_hash(), "seed": seed, **result.report})
    return 0
