"""Identity and inequality verification command."""

import logging
from pathlib import Path

from dyadic_lab.io.reports import write_json
from dyadic_lab.schemas import ExperimentConfig
from dyadic_lab.services.verify_service import VerifyReport, run_verify

logger = logging.getLogger(__name__)


def summary_table(report: VerifyReport) -> str:
    width = max(len(check.name) for check in report.checks)
    lines = [f"{'check':<{width}}  {'residual':>12}  {'tolerance':>10}  status"]
    for check in report.checks:
        status = "measured" if check.measured_only else ("ok" if check.passed else "FAIL")
        lines.append(f"{check.name:<{width}}  {check.max_residual:>12.3e}  {check.tolerance:>10.1e}  {status}")
    return "\n".join(lines)


def run(config: ExperimentConfig, out: Path, seed: int, threads: int) -> int:
    """Write verify_report.json; exit 0 iff every non-measured check passes."""
    report = run_verify(config, seed=seed, threads=threads)
    write_json(out / "verify_report.json", report.to_dict())
    print(summary_table(report))
    for failure in report.failures:
        logger.error(f"{failure.name} residual {failure.max_residual:.3e} exceeds {failure.tolerance:.0e}")
    return 0 if report.passed else 1
