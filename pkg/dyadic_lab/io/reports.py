"""CSV and JSON report writers with reproducible number formatting."""

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence

from dyadic_lab import __version__

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """17 significant digits for floats, empty field for None."""
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def metadata_line(config_hash: str, seed: int) -> str:
    return f"# config_hash={config_hash} seed={seed} version={__version__}\n"


def write_csv(
    path: str | Path, columns: Sequence[str], rows: Iterable[dict], config_hash: str, seed: int
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in columns])
            count += 1
        handle.write(metadata_line(config_hash, seed))
    logger.info(f"Wrote {count} rows to {path}")
    return path


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path
