from __future__ import annotations

# Purpose: Write report tables as CSV and the scenario summary as JSON.
# Date: 2026-10-14
# Related tests: tests/test_runner.py

"""Artifact writers."""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import pandas as pd

__all__ = ["SORT_KEYS", "jsonable", "sort_frame", "write_csv", "write_summary"]

logger = logging.getLogger(__name__)

SORT_KEYS = ("beta", "t", "r", "r_prime", "level")


def sort_frame(frame: pd.DataFrame) -> pd.DataFrame:
    """Stable sort on the identifying columns that are present."""
    keys = [key for key in SORT_KEYS if key in frame.columns]
    if not keys:
        return frame.reset_index(drop=True)
    return frame.sort_values(keys, kind="mergesort").reset_index(drop=True)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.debug("Wrote %d rows to %s", len(frame), path)
    return path


def jsonable(value: Any) -> Any:
    """Convert numpy scalars, paths and enums; non-finite floats become strings."""
    if isinstance(value, Mapping):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else str(number)
    return value


def write_summary(summary: Mapping[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(jsonable(summary), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    logger.debug("Wrote summary to %s", path)
    return path
