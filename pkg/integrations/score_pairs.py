"""
Score Pair Files.

Reads numeric files of (predicted, true) scores for correlation, one
system per line. Columns may be separated by tabs, commas or spaces;
blank lines and lines starting with '#' are skipped, as is a single
non-numeric header line before the first row.

Rows have either two columns (predicted, true) or three (system name,
predicted, true); every row of a file uses the same layout.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

from core.errors import DataError
from core.file_utils import read_lines

logger = logging.getLogger(__name__)

_SEPARATORS = re.compile(r"[,\t ]+")


@dataclass
class ScorePairs:
    """Predicted and true scores, optionally keyed by system name."""
    pairs: List[Tuple[float, float]] = field(default_factory=list)
    systems: Optional[List[str]] = None

    @property
    def predicted(self) -> List[float]:
        return [p for p, _ in self.pairs]

    @property
    def true(self) -> List[float]:
        return [t for _, t in self.pairs]


def _parse_scores(columns: List[str]) -> Optional[Tuple[float, float]]:
    try:
        return float(columns[0]), float(columns[1])
    except ValueError:
        return None


def read_score_pairs(path: Union[str, Path]) -> ScorePairs:
    """Parse (predicted, true) pairs, with system names when present.

    Raises:
        DataError: On a row with a different column count than the first,
            a non-numeric or non-finite score, or a repeated system name
    """
    result = ScorePairs()
    width: Optional[int] = None
    header_seen = False

    for number, line in enumerate(read_lines(path), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        columns = _SEPARATORS.split(text)
        if len(columns) not in (2, 3):
            raise DataError(f"{path} line {number}: expected 2 or 3 columns, found {len(columns)}")

        scores = _parse_scores(columns[-2:])
        if scores is None:
            if width is None and not header_seen:
                logger.debug(f"{path}: skipping header {text!r}")
                header_seen = True
                continue
            raise DataError(f"{path} line {number}: non-numeric value in {text!r}")
        if not all(math.isfinite(v) for v in scores):
            raise DataError(f"{path} line {number}: non-finite score in {text!r}")

        if width is None:
            width = len(columns)
            result.systems = [] if width == 3 else None
        elif len(columns) != width:
            raise DataError(f"{path} line {number}: expected {width} columns, found {len(columns)}")

        if result.systems is not None:
            name = columns[0]
            if name in result.systems:
                raise DataError(f"{path} line {number}: system {name!r} listed twice")
            result.systems.append(name)
        result.pairs.append(scores)

    logger.debug(f"Read {len(result.pairs)} score pairs from {path}")
    return result
