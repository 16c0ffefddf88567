"""
Loader for the versioned reference values of the (2n, 1) odd orbits.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import yaml

from .models import ReferenceRow, ReferenceTable

logger = logging.getLogger(__name__)

DEFAULT_REFERENCE = Path(__file__).resolve().parent.parent / "data" / "table1.yaml"


class ReferenceParser:
    """Parses YAML reference files into a validated ReferenceTable."""

    def parse_text(self, text: str) -> ReferenceTable:
        doc = yaml.safe_load(text)
        if not isinstance(doc, dict):
            raise ValueError("reference document must be a mapping")
        table = ReferenceTable(**doc)
        logger.debug("parsed reference table v%d with %d row(s)", table.version, len(table.rows))
        return table

    def parse_file(self, file_path: Union[str, Path]) -> ReferenceTable:
        with open(file_path, "r", encoding="utf-8") as f:
            return self.parse_text(f.read())

    def validate(self, table: ReferenceTable) -> List[str]:
        """Consistency problems of a parsed table; empty when it is usable."""
        errors = []
        seen: Dict[int, ReferenceRow] = {}
        for row in table.rows:
            if row.n in seen:
                errors.append(f"row n={row.n} appears more than once")
            seen[row.n] = row
            if not -2.0 < row.h < 0.0:
                errors.append(f"row n={row.n}: energy {row.h} outside (-2, 0)")
            if not 0.0 < row.eta < 2.0:
                errors.append(f"row n={row.n}: velocity {row.eta} outside (0, 2)")
            # eta and h are linked by h = eta^2/2 - 2, up to the published rounding
            implied = 0.5 * row.eta * row.eta - 2.0
            if abs(implied - row.h) > 2.0 * table.tolerance:
                errors.append(
                    f"row n={row.n}: eta={row.eta} implies h={implied:.4f}, table has {row.h}"
                )
        ordered = sorted(seen)
        if ordered and ordered != list(range(1, ordered[-1] + 1)):
            errors.append(f"rows must cover n = 1..{ordered[-1]} without gaps")
        return errors


def load_reference(file_path: Optional[Union[str, Path]] = None) -> ReferenceTable:
    """Load and validate a reference table; the packaged one by default."""
    parser = ReferenceParser()
    table = parser.parse_file(file_path or DEFAULT_REFERENCE)
    errors = parser.validate(table)
    if errors:
        raise ValueError("Reference validation failed:\n" + "\n".join(errors))
    return table
