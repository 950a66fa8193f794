"""
Report module: checks, serialization of tensors and JSON/text emission.
"""

import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd
from sympy import QQ

from .algebra import RatFnMatrix
from .parser import format_value
from .utils import ALLOWED_FORMATS, REPORT_SCHEMA_VERSION

logger = logging.getLogger(__name__)

_REQUIRED_KEYS = {"schema", "group", "command", "checks", "data"}


@dataclass
class Check:
    """One named pass/fail identity with a human-readable detail."""

    id: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"id": self.id, "status": "pass" if self.passed else "fail", "detail": self.detail}


@dataclass
class Report:
    """Result of one CLI command."""

    group: str
    command: str
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        level = logging.DEBUG if check.passed else logging.WARNING
        logger.log(level, f"{check.id}: {'pass' if check.passed else 'fail'} {check.detail}".rstrip())
        return check

    def extend(self, checks: Sequence[Check]) -> None:
        for check in checks:
            self.add(check)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA_VERSION,
            "group": self.group,
            "command": self.command,
            "checks": [check.to_dict() for check in self.checks],
            "data": self.data,
        }


def format_rational(value) -> str:
    """Print a QQ element or int as "a" or "a/b"."""
    value = QQ.convert(value)
    numerator, denominator = QQ.numer(value), QQ.denom(value)
    return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"


def index_key(*indices: int) -> str:
    """Key "(i,j,k)" from 0-based indices."""
    return "(" + ",".join(str(i + 1) for i in indices) + ")"


def tensor_to_dict(matrices: Sequence[RatFnMatrix]) -> Dict[str, str]:
    """
    Serialize a family of matrices M_i with M_i[k][j] = T_ij^k.

    Only nonzero entries are kept, keyed "(i,j,k)".
    """
    result = {}
    for i, matrix in enumerate(matrices):
        for k in range(matrix.rows):
            for j in range(matrix.cols):
                value = matrix[k, j]
                if not value.is_zero():
                    result[index_key(i, j, k)] = format_value(value)
    return result


def matrix_to_rows(matrix: RatFnMatrix) -> List[List[str]]:
    """Serialize a matrix as a list of rows of strings."""
    return [[format_value(value) for value in row] for row in matrix.entries]


def polys_to_strings(polys: Sequence) -> List[str]:
    return [format_value(p) for p in polys]


def validate_report(document: Dict[str, Any]) -> bool:
    """
    Validate that a decoded report document matches the schema.

    Args:
        document: Decoded JSON report

    Returns:
        True if valid, False otherwise
    """
    missing = _REQUIRED_KEYS - set(document)
    if missing:
        logger.error(f"Missing required report keys: {sorted(missing)}")
        return False
    if document["schema"] != REPORT_SCHEMA_VERSION:
        logger.error(f"Unsupported report schema: {document['schema']}")
        return False
    if not isinstance(document["checks"], list) or not isinstance(document["data"], dict):
        logger.error("Report checks must be a list and data an object")
        return False
    for check in document["checks"]:
        if set(check) != {"id", "status", "detail"} or check["status"] not in ("pass", "fail"):
            logger.error(f"Malformed check entry: {check}")
            return False
    return True


def _render_value(value: Any) -> str:
    if isinstance(value, dict):
        if not value:
            return "(empty)"
        frame = pd.DataFrame({"key": list(value.keys()), "value": [_flatten(v) for v in value.values()]})
        return frame.to_string(index=False)
    if isinstance(value, list) and value and all(isinstance(row, list) for row in value):
        return pd.DataFrame(value).to_string(index=False, header=False)
    if isinstance(value, list) and value and all(isinstance(row, dict) for row in value):
        return pd.DataFrame(value).to_string(index=False)
    return _flatten(value)


def _flatten(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_text(report: Report) -> str:
    """Render a report as plain text through pandas tables."""
    lines = [f"group: {report.group}", f"command: {report.command}", ""]
    if report.checks:
        frame = pd.DataFrame([check.to_dict() for check in report.checks], columns=["id", "status", "detail"])
        lines.append(frame.to_string(index=False))
    else:
        lines.append("checks: (none)")
    for key in sorted(report.data):
        lines.extend(["", f"[{key}]", _render_value(report.data[key])])
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "json") -> str:
    """
    Serialize a report deterministically.

    Args:
        report: Report to serialize
        fmt: "json" or "text"

    Returns:
        Serialized text ending in a newline
    """
    if fmt not in ALLOWED_FORMATS:
        raise ValueError(f"Invalid format: {fmt}. Allowed formats: {list(ALLOWED_FORMATS)}")
    if fmt == "text":
        return render_text(report)
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def write_report(text: str, out: Optional[Union[str, Path]] = None) -> None:
    """Write serialized report text to a file, or to stdout when out is None."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(text)
    except OSError as e:
        raise RuntimeError(f"Failed to write report to {path}: {str(e)}") from e
    logger.info(f"Report written to {path}")
