"""Numerical comparison utilities shared by the oracle suites.

Relative errors use an absolute floor so that comparisons against vanishing
reference values stay finite. Report comparison walks nested JSON-like
mappings and logs the first mismatch.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping
from typing import Any

import numpy as np

from .models import IdentityResult

logger = logging.getLogger(__name__)

ABS_FLOOR = 1e-15


def relative_error(actual: complex, expected: complex, floor: float = ABS_FLOOR) -> float:
    """|actual - expected| / max(|expected|, floor)."""
    return abs(actual - expected) / max(abs(expected), floor)


def identity_result(
    name: str,
    errors: Iterable[float],
    tolerance: float,
    detail: Mapping[str, Any] | None = None,
) -> IdentityResult:
    """Summarize per-sample errors of one identity against its tolerance.

    A NaN error counts as a failure.
    """
    values = [float(e) for e in errors]
    worst = max(values) if values else 0.0
    passed = all(math.isfinite(v) for v in values) and worst <= tolerance
    if passed:
        logger.debug(
            "%s: max error %.3e <= %.1e over %d samples", name, worst, tolerance, len(values)
        )
    else:
        logger.warning("%s: max error %.3e exceeds tolerance %.1e", name, worst, tolerance)
    return IdentityResult(
        name=name,
        max_rel_err=worst,
        samples=len(values),
        passed=passed,
        tolerance=tolerance,
        detail=dict(detail or {}),
    )


def compare_reports(
    report1: Mapping[str, Any],
    report2: Mapping[str, Any],
    rtol: float = 0.0,
    atol: float = 0.0,
    _path: str = "",
) -> bool:
    """Compare two report documents, recursing into mappings and lists.

    Args:
        report1: First report.
        report2: Second report.
        rtol: Relative tolerance for numeric leaves.
        atol: Absolute tolerance for numeric leaves.

    Returns:
        True if the reports are equivalent, False otherwise.
    """
    for key in report1:
        if key not in report2:
            logger.warning("Key '%s%s' not found in second report", _path, key)
            return False

    for key in report2:
        if key not in report1:
            logger.warning("Key '%s%s' not found in first report", _path, key)
            return False
        if not _compare_values(report1[key], report2[key], f"{_path}{key}", rtol, atol):
            return False

    return True


def _compare_values(val1: Any, val2: Any, label: str, rtol: float, atol: float) -> bool:
    if isinstance(val2, Mapping):
        if not isinstance(val1, Mapping):
            logger.warning("Type mismatch at '%s'", label)
            return False
        return compare_reports(val1, val2, rtol, atol, _path=f"{label}.")

    if isinstance(val2, list | tuple | np.ndarray):
        if not isinstance(val1, list | tuple | np.ndarray) or len(val1) != len(val2):
            logger.warning("Length mismatch at '%s'", label)
            return False
        return all(
            _compare_values(a, b, f"{label}[{i}]", rtol, atol)
            for i, (a, b) in enumerate(zip(val1, val2, strict=True))
        )

    numeric = (int, float, complex)
    if (
        isinstance(val1, numeric)
        and isinstance(val2, numeric)
        and not isinstance(val1, bool)
        and not isinstance(val2, bool)
    ):
        if not np.isclose(val1, val2, rtol=rtol, atol=atol, equal_nan=True):
            logger.warning("Mismatch at '%s': %r vs %r", label, val1, val2)
            return False
        return True

    if val1 != val2:
        logger.warning("Mismatch at '%s': %r vs %r", label, val1, val2)
        return False
    return True
