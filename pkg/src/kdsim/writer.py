"""Report writers: JSON documents, CSV sweep tables and plain-text summaries.

Machine formats keep 15 significant digits; only the human tables round.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

from .exceptions import ReportWriteError
from .models import FREQUENCY_CONVENTION, DerivedParams
from .params import ValidityReport
from .validate import ValidationReport

CSV_FORMAT = "{:.15g}"


def _write(file_path: Path, content: str) -> None:
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_path.write_text(content, encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"Cannot write to {file_path}: {e}") from e


def to_json(document: Mapping[str, Any]) -> str:
    """Deterministic JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_json(file_path: str | Path, document: Mapping[str, Any]) -> None:
    """Write a report document as JSON.

    Raises:
        ReportWriteError: If the file cannot be written.
    """
    _write(Path(file_path), to_json(document))


def write_text(file_path: str | Path, text: str) -> None:
    """Write a human-readable report.

    Raises:
        ReportWriteError: If the file cannot be written.
    """
    _write(Path(file_path), text if text.endswith("\n") else text + "\n")


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float | int) and not isinstance(value, bool):
        return CSV_FORMAT.format(value)
    return str(value)


def format_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """CSV text with a mandatory header row."""
    buffer = io.StringIO()
    out = csv.writer(buffer, lineterminator="\n")
    out.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} cells, expected {len(columns)}")
        out.writerow([_csv_cell(v) for v in row])
    return buffer.getvalue()


def write_csv(file_path: str | Path, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """Write a sweep table as CSV.

    Raises:
        ReportWriteError: If the file cannot be written.
    """
    _write(Path(file_path), format_csv(columns, rows))


def format_params_table(derived: DerivedParams, validity: ValidityReport | None = None) -> str:
    """Aligned table of derived parameters with unit and provenance."""
    lines = [f"# {FREQUENCY_CONVENTION}", ""]
    document = derived.to_dict()["fields"]
    width = max(len(name) for name in document)
    for name, entry in document.items():
        lines.append(
            f"{name:<{width}}  {entry['value']:>14.6g}  {entry['unit']:<6}  {entry['provenance']}"
        )

    if validity is not None:
        lines.append("")
        lines.append("Validity ratios:")
        for check in validity.checks:
            lines.append(f"  {check.name:<18} {check.value:>10.4g}  {check.verdict.value}")
    return "\n".join(lines) + "\n"


def format_summary(report: ValidationReport) -> str:
    """One line per identity, grouped by suite, followed by the verdict."""
    lines = [f"# {FREQUENCY_CONVENTION}", f"# seed {report.seed}", ""]
    for suite in report.suites:
        lines.append(f"[{suite.name}]")
        for result in suite.results:
            mark = "PASS" if result.passed else "FAIL"
            lines.append(
                f"  {mark}  {result.name:<28} err={result.max_rel_err:.3e}  "
                f"tol={result.tolerance:.1e}  n={result.samples}"
            )
        lines.append("")
    if report.passed:
        lines.append("All identities passed.")
    else:
        lines.append(f"FAILED: {', '.join(report.failures)}")
    return "\n".join(lines) + "\n"
