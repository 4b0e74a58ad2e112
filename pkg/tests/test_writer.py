"""Tests for report writers."""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path

import pytest

from kdsim.exceptions import RegimeWarning, ReportWriteError
from kdsim.models import FREQUENCY_CONVENTION, DerivedParams, IdentityResult
from kdsim.params import validity_report
from kdsim.validate import SuiteReport, ValidationReport
from kdsim.writer import (
    format_csv,
    format_params_table,
    format_summary,
    to_json,
    write_csv,
    write_json,
    write_text,
)


def _result(name: str, passed: bool) -> IdentityResult:
    return IdentityResult(name, 1e-12 if passed else 1.0, 4, passed, 1e-10)


class TestJson:
    """Tests for JSON output."""

    def test_deterministic(self) -> None:
        """Test sorted keys, indent and the trailing newline."""
        text = to_json({"b": 1, "a": [1.5, None]})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1.5, None], "b": 1}

    def test_write_creates_directories(self, tmp_path: Path) -> None:
        """Test that missing parent directories are created."""
        path = tmp_path / "nested" / "out" / "report.json"
        write_json(path, {"seed": 3})
        assert json.loads(path.read_text(encoding="utf-8")) == {"seed": 3}

    def test_write_error(self, tmp_path: Path) -> None:
        """Test that an unwritable target raises ReportWriteError."""
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(ReportWriteError, match="Cannot write"):
            write_json(blocker / "report.json", {})


class TestText:
    """Tests for plain-text output."""

    def test_newline_added(self, tmp_path: Path) -> None:
        """Test that a missing final newline is supplied."""
        path = tmp_path / "summary.txt"
        write_text(path, "done")
        assert path.read_text(encoding="utf-8") == "done\n"

    def test_newline_kept(self, tmp_path: Path) -> None:
        """Test that an existing final newline is not doubled."""
        path = tmp_path / "summary.txt"
        write_text(path, "done\n")
        assert path.read_text(encoding="utf-8") == "done\n"


class TestCsv:
    """Tests for sweep tables."""

    def test_header_and_precision(self) -> None:
        """Test the header row and 15 significant digits."""
        text = format_csv(["dt_s", "P"], [(1.2e-3, 1 / 3)])
        lines = text.splitlines()
        assert lines[0] == "dt_s,P"
        assert lines[1] == "0.0012,0.333333333333333"

    def test_none_is_empty(self) -> None:
        """Test that missing values become empty cells."""
        assert format_csv(["a", "b"], [(None, 2)]).splitlines()[1] == ",2"

    def test_row_length(self) -> None:
        """Test that ragged rows are refused."""
        with pytest.raises(ValueError, match="cells"):
            format_csv(["a", "b"], [(1.0,)])

    def test_empty_table(self) -> None:
        """Test that a table without rows still has its header."""
        assert format_csv(["a"], []) == "a\n"

    def test_write_csv(self, tmp_path: Path) -> None:
        """Test writing to disk."""
        path = tmp_path / "sweep_dt.csv"
        write_csv(path, ["dt_s"], [(0.0,), (1e-3,)])
        assert path.read_text(encoding="utf-8") == "dt_s\n0\n0.001\n"

    def test_non_finite(self) -> None:
        """Test that infinities are written as Python spells them."""
        assert format_csv(["x"], [(math.inf,)]).splitlines()[1] == "inf"

    def test_quoting(self) -> None:
        """Test that text cells holding commas or quotes are quoted."""
        text = format_csv(["label", "x"], [("dt, late", 1.0), ('say "hi"', 2.0)])
        assert text.splitlines()[1:] == ['"dt, late",1', '"say ""hi""",2']


class TestParamsTable:
    """Tests for the human-readable parameter table."""

    def test_table(self, large_derived: DerivedParams) -> None:
        """Test the convention header, one row per field and the validity block."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            validity = validity_report(large_derived)
        table = format_params_table(large_derived, validity)
        assert table.startswith(f"# {FREQUENCY_CONVENTION}")
        assert "omega_a0" in table
        assert "rad/s" in table
        assert "Validity ratios:" in table
        assert "|mu|" in table

    def test_without_validity(self, large_derived: DerivedParams) -> None:
        """Test that the validity block is optional."""
        assert "Validity ratios:" not in format_params_table(large_derived)


class TestSummary:
    """Tests for the validation summary."""

    def test_all_passed(self) -> None:
        """Test a passing run."""
        report = ValidationReport(5, (SuiteReport("params", (_result("xi_identity", True),)),))
        text = format_summary(report)
        assert "# seed 5" in text
        assert "[params]" in text
        assert "PASS  xi_identity" in text
        assert text.rstrip().endswith("All identities passed.")

    def test_failure_listed(self) -> None:
        """Test that failing identities are named with their suite."""
        suite = SuiteReport("cavity", (_result("node_phase", False), _result("zassenhaus", True)))
        text = format_summary(ValidationReport(0, (suite,)))
        assert "FAIL  node_phase" in text
        assert "FAILED: cavity.node_phase" in text
