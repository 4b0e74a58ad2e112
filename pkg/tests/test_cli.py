"""Tests for the kdsim command line."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import pytest

from kdsim import cli
from kdsim.models import IdentityResult
from kdsim.validate import SuiteReport, ValidationReport

pytestmark = [
    pytest.mark.integration,
    pytest.mark.filterwarnings("ignore::kdsim.exceptions.RegimeWarning"),
]


def _run(*argv: str) -> int:
    return cli.main(list(argv))


class TestParamsCommand:
    """Tests for ``kdsim params``."""

    def test_writes_reports(self, write_config: Any, tmp_path: Path) -> None:
        """Test exit 0 plus the JSON and text outputs."""
        out = tmp_path / "out"
        assert _run("params", "--config", str(write_config()), "--out", str(out)) == cli.EXIT_OK
        document = json.loads((out / "params.json").read_text(encoding="utf-8"))
        assert document["fields"]["omega_a0"]["unit"] == "rad/s"
        assert document["validity"]["worst"] == "warn"
        assert (out / "params.txt").exists()

    def test_scattering_keys(self, write_config: Any, tmp_path: Path) -> None:
        """Test the trap, diffraction-order and scattering entries of params.json."""
        config = write_config(sweep={"dt_list": [0.0], "t_free": 0.05})
        assert _run("params", "--config", str(config), "--out", str(tmp_path)) == cli.EXIT_OK
        document = json.loads((tmp_path / "params.json").read_text(encoding="utf-8"))
        assert set(document["trap_ground_state"]) == {"trap_frequency", "delta_x", "delta_p"}
        assert len(document["kd_order_populations"]) == 7
        scattered = document["scattered_probability"]
        assert scattered["t_free"] == 0.05
        assert scattered["with_fringe_terms"] > 0
        assert scattered["without_fringe_terms"] > 0

    def test_shipped_config(self, config_dir: Path, tmp_path: Path) -> None:
        """Test the example small-cavity config."""
        config = config_dir / "small_cavity.json"
        code = _run("params", "--config", str(config), "--out", str(tmp_path))
        assert code == cli.EXIT_OK

    def test_missing_field(self, physical_dict: dict[str, Any], tmp_path: Path) -> None:
        """Test that an incomplete physical block exits 2."""
        del physical_dict["np_radius"]
        path = tmp_path / "config.json"
        path.write_text(json.dumps(physical_dict), encoding="utf-8")
        assert _run("params", "--config", str(path), "--out", str(tmp_path)) == cli.EXIT_CONFIG

    def test_unknown_key(self, write_config: Any, tmp_path: Path) -> None:
        """Test that a misspelled key exits 2."""
        path = write_config(np_raduis=1e-7)
        assert _run("params", "--config", str(path), "--out", str(tmp_path)) == cli.EXIT_CONFIG

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that a missing config exits 2."""
        code = _run("params", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path))
        assert code == cli.EXIT_CONFIG

    def test_non_finite(self, write_config: Any, tmp_path: Path) -> None:
        """Test that an overflowing derived value exits 2."""
        path = write_config(dipole_moment=1e300)
        assert _run("params", "--config", str(path), "--out", str(tmp_path)) == cli.EXIT_CONFIG

    def test_unwritable_output(self, write_config: Any, tmp_path: Path) -> None:
        """Test that a report that cannot be written exits 1."""
        blocker = tmp_path / "blocker"
        blocker.write_text("x", encoding="utf-8")
        code = _run("params", "--config", str(write_config()), "--out", str(blocker))
        assert code == cli.EXIT_ERROR


class TestToleranceOverrides:
    """Tests for ``--tolerance NAME=VALUE``."""

    def test_malformed(self, write_config: Any, tmp_path: Path) -> None:
        """Test that a pair without '=' exits 2."""
        code = _run(
            "params",
            "--config",
            str(write_config()),
            "--out",
            str(tmp_path),
            "--tolerance",
            "signal_rel",
        )
        assert code == cli.EXIT_CONFIG

    def test_unknown_name(self, write_config: Any, tmp_path: Path) -> None:
        """Test that an unknown tolerance exits 2."""
        code = _run(
            "params",
            "--config",
            str(write_config()),
            "--out",
            str(tmp_path),
            "--tolerance",
            "nope=1e-3",
        )
        assert code == cli.EXIT_CONFIG

    def test_not_a_number(self, write_config: Any, tmp_path: Path) -> None:
        """Test that a non-numeric value exits 2."""
        code = _run(
            "params",
            "--config",
            str(write_config()),
            "--out",
            str(tmp_path),
            "--tolerance",
            "signal_rel=abc",
        )
        assert code == cli.EXIT_CONFIG

    def test_applied_after_scale(
        self, write_config: Any, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that an explicit override is not multiplied by the environment scale."""
        monkeypatch.setenv("KDSIM_TOLERANCE_SCALE", "10")
        parser = cli.build_parser()
        args = parser.parse_args(
            ["params", "--config", str(write_config()), "--tolerance", "signal_rel=1e-3"]
        )
        config = cli._load(args)
        assert config.tolerances.signal_rel == 1e-3
        assert config.tolerances.char_fn_rel == pytest.approx(1e-7)


class TestSweepCommand:
    """Tests for ``kdsim sweep``."""

    def test_writes_csv(self, write_config: Any, tmp_path: Path) -> None:
        """Test one CSV per axis."""
        path = write_config(sweep={"dt_list": [0.0, 0.0012], "delta_p_list": [2.2e-24]})
        out = tmp_path / "out"
        assert _run("sweep", "--config", str(path), "--out", str(out)) == cli.EXIT_OK
        lines = (out / "sweep_dt.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("dt_s,theta_q_rad,G")
        assert len(lines) == 3
        assert (out / "sweep_delta_p.csv").exists()

    def test_empty_dt_list(self, write_config: Any, tmp_path: Path) -> None:
        """Test that an empty sweep exits 2."""
        path = write_config(sweep={"dt_list": []})
        assert _run("sweep", "--config", str(path), "--out", str(tmp_path)) == cli.EXIT_CONFIG

    def test_no_sweep_block(self, write_config: Any, tmp_path: Path) -> None:
        """Test that sweeping without a sweep block exits 2."""
        code = _run("sweep", "--config", str(write_config()), "--out", str(tmp_path))
        assert code == cli.EXIT_CONFIG


class TestValidateCommand:
    """Tests for ``kdsim validate`` and ``kdsim oracle``."""

    def _report(self, passed: bool) -> ValidationReport:
        result = IdentityResult("node_phase", 0.0 if passed else 1.0, 8, passed, 1e-8)
        return ValidationReport(0, (SuiteReport("cavity", (result,)),))

    def test_failure_exits_3(
        self, write_config: Any, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that a missed tolerance still writes the report and exits 3."""
        monkeypatch.setattr(cli, "run_validation", lambda *args, **kwargs: self._report(False))
        code = _run("validate", "--config", str(write_config()), "--out", str(tmp_path))
        assert code == cli.EXIT_TOLERANCE
        document = json.loads((tmp_path / "validation.json").read_text(encoding="utf-8"))
        assert document["failures"] == ["cavity.node_phase"]
        assert "FAILED" in (tmp_path / "validation.txt").read_text(encoding="utf-8")

    def test_oracle_subcommand(
        self, write_config: Any, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that ``oracle cavity`` runs only the cavity suite."""
        calls: list[tuple[str, ...]] = []

        def fake(config: Any, seed: int = 0, suites: tuple[str, ...] = ()) -> ValidationReport:
            calls.append(tuple(suites))
            return self._report(True)

        monkeypatch.setattr(cli, "run_validation", fake)
        code = _run("oracle", "cavity", "--config", str(write_config()), "--out", str(tmp_path))
        assert code == cli.EXIT_OK
        assert calls == [("cavity",)]
        assert (tmp_path / "oracle_cavity.json").exists()

    def test_seed_forwarded(
        self, write_config: Any, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that --seed reaches the validation run."""
        seeds: list[int] = []

        def fake(config: Any, seed: int = 0, suites: tuple[str, ...] = ()) -> ValidationReport:
            seeds.append(seed)
            return self._report(True)

        monkeypatch.setattr(cli, "run_validation", fake)
        _run("validate", "--config", str(write_config()), "--out", str(tmp_path), "--seed", "42")
        assert seeds == [42]

    def test_negative_seed(self, write_config: Any) -> None:
        """Test that argparse refuses a negative seed with exit 2."""
        with pytest.raises(SystemExit) as excinfo:
            _run("validate", "--config", str(write_config()), "--seed", "-1")
        assert excinfo.value.code == 2

    def test_baseline_match(
        self, write_config: Any, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that a run reproducing its baseline exits 0."""
        monkeypatch.setattr(cli, "run_validation", lambda *args, **kwargs: self._report(True))
        baseline = tmp_path / "baseline.json"
        baseline.write_text(json.dumps(self._report(True).to_dict()), encoding="utf-8")
        argv = ["--config", str(write_config()), "--out", str(tmp_path / "out")]
        assert _run("validate", *argv, "--baseline", str(baseline)) == cli.EXIT_OK

    def test_baseline_mismatch(
        self, write_config: Any, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that a report drifting from its baseline exits 3 after writing."""
        monkeypatch.setattr(cli, "run_validation", lambda *args, **kwargs: self._report(True))
        document = self._report(True).to_dict()
        document["suites"]["cavity"]["identities"][0]["max_rel_err"] = 0.5
        baseline = tmp_path / "baseline.json"
        baseline.write_text(json.dumps(document), encoding="utf-8")
        out = tmp_path / "out"
        argv = ["--config", str(write_config()), "--out", str(out)]
        assert _run("validate", *argv, "--baseline", str(baseline)) == cli.EXIT_TOLERANCE
        assert (out / "validation.json").exists()

    def test_missing_baseline(self, write_config: Any, tmp_path: Path) -> None:
        """Test that an unreadable baseline is a configuration error."""
        argv = ["--config", str(write_config()), "--out", str(tmp_path)]
        code = _run("validate", *argv, "--baseline", str(tmp_path / "nope.json"))
        assert code == cli.EXIT_CONFIG

    def test_requires_subcommand(self) -> None:
        """Test that argparse rejects a bare invocation."""
        with pytest.raises(SystemExit):
            cli.main([])
