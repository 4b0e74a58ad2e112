"""Run configuration: JSON reader, oracle/sweep/tolerance blocks.

A config document holds the PhysicalConfig fields at top level plus the
optional ``oracle``, ``sweep`` and ``tolerances`` blocks. Unknown keys are
rejected everywhere so that typos in scientific configs fail loudly.
"""

from __future__ import annotations

import json
import logging
import math
import os
from collections.abc import Mapping
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .exceptions import ConfigError
from .models import PhysicalConfig, as_complex, as_real, check_keys

logger = logging.getLogger(__name__)

TOLERANCE_SCALE_ENV = "KDSIM_TOLERANCE_SCALE"
BLOCKS = ("oracle", "sweep", "tolerances")


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    return value


def _as_real_list(name: str, value: Any) -> tuple[float, ...]:
    if not isinstance(value, list | tuple):
        raise ConfigError(f"{name}: expected a list of numbers, got {value!r}")
    return tuple(as_real(f"{name}[{i}]", v) for i, v in enumerate(value))


@dataclass(frozen=True)
class Tolerances:
    """Every pass/fail threshold used by the verification suites."""

    char_fn_rel: float = 1e-8
    phase_cancellation: float = 1e-12
    signal_rel: float = 1e-6
    expansion_rel: float = 1e-8
    grid_refinement: float = 1e-10
    zassenhaus_state: float = 1e-10
    displaced_oscillator: float = 1e-8
    solver_agreement: float = 1e-7
    richardson: float = 1e-8
    norm_drift: float = 1e-10
    bch_exponent: float = 0.3
    effective_phase_rel: float = 0.05
    node_phase: float = 1e-8
    position_fit: float = 0.02
    factorization_exponent: float = 0.2
    factorization_exact: float = 1e-12
    path_atomic: float = 1e-10
    recoil_phase: float = 1e-15

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Tolerances:
        check_keys("tolerances", data, {f.name for f in fields(cls)})
        values = {name: as_real(f"tolerances.{name}", v) for name, v in data.items()}
        for name, v in values.items():
            if v <= 0:
                raise ConfigError(f"tolerances.{name}: must be positive, got {v!r}")
        return cls(**values)

    def scaled(self, factor: float) -> Tolerances:
        """Every tolerance multiplied by ``factor``."""
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})

    def to_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def tolerance_scale_from_env(environ: Mapping[str, str] | None = None) -> float:
    """Read the CI escape-hatch multiplier, default 1."""
    env = os.environ if environ is None else environ
    raw = env.get(TOLERANCE_SCALE_ENV)
    if raw is None or raw.strip() == "":
        return 1.0
    try:
        scale = float(raw)
    except ValueError as e:
        raise ConfigError(f"{TOLERANCE_SCALE_ENV}: expected a number, got {raw!r}") from e
    if not math.isfinite(scale) or scale <= 0:
        raise ConfigError(f"{TOLERANCE_SCALE_ENV}: must be positive and finite, got {raw!r}")
    return scale


@dataclass(frozen=True)
class OracleSettings:
    """Knobs of the brute-force oracles."""

    n_fock: int | None = None
    dt_max: float | None = None
    n_positions: int = 8
    eta: float = 2.0
    ratio_ladder: tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    delta_al_tau: float = 2000.0
    mu_ladder: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    random_cases: int = 100
    grid_points: int = 65536
    factorization_grid: int = 8
    factorization_atoms: int = 2
    xi_ladder: tuple[float, ...] = (0.04, 0.02, 0.01)

    def __post_init__(self) -> None:
        if self.n_fock is not None and self.n_fock < 30:
            raise ConfigError(f"oracle.n_fock: must be at least 30, got {self.n_fock}")
        if self.dt_max is not None and self.dt_max <= 0:
            raise ConfigError(f"oracle.dt_max: must be positive, got {self.dt_max}")
        if self.n_positions < 3:
            raise ConfigError(
                f"oracle.n_positions: need at least 3 for a fit, got {self.n_positions}"
            )
        for name in ("ratio_ladder", "mu_ladder", "xi_ladder"):
            ladder = getattr(self, name)
            if len(ladder) < 2:
                raise ConfigError(f"oracle.{name}: need at least two rungs")
            if any(v <= 0 for v in ladder):
                raise ConfigError(f"oracle.{name}: rungs must be positive")
        if any(abs(m) > 0.5 for m in self.mu_ladder):
            raise ConfigError("oracle.mu_ladder: |mu| must not exceed 0.5")
        if self.delta_al_tau <= 0:
            raise ConfigError("oracle.delta_al_tau: must be positive")
        if self.grid_points < 1024 or self.grid_points & (self.grid_points - 1):
            raise ConfigError(
                f"oracle.grid_points: must be a power of two >= 1024, got {self.grid_points}"
            )
        if self.random_cases < 1:
            raise ConfigError("oracle.random_cases: must be positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> OracleSettings:
        check_keys("oracle", data, {f.name for f in fields(cls)})
        values: dict[str, Any] = {}
        for name, value in data.items():
            key = f"oracle.{name}"
            if name in ("ratio_ladder", "mu_ladder", "xi_ladder"):
                values[name] = _as_real_list(key, value)
            elif name in ("n_fock", "dt_max") and value is None:
                values[name] = None
            elif name in (
                "n_fock",
                "n_positions",
                "random_cases",
                "grid_points",
                "factorization_grid",
                "factorization_atoms",
            ):
                values[name] = _as_int(key, value)
            else:
                values[name] = as_real(key, value)
        return cls(**values)

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            result[f.name] = list(value) if isinstance(value, tuple) else value
        return result


@dataclass(frozen=True)
class SweepSettings:
    """Signal sweep along the pulse separation and the momentum spread."""

    dt_list: tuple[float, ...]
    delta_p_list: tuple[float, ...] = ()
    mass: float | None = None
    xi1: float | None = None
    xi2: float | None = None
    alpha_l: complex = complex(1 / math.sqrt(2))
    beta_l: complex = complex(1 / math.sqrt(2))
    t_free: float = 0.1
    reference_dt: float = 1.2e-3
    grid_points: int = 65536

    def __post_init__(self) -> None:
        if not self.dt_list:
            raise ConfigError("sweep.dt_list: must not be empty")
        if any(dt < 0 for dt in self.dt_list):
            raise ConfigError("sweep.dt_list: entries must be non-negative")
        if any(dp <= 0 for dp in self.delta_p_list):
            raise ConfigError("sweep.delta_p_list: entries must be positive")
        if self.mass is not None and self.mass <= 0:
            raise ConfigError("sweep.mass: must be positive")
        for name in ("xi1", "xi2"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"sweep.{name}: must be non-negative")
        for name in ("alpha_l", "beta_l"):
            if abs(getattr(self, name)) > 1:
                raise ConfigError(f"sweep.{name}: modulus must not exceed 1")
        if self.t_free < 0 or self.reference_dt < 0:
            raise ConfigError("sweep: t_free and reference_dt must be non-negative")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SweepSettings:
        check_keys("sweep", data, {f.name for f in fields(cls)})
        if "dt_list" not in data:
            raise ConfigError("sweep: missing field(s): dt_list")
        values: dict[str, Any] = {}
        for name, value in data.items():
            key = f"sweep.{name}"
            if name == "delta_p_list" and isinstance(value, list) and not value:
                raise ConfigError(f"{key}: must not be empty when given")
            if name in ("dt_list", "delta_p_list"):
                values[name] = _as_real_list(key, value)
            elif name in ("alpha_l", "beta_l"):
                values[name] = as_complex(key, value)
            elif name == "grid_points":
                values[name] = _as_int(key, value)
            elif value is None and name in ("mass", "xi1", "xi2"):
                values[name] = None
            else:
                values[name] = as_real(key, value)
        return cls(**values)


@dataclass(frozen=True)
class RunConfig:
    """A parsed config document."""

    physical: PhysicalConfig
    oracle: OracleSettings = field(default_factory=OracleSettings)
    sweep: SweepSettings | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], tolerance_scale: float = 1.0) -> RunConfig:
        if not isinstance(data, Mapping):
            raise ConfigError("config: top level must be a JSON object")
        physical_names = {f.name for f in fields(PhysicalConfig)}
        check_keys("config", data, physical_names | set(BLOCKS))
        blocks = {}
        for name in BLOCKS:
            block = data.get(name, {})
            if block is not None and not isinstance(block, Mapping):
                raise ConfigError(f"{name}: must be a JSON object")
            blocks[name] = block
        physical = PhysicalConfig.from_dict({k: v for k, v in data.items() if k in physical_names})
        tolerances = Tolerances.from_dict(blocks["tolerances"] or {})
        if tolerance_scale != 1.0:
            logger.info("Scaling all tolerances by %g", tolerance_scale)
            tolerances = tolerances.scaled(tolerance_scale)
        sweep = None
        if data.get("sweep") is not None:
            sweep = SweepSettings.from_dict(blocks["sweep"])
        return cls(
            physical=physical,
            oracle=OracleSettings.from_dict(blocks["oracle"] or {}),
            sweep=sweep,
            tolerances=tolerances,
        )


def load_config(file_path: str | Path, environ: Mapping[str, str] | None = None) -> RunConfig:
    """Read a JSON config file.

    Args:
        file_path: Path to the JSON document.
        environ: Environment used for ``KDSIM_TOLERANCE_SCALE`` (default: os.environ).

    Returns:
        Parsed RunConfig with tolerances already scaled.

    Raises:
        ConfigError: If the file is missing, not JSON, or fails validation.
    """
    file_path = Path(file_path)

    if not file_path.exists():
        raise ConfigError(f"Config file not found: {file_path}")

    if not file_path.is_file():
        raise ConfigError(f"Not a file: {file_path}")

    try:
        data = json.loads(file_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{file_path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read {file_path}: {e}") from e

    config = RunConfig.from_dict(data, tolerance_scale_from_env(environ))
    logger.debug("Loaded config from %s", file_path)
    return config


def load_report(file_path: str | Path) -> dict[str, Any]:
    """Read a saved validation report to compare a new run against.

    Raises:
        ConfigError: If the file is missing, not JSON, or not a JSON object.
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        raise ConfigError(f"Baseline report not found: {file_path}")
    try:
        data = json.loads(file_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{file_path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read {file_path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{file_path}: a report must be a JSON object")
    return data
