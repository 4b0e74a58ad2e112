"""Pytest fixtures for kdsim tests."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from kdsim.constants import AMU, HBAR
from kdsim.models import DerivedParams, GaussianState, PhysicalConfig
from kdsim.params import derive_params

CONFIG_DIR = Path(__file__).parent.parent / "configs"

K_780 = 2 * np.pi / 780e-9
NP_MASS = 1e8 * AMU


@pytest.fixture
def config_dir() -> Path:
    """Path to the shipped example configs."""
    return CONFIG_DIR


@pytest.fixture
def large_cavity() -> PhysicalConfig:
    """Reference experiment in the 1 mm x 2 cm cavity."""
    return PhysicalConfig.reference_experiment("large")


@pytest.fixture
def small_cavity() -> PhysicalConfig:
    """Reference experiment in the 40 um x 1 cm cavity."""
    return PhysicalConfig.reference_experiment("small")


@pytest.fixture
def large_derived(large_cavity: PhysicalConfig) -> DerivedParams:
    """Derived parameters of the large cavity."""
    return derive_params(large_cavity)


@pytest.fixture
def small_derived(small_cavity: PhysicalConfig) -> DerivedParams:
    """Derived parameters of the small cavity."""
    return derive_params(small_cavity)


@pytest.fixture
def k() -> float:
    """Wavenumber of 780 nm light."""
    return float(K_780)


@pytest.fixture
def nanoparticle() -> GaussianState:
    """1e8 amu packet with 13 um/s velocity spread, at release."""
    return GaussianState(mass=NP_MASS, delta_p=NP_MASS * 13e-6)


@pytest.fixture
def light_packet() -> GaussianState:
    """Packet whose momentum spread is 4 hbar k, small enough for cheap grids."""
    return GaussianState(mass=1e4 * AMU, delta_p=4 * HBAR * K_780)


@pytest.fixture
def physical_dict() -> dict[str, Any]:
    """Raw JSON mapping of the large-cavity physical block."""
    return PhysicalConfig.reference_experiment("large").to_dict()


@pytest.fixture
def write_config(tmp_path: Path, physical_dict: dict[str, Any]):  # type: ignore[no-untyped-def]
    """Factory writing a config document (physical block plus extras) to disk."""

    def _write(name: str = "config.json", **blocks: Any) -> Path:
        document = {**physical_dict, **blocks}
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write
