"""CODATA constants used across kdsim (SI units)."""

from __future__ import annotations

from scipy import constants as _codata

HBAR: float = _codata.hbar
EPSILON_0: float = _codata.epsilon_0
SPEED_OF_LIGHT: float = _codata.c
AMU: float = _codata.physical_constants["atomic mass constant"][0]
