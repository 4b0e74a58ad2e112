"""Data models for kdsim.

Physical inputs, derived parameters, wavepacket states and result records.
All frequencies are angular (rad/s); every other quantity is SI.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import MISSING, dataclass, field, fields, replace
from enum import Enum
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray

from .constants import AMU, HBAR
from .exceptions import ConfigError, PreconditionError

FREQUENCY_CONVENTION = "all frequencies are angular (rad/s); 'MHz'/'kHz' mean 1e6/1e3 rad/s"


def as_real(name: str, value: Any) -> float:
    """Coerce a JSON scalar to float, naming the field on failure."""
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    result = float(value)
    if not math.isfinite(result):
        raise ConfigError(f"{name}: must be finite, got {value!r}")
    return result


def as_complex(name: str, value: Any) -> complex:
    """Coerce a JSON number or [re, im] pair to complex."""
    if isinstance(value, list | tuple):
        if len(value) != 2:
            raise ConfigError(f"{name}: complex values are written as [re, im], got {value!r}")
        return complex(as_real(f"{name}[0]", value[0]), as_real(f"{name}[1]", value[1]))
    return complex(as_real(name, value))


def check_keys(block: str, data: Mapping[str, Any], allowed: set[str]) -> None:
    """Reject keys that are not part of a config block."""
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{block}: unknown key(s): {', '.join(unknown)}")


def _require(
    condition: bool, name: str, message: str, error: type[Exception] = ConfigError
) -> None:
    if not condition:
        raise error(f"{name}: {message}")


class Frame(Enum):
    """Picture in which a cavity model's Hamiltonian is written."""

    INTERACTION = "interaction"
    ROTATING = "rotating"


@dataclass(frozen=True)
class PhysicalConfig:
    """Raw experimental inputs in SI units."""

    lambda_laser: float
    cavity_waist: float
    cavity_length: float
    np_radius: float
    epsilon_r: float
    dipole_moment: float
    atom_mass: float
    np_mass: float
    delta_p: float
    delta_al_ratio: float
    eta0: float
    tau_pulse: float
    polarization_overlap: float = 1.0
    delta_cl_ratio: float = 100.0
    v_drift: float = 0.0
    g_x: float = 0.0

    _POSITIVE: ClassVar[tuple[str, ...]] = (
        "lambda_laser",
        "cavity_waist",
        "cavity_length",
        "np_radius",
        "atom_mass",
        "np_mass",
        "delta_p",
        "tau_pulse",
    )

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            _require(math.isfinite(value), f.name, f"must be finite, got {value!r}")
        for name in self._POSITIVE:
            value = getattr(self, name)
            _require(value > 0, name, f"must be strictly positive, got {value!r}")
        _require(self.epsilon_r > 1, "epsilon_r", f"must exceed 1, got {self.epsilon_r!r}")
        _require(
            abs(self.polarization_overlap) <= 1,
            "polarization_overlap",
            f"must lie in [-1, 1], got {self.polarization_overlap!r}",
        )
        _require(
            self.delta_al_ratio >= 1,
            "delta_al_ratio",
            f"large-detuning premise needs delta_al >= Omega_a0, got {self.delta_al_ratio!r}",
        )
        _require(self.eta0 != 0, "eta0", "must be nonzero")
        _require(self.dipole_moment != 0, "dipole_moment", "must be nonzero")
        _require(
            self.delta_cl_ratio not in (0.0, 1.0),
            "delta_cl_ratio",
            "must differ from 0 and 1 (Delta = delta_al - delta_cl' would vanish)",
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> PhysicalConfig:
        """Build from a JSON mapping with exactly the known field names."""
        names = {f.name for f in fields(cls)}
        check_keys("physical config", data, names)
        missing = [f.name for f in fields(cls) if f.default is MISSING and f.name not in data]
        if missing:
            raise ConfigError(f"physical config: missing field(s): {', '.join(missing)}")
        return cls(**{name: as_real(name, value) for name, value in data.items()})

    def to_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def reference_experiment(cls, cavity: str = "large") -> PhysicalConfig:
        """Reference experiment: 780 nm, 1e8 amu nanoparticle, Rb-87 atom.

        ``cavity`` selects the 1 mm x 2 cm ("large") or 40 um x 1 cm ("small") mode.
        """
        geometry = {"large": (1e-3, 2e-2), "small": (40e-6, 1e-2)}
        if cavity not in geometry:
            raise ConfigError(f"cavity: expected one of {sorted(geometry)}, got {cavity!r}")
        waist, length = geometry[cavity]
        np_mass = 1e8 * AMU
        return cls(
            lambda_laser=780e-9,
            cavity_waist=waist,
            cavity_length=length,
            np_radius=150e-9,
            epsilon_r=2.1,
            dipole_moment=3.6e-29,
            atom_mass=86.909180527 * AMU,
            np_mass=np_mass,
            delta_p=np_mass * 13e-6,
            delta_al_ratio=10.0,
            eta0=5.0,
            tau_pulse=1e-7,
        )


@dataclass(frozen=True)
class DerivedParams:
    """Every derived frequency and coupling, with its defining formula."""

    k: float
    epsilon_c: float
    v_cavity: float
    v_np: float
    omega_c: float
    e_field_cavity: float
    omega_c0: float
    omega_a0: float
    delta_al: float
    omega_effm: float
    xi: float
    v_k_np: float
    v_k_atom: float
    eta0: float
    tau_pulse: float
    tau_omega_effm: float
    delta_cl_eff: float
    big_delta: float
    omega_l0: float
    field_ratio: float
    omega_c0_quoted_factor: float

    UNITS: ClassVar[dict[str, str]] = {
        "k": "1/m",
        "epsilon_c": "1",
        "v_cavity": "m^3",
        "v_np": "m^3",
        "omega_c": "rad/s",
        "e_field_cavity": "V/m",
        "omega_c0": "rad/s",
        "omega_a0": "rad/s",
        "delta_al": "rad/s",
        "omega_effm": "rad/s",
        "xi": "1",
        "v_k_np": "m/s",
        "v_k_atom": "m/s",
        "eta0": "1",
        "tau_pulse": "s",
        "tau_omega_effm": "1",
        "delta_cl_eff": "rad/s",
        "big_delta": "rad/s",
        "omega_l0": "rad/s",
        "field_ratio": "1",
        "omega_c0_quoted_factor": "1",
    }

    PROVENANCE: ClassVar[dict[str, str]] = {
        "k": "k = 2 pi / lambda (omega_c ~ omega_l)",
        "epsilon_c": "epsilon_c = 3 (epsilon_r - 1) / (epsilon_r + 2), Clausius-Mossotti",
        "v_cavity": "V_c = pi (w/2)^2 L, plane-wave mode volume",
        "v_np": "V_N = 4 pi R^3 / 3",
        "omega_c": "omega_c = 2 pi c / lambda",
        "e_field_cavity": "E_c = sqrt(hbar omega_c / (2 epsilon_0 V_c)), vacuum field",
        "omega_c0": "Omega_c0 = epsilon_c V_N omega_c / (4 V_c), particle-cavity coupling",
        "omega_a0": "Omega_a0 = (d_a . e_c) sqrt(omega_c / (2 epsilon_0 V_c hbar)), vacuum Rabi",
        "delta_al": "delta_al = delta_al_ratio * Omega_a0",
        "omega_effm": "Omega_effm = eta0^2 Omega_a0^2 / delta_al, two-photon ac Stark shift",
        "xi": "xi = Omega_effm tau / 4, linear scattering amplitude",
        "v_k_np": "v_k = hbar k / m",
        "v_k_atom": "v_k,a = hbar k / m_a",
        "eta0": "input: |eta_0| = |Omega_l0| / |delta_cl'|",
        "tau_pulse": "input: KD pulse duration",
        "tau_omega_effm": "tau * Omega_effm",
        "delta_cl_eff": "delta_cl' = delta_cl_ratio * delta_al (sign is a configuration choice)",
        "big_delta": "Delta = delta_al - delta_cl'",
        "omega_l0": "Omega_l0 = eta0 * delta_cl'",
        "field_ratio": "(e_c . e_l) E_l / E_c = |eta0 delta_cl'| / Omega_c0",
        "omega_c0_quoted_factor": (
            "quoted Omega_c0 (1.4e6 rad/s for a 40 um x 1 cm mode, scaled as 1/V_c) / formula"
        ),
    }

    def to_dict(self) -> dict[str, Any]:
        """Machine format: value, unit and provenance per field."""
        return {
            "frequency_convention": FREQUENCY_CONVENTION,
            "fields": {
                f.name: {
                    "value": getattr(self, f.name),
                    "unit": self.UNITS[f.name],
                    "provenance": self.PROVENANCE[f.name],
                }
                for f in fields(self)
            },
        }


@dataclass(frozen=True)
class GaussianState:
    """Analytic minimum-uncertainty Gaussian released at t = 0.

    Drift velocity and a uniform acceleration along the cavity axis enter only
    as classical phases.
    """

    mass: float
    delta_p: float
    t_free: float = 0.0
    v_drift: float = 0.0
    g_x: float = 0.0

    def __post_init__(self) -> None:
        for name, value in (("mass", self.mass), ("delta_p", self.delta_p)):
            _require(value > 0, name, f"must be positive, got {value!r}", PreconditionError)
        _require(
            self.t_free >= 0,
            "t_free",
            f"must be non-negative, got {self.t_free!r}",
            PreconditionError,
        )

    def at(self, t_free: float) -> GaussianState:
        """Same packet observed ``t_free`` seconds after release."""
        return replace(self, t_free=t_free)

    def recoil_velocity(self, k: float) -> float:
        return HBAR * k / self.mass


@dataclass(frozen=True)
class PulsePair:
    """The two KD pulses and their classical recombination amplitudes."""

    xi1: float
    xi2: float
    alpha_l: complex
    beta_l: complex
    dt: float
    dt1: float

    def __post_init__(self) -> None:
        _require(self.xi1 >= 0 and self.xi2 >= 0, "xi", "must be non-negative", PreconditionError)
        for name, value in (("alpha_l", self.alpha_l), ("beta_l", self.beta_l)):
            _require(abs(value) <= 1, name, f"|{name}| must not exceed 1", PreconditionError)
        _require(self.dt >= 0, "dt", f"must be non-negative, got {self.dt!r}", PreconditionError)
        _require(self.dt1 >= 0, "dt1", f"must be non-negative, got {self.dt1!r}", PreconditionError)


@dataclass(frozen=True)
class SignalBreakdown:
    """Detection probability and its parts.

    ``p_total``/``p_background``/``p_interference`` hold the primary evaluation
    (long-time closed form for analytic states, exact sums for grid states).
    ``p_full`` is the untruncated expansion when one was computed.
    """

    p_total: float
    p_background: float
    p_interference: float
    theta_q: float
    visibility_G: float
    p_full: float | None = None
    imag_residual: float = 0.0
    method: str = "closed-form"

    @property
    def abs_err(self) -> float | None:
        if self.p_full is None:
            return None
        return abs(self.p_total - self.p_full)

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "p_total": self.p_total,
            "p_background": self.p_background,
            "p_interference": self.p_interference,
            "theta_q": self.theta_q,
            "visibility_G": self.visibility_G,
            "p_full": self.p_full,
            "abs_err": self.abs_err,
            "imag_residual": self.imag_residual,
        }


@dataclass(frozen=True, eq=False)
class GridState:
    """Wavefunction sampled on a uniform momentum grid p_i = p_min + i dp.

    When ``kick_divisor`` is set the spacing is dp = 2 hbar k / kick_divisor,
    so every multiple of 2 hbar k / kick_divisor is an exact index shift.
    """

    p_min: float
    dp: float
    amplitudes: NDArray[np.complex128]
    mass: float
    k: float | None = None
    kick_divisor: int | None = None

    @property
    def n_points(self) -> int:
        return int(self.amplitudes.size)

    @property
    def p_max(self) -> float:
        return self.p_min + (self.n_points - 1) * self.dp

    @property
    def momenta(self) -> NDArray[np.float64]:
        return self.p_min + self.dp * np.arange(self.n_points, dtype=np.float64)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dp)

    @property
    def mean_momentum(self) -> float:
        return float(np.sum(self.momenta * np.abs(self.amplitudes) ** 2) * self.dp)

    @property
    def momentum_variance(self) -> float:
        weights = np.abs(self.amplitudes) ** 2 * self.dp
        mean = float(np.sum(self.momenta * weights))
        return float(np.sum((self.momenta - mean) ** 2 * weights))

    def with_amplitudes(self, amplitudes: NDArray[np.complex128]) -> GridState:
        return replace(self, amplitudes=amplitudes)


@dataclass(frozen=True)
class KickOp:
    """Momentum translation e^{i n k x}: p -> p + n hbar k."""

    n: float
    k: float

    @property
    def momentum(self) -> float:
        return self.n * HBAR * self.k


NpState = GaussianState | GridState


@dataclass(frozen=True)
class CavityModel:
    """Two-level atom coupled to one Fock-truncated cavity mode.

    Particle positions are classical parameters. Ground state is basis index 0
    of the atom factor; the joint index is atom * n_fock + photon number.
    """

    n_fock: int
    omega_a0: float
    delta_al: float
    delta_cl: float
    omega_c0: float
    omega_l0: float
    x_np: float
    x_atom: float
    k: float
    tau: float
    frame: Frame = Frame.INTERACTION

    MIN_FOCK: ClassVar[int] = 30

    def __post_init__(self) -> None:
        _require(
            self.n_fock >= self.MIN_FOCK,
            "n_fock",
            f"must be at least {self.MIN_FOCK}, got {self.n_fock}",
            PreconditionError,
        )
        _require(self.tau >= 0, "tau", "must be non-negative", PreconditionError)
        _require(self.k > 0, "k", "must be positive", PreconditionError)
        _require(
            self.delta_cl_eff != 0,
            "delta_cl",
            "effective cavity-laser detuning delta_cl - Omega_c vanishes",
            PreconditionError,
        )

    @staticmethod
    def auto_fock(eta: float) -> int:
        """Truncation that holds a coherent displacement of ``eta`` with headroom."""
        return math.ceil(4 * (abs(eta) + 1) ** 2 + 20)

    @property
    def dimension(self) -> int:
        return 2 * self.n_fock

    @property
    def omega_a(self) -> float:
        return self.omega_a0 * math.cos(self.k * self.x_atom)

    @property
    def omega_c(self) -> float:
        return self.omega_c0 * math.cos(self.k * self.x_np) ** 2

    @property
    def omega_l(self) -> float:
        return self.omega_l0 * math.cos(self.k * self.x_np)

    @property
    def delta_cl_eff(self) -> float:
        return self.delta_cl - self.omega_c

    @property
    def delta_ac(self) -> float:
        return self.delta_al - self.delta_cl

    @property
    def big_delta(self) -> float:
        return self.delta_al - self.delta_cl_eff

    @property
    def eta(self) -> float:
        return self.omega_l / self.delta_cl_eff

    @property
    def mu(self) -> float:
        return self.eta * self.omega_a / self.delta_al

    @property
    def omega_eff(self) -> float:
        return self.eta**2 * self.omega_a**2 / self.delta_al

    @property
    def fastest_rate(self) -> float:
        rates = (
            self.delta_al,
            self.delta_cl,
            self.delta_ac,
            self.omega_l0,
            self.omega_a0,
            self.omega_c0,
        )
        return max(abs(r) for r in rates)


@dataclass(frozen=True)
class PhaseResult:
    """Atom-conditioned phase from full dynamics against the effective model."""

    phi_full: float
    phi_eff: float
    p_excite: float
    rel_err: float
    mu: float = 0.0
    p_excite_peak: float = 0.0
    richardson_delta: float = 0.0
    norm_drift: float = 0.0
    top_fock_population: float = 0.0
    n_steps: int = 0

    def __post_init__(self) -> None:
        for name in ("p_excite", "p_excite_peak"):
            value = getattr(self, name)
            _require(
                -1e-12 <= value <= 1 + 1e-12,
                name,
                f"must be a probability, got {value!r}",
                PreconditionError,
            )

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PathSpec:
    """Four-pulse timing with KD amplitudes and classical recombiners.

    Pulses 1 and 2 are KD (kick +2 hbar k), pulses 3 and 4 classical (kick -2 hbar k)
    for the default ``kick_signs``.
    """

    t1: float
    t2: float
    t3: float
    t4: float
    xi1: float
    xi2: float
    alpha_l: complex
    beta_l: complex
    kick_signs: tuple[int, int, int, int] = (1, 1, -1, -1)
    symmetric: bool = True

    def __post_init__(self) -> None:
        _require(
            self.t1 <= self.t2 <= self.t3 < self.t4,
            "pulse times",
            f"need t1 <= t2 <= t3 < t4, got {(self.t1, self.t2, self.t3, self.t4)}",
            PreconditionError,
        )
        _require(
            all(s in (-1, 1) for s in self.kick_signs),
            "kick_signs",
            f"entries must be +1 or -1, got {self.kick_signs}",
            PreconditionError,
        )
        if self.symmetric and not self.is_symmetric:
            raise PreconditionError(
                "pulse times: symmetric flag set but t2 - t1 != t4 - t3; the atomic "
                "sectors of both paths only coincide when t3 - t1 = t4 - t2"
            )

    @property
    def dt(self) -> float:
        return self.t2 - self.t1

    @property
    def big_t(self) -> float:
        return self.t3 - self.t1

    @property
    def is_symmetric(self) -> bool:
        scale = max(abs(self.t4 - self.t1), 1e-300)
        return abs((self.t2 - self.t1) - (self.t4 - self.t3)) <= 1e-12 * scale

    def pulse_pair(self, dt1: float) -> PulsePair:
        return PulsePair(self.xi1, self.xi2, self.alpha_l, self.beta_l, self.dt, dt1)


@dataclass(frozen=True)
class IdentityResult:
    """Outcome of one verification identity."""

    name: str
    max_rel_err: float
    samples: int
    passed: bool
    tolerance: float
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "max_rel_err": self.max_rel_err,
            "samples": self.samples,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }
