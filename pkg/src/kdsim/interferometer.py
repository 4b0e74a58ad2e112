"""Ramsey-Borde path programs, the general detection signal and many-atom factorization.

Only the two +x paths reaching the detector are built. Each path acts on the
nanoparticle as an amplitude times cos^2(k x) inserted at a Heisenberg time
relative to t1 (0 for the first KD pulse, dt for the second); the atomic
sector is common to both paths for a symmetric timing and divides out of the
probability.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.random import Generator
from numpy.typing import NDArray
from scipy.special import jv

from . import gaussian
from .compare import identity_result
from .config import OracleSettings, Tolerances
from .constants import HBAR
from .exceptions import PreconditionError
from .models import (
    GaussianState,
    GridState,
    IdentityResult,
    KickOp,
    NpState,
    PathSpec,
    SignalBreakdown,
)
from .wavepacket import (
    apply_kick,
    apply_standing_wave,
    evolve,
    gaussian_to_grid,
    heisenberg_kick,
    init_gaussian,
)

logger = logging.getLogger(__name__)

MAX_FACTOR_DIMENSION = 16**4
MAX_GRID_SIZE = 16
# Separation between the second KD pulse and the first recombiner.
DEFAULT_GAP = 2e-3


class PathProgram(NamedTuple):
    """Amplitude and cos^2 insertion times (relative to t1) of one path."""

    amplitude: complex
    insertion_times: tuple[float, ...]


@dataclass(frozen=True)
class PathPrograms:
    """Both nanoparticle programs plus the verified common atomic factor."""

    r: PathProgram
    b: PathProgram
    common_time: float
    recoil_phase: float
    atomic_error: float


def cos2_insertion(s: GridState, k: float, t: float = 0.0) -> GridState:
    """Apply cos^2(k x(t)) = 1/2 + e^{i2kx(t)}/4 + e^{-i2kx(t)}/4."""
    plus = heisenberg_kick(s, KickOp(2, k), t)
    minus = heisenberg_kick(s, KickOp(-2, k), t)
    return s.with_amplitudes(0.5 * s.amplitudes + 0.25 * plus.amplitudes + 0.25 * minus.amplitudes)


def _cos2(kx: NDArray[np.float64]) -> NDArray[np.complex128]:
    return np.asarray(np.cos(kx) ** 2, dtype=np.complex128)


def _state_distance(a: GridState, b: GridState) -> float:
    return float(np.sqrt(np.sum(np.abs(a.amplitudes - b.amplitudes) ** 2) * a.dp))


def path_operators(
    spec: PathSpec, atom_mass: float, k: float, n_points: int = 4096
) -> PathPrograms:
    """Build both path programs after checking that the atomic sectors coincide.

    The literal sequences U(t4-t3) K- U(t3-t1) K+ and K- U(t4-t2) K+ U(t2-t1)
    are applied to a small atomic wavepacket (delta_p = hbar k / 2) and
    compared with U(t4-t1) e^{-i 2 hbar k^2 T / m_a} e^{-i 2 k v T}.

    Raises:
        PreconditionError: If the timing is not symmetric (t3 - t1 = t4 - t2).
    """
    if not spec.is_symmetric:
        raise PreconditionError(
            "path_operators: the atomic sectors of both paths only cancel for a "
            "symmetric timing t3 - t1 = t4 - t2"
        )
    s1, s2, s3, s4 = spec.kick_signs
    if not s1 == s2 == -s3 == -s4:
        raise PreconditionError(
            f"kick_signs: pulses 3 and 4 must undo pulses 1 and 2, got {spec.kick_signs}"
        )
    k1, k2, k3, k4 = (KickOp(2 * s, k) for s in spec.kick_signs)
    big_t = spec.big_t
    atom = init_gaussian(0.5 * HBAR * k, atom_mass, n_points=n_points, k=k, max_kick=4.0)

    r_path = evolve(apply_kick(atom, k1), spec.t3 - spec.t1)
    r_path = evolve(apply_kick(r_path, k3), spec.t4 - spec.t3)
    b_path = apply_kick(evolve(atom, spec.t2 - spec.t1), k2)
    b_path = apply_kick(evolve(b_path, spec.t4 - spec.t2), k4)

    recoil_phase = -2 * HBAR * k**2 * big_t / atom_mass
    sign = spec.kick_signs[0]
    phase = recoil_phase - sign * 2 * k * atom.momenta * big_t / atom_mass
    expected = evolve(
        atom.with_amplitudes(atom.amplitudes * np.exp(1j * phase)),
        spec.t4 - spec.t1,
    )
    error = max(_state_distance(r_path, expected), _state_distance(b_path, expected))
    logger.debug("Atomic sectors agree to %.2e (T=%.3e s)", error, big_t)

    return PathPrograms(
        r=PathProgram(1j * spec.alpha_l * spec.xi1, (0.0,)),
        b=PathProgram(1j * spec.beta_l * spec.xi2, (spec.dt,)),
        common_time=spec.t4 - spec.t1,
        recoil_phase=recoil_phase,
        atomic_error=error,
    )


def ramsey_borde_spec(
    t1: float,
    dt: float,
    xi1: float,
    xi2: float,
    alpha_l: complex,
    beta_l: complex,
    gap: float = DEFAULT_GAP,
) -> PathSpec:
    """Symmetric four-pulse timing t1, t1 + dt, t1 + dt + gap, t1 + 2 dt + gap.

    For dt = 0 the last pulse cannot follow the third symmetrically; it is
    placed ``gap`` later and the returned PathSpec is marked asymmetric.
    The nanoparticle signal only depends on t1 and dt.
    """
    return PathSpec(
        t1=t1,
        t2=t1 + dt,
        t3=t1 + dt + gap,
        t4=t1 + dt + gap + (dt if dt > 0 else gap),
        xi1=xi1,
        xi2=xi2,
        alpha_l=alpha_l,
        beta_l=beta_l,
        symmetric=dt > 0,
    )


def _kd_amplitude(xi: float) -> Callable[[NDArray[np.float64]], NDArray[np.complex128]]:
    """Exact +2 hbar k diffraction amplitude i J1(2 xi c) e^{i 2 xi c}, c = cos^2(k x)."""

    def amplitude(kx: NDArray[np.float64]) -> NDArray[np.complex128]:
        z = 2 * xi * np.cos(kx) ** 2
        return np.asarray(1j * jv(1, z) * np.exp(1j * z), dtype=np.complex128)

    return amplitude


def _path_ket(
    s: GridState, k: float, t: float, recombiner: complex, xi: float, higher_orders: bool
) -> GridState:
    """One path applied to the nanoparticle: recombiner times the KD amplitude at time t."""
    if higher_orders:
        # The exact amplitude i J1(2 xi c) e^{i 2 xi c} already carries the i xi prefactor.
        scattered = evolve(apply_standing_wave(evolve(s, t), _kd_amplitude(xi), k), -t)
        return scattered.with_amplitudes(recombiner * scattered.amplitudes)
    inserted = cos2_insertion(s, k, t)
    return inserted.with_amplitudes(recombiner * 1j * xi * inserted.amplitudes)


def grid_signal(
    spec: PathSpec,
    state: GridState,
    k: float,
    higher_orders: bool = False,
    common_phase: float = 0.0,
) -> SignalBreakdown:
    """Detection probability ||(R_N + B_N) N(t1)||^2 on a momentum grid.

    ``common_phase`` multiplies both paths (it must drop out of P).
    """
    scalar = complex(np.exp(1j * common_phase))
    r = _path_ket(state, k, 0.0, scalar * spec.alpha_l, spec.xi1, higher_orders)
    b = _path_ket(state, k, spec.dt, scalar * spec.beta_l, spec.xi2, higher_orders)

    rr = np.vdot(r.amplitudes, r.amplitudes) * state.dp
    bb = np.vdot(b.amplitudes, b.amplitudes) * state.dp
    rb = np.vdot(r.amplitudes, b.amplitudes) * state.dp
    total = rr + bb + rb + rb.conjugate()
    delta_p = math.sqrt(state.momentum_variance)
    return SignalBreakdown(
        p_total=float(total.real),
        p_background=float((rr + bb).real),
        p_interference=float(2 * rb.real),
        theta_q=gaussian.theta_q(k, state.mass, spec.dt),
        visibility_G=gaussian.visibility_G(delta_p, state.mass, k, spec.dt),
        imag_residual=abs(float(total.imag)),
        method="grid-exact-kd" if higher_orders else "grid",
    )


def general_signal(
    spec: PathSpec, np_state: NpState, k: float, higher_orders: bool = False
) -> SignalBreakdown:
    """Signal for an analytic or grid nanoparticle state given at t1.

    A GaussianState is evaluated in closed form with dt1 = ``t_free``; a
    GridState is evaluated exactly on its grid.
    """
    if isinstance(np_state, GaussianState):
        if higher_orders:
            raise PreconditionError("higher_orders: only available for grid states")
        return gaussian.signal(spec.pulse_pair(np_state.t_free), np_state, k)
    return grid_signal(spec, np_state, k, higher_orders)


def translation_equivalence_check(
    spec: PathSpec, state: GridState, k: float, tolerance: float
) -> IdentityResult:
    """Heisenberg-translated path operators against the literal time-ordered ones.

    The literal side multiplies psi(x) by cos^2(k x) at each pulse's own lab
    time; the translated side applies cos^2(k x(t)) at t1 and evolves once.
    """
    literal_r = evolve(apply_standing_wave(state, _cos2, k), spec.t4 - spec.t1)
    at_t2 = evolve(state, spec.t2 - spec.t1)
    literal_b = evolve(apply_standing_wave(at_t2, _cos2, k), spec.t4 - spec.t2)
    moved_r = evolve(cos2_insertion(state, k, 0.0), spec.t4 - spec.t1)
    moved_b = evolve(cos2_insertion(state, k, spec.dt), spec.t4 - spec.t1)
    errors = [_state_distance(literal_r, moved_r), _state_distance(literal_b, moved_b)]
    return identity_result("translation_equivalence", errors, tolerance)


def recoil_phase_check(
    spec: PathSpec, state: GridState, atom_mass: float, k: float, tolerance: float
) -> IdentityResult:
    """The common atomic recoil phase leaves P unchanged."""
    phase = -2 * HBAR * k**2 * spec.big_t / atom_mass
    plain = grid_signal(spec, state, k).p_total
    dressed = grid_signal(spec, state, k, common_phase=phase).p_total
    return identity_result(
        "recoil_phase", [abs(plain - dressed)], tolerance, {"recoil_phase": phase}
    )


def signal_equivalence_check(
    np_state: GaussianState,
    grid: GridState,
    k: float,
    tolerance: float,
    dt_list: tuple[float, ...] = (0.5e-3, 1.2e-3, 3e-3),
) -> IdentityResult:
    """Closed-form signal against the exact grid signal at the same release time.

    The second recombiner carries a pi/4 phase so that the sign of theta_q is
    visible in P.
    """
    errors = []
    values = []
    beta = complex(np.exp(0.25j * math.pi) / math.sqrt(2))
    for dt in dt_list:
        spec = ramsey_borde_spec(np_state.t_free, dt, 0.02, 0.02, complex(1 / math.sqrt(2)), beta)
        closed = general_signal(spec, np_state, k)
        numeric = grid_signal(spec, grid, k)
        errors.append(abs(numeric.p_total - closed.p_total) / abs(closed.p_total))
        values.append({"dt": dt, "closed": closed.p_total, "grid": numeric.p_total})
    return identity_result("signal_equivalence", errors, tolerance, {"points": values})


@dataclass(frozen=True)
class FactorizationReport:
    """Error of the product-of-pairs ordering against exact two-pulse evolution."""

    n_atoms: int
    grid_size: int
    dt: float
    xis: tuple[float, ...]
    errors: tuple[float, ...]
    exponent: float | None


def _random_ket(rng: Generator, size: int) -> NDArray[np.complex128]:
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return np.asarray(v / np.linalg.norm(v), dtype=np.complex128)


def _ring_evolution(
    psi: NDArray[np.complex128], masses: list[float], k: float, t: float, inverse: bool = False
) -> NDArray[np.complex128]:
    """Exact free evolution on a lambda/2 ring, axis by axis in momentum space."""
    m = psi.shape[0]
    p = 2 * HBAR * k * np.fft.fftfreq(m) * m
    for axis, mass in enumerate(masses):
        phase = np.exp((1j if inverse else -1j) * p**2 * t / (2 * mass * HBAR))
        shape = [1] * psi.ndim
        shape[axis] = m
        psi = np.fft.ifft(np.fft.fft(psi, axis=axis) * phase.reshape(shape), axis=axis)
    return psi


def many_atom_factorization_check(
    n_atoms: int,
    xi1: float,
    xi2: float,
    grid_size: int,
    k: float,
    np_mass: float,
    atom_mass: float,
    dt: float,
    rng: Generator,
) -> float:
    """Distance between exact and pairwise-factorized two-pulse states.

    Particles live on a ring of ``grid_size`` points spanning lambda/2 (axis 0
    is the nanoparticle); each starts in a random state drawn from ``rng``.
    Exact: U0(dt)^dag U_L2 U0(dt) U_L1; factorized: prod_j
    e^{i xi'_j(dt)} e^{i xi_j}.

    Raises:
        PreconditionError: If n_atoms is outside 1..3, the grid exceeds 16
            points, or the joint dimension exceeds 16^4.
    """
    if not 1 <= n_atoms <= 3:
        raise PreconditionError(f"n_atoms: must be 1, 2 or 3, got {n_atoms}")
    if not 2 <= grid_size <= MAX_GRID_SIZE:
        raise PreconditionError(f"grid_size: must lie in [2, {MAX_GRID_SIZE}], got {grid_size}")
    if grid_size ** (n_atoms + 1) > MAX_FACTOR_DIMENSION:
        raise PreconditionError(
            f"joint dimension {grid_size ** (n_atoms + 1)} exceeds {MAX_FACTOR_DIMENSION}"
        )

    masses = [np_mass] + [atom_mass] * n_atoms
    kx = math.pi * np.arange(grid_size) / grid_size
    c2 = np.cos(kx) ** 2

    psi = _random_ket(rng, grid_size)
    for _ in range(n_atoms):
        psi = np.multiply.outer(psi, _random_ket(rng, grid_size))

    def coupling(j: int, xi: float) -> NDArray[np.complex128]:
        """Diagonal of exp(i 4 xi cos^2(k x) cos^2(k x_aj)) on the joint grid."""
        shape = [1] * (n_atoms + 1)
        shape[0] = grid_size
        np_part = c2.reshape(shape)
        shape = [1] * (n_atoms + 1)
        shape[j] = grid_size
        atom_part = c2.reshape(shape)
        return np.asarray(np.exp(1j * 4 * xi * np_part * atom_part), dtype=np.complex128)

    exact = psi
    for j in range(1, n_atoms + 1):
        exact = exact * coupling(j, xi1)
    exact = _ring_evolution(exact, masses, k, dt)
    for j in range(1, n_atoms + 1):
        exact = exact * coupling(j, xi2)
    exact = _ring_evolution(exact, masses, k, dt, inverse=True)

    factored = psi
    for j in range(n_atoms, 0, -1):
        factored = factored * coupling(j, xi1)
        factored = _ring_evolution(factored, masses, k, dt)
        factored = factored * coupling(j, xi2)
        factored = _ring_evolution(factored, masses, k, dt, inverse=True)

    return float(np.linalg.norm(exact - factored))


def factorization_report(
    settings: OracleSettings,
    k: float,
    np_mass: float,
    atom_mass: float,
    dt: float,
    rng: Generator,
) -> FactorizationReport:
    """Error ladder over xi (xi1 = xi2) with the fitted power law."""
    seed = int(rng.integers(2**32))
    xis = tuple(settings.xi_ladder)
    errors = tuple(
        many_atom_factorization_check(
            settings.factorization_atoms,
            xi,
            xi,
            settings.factorization_grid,
            k,
            np_mass,
            atom_mass,
            dt,
            np.random.default_rng(seed),
        )
        for xi in xis
    )
    exponent = None
    if all(e > 0 for e in errors):
        exponent = float(np.polyfit(np.log(xis), np.log(errors), 1)[0])
    return FactorizationReport(
        n_atoms=settings.factorization_atoms,
        grid_size=settings.factorization_grid,
        dt=dt,
        xis=xis,
        errors=errors,
        exponent=exponent,
    )


def interferometer_suite(
    settings: OracleSettings,
    tolerances: Tolerances,
    k: float,
    np_state: GaussianState,
    atom_mass: float,
    rng: Generator,
    dt_list: tuple[float, ...] = (0.5e-3, 1.2e-3, 3e-3),
) -> list[IdentityResult]:
    """Path cancellation, grid-vs-closed-form signal, and factorization scaling."""
    grid = gaussian_to_grid(np_state, k, n_points=settings.grid_points)
    results = [signal_equivalence_check(np_state, grid, k, tolerances.signal_rel, dt_list)]

    spec = PathSpec(
        t1=0.0,
        t2=1.2e-3,
        t3=3.2e-3,
        t4=4.4e-3,
        xi1=0.02,
        xi2=0.02,
        alpha_l=complex(1 / math.sqrt(2)),
        beta_l=complex(1 / math.sqrt(2)),
    )
    programs = path_operators(spec, atom_mass, k)
    results.append(identity_result("path_atomic", [programs.atomic_error], tolerances.path_atomic))
    results.append(translation_equivalence_check(spec, grid, k, tolerances.path_atomic))
    results.append(recoil_phase_check(spec, grid, atom_mass, k, tolerances.recoil_phase))

    report = factorization_report(settings, k, np_state.mass, atom_mass, 1.2e-3, rng)
    exponent_error = abs(report.exponent - 2.0) if report.exponent is not None else math.inf
    results.append(
        identity_result(
            "factorization_exponent",
            [exponent_error],
            tolerances.factorization_exponent,
            {"xis": list(report.xis), "errors": list(report.errors), "exponent": report.exponent},
        )
    )
    exact = many_atom_factorization_check(
        settings.factorization_atoms,
        0.04,
        0.04,
        settings.factorization_grid,
        k,
        np_state.mass,
        atom_mass,
        0.0,
        np.random.default_rng(int(rng.integers(2**32))),
    )
    results.append(identity_result("factorization_exact", [exact], tolerances.factorization_exact))
    return results
