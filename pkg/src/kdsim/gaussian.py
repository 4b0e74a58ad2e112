"""Closed-form Gaussian-wavepacket expectation values and the interferometer signal.

The nanoparticle is a minimum-uncertainty packet released at t = 0 with
momentum spread ``delta_p`` (position spread hbar / (2 delta_p)). Its
Heisenberg position is x(T) = x + p T / m + s(T) with the classical offset
s(T) = v_drift T + g_x T^2 / 2. Every expectation below is a product of
Gaussian factors and scalar commutator phases; nothing is truncated unless a
function says so.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import jv

from .constants import HBAR
from .exceptions import PreconditionError
from .models import GaussianState, PulsePair, SignalBreakdown

logger = logging.getLogger(__name__)

# cos^2(theta) = 1/2 + e^{2i theta}/4 + e^{-2i theta}/4
COS2_TERMS: tuple[tuple[int, float], ...] = ((0, 0.5), (2, 0.25), (-2, 0.25))


class Cos2Cos2(NamedTuple):
    """Two-time expectation: exact expansion and the long-time survivors."""

    full: complex
    long_time: complex


def _classical_offset(state: GaussianState, t: float) -> float:
    return state.v_drift * t + 0.5 * state.g_x * t**2


def _weyl(state: GaussianState, a: float, b: float, k: float) -> float:
    """<exp(i k (a x + b p / m))> for the centred packet (real and positive)."""
    position_term = (a * HBAR * k) ** 2 / (8 * state.delta_p**2)
    momentum_term = (b * k * state.delta_p / state.mass) ** 2 / 2
    return math.exp(-position_term - momentum_term)


def char_fn(state: GaussianState, n1: float, n2: float, k: float) -> complex:
    """<G| e^{i n1 k x} e^{i n2 k p dt / m} |G> at dt = state.t_free.

    The drift and gravity offsets enter as the classical phase
    n2 k s(dt).
    """
    dt = state.t_free
    v_k = state.recoil_velocity(k)
    modulus = _weyl(state, n1, n2 * dt, k)
    phase = -n1 * n2 * k * v_k * dt / 2 + n2 * k * _classical_offset(state, dt)
    return complex(modulus * np.exp(1j * phase))


def two_time_correlator(
    state: GaussianState, a: float, b: float, t_a: float, t_b: float, k: float
) -> complex:
    """<e^{i a k x(t_a)} e^{i b k x(t_b)}> with times measured from release.

    Uses [x(t_a), x(t_b)] = i hbar (t_b - t_a) / m to merge the exponentials.
    """
    v_k = state.recoil_velocity(k)
    modulus = _weyl(state, a + b, a * t_a + b * t_b, k)
    reorder = -a * b * k * v_k * (t_b - t_a) / 2
    classical = k * (a * _classical_offset(state, t_a) + b * _classical_offset(state, t_b))
    return complex(modulus * np.exp(1j * (reorder + classical)))


def phase_cancelled(state: GaussianState, n: float, k: float) -> complex:
    """<N| e^{i n k x} |N> as e^{i n^2 k v_k dt / 2} char_fn(n, n).

    Real and non-negative when the packet has no drift or gravity offset.
    """
    v_k = state.recoil_velocity(k)
    return complex(np.exp(1j * n**2 * k * v_k * state.t_free / 2)) * char_fn(state, n, n, k)


def expect_cos4(state: GaussianState, k: float) -> float:
    """Exact <cos^4(k x(dt))> = 3/8 + Re c(2) / 2 + Re c(4) / 8."""
    c2 = phase_cancelled(state, 2, k)
    c4 = phase_cancelled(state, 4, k)
    return 3 / 8 + c2.real / 2 + c4.real / 8


def cos2_product(state: GaussianState, t_a: float, t_b: float, k: float) -> complex:
    """Exact <cos^2(k x(t_a)) cos^2(k x(t_b))> summed over all exponent pairs."""
    total = 0j
    for a, ca in COS2_TERMS:
        for b, cb in COS2_TERMS:
            total += ca * cb * two_time_correlator(state, a, b, t_a, t_b, k)
    return total


def expect_cos2cos2(state_at_t1: GaussianState, dt: float, k: float) -> Cos2Cos2:
    """<cos^2(k x(dt1)) cos^2(k x(dt1 + dt))>, exact and long-time approximation.

    The long-time form 1/4 + e^{i theta_q} G cos(phi_cl) / 8 keeps only the
    terms whose momentum factor does not carry the free-fall suppression
    exp(-(2 k delta_p dt1 / m)^2 / 2); phi_cl = 2 k (s(dt1) - s(dt1 + dt)) is
    the classical drift phase.
    """
    if dt < 0:
        raise PreconditionError(f"dt: must be non-negative, got {dt!r}")
    t1 = state_at_t1.t_free
    t2 = t1 + dt
    full = cos2_product(state_at_t1, t1, t2, k)
    phi_cl = 2 * k * (_classical_offset(state_at_t1, t1) - _classical_offset(state_at_t1, t2))
    g = visibility_G(state_at_t1.delta_p, state_at_t1.mass, k, dt)
    quantum = complex(np.exp(1j * theta_q(k, state_at_t1.mass, dt)))
    long_time = 0.25 + quantum * g * math.cos(phi_cl) / 8
    return Cos2Cos2(full=full, long_time=long_time)


def theta_q(k: float, mass: float, dt: float) -> float:
    """Commutator phase 2 hbar k^2 dt / m."""
    if dt < 0:
        raise PreconditionError(f"dt: must be non-negative, got {dt!r}")
    return 2 * HBAR * k**2 * dt / mass


def visibility_G(delta_p: float, mass: float, k: float, dt: float) -> float:
    """Interference visibility exp(-(2 k delta_p dt / m)^2 / 2)."""
    if dt < 0:
        raise PreconditionError(f"dt: must be non-negative, got {dt!r}")
    return math.exp(-((2 * k * delta_p * dt / mass) ** 2) / 2)


def signal(pulses: PulsePair, state: GaussianState, k: float) -> SignalBreakdown:
    """Detection probability of the +x output port.

    ``p_total`` is the long-time closed form; ``p_full`` evaluates the same
    probability from the exact expansions with the pulses at dt1 and dt1 + dt.
    """
    xi1, xi2 = pulses.xi1, pulses.xi2
    alpha, beta = pulses.alpha_l, pulses.beta_l
    t1 = pulses.dt1
    t2 = t1 + pulses.dt
    at_t1 = state.at(t1)

    cross = expect_cos2cos2(at_t1, pulses.dt, k)
    weight = xi1 * xi2 * alpha.conjugate() * beta

    background = 3 * (xi1**2 * abs(alpha) ** 2 + xi2**2 * abs(beta) ** 2) / 8
    interference = 2 * (weight * cross.long_time).real

    # Diagonal terms kept complex so that any residual imaginary part is measured.
    full = (
        xi1**2 * abs(alpha) ** 2 * cos2_product(at_t1, t1, t1, k)
        + xi2**2 * abs(beta) ** 2 * cos2_product(at_t1, t2, t2, k)
        + weight * cross.full
        + (weight * cross.full).conjugate()
    )
    breakdown = SignalBreakdown(
        p_total=background + interference,
        p_background=background,
        p_interference=interference,
        theta_q=theta_q(k, state.mass, pulses.dt),
        visibility_G=visibility_G(state.delta_p, state.mass, k, pulses.dt),
        p_full=full.real,
        imag_residual=abs(full.imag),
        method="closed-form",
    )
    logger.debug(
        "Signal at dt=%g s: P=%.12g, P_full=%.12g", pulses.dt, breakdown.p_total, full.real
    )
    return breakdown


def p_reference(xi1: float, xi2: float) -> float:
    """Scattered fraction of the -x port, 3 (xi1^2 + xi2^2) / 8."""
    if xi1 < 0 or xi2 < 0:
        raise PreconditionError("xi1 and xi2 must be non-negative")
    return 3 * (xi1**2 + xi2**2) / 8


def scattered_probability(
    state: GaussianState, xi: float, k: float, include_fringe_terms: bool = True
) -> float:
    """Probability that one KD pulse scatters the atom into the +2 hbar k order.

    With ``include_fringe_terms`` the full xi^2 <cos^4(k x)> is returned;
    otherwise only the position-averaged 3 xi^2 / 8.
    """
    if xi < 0:
        raise PreconditionError(f"xi: must be non-negative, got {xi!r}")
    if include_fringe_terms:
        return xi**2 * expect_cos4(state, k)
    return 3 * xi**2 / 8


def kd_order_populations(
    xi: float, max_order: int, kx: float | None = None, n_quad: int = 200
) -> NDArray[np.float64]:
    """Atomic diffraction-order populations J_n(2 xi cos^2(k x))^2.

    Returns orders -max_order..max_order. With ``kx=None`` the populations are
    averaged over a nanoparticle spread uniformly across one period.
    """
    if xi < 0:
        raise PreconditionError(f"xi: must be non-negative, got {xi!r}")
    if max_order < 0:
        raise PreconditionError(f"max_order: must be non-negative, got {max_order}")
    orders = np.arange(-max_order, max_order + 1)
    if kx is not None:
        z = 2 * xi * math.cos(kx) ** 2
        return np.asarray(jv(orders, z) ** 2, dtype=np.float64)

    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    # Map [-1, 1] onto one period [0, pi) of cos^2.
    u = (nodes + 1) * math.pi / 2
    z = 2 * xi * np.cos(u) ** 2
    table = jv(orders[:, None], z[None, :]) ** 2
    return np.asarray(table @ weights / 2, dtype=np.float64)
