"""Momentum-grid wavepackets: the brute-force oracle for the Gaussian analytics.

States live on p_i = p_min + i dp with p_min = -(n/2) dp. Free evolution is a
diagonal phase and a kick e^{i n k x} is a translation in momentum, so no
kinetic discretization error enters. When the grid is kick-aligned
(dp = 2 hbar k / q) every multiple of 2 hbar k / q is an exact index shift;
other kicks use band-limited (Fourier) interpolation guarded by a
position-support check.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.random import Generator
from numpy.typing import NDArray

from .compare import identity_result, relative_error
from .config import Tolerances
from .constants import HBAR
from .exceptions import GridSupportError, PreconditionError
from .gaussian import char_fn, phase_cancelled
from .models import GaussianState, GridState, IdentityResult, KickOp

logger = logging.getLogger(__name__)

MIN_POINTS = 1024
MIN_SPAN_SIGMAS = 8.0
MAX_DP_FRACTION = 1 / 16
INTEGER_SHIFT_SLACK = 1e-9
DROPPED_PROBABILITY = 1e-12
# Fraction of |psi(x)|^2 allowed in the outer half of the position period
# before a fractional kick is refused.
POSITION_EDGE_MASS = 1e-20


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def init_gaussian(
    delta_p: float,
    mass: float,
    n_points: int = 2**15,
    span_sigmas: float = 12.0,
    k: float | None = None,
    max_kick: float = 0.0,
    p0: float = 0.0,
) -> GridState:
    """Discretize phi(p) = (2 pi delta_p^2)^{-1/4} exp(-(p - p0)^2 / (4 delta_p^2)).

    Args:
        delta_p: Momentum standard deviation.
        mass: Particle mass.
        n_points: Grid size, a power of two >= 1024.
        span_sigmas: Half-width of the grid in units of ``delta_p``; at least 8.
        k: Wavenumber; when given the spacing is aligned so that 2 hbar k is
            an integer number of grid steps.
        max_kick: Largest |n| of kicks n hbar k the grid must hold (needs ``k``).
        p0: Mean momentum.

    Raises:
        PreconditionError: If ``n_points`` or ``span_sigmas`` is out of range.
        GridSupportError: If the spacing exceeds delta_p / 16 or cannot be
            aligned to 2 hbar k.
    """
    if not _is_power_of_two(n_points) or n_points < MIN_POINTS:
        raise PreconditionError(f"n_points: must be a power of two >= {MIN_POINTS}, got {n_points}")
    if span_sigmas < MIN_SPAN_SIGMAS:
        raise PreconditionError(
            f"span_sigmas: must be at least {MIN_SPAN_SIGMAS}, got {span_sigmas}"
        )
    if delta_p <= 0 or mass <= 0:
        raise PreconditionError("delta_p and mass must be positive")

    hbar_k = HBAR * k if k is not None else 0.0
    half_width = span_sigmas * delta_p + abs(max_kick) * hbar_k + abs(p0)
    dp = 2 * half_width / n_points
    q: int | None = None

    if k is not None:
        q = math.floor(2 * hbar_k / dp)
        if q < 1:
            needed = 2 ** math.ceil(math.log2(2 * half_width / (2 * hbar_k)))
            raise GridSupportError(
                f"grid of {n_points} points cannot align 2 hbar k to its spacing; "
                f"need at least {needed} points for a half-width of {half_width:.3e}"
            )
        dp = 2 * hbar_k / q

    if dp > delta_p * MAX_DP_FRACTION:
        needed = 2 ** math.ceil(math.log2(2 * half_width / (delta_p * MAX_DP_FRACTION)))
        raise GridSupportError(
            f"grid spacing {dp:.3e} exceeds delta_p/16; need at least {needed} points"
        )

    p = (np.arange(n_points, dtype=np.float64) - n_points // 2) * dp
    amplitudes = np.exp(-((p - p0) ** 2) / (4 * delta_p**2)).astype(np.complex128)
    amplitudes /= math.sqrt(float(np.sum(np.abs(amplitudes) ** 2)) * dp)

    logger.debug("Gaussian grid: n=%d, dp=%.3e, q=%s", n_points, dp, q)
    return GridState(
        p_min=float(p[0]), dp=dp, amplitudes=amplitudes, mass=mass, k=k, kick_divisor=q
    )


def gaussian_to_grid(
    state: GaussianState,
    k: float,
    n_points: int = 2**15,
    span_sigmas: float = 12.0,
    max_kick: float = 4.0,
) -> GridState:
    """Grid image of an analytic packet at ``state.t_free``.

    Drift becomes a mean momentum m v_drift; gravity has no grid counterpart.
    """
    if state.g_x != 0:
        raise PreconditionError("g_x: gravity offsets are only supported analytically")
    grid = init_gaussian(
        state.delta_p,
        state.mass,
        n_points=n_points,
        span_sigmas=span_sigmas,
        k=k,
        max_kick=max_kick,
        p0=state.mass * state.v_drift,
    )
    return free_evolve(grid, state.t_free)


def overlap(bra: GridState, ket: GridState) -> complex:
    """<bra|ket> on a shared grid."""
    if bra.n_points != ket.n_points or bra.dp != ket.dp or bra.p_min != ket.p_min:
        raise PreconditionError("overlap: states live on different grids")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes) * bra.dp)


def _edge_probability(amplitudes: NDArray[np.complex128], dp: float, shift: int) -> float:
    if shift > 0:
        return float(np.sum(np.abs(amplitudes[-shift:]) ** 2) * dp)
    if shift < 0:
        return float(np.sum(np.abs(amplitudes[:-shift]) ** 2) * dp)
    return 0.0


def _support_error(s: GridState, op: KickOp, lost: float) -> GridSupportError:
    needed = abs(s.p_min) + abs(op.momentum)
    return GridSupportError(
        f"kick of {op.n:g} hbar k pushes {lost:.2e} of the probability off the grid; "
        f"need a half-width of at least {needed:.3e} kg m/s plus the packet tails"
    )


def apply_kick(s: GridState, op: KickOp) -> GridState:
    """Translate the state by n hbar k in momentum (multiply by e^{i n k x}).

    Raises:
        GridSupportError: If probability leaves the grid, or a fractional
            kick is requested on a state not localized within the position period.
    """
    shift = op.momentum / s.dp
    nearest = round(shift)
    reach = math.ceil(shift) if shift > 0 else math.floor(shift)
    lost = _edge_probability(s.amplitudes, s.dp, reach)
    if lost > DROPPED_PROBABILITY:
        raise _support_error(s, op, lost)

    if abs(shift - nearest) < INTEGER_SHIFT_SLACK:
        out = np.zeros_like(s.amplitudes)
        if nearest > 0:
            out[nearest:] = s.amplitudes[:-nearest]
        elif nearest < 0:
            out[:nearest] = s.amplitudes[-nearest:]
        else:
            out[:] = s.amplitudes
        return s.with_amplitudes(out)

    n = s.n_points
    spectrum = np.fft.fft(s.amplitudes)
    j = np.fft.fftfreq(n) * n
    weights = np.abs(spectrum) ** 2
    outer = float(np.sum(weights[np.abs(j) >= n / 4]))
    if outer > POSITION_EDGE_MASS * float(np.sum(weights)):
        raise GridSupportError(
            f"fractional kick of {op.n:g} hbar k needs the packet localized within half the "
            f"position period {2 * math.pi * HBAR / s.dp:.3e} m; refine dp or use an aligned kick"
        )
    shifted = np.fft.ifft(spectrum * np.exp(-2j * math.pi * j * shift / n))
    return s.with_amplitudes(shifted.astype(np.complex128))


def evolve(s: GridState, t: float) -> GridState:
    """Apply U(t) = exp(-i p^2 t / (2 m hbar)) for any real t."""
    if t == 0:
        return s
    phase = s.momenta**2 * (t / (2 * s.mass * HBAR))
    return s.with_amplitudes(s.amplitudes * np.exp(-1j * phase))


def free_evolve(s: GridState, t: float) -> GridState:
    """Apply exp(-i p^2 t / (2 m hbar))."""
    if t < 0:
        raise PreconditionError(f"t: must be non-negative, got {t!r}")
    return evolve(s, t)


def heisenberg_kick(s: GridState, op: KickOp, t: float) -> GridState:
    """Apply e^{i n k x(t)} = U(t)^dagger e^{i n k x} U(t)."""
    return evolve(apply_kick(evolve(s, t), op), -t)


def expect_shift_product(s: GridState, ops: Sequence[tuple[KickOp, float]]) -> complex:
    """<s| prod_j e^{i n_j k x(t_j)} |s>, first entry leftmost."""
    ket = s
    for op, t in reversed(ops):
        ket = heisenberg_kick(ket, op, t)
    return overlap(s, ket)


def char_fn_grid(s: GridState, n1: float, n2: float, t: float, k: float) -> complex:
    """<s| e^{i n1 k x} e^{i n2 k p t / m} |s> evaluated on the grid."""
    ket = s.with_amplitudes(s.amplitudes * np.exp(1j * n2 * k * s.momenta * t / s.mass))
    ket = apply_kick(ket, KickOp(n1, k))
    return overlap(s, ket)


def apply_standing_wave(
    s: GridState, func: Callable[[NDArray[np.float64]], NDArray[np.complex128]], k: float
) -> GridState:
    """Multiply psi(x) by a lambda/2-periodic function of k x.

    The kick-aligned grid has position period q lambda / 2, so the product is
    an exact circulant in momentum.
    """
    if s.kick_divisor is None or s.k is None or not math.isclose(s.k, k, rel_tol=1e-12):
        raise PreconditionError("apply_standing_wave: state grid must be kick-aligned to k")
    n = s.n_points
    period = 2 * math.pi * HBAR / s.dp
    kx = k * period * np.arange(n, dtype=np.float64) / n
    values = np.asarray(func(kx), dtype=np.complex128)
    out = np.fft.fft(values * np.fft.ifft(s.amplitudes))
    edge = _edge_probability(out, s.dp, s.kick_divisor) + _edge_probability(
        out, s.dp, -s.kick_divisor
    )
    if edge > DROPPED_PROBABILITY:
        raise GridSupportError(
            f"standing wave scatters {edge:.2e} of the probability to the grid edges;"
            " widen the grid"
        )
    return s.with_amplitudes(out)


def oracle_equivalence_suite(
    delta_p: float,
    mass: float,
    k: float,
    rng: Generator,
    tolerances: Tolerances,
    cases: int = 100,
    n_points: int = 2**16,
) -> list[IdentityResult]:
    """Grid oracle against the closed-form Gaussian integrals.

    Randomized (n1, n2, dt) with n in [0, 4] and dt in [0, 5 ms].
    """
    grid = init_gaussian(delta_p, mass, n_points=n_points, k=k, max_kick=4.0)
    fine = init_gaussian(delta_p, mass, n_points=2 * n_points, k=k, max_kick=4.0)
    analytic = GaussianState(mass=mass, delta_p=delta_p)

    draws = [(rng.uniform(0, 4), rng.uniform(0, 4), rng.uniform(0, 5e-3)) for _ in range(cases)]
    char_errors = []
    norm_errors = []
    for n1, n2, t in draws:
        numeric = char_fn_grid(grid, n1, n2, t, k)
        closed = char_fn(analytic.at(t), n1, n2, k)
        char_errors.append(relative_error(numeric, closed))
        norm_errors.append(abs(free_evolve(apply_kick(grid, KickOp(n1, k)), t).norm - 1.0))

    refinement = [
        abs(char_fn_grid(grid, n1, n2, t, k) - char_fn_grid(fine, n1, n2, t, k))
        for n1, n2, t in draws[:8]
    ]

    cancellation = []
    for t in (0.0, 1.2e-3, 5e-3):
        for n in (2, 4):
            value = phase_cancelled(analytic.at(t), n, k)
            cancellation.append(abs(value.imag) / max(abs(value), 1e-300))

    # Swapping two Heisenberg kicks multiplies the product by exp(-i a b hbar k^2 (t_j - t_i)/m).
    reorder = []
    for a, b, t_i, t_j in ((2, -2, 0.0, 1.2e-3), (2, 2, 0.0, 0.5e-3), (4, -2, 1e-3, 3e-3)):
        ops = [(KickOp(a, k), t_i), (KickOp(b, k), t_j)]
        ordered = expect_shift_product(grid, ops)
        swapped = expect_shift_product(grid, ops[::-1])
        expected = swapped * np.exp(-1j * a * b * HBAR * k**2 * (t_j - t_i) / mass)
        reorder.append(relative_error(ordered, complex(expected)))

    results = [
        identity_result("char_fn_grid", char_errors, tolerances.char_fn_rel),
        identity_result("phase_cancellation", cancellation, tolerances.phase_cancellation),
        identity_result("grid_refinement", refinement, tolerances.grid_refinement),
        identity_result("reordering_phase", reorder, tolerances.zassenhaus_state),
        identity_result("unitarity", norm_errors, tolerances.norm_drift),
    ]
    logger.info(
        "Wavepacket oracle: %d cases on %d points, worst char_fn error %.2e",
        cases,
        n_points,
        max(char_errors),
    )
    return results
