"""Truncated atom-cavity dynamics: the oracle for the phase-imprint model.

A two-level atom couples to one Fock-truncated cavity mode that is driven by
the light the nanoparticle scatters out of the external laser. Particle
positions are classical parameters. Units: hbar = 1, frequencies in rad/s.

Operators and the reference solver come from qutip. The interaction-picture
Hamiltonian is explicitly time dependent and is integrated here with a
fourth-order Magnus scheme, which ``solver_agreement_check`` holds against
``qutip.sesolve``. The exact frame change
psi_int = exp(i t (delta_cl n + delta_al P_e)) psi_rot removes every time
dependence, which the effective-phase experiment uses to propagate with
exact chunk unitaries.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Any, NamedTuple

import numpy as np
import qutip
from numpy.typing import NDArray
from scipy.linalg import eigh, expm

from .compare import identity_result, relative_error
from .config import OracleSettings, Tolerances
from .constants import HBAR
from .exceptions import FockTruncationError, PreconditionError
from .models import CavityModel, DerivedParams, Frame, IdentityResult, KickOp, PhaseResult
from .wavepacket import heisenberg_kick, init_gaussian

logger = logging.getLogger(__name__)

JointKet = NDArray[np.complex128]
Operator = NDArray[np.complex128]

FOCK_LIMIT = 1e-8
STEP_FACTOR = 0.01
SQRT3 = math.sqrt(3.0)
SOLVER_OPTIONS = {"atol": 1e-12, "rtol": 1e-10, "nsteps": 1_000_000, "store_states": True}

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |e><g|
SIGMA_MINUS = SIGMA_PLUS.T.copy()  # |g><e|
SIGMA_Z = np.diag([-1.0, 1.0]).astype(np.complex128)
EXCITED = np.diag([0.0, 1.0]).astype(np.complex128)


class Operators(NamedTuple):
    """Joint-space operators on atom (x) Fock(n_fock)."""

    a: qutip.Qobj
    a_dag: qutip.Qobj
    number: qutip.Qobj
    excited: qutip.Qobj
    a_sigma_plus: qutip.Qobj


class DenseOperators(NamedTuple):
    """The same operators as arrays, for the Magnus inner loop."""

    a: Operator
    a_dag: Operator
    number: Operator
    excited: Operator
    a_sigma_plus: Operator


@lru_cache(maxsize=8)
def operators(n_fock: int) -> Operators:
    """qutip operators with the atom as the outer tensor factor (|g> = basis 0)."""
    ground = qutip.basis(2, 0)
    excited = qutip.basis(2, 1)
    a = qutip.tensor(qutip.qeye(2), qutip.destroy(n_fock))
    return Operators(
        a=a,
        a_dag=a.dag(),
        number=a.dag() * a,
        excited=qutip.tensor(excited * excited.dag(), qutip.qeye(n_fock)),
        a_sigma_plus=qutip.tensor(excited * ground.dag(), qutip.destroy(n_fock)),
    )


@lru_cache(maxsize=8)
def dense_operators(n_fock: int) -> DenseOperators:
    return DenseOperators(
        *(np.asarray(op.full(), dtype=np.complex128) for op in operators(n_fock))
    )


def ground_vacuum(n_fock: int) -> JointKet:
    """|g, 0>."""
    ket = qutip.tensor(qutip.basis(2, 0), qutip.basis(n_fock, 0))
    return np.asarray(ket.full().ravel(), dtype=np.complex128)


def to_ket(psi: JointKet, n_fock: int) -> qutip.Qobj:
    """Wrap a joint state vector as a qutip ket."""
    return qutip.Qobj(np.reshape(psi, (-1, 1)), dims=[[2, n_fock], [1, 1]])


def build_hamiltonian(model: CavityModel, t: float) -> Operator:
    """Interaction-picture Hamiltonian at time ``t``.

    Omega_a (a sigma+ e^{i delta_ac t} + h.c.) - Omega_c a^dag a
    - (Omega_l a^dag e^{i delta_cl t} + h.c.)
    """
    ops = dense_operators(model.n_fock)
    coupling = model.omega_a * np.exp(1j * model.delta_ac * t) * ops.a_sigma_plus
    drive = model.omega_l * np.exp(1j * model.delta_cl * t) * ops.a_dag
    h = coupling + coupling.conj().T - model.omega_c * ops.number - (drive + drive.conj().T)
    return np.asarray(h, dtype=np.complex128)


def _rotate_ac(t: float, args: dict[str, float]) -> complex:
    return complex(np.exp(1j * args["delta_ac"] * t))


def _counter_ac(t: float, args: dict[str, float]) -> complex:
    return complex(np.exp(-1j * args["delta_ac"] * t))


def _rotate_cl(t: float, args: dict[str, float]) -> complex:
    return complex(np.exp(1j * args["delta_cl"] * t))


def _counter_cl(t: float, args: dict[str, float]) -> complex:
    return complex(np.exp(-1j * args["delta_cl"] * t))


def interaction_hamiltonian(model: CavityModel) -> list[Any]:
    """The interaction-picture Hamiltonian in qutip list format."""
    ops = operators(model.n_fock)
    coupling = model.omega_a * ops.a_sigma_plus
    drive = -model.omega_l * ops.a_dag
    return [
        -model.omega_c * ops.number,
        [coupling, _rotate_ac],
        [coupling.dag(), _counter_ac],
        [drive, _rotate_cl],
        [drive.dag(), _counter_cl],
    ]


def rotating_frame_hamiltonian(model: CavityModel) -> qutip.Qobj:
    """Time-independent generator in the frame rotating with the laser.

    delta_al P_e + (delta_cl - Omega_c) a^dag a - Omega_l (a + a^dag)
    + Omega_a (a sigma+ + a^dag sigma-)
    """
    ops = operators(model.n_fock)
    coupling = model.omega_a * ops.a_sigma_plus
    return (
        model.delta_al * ops.excited
        + model.delta_cl_eff * ops.number
        - model.omega_l * (ops.a + ops.a_dag)
        + coupling
        + coupling.dag()
    )


def to_interaction_frame(model: CavityModel, psi_rot: JointKet, t: float) -> JointKet:
    """Map a rotating-frame ket to the interaction picture at time ``t``."""
    n = model.n_fock
    photons = np.tile(np.arange(n, dtype=np.float64), 2)
    excited = np.repeat([0.0, 1.0], n)
    return psi_rot * np.exp(1j * t * (model.delta_cl * photons + model.delta_al * excited))


def exact_unitary(h: Operator, t: float) -> Operator:
    """exp(-i h t) of a Hermitian generator via its eigendecomposition."""
    energies, vectors = eigh(h)
    unitary = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
    return np.asarray(unitary, dtype=np.complex128)


def _fock_tail(psi: JointKet, n_fock: int) -> float:
    populations = np.abs(psi[:n_fock]) ** 2 + np.abs(psi[n_fock:]) ** 2
    return float(populations[-2] + populations[-1])


def _check_fock(psi: JointKet, n_fock: int, t: float) -> float:
    tail = _fock_tail(psi, n_fock)
    if tail > FOCK_LIMIT:
        raise FockTruncationError(
            f"top two Fock levels hold {tail:.2e} of the population at t={t:.3e} s "
            f"with n_fock={n_fock}; raise n_fock"
        )
    return tail


def _magnus_step(model: CavityModel, t0: float, h: float) -> Operator:
    """Fourth-order Gauss-Legendre Magnus propagator over [t0, t0 + h]."""
    a1 = -1j * build_hamiltonian(model, t0 + (0.5 - SQRT3 / 6) * h)
    a2 = -1j * build_hamiltonian(model, t0 + (0.5 + SQRT3 / 6) * h)
    omega = 0.5 * h * (a1 + a2) + (SQRT3 / 12) * h**2 * (a2 @ a1 - a1 @ a2)
    return np.asarray(expm(omega), dtype=np.complex128)


def max_step(model: CavityModel) -> float:
    """Largest step allowed for ``model``: 0.01 over its fastest rate."""
    return STEP_FACTOR / model.fastest_rate


def propagate(
    model: CavityModel, psi0: JointKet, t_end: float, dt_max: float | None = None
) -> JointKet:
    """Evolve ``psi0`` from 0 to ``t_end`` in the model's frame.

    The interaction frame uses Magnus steps no longer than ``dt_max``
    (default: 0.01 / fastest rate). The rotating frame is time independent;
    one step unitary is built and applied repeatedly (a single step by default).

    Raises:
        PreconditionError: If ``dt_max`` exceeds 0.01 / fastest rate or ``t_end`` < 0.
        FockTruncationError: If the top two Fock levels exceed 1e-8 population.
    """
    if t_end < 0:
        raise PreconditionError(f"t_end: must be non-negative, got {t_end!r}")
    limit = max_step(model)
    if dt_max is not None and dt_max > limit * (1 + 1e-12):
        raise PreconditionError(
            f"dt_max: {dt_max:.3e} s exceeds 0.01 / fastest rate = {limit:.3e} s"
        )
    psi = np.array(psi0, dtype=np.complex128)
    if psi.shape != (model.dimension,):
        raise PreconditionError(f"psi0: expected shape ({model.dimension},), got {psi.shape}")
    if t_end == 0:
        return psi

    if model.frame is Frame.ROTATING:
        n_steps = 1 if dt_max is None else math.ceil(t_end / dt_max)
        h = t_end / n_steps
        step = exact_unitary(rotating_frame_hamiltonian(model).full(), h)
        for i in range(n_steps):
            psi = step @ psi
            _check_fock(psi, model.n_fock, (i + 1) * h)
    else:
        n_steps = math.ceil(t_end / (limit if dt_max is None else dt_max))
        h = t_end / n_steps
        for i in range(n_steps):
            psi = _magnus_step(model, i * h, h) @ psi
            _check_fock(psi, model.n_fock, (i + 1) * h)

    logger.debug("Propagated %s frame over %.3e s in %d steps", model.frame.value, t_end, n_steps)
    return psi


def richardson_delta(model: CavityModel, psi0: JointKet, t_end: float, dt_max: float) -> float:
    """Norm of the change in the final state when the step is halved."""
    coarse = propagate(model, psi0, t_end, dt_max)
    fine = propagate(model, psi0, t_end, dt_max / 2)
    return float(np.linalg.norm(coarse - fine))


def reference_propagate(model: CavityModel, psi0: JointKet, t_end: float) -> JointKet:
    """Evolve ``psi0`` with ``qutip.sesolve`` in the model's frame."""
    if t_end < 0:
        raise PreconditionError(f"t_end: must be non-negative, got {t_end!r}")
    if model.frame is Frame.ROTATING:
        hamiltonian: qutip.Qobj | list[Any] = rotating_frame_hamiltonian(model)
    else:
        hamiltonian = interaction_hamiltonian(model)
    result = qutip.sesolve(
        hamiltonian,
        to_ket(psi0, model.n_fock),
        [0.0, t_end],
        args={"delta_ac": model.delta_ac, "delta_cl": model.delta_cl},
        options=SOLVER_OPTIONS,
    )
    psi = np.asarray(result.states[-1].full().ravel(), dtype=np.complex128)
    _check_fock(psi, model.n_fock, t_end)
    return psi


def solver_agreement_check(
    tolerances: Tolerances,
    omega_a0: float = 0.1,
    omega_l0: float = 0.2,
    t_end: float = 2.0,
    dt_max: float = 1e-3,
    n_fock: int = 30,
) -> list[IdentityResult]:
    """Magnus steps and the exact rotating frame against qutip's ODE solver."""
    results = []
    for frame in (Frame.INTERACTION, Frame.ROTATING):
        model = CavityModel(
            n_fock=n_fock,
            omega_a0=omega_a0,
            delta_al=1.0,
            delta_cl=1.5,
            omega_c0=0.5,
            omega_l0=omega_l0,
            x_np=0.0,
            x_atom=0.0,
            k=1.0,
            tau=t_end,
            frame=frame,
        )
        psi0 = ground_vacuum(n_fock)
        ours = propagate(model, psi0, t_end, dt_max if frame is Frame.INTERACTION else None)
        reference = reference_propagate(model, psi0, t_end)
        results.append(
            identity_result(
                f"sesolve_{frame.value}",
                [float(np.linalg.norm(ours - reference))],
                tolerances.solver_agreement,
                {"frame": frame.value},
            )
        )
    return results


def displaced_oscillator_amplitude(model: CavityModel, t: float) -> complex:
    """Closed-form <a> of the driven empty cavity starting in vacuum.

    Rotating frame: eta (1 - e^{-i delta' t}); interaction frame:
    eta (e^{i delta_cl t} - e^{i Omega_c t}), with eta = Omega_l / delta'.
    """
    eta = model.eta
    if model.frame is Frame.ROTATING:
        return complex(eta * (1 - np.exp(-1j * model.delta_cl_eff * t)))
    return complex(eta * (np.exp(1j * model.delta_cl * t) - np.exp(1j * model.omega_c * t)))


def displaced_oscillator_check(
    tolerances: Tolerances,
    omega_c0: float = 0.5,
    omega_l0: float = 0.3,
    delta_cl: float = 2.0,
    t_end: float = 3.0,
    dt_max: float = 1e-3,
    n_fock: int = 30,
) -> list[IdentityResult]:
    """Driven empty cavity against its coherent-state solution in both frames."""
    results = []
    for frame in (Frame.INTERACTION, Frame.ROTATING):
        model = CavityModel(
            n_fock=n_fock,
            omega_a0=0.0,
            delta_al=1.0,
            delta_cl=delta_cl,
            omega_c0=omega_c0,
            omega_l0=omega_l0,
            x_np=0.0,
            x_atom=0.0,
            k=1.0,
            tau=t_end,
            frame=frame,
        )
        psi0 = ground_vacuum(n_fock)
        psi = propagate(model, psi0, t_end, dt_max)
        mean_a = complex(qutip.expect(operators(n_fock).a, to_ket(psi, n_fock)))
        expected = displaced_oscillator_amplitude(model, t_end)
        detail = {"frame": frame.value, "numeric": [mean_a.real, mean_a.imag]}
        results.append(
            identity_result(
                f"displaced_oscillator_{frame.value}",
                [relative_error(mean_a, expected)],
                tolerances.displaced_oscillator,
                detail,
            )
        )
    interaction = CavityModel(
        n_fock=n_fock,
        omega_a0=0.0,
        delta_al=1.0,
        delta_cl=delta_cl,
        omega_c0=omega_c0,
        omega_l0=omega_l0,
        x_np=0.0,
        x_atom=0.0,
        k=1.0,
        tau=t_end,
    )
    delta = richardson_delta(interaction, ground_vacuum(n_fock), t_end, dt_max)
    results.append(identity_result("propagate_richardson", [delta], tolerances.richardson))
    return results


def effective_model(
    derived: DerivedParams,
    ratio: float,
    eta: float,
    delta_al_tau: float,
    x_np: float = 0.0,
    x_atom: float = 0.0,
    n_fock: int | None = None,
) -> CavityModel:
    """Rotating-frame model with Omega_a0 = ratio * delta_al at target |eta|.

    The cavity-laser detuning keeps delta' = delta_cl_ratio * delta_al at the
    antinode, and tau is the integer number of generalized Rabi periods
    closest to ``delta_al_tau / delta_al`` so the bare-state admixture returns.
    """
    if ratio <= 0:
        raise PreconditionError(f"ratio: must be positive, got {ratio!r}")
    delta = derived.delta_al
    omega_a0 = ratio * delta
    rho = derived.delta_cl_eff / derived.delta_al
    g = omega_a0 * eta
    rabi = math.sqrt(delta**2 + 4 * g**2)
    periods = max(1, round(delta_al_tau * rabi / (2 * math.pi * delta)))
    if n_fock is None:
        n_fock = max(CavityModel.MIN_FOCK, CavityModel.auto_fock(eta))
    return CavityModel(
        n_fock=n_fock,
        omega_a0=omega_a0,
        delta_al=delta,
        delta_cl=rho * delta + derived.omega_c0,
        omega_c0=derived.omega_c0,
        omega_l0=eta * rho * delta,
        x_np=x_np,
        x_atom=x_atom,
        k=derived.k,
        tau=2 * math.pi * periods / rabi,
        frame=Frame.ROTATING,
    )


def _conditional_phase(
    model: CavityModel, n_chunks: int
) -> tuple[float, float, float, float, float]:
    """Unwrapped phase of <g, psi_ref|psi> over ``n_chunks`` exact steps.

    Returns (phase, final excited population, peak excited population,
    final norm drift, max Fock tail).
    """
    h = model.tau / n_chunks
    full = exact_unitary(rotating_frame_hamiltonian(model).full(), h)
    reference_model = CavityModel(
        n_fock=model.n_fock,
        omega_a0=0.0,
        delta_al=model.delta_al,
        delta_cl=model.delta_cl,
        omega_c0=model.omega_c0,
        omega_l0=model.omega_l0,
        x_np=model.x_np,
        x_atom=model.x_atom,
        k=model.k,
        tau=model.tau,
        frame=Frame.ROTATING,
    )
    reference = exact_unitary(rotating_frame_hamiltonian(reference_model).full(), h)
    excited = dense_operators(model.n_fock).excited.diagonal().real

    psi = ground_vacuum(model.n_fock)
    psi_ref = psi.copy()
    angles = [0.0]
    peak = 0.0
    tail = 0.0
    for i in range(n_chunks):
        psi = full @ psi
        psi_ref = reference @ psi_ref
        tail = max(tail, _check_fock(psi, model.n_fock, (i + 1) * h))
        angles.append(float(np.angle(np.vdot(psi_ref, psi))))
        peak = max(peak, float(np.sum(excited * np.abs(psi) ** 2)))
    phase = float(np.unwrap(np.asarray(angles))[-1])
    p_excite = float(np.sum(excited * np.abs(psi) ** 2))
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    return phase, p_excite, peak, drift, tail


def effective_phase_experiment(model: CavityModel, n_chunks: int | None = None) -> PhaseResult:
    """Atom-conditioned phase of the full dynamics against tau * Omega_eff.

    Starts in |g, vac>, propagates the full model and a drive-only reference
    for tau, and reads the phase of <g, psi_ref|psi>. ``p_excite`` is the
    excited-state population after the pulse and ``p_excite_peak`` the
    largest one seen at the chunk boundaries. When
    Omega_eff vanishes ``rel_err`` is the absolute phase.

    Raises:
        PreconditionError: If Omega_a0/delta_al or |mu| is in the failing band.
    """
    ratio = abs(model.omega_a0 / model.delta_al)
    if ratio > 0.5 or abs(model.mu) > 0.5:
        raise PreconditionError(
            f"validity band failed: Omega_a0/delta_al={ratio:.3g}, |mu|={abs(model.mu):.3g}"
        )
    phi_eff = model.tau * model.omega_eff
    if n_chunks is None:
        n_chunks = 64 + math.ceil(8 * abs(phi_eff) / math.pi)

    phi_full, p_excite, peak, drift, tail = _conditional_phase(model, n_chunks)
    phi_check = _conditional_phase(model, 2 * n_chunks)[0]
    rel_err = (phi_full - phi_eff) / phi_eff if phi_eff != 0 else abs(phi_full)

    logger.debug(
        "Effective phase: Omega_a0/delta_al=%.4g, phi_full=%.10g, phi_eff=%.10g, rel_err=%.3e",
        ratio,
        phi_full,
        phi_eff,
        rel_err,
    )
    return PhaseResult(
        phi_full=phi_full,
        phi_eff=phi_eff,
        p_excite=p_excite,
        rel_err=rel_err,
        p_excite_peak=peak,
        mu=model.mu,
        richardson_delta=abs(phi_full - phi_check),
        norm_drift=drift,
        top_fock_population=tail,
        n_steps=n_chunks,
    )


def effective_phase_ladder(
    derived: DerivedParams, settings: OracleSettings, tolerances: Tolerances
) -> tuple[list[PhaseResult], list[IdentityResult]]:
    """Convergence of the full phase to tau * Omega_eff as Omega_a0/delta_al shrinks."""
    ladder = sorted(settings.ratio_ladder, reverse=True)
    runs = []
    for ratio in ladder:
        model = effective_model(
            derived, ratio, settings.eta, settings.delta_al_tau, n_fock=settings.n_fock
        )
        runs.append(effective_phase_experiment(model))

    errors = [abs(r.rel_err) for r in runs]
    monotone = all(later < earlier for earlier, later in zip(errors, errors[1:], strict=False))
    excitation = [r.p_excite / (4 * r.mu**2) for r in runs]
    detail = {"ratios": ladder, "rel_err": [r.rel_err for r in runs], "monotone": monotone}
    convergence = identity_result(
        "effective_phase_convergence",
        [errors[-1] if monotone else math.inf],
        tolerances.effective_phase_rel,
        detail,
    )
    results = [
        convergence,
        # Ground population after the pulse must stay above 1 - 4|mu|^2.
        identity_result(
            "atom_return",
            excitation,
            1.0,
            {
                "p_excite": [r.p_excite for r in runs],
                "p_excite_peak": [r.p_excite_peak for r in runs],
            },
        ),
        identity_result(
            "phase_richardson", [r.richardson_delta for r in runs], tolerances.richardson
        ),
        identity_result("cavity_norm_drift", [r.norm_drift for r in runs], tolerances.norm_drift),
    ]
    return runs, results


def node_phase_check(
    derived: DerivedParams, settings: OracleSettings, tolerances: Tolerances
) -> IdentityResult:
    """Atom or particle on a standing-wave node picks up no conditional phase."""
    node = math.pi / (2 * derived.k)
    ratio = min(settings.ratio_ladder)
    phases = []
    for x_np, x_atom in ((0.0, node), (node, 0.0)):
        model = effective_model(
            derived, ratio, settings.eta, settings.delta_al_tau, x_np, x_atom, settings.n_fock
        )
        phases.append(abs(effective_phase_experiment(model).phi_full))
    return identity_result("node_phase", phases, tolerances.node_phase)


def position_scan(
    derived: DerivedParams, settings: OracleSettings, tolerances: Tolerances
) -> IdentityResult:
    """Fit the conditional phase against A cos^2(k x_np) across half a period."""
    ratio = min(settings.ratio_ladder)
    positions = np.arange(settings.n_positions) * (math.pi / derived.k) / settings.n_positions
    phases = np.array(
        [
            effective_phase_experiment(
                effective_model(
                    derived,
                    ratio,
                    settings.eta,
                    settings.delta_al_tau,
                    float(x),
                    0.0,
                    settings.n_fock,
                )
            ).phi_full
            for x in positions
        ]
    )
    basis = np.cos(derived.k * positions) ** 2
    amplitude = float(np.linalg.lstsq(basis[:, None], phases, rcond=None)[0][0])
    peak = float(np.max(np.abs(phases)))
    residual = np.abs(phases - amplitude * basis) / max(peak, 1e-300)
    return identity_result(
        "position_fit",
        residual.tolist(),
        tolerances.position_fit,
        {"amplitude": amplitude, "positions": positions.tolist(), "phases": phases.tolist()},
    )


class BchDeviation(NamedTuple):
    """Max elementwise deviation of the second-order dressing formulas."""

    sigma_plus: float
    excited: float

    @property
    def worst(self) -> float:
        return max(self.sigma_plus, self.excited)


def bch_pauli_check(mu: complex) -> BchDeviation:
    """Exact e^{iR} X e^{-iR} against the second-order expansion, R = mu s+ + mu* s-."""
    if abs(mu) > 0.5:
        raise PreconditionError(f"mu: |mu| must not exceed 0.5, got {abs(mu):.3g}")
    mu_c = complex(mu).conjugate()
    r = mu * SIGMA_PLUS + mu_c * SIGMA_MINUS
    u = expm(1j * r)
    u_inv = u.conj().T
    exact_plus = u @ SIGMA_PLUS @ u_inv
    exact_excited = u @ EXCITED @ u_inv
    approx_plus = (
        SIGMA_PLUS - 1j * mu_c * SIGMA_Z + mu_c**2 * SIGMA_MINUS - abs(mu) ** 2 * SIGMA_PLUS
    )
    approx_excited = EXCITED + 1j * (mu_c * SIGMA_MINUS - mu * SIGMA_PLUS) - abs(mu) ** 2 * SIGMA_Z
    return BchDeviation(
        sigma_plus=float(np.max(np.abs(exact_plus - approx_plus))),
        excited=float(np.max(np.abs(exact_excited - approx_excited))),
    )


def commutator_table_check(mu: complex) -> float:
    """Max deviation of [R, s+] = -mu* s_z and [R, s_z] = 2 (mu* s- - mu s+)."""
    mu_c = complex(mu).conjugate()
    r = mu * SIGMA_PLUS + mu_c * SIGMA_MINUS
    first = (r @ SIGMA_PLUS - SIGMA_PLUS @ r) - (-mu_c * SIGMA_Z)
    second = (r @ SIGMA_Z - SIGMA_Z @ r) - 2 * (mu_c * SIGMA_MINUS - mu * SIGMA_PLUS)
    return float(max(np.max(np.abs(first)), np.max(np.abs(second))))


def bch_scaling_check(mu_ladder: tuple[float, ...], tolerances: Tolerances) -> list[IdentityResult]:
    """Fit the exponent of the dressing-formula deviation over a |mu| ladder."""
    phase = np.exp(0.3j)
    mus = [complex(m * phase) for m in mu_ladder]
    deviations = [bch_pauli_check(m).worst for m in mus]
    slope = float(np.polyfit(np.log(np.abs(mus)), np.log(deviations), 1)[0])
    return [
        identity_result(
            "bch_exponent",
            [abs(slope - 3.0)],
            tolerances.bch_exponent,
            {"exponent": slope, "deviations": deviations},
        ),
        identity_result("bch_zero", [bch_pauli_check(0).worst], tolerances.expansion_rel),
        identity_result(
            "commutator_table", [commutator_table_check(m) for m in mus], tolerances.expansion_rel
        ),
    ]


def zassenhaus_check(
    k: float,
    mass: float,
    t_i: float,
    t_j: float,
    tolerance: float = 1e-10,
    name: str = "zassenhaus",
) -> IdentityResult:
    """e^{i2k[x(t_i) - x(t_j)]} = e^{-i2k x(t_j)} e^{i2k x(t_i)} e^{-2k^2 [x(t_j), x(t_i)]}.

    Both sides act on a kick-aligned Gaussian grid state; the scalar uses
    [x(t_j), x(t_i)] = i hbar (t_i - t_j) / m.
    """
    state = init_gaussian(4 * HBAR * k, mass, n_points=4096, k=k, max_kick=2.0)
    lhs = state.with_amplitudes(
        state.amplitudes * np.exp(2j * k * state.momenta * (t_i - t_j) / mass)
    )
    rhs = heisenberg_kick(heisenberg_kick(state, KickOp(2, k), t_i), KickOp(-2, k), t_j)
    scalar = np.exp(-2j * k**2 * HBAR * (t_i - t_j) / mass)
    diff = lhs.amplitudes - scalar * rhs.amplitudes
    error = float(np.sqrt(np.sum(np.abs(diff) ** 2) * state.dp))
    return identity_result(
        name,
        [error],
        tolerance,
        {"mass": mass, "t_i": t_i, "t_j": t_j, "scalar_phase": float(np.angle(scalar))},
    )


def cavity_oracle_suite(
    derived: DerivedParams,
    atom_mass: float,
    np_mass: float,
    settings: OracleSettings,
    tolerances: Tolerances,
) -> tuple[list[IdentityResult], list[PhaseResult]]:
    """Every cavity-side identity and the effective-phase convergence study."""
    results = displaced_oscillator_check(tolerances)
    results += solver_agreement_check(tolerances)
    results += bch_scaling_check(settings.mu_ladder, tolerances)
    for label, mass in (("atom", atom_mass), ("np", np_mass)):
        results.append(
            zassenhaus_check(
                derived.k, mass, 0.0, 1.2e-3, tolerances.zassenhaus_state, f"zassenhaus_{label}"
            )
        )
    runs, ladder_results = effective_phase_ladder(derived, settings, tolerances)
    results += ladder_results
    results.append(node_phase_check(derived, settings, tolerances))
    results.append(position_scan(derived, settings, tolerances))
    logger.info(
        "Cavity oracle: %d identities, %d failed",
        len(results),
        sum(not r.passed for r in results),
    )
    return results, runs
