"""Validation run: parameter chain checks plus every brute-force oracle suite.

Each suite draws from its own child of one seed sequence, so a suite's random
cases do not depend on which other suites were selected.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import gaussian
from .cavity import cavity_oracle_suite
from .compare import compare_reports, identity_result, relative_error
from .config import RunConfig
from .exceptions import ConfigError
from .interferometer import interferometer_suite
from .models import (
    FREQUENCY_CONVENTION,
    DerivedParams,
    GaussianState,
    IdentityResult,
    PhysicalConfig,
)
from .params import (
    coherence_time,
    derive_params,
    raman_nath_check,
    trap_ground_state,
    validity_report,
)
from .wavepacket import oracle_equivalence_suite

logger = logging.getLogger(__name__)

SUITES = ("params", "wavepacket", "cavity", "interferometer")
EXACT_RELATIVE = 1e-12
REFERENCE_DT = 1.2e-3
DEFAULT_T_FREE = 0.1
BASELINE_RTOL = 1e-6
# Identity errors at rounding level differ between machines.
BASELINE_ATOL = 1e-9
# Waist and length of the two reference cavity modes.
SMALL_CAVITY = (40e-6, 1e-2)
LARGE_CAVITY = (1e-3, 2e-2)
# Angular frequency of the reference optical trap before release.
TRAP_FREQUENCY = 2 * math.pi * 80e3
KD_MAX_ORDER = 3


@dataclass(frozen=True)
class SuiteReport:
    """Identity results of one suite plus suite-specific numbers."""

    name: str
    results: tuple[IdentityResult, ...]
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "pass": self.passed,
            "identities": [r.to_dict() for r in self.results],
            **self.extra,
        }


@dataclass(frozen=True)
class ValidationReport:
    """All suites of one run."""

    seed: int
    suites: tuple[SuiteReport, ...]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def failures(self) -> list[str]:
        return [f"{s.name}.{name}" for s in self.suites for name in s.failures]

    def to_dict(self) -> dict[str, Any]:
        return {
            "frequency_convention": FREQUENCY_CONVENTION,
            "seed": self.seed,
            "pass": self.passed,
            "failures": self.failures,
            "suites": {s.name: s.to_dict() for s in self.suites},
        }


def _with_cavity(cfg: PhysicalConfig, geometry: tuple[float, float]) -> PhysicalConfig:
    waist, length = geometry
    return replace(cfg, cavity_waist=waist, cavity_length=length)


def params_suite(cfg: PhysicalConfig, derived: DerivedParams | None = None) -> SuiteReport:
    """Algebraic identities and scaling laws of the parameter chain.

    The extra block carries the derived parameters, the validity grades, the
    nonclassical phase at 1.2 ms, the quoted-versus-formula Omega_c0 factor and
    the scattering summary.
    """
    p = derived or derive_params(cfg)
    results = [
        identity_result(
            "omega_effm_identity",
            [relative_error(p.omega_effm, p.eta0**2 * p.omega_a0**2 / p.delta_al)],
            EXACT_RELATIVE,
        ),
        identity_result(
            "xi_identity", [relative_error(p.xi, p.omega_effm * p.tau_pulse / 4)], EXACT_RELATIVE
        ),
    ]

    half_waist = derive_params(replace(cfg, cavity_waist=cfg.cavity_waist / 2))
    volume_ratio = p.v_cavity / half_waist.v_cavity
    results.append(
        identity_result(
            "cavity_volume_scaling",
            [
                relative_error(half_waist.omega_c0 / p.omega_c0, volume_ratio),
                relative_error(half_waist.omega_a0 / p.omega_a0, volume_ratio**0.5),
            ],
            EXACT_RELATIVE,
        )
    )

    rescaled = []
    for s in (0.5, 2.0, 10.0):
        scaled = derive_params(
            replace(cfg, dipole_moment=cfg.dipole_moment * s, tau_pulse=cfg.tau_pulse / s)
        )
        rescaled.append(relative_error(scaled.xi, p.xi))
    results.append(identity_result("xi_rescaling", rescaled, EXACT_RELATIVE))

    small = derive_params(_with_cavity(cfg, SMALL_CAVITY))
    large = derive_params(_with_cavity(cfg, LARGE_CAVITY))
    omega_c0_ratio = small.omega_c0 / large.omega_c0
    results.append(
        identity_result(
            "omega_c0_cavity_ratio",
            [relative_error(omega_c0_ratio, large.v_cavity / small.v_cavity)],
            EXACT_RELATIVE,
            {"ratio": omega_c0_ratio},
        )
    )

    pairs = [(0.0, 0.0), (0.02, 0.02), (0.0207, 0.013), (1.0, 3.0)]
    results.append(
        identity_result(
            "p_reference",
            [
                relative_error(gaussian.p_reference(a, b), 3 * (a**2 + b**2) / 8)
                for a, b in pairs
            ],
            EXACT_RELATIVE,
        )
    )

    extra = {
        "derived": p.to_dict(),
        "validity": validity_report(p).to_dict(),
        "omega_c0_quoted_factor": p.omega_c0_quoted_factor,
        "theta_q_1p2ms": gaussian.theta_q(p.k, cfg.np_mass, REFERENCE_DT),
        "visibility_G_1p2ms": gaussian.visibility_G(cfg.delta_p, cfg.np_mass, p.k, REFERENCE_DT),
        "coherence_time": coherence_time(cfg.delta_p, cfg.np_mass, p.k),
        "raman_nath_np": raman_nath_check(cfg, cfg.delta_p / cfg.np_mass),
        **scattering_summary(cfg, p),
    }
    return SuiteReport("params", tuple(results), extra)


def scattering_summary(
    cfg: PhysicalConfig, derived: DerivedParams, t_free: float = DEFAULT_T_FREE
) -> dict[str, Any]:
    """Trap ground state, KD order populations and single-pulse scattering.

    The scattering probability is given for the nanoparticle packet ``t_free``
    seconds after release, with and without the cos^4 fringe average.
    """
    delta_x, delta_p = trap_ground_state(cfg.np_mass, TRAP_FREQUENCY)
    state = GaussianState(
        mass=cfg.np_mass, delta_p=cfg.delta_p, t_free=t_free, v_drift=cfg.v_drift, g_x=cfg.g_x
    )
    orders = range(-KD_MAX_ORDER, KD_MAX_ORDER + 1)
    populations = gaussian.kd_order_populations(derived.xi, KD_MAX_ORDER)
    return {
        "trap_ground_state": {
            "trap_frequency": TRAP_FREQUENCY,
            "delta_x": delta_x,
            "delta_p": delta_p,
        },
        "kd_order_populations": {
            str(order): float(value)
            for order, value in zip(orders, populations, strict=True)
        },
        "scattered_probability": {
            "t_free": t_free,
            "with_fringe_terms": gaussian.scattered_probability(state, derived.xi, derived.k),
            "without_fringe_terms": gaussian.scattered_probability(
                state, derived.xi, derived.k, include_fringe_terms=False
            ),
        },
    }


def run_validation(
    config: RunConfig, seed: int = 0, suites: Sequence[str] = SUITES
) -> ValidationReport:
    """Run the selected suites in their canonical order.

    Raises:
        ConfigError: If an unknown suite name is requested.
    """
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ConfigError(f"suites: unknown suite(s) {', '.join(unknown)}; choose from {SUITES}")

    cfg = config.physical
    settings = config.oracle
    tolerances = config.tolerances
    derived = derive_params(cfg)
    children = np.random.SeedSequence(seed).spawn(len(SUITES))
    rngs = {
        name: np.random.default_rng(child) for name, child in zip(SUITES, children, strict=True)
    }
    t_free = config.sweep.t_free if config.sweep is not None else DEFAULT_T_FREE

    reports = []
    for name in SUITES:
        if name not in suites:
            continue
        logger.info("Running %s suite", name)
        if name == "params":
            reports.append(params_suite(cfg, derived))
        elif name == "wavepacket":
            results = oracle_equivalence_suite(
                cfg.delta_p,
                cfg.np_mass,
                derived.k,
                rngs[name],
                tolerances,
                cases=settings.random_cases,
                n_points=settings.grid_points,
            )
            reports.append(SuiteReport(name, tuple(results)))
        elif name == "cavity":
            results, runs = cavity_oracle_suite(
                derived, cfg.atom_mass, cfg.np_mass, settings, tolerances
            )
            extra = {"effective_phase_runs": [r.to_dict() for r in runs]}
            reports.append(SuiteReport(name, tuple(results), extra))
        else:
            np_state = GaussianState(
                mass=cfg.np_mass, delta_p=cfg.delta_p, t_free=t_free, v_drift=cfg.v_drift
            )
            results = interferometer_suite(
                settings, tolerances, derived.k, np_state, cfg.atom_mass, rngs[name]
            )
            reports.append(SuiteReport(name, tuple(results)))

    report = ValidationReport(seed=seed, suites=tuple(reports))
    if report.passed:
        logger.info("All %d suites passed", len(reports))
    else:
        logger.warning("Failed identities: %s", ", ".join(report.failures))
    return report


def matches_baseline(
    report: ValidationReport,
    baseline: Mapping[str, Any],
    rtol: float = BASELINE_RTOL,
    atol: float = BASELINE_ATOL,
) -> bool:
    """Whether ``report`` reproduces a saved report document.

    The report goes through the same JSON encoding as the saved one, so
    tuples and numpy scalars compare against their serialized form.
    """
    current = json.loads(json.dumps(report.to_dict()))
    same = compare_reports(current, baseline, rtol=rtol, atol=atol)
    if same:
        logger.info("Report matches the baseline")
    return same
