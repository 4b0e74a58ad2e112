"""kdsim — simulation and verification toolkit for a nanoparticle-mediated atom interferometer.

Public API:
    load_config()       — Read a JSON run configuration
    derive_params()     — Couplings, effective Rabi frequency and recoil scales
    validity_report()   — Grade the large-detuning smallness ratios
    signal()            — Closed-form detection probability for a Gaussian packet
    general_signal()    — Detection probability for an analytic or grid state
    run_validation()    — Every oracle suite as one report
    run_sweep()         — Signal tables along dt and delta_p
"""

from .config import OracleSettings, RunConfig, SweepSettings, Tolerances, load_config
from .exceptions import (
    ConfigError,
    FockTruncationError,
    GridSupportError,
    KdsimError,
    NonFiniteResultError,
    PreconditionError,
    RegimeWarning,
    ReportWriteError,
    ToleranceError,
)
from .gaussian import expect_cos2cos2, expect_cos4, p_reference, signal, theta_q, visibility_G
from .interferometer import general_signal, many_atom_factorization_check, path_operators
from .models import (
    CavityModel,
    DerivedParams,
    GaussianState,
    GridState,
    IdentityResult,
    PathSpec,
    PhaseResult,
    PhysicalConfig,
    PulsePair,
    SignalBreakdown,
)
from .params import derive_params, raman_nath_check, validity_report
from .sweep import SweepTable, run_sweep
from .validate import ValidationReport, run_validation

__all__ = [
    # Configuration
    "load_config",
    "RunConfig",
    "OracleSettings",
    "SweepSettings",
    "Tolerances",
    # Parameters
    "derive_params",
    "raman_nath_check",
    "validity_report",
    # Signal
    "signal",
    "general_signal",
    "expect_cos4",
    "expect_cos2cos2",
    "theta_q",
    "visibility_G",
    "p_reference",
    "path_operators",
    "many_atom_factorization_check",
    # Runs
    "run_validation",
    "run_sweep",
    "ValidationReport",
    "SweepTable",
    # Data models
    "PhysicalConfig",
    "DerivedParams",
    "GaussianState",
    "GridState",
    "CavityModel",
    "PulsePair",
    "PathSpec",
    "SignalBreakdown",
    "PhaseResult",
    "IdentityResult",
    # Exceptions
    "KdsimError",
    "ConfigError",
    "NonFiniteResultError",
    "GridSupportError",
    "FockTruncationError",
    "PreconditionError",
    "ToleranceError",
    "ReportWriteError",
    "RegimeWarning",
]
