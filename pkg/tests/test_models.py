"""Tests for data models."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Any

import numpy as np
import pytest

from kdsim.constants import HBAR
from kdsim.exceptions import ConfigError, PreconditionError
from kdsim.models import (
    CavityModel,
    GaussianState,
    IdentityResult,
    KickOp,
    PathSpec,
    PhaseResult,
    PhysicalConfig,
    PulsePair,
    SignalBreakdown,
    as_complex,
    as_real,
)


def _spec(**overrides: Any) -> PathSpec:
    values: dict[str, Any] = {
        "t1": 0.0,
        "t2": 1e-3,
        "t3": 3e-3,
        "t4": 4e-3,
        "xi1": 0.02,
        "xi2": 0.02,
        "alpha_l": complex(1 / math.sqrt(2)),
        "beta_l": complex(1 / math.sqrt(2)),
    }
    values.update(overrides)
    return PathSpec(**values)


class TestScalarCoercion:
    """Tests for JSON scalar helpers."""

    def test_as_real_accepts_int(self) -> None:
        """Test that integers are widened to float."""
        assert as_real("x", 3) == 3.0

    def test_as_real_rejects_bool_and_string(self) -> None:
        """Test that non-numeric JSON values name the field."""
        with pytest.raises(ConfigError, match="x"):
            as_real("x", True)
        with pytest.raises(ConfigError, match="x"):
            as_real("x", "1.0")

    def test_as_real_rejects_nan(self) -> None:
        """Test that NaN is not a valid input."""
        with pytest.raises(ConfigError, match="finite"):
            as_real("x", float("nan"))

    def test_as_complex_pair(self) -> None:
        """Test the [re, im] spelling of complex numbers."""
        assert as_complex("beta_l", [0.5, -0.25]) == complex(0.5, -0.25)
        assert as_complex("beta_l", 0.5) == complex(0.5)

    def test_as_complex_wrong_length(self) -> None:
        """Test that a three-element list is rejected."""
        with pytest.raises(ConfigError, match="beta_l"):
            as_complex("beta_l", [1, 2, 3])


class TestPhysicalConfig:
    """Tests for PhysicalConfig invariants and JSON mapping."""

    def test_reference_experiment(self, large_cavity: PhysicalConfig) -> None:
        """Test the reference experiment values."""
        assert large_cavity.cavity_waist == 1e-3
        assert large_cavity.cavity_length == 2e-2
        assert large_cavity.delta_al_ratio == 10.0
        assert large_cavity.polarization_overlap == 1.0
        assert large_cavity.delta_p / large_cavity.np_mass == pytest.approx(13e-6)

    def test_unknown_cavity_name(self) -> None:
        """Test that only 'large' and 'small' are known geometries."""
        with pytest.raises(ConfigError, match="cavity"):
            PhysicalConfig.reference_experiment("medium")

    @pytest.mark.parametrize(
        "field_name", ["lambda_laser", "cavity_waist", "np_radius", "np_mass", "tau_pulse"]
    )
    def test_non_positive_field_rejected(
        self, large_cavity: PhysicalConfig, field_name: str
    ) -> None:
        """Test that lengths, masses and tau must be strictly positive."""
        with pytest.raises(ConfigError, match=field_name):
            replace(large_cavity, **{field_name: 0.0})

    def test_epsilon_r_must_exceed_one(self, large_cavity: PhysicalConfig) -> None:
        """Test the dielectric constant bound."""
        with pytest.raises(ConfigError, match="epsilon_r"):
            replace(large_cavity, epsilon_r=1.0)

    def test_polarization_overlap_bound(self, large_cavity: PhysicalConfig) -> None:
        """Test |e_c . e_l| <= 1."""
        with pytest.raises(ConfigError, match="polarization_overlap"):
            replace(large_cavity, polarization_overlap=1.5)

    def test_large_detuning_premise(self, large_cavity: PhysicalConfig) -> None:
        """Test that delta_al below Omega_a0 is refused."""
        with pytest.raises(ConfigError, match="delta_al_ratio"):
            replace(large_cavity, delta_al_ratio=0.5)

    def test_from_dict_roundtrip(self, large_cavity: PhysicalConfig) -> None:
        """Test that to_dict and from_dict agree."""
        assert PhysicalConfig.from_dict(large_cavity.to_dict()) == large_cavity

    def test_from_dict_missing_field(self, physical_dict: dict[str, Any]) -> None:
        """Test that a missing required field is named."""
        del physical_dict["np_radius"]
        with pytest.raises(ConfigError, match="np_radius"):
            PhysicalConfig.from_dict(physical_dict)

    def test_from_dict_unknown_key(self, physical_dict: dict[str, Any]) -> None:
        """Test that typos are rejected."""
        physical_dict["np_raduis"] = 1e-7
        with pytest.raises(ConfigError, match="np_raduis"):
            PhysicalConfig.from_dict(physical_dict)


class TestGaussianState:
    """Tests for the analytic packet."""

    def test_at_keeps_other_fields(self, nanoparticle: GaussianState) -> None:
        """Test that at() only changes the release time."""
        later = nanoparticle.at(0.1)
        assert later.t_free == 0.1
        assert later.delta_p == nanoparticle.delta_p
        assert later.mass == nanoparticle.mass

    def test_recoil_velocity(self, nanoparticle: GaussianState, k: float) -> None:
        """Test hbar k / m for 1e8 amu at 780 nm (about 5.1 nm/s)."""
        assert nanoparticle.recoil_velocity(k) == pytest.approx(5.1e-9, rel=0.02)

    def test_invalid_spread(self) -> None:
        """Test that delta_p must be positive."""
        with pytest.raises(PreconditionError, match="delta_p"):
            GaussianState(mass=1.0, delta_p=0.0)


class TestPulsePairAndSpec:
    """Tests for pulse parameters and path timing."""

    def test_recombiner_modulus(self) -> None:
        """Test that |beta_l| > 1 is rejected."""
        with pytest.raises(PreconditionError, match="beta_l"):
            PulsePair(0.02, 0.02, 0.5, 1.2, 1e-3, 0.1)

    def test_negative_dt(self) -> None:
        """Test that dt < 0 is rejected."""
        with pytest.raises(PreconditionError, match="dt"):
            PulsePair(0.02, 0.02, 0.5, 0.5, -1e-3, 0.1)

    def test_spec_properties(self) -> None:
        """Test dt and T of a symmetric spec."""
        spec = _spec()
        assert spec.dt == pytest.approx(1e-3)
        assert spec.big_t == pytest.approx(3e-3)
        assert spec.is_symmetric

    def test_spec_order(self) -> None:
        """Test that t3 must precede t4."""
        with pytest.raises(PreconditionError, match="pulse times"):
            _spec(t3=4e-3, t4=4e-3)

    def test_asymmetric_spec_refused(self) -> None:
        """Test that the symmetric flag enforces t2 - t1 = t4 - t3."""
        with pytest.raises(PreconditionError, match="symmetric"):
            _spec(t4=5e-3)

    def test_asymmetric_spec_allowed_without_flag(self) -> None:
        """Test that asymmetric timings are accepted when declared."""
        spec = _spec(t4=5e-3, symmetric=False)
        assert not spec.is_symmetric

    def test_degenerate_first_pair(self) -> None:
        """Test that t1 = t2 is a valid timing."""
        spec = _spec(t2=0.0, symmetric=False)
        assert spec.dt == 0.0

    def test_kick_signs_validated(self) -> None:
        """Test that kick signs are +-1."""
        with pytest.raises(PreconditionError, match="kick_signs"):
            _spec(kick_signs=(2, 1, -1, -1))

    def test_pulse_pair(self) -> None:
        """Test the conversion to the analytic pulse pair."""
        pair = _spec().pulse_pair(0.1)
        assert pair.dt1 == 0.1
        assert pair.dt == pytest.approx(1e-3)


class TestCavityModel:
    """Tests for the cavity model parameters."""

    def _model(self, **overrides: Any) -> CavityModel:
        values: dict[str, Any] = {
            "n_fock": 30,
            "omega_a0": 1.0,
            "delta_al": 10.0,
            "delta_cl": 1000.0,
            "omega_c0": 0.5,
            "omega_l0": 2000.0,
            "x_np": 0.0,
            "x_atom": 0.0,
            "k": 1.0,
            "tau": 1.0,
        }
        values.update(overrides)
        return CavityModel(**values)

    def test_derived_couplings(self) -> None:
        """Test eta, mu and Omega_eff at the antinode."""
        model = self._model()
        assert model.delta_cl_eff == pytest.approx(999.5)
        assert model.eta == pytest.approx(2000.0 / 999.5)
        assert model.mu == pytest.approx(model.eta / 10.0)
        assert model.omega_eff == pytest.approx(model.eta**2 / 10.0)
        assert model.dimension == 60

    def test_node_switches_off_drive(self) -> None:
        """Test that the nanoparticle at a node sees no laser drive."""
        model = self._model(x_np=math.pi / 2)
        assert model.omega_l == pytest.approx(0.0, abs=1e-12)
        assert model.omega_c == pytest.approx(0.0, abs=1e-12)

    def test_minimum_fock(self) -> None:
        """Test that n_fock below 30 is refused."""
        with pytest.raises(PreconditionError, match="n_fock"):
            self._model(n_fock=10)

    def test_auto_fock(self) -> None:
        """Test the truncation rule for eta = 2."""
        assert CavityModel.auto_fock(2.0) == 56


class TestRecords:
    """Tests for result records."""

    def test_identity_result_dict(self) -> None:
        """Test the report keys of an identity."""
        record = IdentityResult("x", 1e-12, 5, True, 1e-10)
        assert record.to_dict() == {
            "name": "x",
            "max_rel_err": 1e-12,
            "samples": 5,
            "pass": True,
            "tolerance": 1e-10,
            "detail": {},
        }

    def test_signal_abs_err(self) -> None:
        """Test abs_err of a breakdown with and without p_full."""
        base = SignalBreakdown(0.5, 0.3, 0.2, 1e-4, 0.9)
        assert base.abs_err is None
        assert replace(base, p_full=0.25).abs_err == pytest.approx(0.25)

    def test_phase_result_probability(self) -> None:
        """Test that p_excite must be a probability."""
        with pytest.raises(PreconditionError, match="p_excite"):
            PhaseResult(phi_full=1.0, phi_eff=1.0, p_excite=1.5, rel_err=0.0)
        with pytest.raises(PreconditionError, match="p_excite_peak"):
            PhaseResult(phi_full=1.0, phi_eff=1.0, p_excite=0.0, rel_err=0.0, p_excite_peak=-0.1)

    def test_kick_momentum(self, k: float) -> None:
        """Test n hbar k of a kick."""
        assert KickOp(2, k).momentum == pytest.approx(2 * HBAR * k)
        assert np.isclose(KickOp(-4, k).momentum, -4 * HBAR * k)
