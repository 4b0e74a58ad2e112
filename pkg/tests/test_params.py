"""Tests for the parameter chain and validity grading."""

from __future__ import annotations

import math
import warnings
from dataclasses import replace

import pytest

from kdsim.constants import HBAR
from kdsim.exceptions import NonFiniteResultError, PreconditionError, RegimeWarning
from kdsim.models import DerivedParams, PhysicalConfig
from kdsim.params import (
    Verdict,
    coherence_time,
    derive_params,
    raman_nath_check,
    trap_ground_state,
    validity_report,
)


def _quiet_report(p: DerivedParams):  # type: ignore[no-untyped-def]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return validity_report(p)


class TestDeriveParams:
    """Tests for derive_params against the reference numbers."""

    def test_large_cavity_couplings(self, large_derived: DerivedParams) -> None:
        """Test Omega_a0, Omega_effm, tau Omega_effm and xi of the 1 mm x 2 cm mode."""
        assert large_derived.omega_a0 == pytest.approx(3.3e5, rel=0.1)
        assert large_derived.omega_effm == pytest.approx(8.3e5, rel=0.1)
        assert large_derived.tau_omega_effm == pytest.approx(0.083, rel=0.05)
        assert large_derived.xi == pytest.approx(0.0204, rel=0.05)

    def test_small_cavity_couplings(self, small_derived: DerivedParams) -> None:
        """Test Omega_a0 and Omega_c0 of the 40 um x 1 cm mode."""
        assert small_derived.omega_a0 == pytest.approx(1.2e7, rel=0.1)
        assert small_derived.omega_c0 == pytest.approx(5.5e5, rel=0.05)

    def test_omega_effm_identity(self, large_derived: DerivedParams) -> None:
        """Test Omega_effm = eta0^2 Omega_a0^2 / delta_al = 2.5 Omega_a0."""
        p = large_derived
        assert p.omega_effm == pytest.approx(p.eta0**2 * p.omega_a0**2 / p.delta_al, rel=1e-12)
        assert p.omega_effm == pytest.approx(2.5 * p.omega_a0, rel=1e-12)
        assert p.xi == pytest.approx(p.omega_effm * p.tau_pulse / 4, rel=1e-12)

    def test_cavity_ratio(self, large_derived: DerivedParams, small_derived: DerivedParams) -> None:
        """Test that Omega_c0 scales with the inverse mode volume (factor 1250)."""
        assert small_derived.omega_c0 / large_derived.omega_c0 == pytest.approx(1250.0, rel=1e-12)

    def test_quoted_factor(
        self, large_derived: DerivedParams, small_derived: DerivedParams
    ) -> None:
        """Test the quoted-versus-formula Omega_c0 factor, independent of the cavity."""
        assert 2.0 < small_derived.omega_c0_quoted_factor < 3.0
        assert large_derived.omega_c0_quoted_factor == pytest.approx(
            small_derived.omega_c0_quoted_factor, rel=1e-12
        )

    def test_recoil_velocities(
        self, large_derived: DerivedParams, large_cavity: PhysicalConfig
    ) -> None:
        """Test hbar k / m for the nanoparticle and the atom."""
        assert large_derived.v_k_np == pytest.approx(5.116e-9, rel=1e-3)
        expected = HBAR * large_derived.k / large_cavity.atom_mass
        assert large_derived.v_k_atom == pytest.approx(expected)

    def test_waist_scaling(
        self, large_cavity: PhysicalConfig, large_derived: DerivedParams
    ) -> None:
        """Test Omega_c0 ~ 1/V and Omega_a0 ~ 1/sqrt(V) when the waist halves."""
        halved = derive_params(replace(large_cavity, cavity_waist=large_cavity.cavity_waist / 2))
        assert halved.omega_c0 / large_derived.omega_c0 == pytest.approx(4.0, rel=1e-12)
        assert halved.omega_a0 / large_derived.omega_a0 == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
    def test_xi_invariant_under_rescaling(
        self, large_cavity: PhysicalConfig, large_derived: DerivedParams, s: float
    ) -> None:
        """Test that xi is unchanged when the dipole grows by s and tau shrinks by s."""
        scaled = derive_params(
            replace(
                large_cavity,
                dipole_moment=large_cavity.dipole_moment * s,
                tau_pulse=large_cavity.tau_pulse / s,
            )
        )
        assert scaled.xi == pytest.approx(large_derived.xi, rel=1e-12)

    def test_overflow_named(self, large_cavity: PhysicalConfig) -> None:
        """Test that an absurd dipole overflows in omega_a0 and says so."""
        with pytest.raises(NonFiniteResultError, match="omega_a0"):
            derive_params(replace(large_cavity, dipole_moment=1e300))

    def test_underflow_named(self, large_cavity: PhysicalConfig) -> None:
        """Test that a vanishing particle volume is reported as v_np."""
        with pytest.raises(NonFiniteResultError, match="v_np"):
            derive_params(replace(large_cavity, np_radius=1e-120))

    def test_crossed_polarization(self, large_cavity: PhysicalConfig) -> None:
        """Test that a zero overlap gives an infinite field ratio instead of an error."""
        p = derive_params(replace(large_cavity, polarization_overlap=0.0))
        assert p.field_ratio == math.inf

    def test_to_dict(self, large_derived: DerivedParams) -> None:
        """Test that the mapping carries every field."""
        data = large_derived.to_dict()
        assert data["fields"]["omega_a0"]["value"] == large_derived.omega_a0
        assert data["fields"]["omega_a0"]["unit"] == "rad/s"
        assert "omega_c0_quoted_factor" in data["fields"]


class TestRamanNath:
    """Tests for the frozen-position check."""

    def test_packet_spread(self, large_cavity: PhysicalConfig) -> None:
        """Test k v tau for 13 um/s."""
        assert raman_nath_check(large_cavity, 13e-6) == pytest.approx(1.047e-5, rel=1e-3)

    def test_thermal_velocity(self, large_cavity: PhysicalConfig) -> None:
        """Test k v tau for 2 mm/s."""
        assert raman_nath_check(large_cavity, 2e-3) == pytest.approx(1.61e-3, rel=1e-2)

    def test_zero_velocity(self, large_cavity: PhysicalConfig) -> None:
        """Test that a particle at rest gives exactly zero."""
        assert raman_nath_check(large_cavity, 0.0) == 0.0

    def test_fast_particle_warns(self, large_cavity: PhysicalConfig) -> None:
        """Test that a 1 m/s particle breaks the premise."""
        with pytest.warns(RegimeWarning, match="k v tau"):
            ratio = raman_nath_check(large_cavity, 1.0)
        assert ratio > 0.1

    def test_negative_velocity(self, large_cavity: PhysicalConfig) -> None:
        """Test that negative speeds are rejected."""
        with pytest.raises(PreconditionError, match="v_char"):
            raman_nath_check(large_cavity, -1.0)


class TestValidityReport:
    """Tests for validity_report and Verdict."""

    @pytest.mark.parametrize(
        ("value", "verdict"),
        [(0.0, Verdict.PASS), (0.149, Verdict.PASS), (0.15, Verdict.WARN), (0.5, Verdict.WARN)],
    )
    def test_grade(self, value: float, verdict: Verdict) -> None:
        """Test the band edges."""
        assert Verdict.grade(value) is verdict

    def test_grade_fail(self) -> None:
        """Test that values past 0.5 fail."""
        assert Verdict.grade(0.51) is Verdict.FAIL

    def test_reference_ratios(self, large_derived: DerivedParams) -> None:
        """Test the grades of the reference experiment."""
        report = _quiet_report(large_derived)
        assert report["omega_a0/delta_al"].verdict is Verdict.PASS
        assert report["omega_a0/delta_al"].value == pytest.approx(0.1)
        assert report["delta_al/Delta"].verdict is Verdict.PASS
        assert report["delta_al/Delta"].value == pytest.approx(1 / 99)
        assert report["|mu|"].value == pytest.approx(0.5)
        assert report["|mu|"].verdict is Verdict.WARN
        assert report.worst is Verdict.WARN

    def test_warns_on_mu(self, large_derived: DerivedParams) -> None:
        """Test that a non-pass grade is emitted as RegimeWarning."""
        with pytest.warns(RegimeWarning, match="mu"):
            validity_report(large_derived)

    def test_resonant_drive_fails(self, large_cavity: PhysicalConfig) -> None:
        """Test that delta_al = Omega_a0 fails the large-detuning check."""
        p = derive_params(replace(large_cavity, delta_al_ratio=1.0))
        report = _quiet_report(p)
        assert report["omega_a0/delta_al"].verdict is Verdict.FAIL
        assert report.worst is Verdict.FAIL

    def test_unknown_check(self, large_derived: DerivedParams) -> None:
        """Test lookup of a missing ratio."""
        with pytest.raises(KeyError):
            _quiet_report(large_derived)["nope"]

    def test_to_dict(self, large_derived: DerivedParams) -> None:
        """Test the report mapping."""
        data = _quiet_report(large_derived).to_dict()
        assert data["worst"] == "warn"
        names = [c["name"] for c in data["checks"]]
        assert names == ["omega_a0/delta_al", "delta_al/Delta", "|mu|"]


class TestPacketScales:
    """Tests for trap_ground_state and coherence_time."""

    def test_ground_state_uncertainty(self) -> None:
        """Test that the trap ground state saturates delta_x delta_p = hbar / 2."""
        delta_x, delta_p = trap_ground_state(1e-19, 2 * math.pi * 1e5)
        assert delta_x * delta_p == pytest.approx(HBAR / 2, rel=1e-12)

    def test_ground_state_precondition(self) -> None:
        """Test that a non-positive trap frequency is refused."""
        with pytest.raises(PreconditionError):
            trap_ground_state(1e-19, 0.0)

    def test_coherence_time(
        self, large_cavity: PhysicalConfig, large_derived: DerivedParams
    ) -> None:
        """Test m / (2 k delta_p) for a 13 um/s packet (about 4.8 ms)."""
        t_c = coherence_time(large_cavity.delta_p, large_cavity.np_mass, large_derived.k)
        assert t_c == pytest.approx(4.77e-3, rel=0.01)
