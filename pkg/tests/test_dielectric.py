"""
Unit Tests สำหรับโมดูล Dielectric

ทดสอบ Lorenz / Drude permittivity, ωp² จากความหนาแน่นอิเล็กตรอน และการแปลงหน่วย SI <-> rad/ns

ประวัติการแก้ไข (Version Control):
- v1.0.1: เพิ่ม property test (hypothesis) ของเครื่องหมายส่วนจินตภาพและความต่อเนื่อง
- v1.0.0: สร้าง Unit Test
"""

__version__ = "1.0.1"

import sys
import os

# แก้ปัญหา ModuleNotFoundError: No module named 'src' ตอนรัน pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import math

import pytest
from hypothesis import given, settings, strategies as st

from src.dielectric.dielectric import (
    CONSTANTS,
    ComplexPermittivity,
    DrudeParams,
    LorenzParams,
    PhysicalConstants,
    drude_permittivity,
    lorenz_permittivity,
    plasma_frequency_sq,
)
from src.utils.errors import DomainError


class TestPlasmaFrequency:

    def test_zero_density(self) -> None:
        assert plasma_frequency_sq(0.0) == 0.0

    def test_linear_in_density(self) -> None:
        assert plasma_frequency_sq(2.0e27) == 2.0 * plasma_frequency_sq(1.0e27)

    def test_reference_value(self) -> None:
        expected = 1e28 * (1.6e-19) ** 2 / (9.3e-31 * 8.85e-12)
        assert plasma_frequency_sq(1e28) == pytest.approx(expected, rel=1e-14)

    def test_negative_density_rejected(self) -> None:
        with pytest.raises(DomainError):
            plasma_frequency_sq(-1.0)

    def test_constants_are_fixed(self) -> None:
        assert CONSTANTS == PhysicalConstants(e=1.6e-19, m=9.3e-31, eps0=8.85e-12, c=2.998e8)


class TestLorenz:

    @pytest.fixture
    def params(self) -> LorenzParams:
        return LorenzParams(omega_p_sq=4.0e6, omega_0=2000.0, gamma=50.0)

    def test_static_limit(self, params: LorenzParams) -> None:
        eps = lorenz_permittivity(params, 0.0)
        assert eps.re == pytest.approx(1.0 + params.omega_p_sq / params.omega_0 ** 2)
        assert eps.im == 0.0

    def test_vacuum(self) -> None:
        vacuum = LorenzParams(omega_p_sq=0.0, omega_0=10.0, gamma=1.0)
        for omega in (0.0, 3.0, 10.0, 1e4):
            eps = lorenz_permittivity(vacuum, omega)
            assert (eps.re, eps.im) == (1.0, 0.0)

    def test_at_resonance(self, params: LorenzParams) -> None:
        eps = lorenz_permittivity(params, params.omega_0)
        assert eps.re == pytest.approx(1.0, abs=1e-12)
        assert eps.im == pytest.approx(params.omega_p_sq / (params.gamma * params.omega_0), rel=1e-12)

    def test_negative_frequency_rejected(self, params: LorenzParams) -> None:
        with pytest.raises(DomainError):
            lorenz_permittivity(params, -1.0)

    @pytest.mark.parametrize("kwargs", [
        {'omega_p_sq': -1.0, 'omega_0': 1.0, 'gamma': 1.0},
        {'omega_p_sq': 1.0, 'omega_0': 0.0, 'gamma': 1.0},
        {'omega_p_sq': 1.0, 'omega_0': 1.0, 'gamma': 0.0},
    ])
    def test_invalid_params(self, kwargs) -> None:
        with pytest.raises(DomainError):
            LorenzParams(**kwargs)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=1e-3, max_value=1e8),
        st.floats(min_value=1e-2, max_value=1e4),
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e4),
    )
    def test_imaginary_part_positive(self, omega_p_sq, omega_0, gamma, omega) -> None:
        eps = lorenz_permittivity(LorenzParams(omega_p_sq, omega_0, gamma), omega)
        assert eps.im > 0.0

    def test_continuity(self, params: LorenzParams) -> None:
        for omega in (100.0, 1999.0, 2000.0, 5000.0):
            a = lorenz_permittivity(params, omega).as_complex()
            b = lorenz_permittivity(params, omega + 1e-6).as_complex()
            assert abs(a - b) < 1e-3


class TestDrude:

    @pytest.fixture
    def params(self) -> DrudeParams:
        return DrudeParams(omega_p_sq=1.0e7, gamma=30.0)

    def test_vacuum(self) -> None:
        eps = drude_permittivity(DrudeParams(0.0, 5.0), 12.0)
        assert (eps.re, eps.im) == (1.0, 0.0)

    def test_high_frequency_limit(self, params: DrudeParams) -> None:
        eps = drude_permittivity(params, 1e9)
        assert eps.re == pytest.approx(1.0, abs=1e-9)
        assert eps.im == pytest.approx(0.0, abs=1e-9)

    def test_omega_equals_gamma(self, params: DrudeParams) -> None:
        eps = drude_permittivity(params, params.gamma)
        ratio = params.omega_p_sq / (2.0 * params.gamma ** 2)
        assert eps.re == pytest.approx(1.0 - ratio, rel=1e-12)
        assert eps.im == pytest.approx(ratio, rel=1e-12)

    def test_pole_at_zero(self, params: DrudeParams) -> None:
        with pytest.raises(DomainError):
            drude_permittivity(params, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=1e-3, max_value=1e8),
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e4),
    )
    def test_real_part_below_one(self, omega_p_sq, gamma, omega) -> None:
        assert drude_permittivity(DrudeParams(omega_p_sq, gamma), omega).re < 1.0


class TestUnitsAndHelpers:

    def test_si_round_trip(self) -> None:
        si = LorenzParams(omega_p_sq=3.0e24, omega_0=2.0e12, gamma=5.0e11)
        canonical = LorenzParams.from_si(si.omega_p_sq, si.omega_0, si.gamma)
        assert canonical.omega_0 == pytest.approx(2000.0)
        assert canonical.omega_p_sq == pytest.approx(3.0e6)
        back = canonical.to_si()
        assert back.omega_p_sq == pytest.approx(si.omega_p_sq, rel=1e-12)
        assert back.gamma == pytest.approx(si.gamma, rel=1e-12)

    def test_drude_from_electron_density(self) -> None:
        params = DrudeParams.from_electron_density(1e28, gamma_si=1e13)
        assert params.gamma == pytest.approx(1e4)
        assert params.omega_p_sq == pytest.approx(plasma_frequency_sq(1e28) * 1e-18, rel=1e-12)

    def test_lorenz_from_electron_density(self) -> None:
        params = LorenzParams.from_electron_density(1e26, omega_0_si=3e12, gamma_si=1e11)
        assert params.omega_0 == pytest.approx(3000.0)

    def test_refractive_index(self) -> None:
        n = ComplexPermittivity(4.0, 0.0).refractive_index()
        assert n == pytest.approx(2.0 + 0.0j)
        lossy = ComplexPermittivity(-1.0, 0.0).refractive_index()
        assert lossy.real >= 0.0 and lossy.imag == pytest.approx(1.0)

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(DomainError):
            ComplexPermittivity(math.nan, 0.0)
