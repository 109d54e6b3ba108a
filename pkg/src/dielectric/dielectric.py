"""
src/dielectric/dielectric.py
โมดูล Dielectric: ค่าสภาพยอมสัมพัทธ์เชิงซ้อน (Complex Relative Permittivity) ตามความถี่

- Lorenz oscillator สำหรับวัสดุอโลหะ: δ = 1 + ωp² / (ω₀² − ω² − jγω)
- Drude สำหรับวัสดุโลหะ:           δ = 1 − ωp² / (ω² + jγω)

ทุกฟังก์ชันรับความถี่เชิงมุม (angular frequency) เป็นอาร์กิวเมนต์หลัก
การแปลง ω = 2πf อยู่ที่ผู้เรียก หน่วยของ ω, ω₀, γ ต้องเป็นหน่วยเดียวกัน
(โมดูล reflection ใช้ rad/ns ส่วน plasma_frequency_sq คืนค่าเป็น SI)

อัปเดต: v1.1.0
- เพิ่ม from_si / to_si และ from_electron_density
"""

__version__ = "1.1.0"

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from src.utils.errors import DomainError

# rad/s -> rad/ns
SI_TO_CANONICAL = 1e-9


@dataclass(frozen=True)
class PhysicalConstants:
    """ค่าคงที่ทางฟิสิกส์ที่ใช้ในสูตร (มวลอิเล็กตรอนใช้ 9.3e-31 kg ตามตารางอ้างอิงของแบบจำลอง)"""
    e: float = 1.6e-19      # C
    m: float = 9.3e-31      # kg
    eps0: float = 8.85e-12  # F/m
    c: float = 2.998e8      # m/s


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ComplexPermittivity:
    re: float
    im: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"Permittivity must be finite, got ({self.re}, {self.im})")

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexPermittivity":
        return cls(float(value.real), float(value.imag))

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def refractive_index(self) -> complex:
        """n + jκ จากรากที่สองแบบ principal (ส่วนจริงไม่ติดลบ)"""
        return cmath.sqrt(complex(self.re, self.im + 0.0))


@dataclass(frozen=True)
class LorenzParams:
    """
    พารามิเตอร์ Lorenz oscillator

    Attributes:
        omega_p_sq (float): กำลังสองของความถี่พลาสมาเชิงมุม
        omega_0 (float): ความถี่เรโซแนนซ์เชิงมุม
        gamma (float): ค่าคงที่การหน่วง (damping)
    """
    omega_p_sq: float
    omega_0: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.omega_p_sq >= 0.0:
            raise DomainError(f"omega_p_sq must be >= 0, got {self.omega_p_sq}")
        if not self.omega_0 > 0.0:
            raise DomainError(f"omega_0 must be > 0, got {self.omega_0}")
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")

    @classmethod
    def from_si(cls, omega_p_sq: float, omega_0: float, gamma: float) -> "LorenzParams":
        """รับค่าหน่วย rad/s แล้วแปลงเป็น rad/ns"""
        return cls(
            omega_p_sq=omega_p_sq * SI_TO_CANONICAL ** 2,
            omega_0=omega_0 * SI_TO_CANONICAL,
            gamma=gamma * SI_TO_CANONICAL,
        )

    def to_si(self) -> "LorenzParams":
        return LorenzParams(
            omega_p_sq=self.omega_p_sq / SI_TO_CANONICAL ** 2,
            omega_0=self.omega_0 / SI_TO_CANONICAL,
            gamma=self.gamma / SI_TO_CANONICAL,
        )

    @classmethod
    def from_electron_density(cls, electron_density: float, omega_0_si: float, gamma_si: float) -> "LorenzParams":
        return cls.from_si(plasma_frequency_sq(electron_density), omega_0_si, gamma_si)


@dataclass(frozen=True)
class DrudeParams:
    omega_p_sq: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.omega_p_sq >= 0.0:
            raise DomainError(f"omega_p_sq must be >= 0, got {self.omega_p_sq}")
        if not self.gamma > 0.0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")

    @classmethod
    def from_si(cls, omega_p_sq: float, gamma: float) -> "DrudeParams":
        return cls(omega_p_sq=omega_p_sq * SI_TO_CANONICAL ** 2, gamma=gamma * SI_TO_CANONICAL)

    def to_si(self) -> "DrudeParams":
        return DrudeParams(omega_p_sq=self.omega_p_sq / SI_TO_CANONICAL ** 2, gamma=self.gamma / SI_TO_CANONICAL)

    @classmethod
    def from_electron_density(cls, electron_density: float, gamma_si: float) -> "DrudeParams":
        return cls.from_si(plasma_frequency_sq(electron_density), gamma_si)


def plasma_frequency_sq(electron_density: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """ωp² = N e² / (m ε₀) หน่วย (rad/s)², N คือจำนวนอิเล็กตรอนต่อ m³"""
    if not electron_density >= 0.0:
        raise DomainError(f"Electron density must be >= 0, got {electron_density}")
    return electron_density * constants.e ** 2 / (constants.m * constants.eps0)


def lorenz_susceptibility(params: LorenzParams, omega: Union[float, np.ndarray]) -> np.ndarray:
    """
    δ − 1 ของ Lorenz แบบ vectorized (รับ scalar หรือ array ของ ω)
    แยกส่วนนี้ออกมาเพื่อให้ reflection คำนวณ δ − sin²θ เป็น (δ − 1) + cos²θ ได้โดยไม่เสียความแม่นยำ
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega >= 0.0)):
        raise DomainError("Angular frequency must be >= 0")
    denominator = (params.omega_0 ** 2 - omega ** 2) - 1j * (params.gamma * omega)
    return params.omega_p_sq / denominator


def drude_susceptibility(params: DrudeParams, omega: Union[float, np.ndarray]) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    # ω = 0 คือขั้ว (pole) ของ Drude
    if np.any(~(omega > 0.0)):
        raise DomainError("Drude model is undefined at omega = 0 (pole)")
    denominator = omega ** 2 + 1j * (params.gamma * omega)
    return -params.omega_p_sq / denominator


def lorenz_permittivity(params: LorenzParams, omega: float) -> ComplexPermittivity:
    return ComplexPermittivity.from_complex(1.0 + complex(lorenz_susceptibility(params, omega).item()))


def drude_permittivity(params: DrudeParams, omega: float) -> ComplexPermittivity:
    return ComplexPermittivity.from_complex(1.0 + complex(drude_susceptibility(params, omega).item()))
