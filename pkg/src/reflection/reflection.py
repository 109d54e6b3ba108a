"""
src/reflection/reflection.py
โมดูล Reflection: แบบจำลองสัมประสิทธิ์การสะท้อน Γ ทั้งหมด

- Fresnel + Rayleigh roughness factor (δ จริง หรือ perfect conductor)
- FARC เชิงกายภาพ: Fresnel ที่แทน δ ด้วย Lorenz (อโลหะ) / Drude (โลหะ)
- FARC เชิงสถิติ: พารามิเตอร์ (a, b, c, d) โดย f เป็นตัวเลขหน่วย GHz
- การแปลงไป-กลับระหว่างพารามิเตอร์กายภาพกับเชิงสถิติ

หน่วยภายใน: มุมเป็นองศาที่ขอบเขต API, ความถี่เป็น GHz, พารามิเตอร์ dielectric เป็น rad/ns
(ω = 2πf เมื่อ f เป็น GHz จะได้ rad/ns พอดี จึงไม่มีตัวคูณแฝงใน b, c, d)
ส่วน a ต้องบวก 18 เพราะ f² ใน GHz² ต่างจาก Hz² อยู่ 1e18

อัปเดต: v1.2.0
- แยกแกนคำนวณแบบ vectorized (statfarc_gamma / farc_gamma / fresnel_gamma)
- ใช้ radicand รูป (δ − 1) + cos²θ เพื่อให้กรณี δ = 1 ได้ Γ = 0 พอดี
"""

__version__ = "1.2.0"

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from src.dielectric.dielectric import (
    CONSTANTS,
    DrudeParams,
    LorenzParams,
    PhysicalConstants,
    drude_susceptibility,
    lorenz_susceptibility,
)
from src.utils.errors import ContractError, DomainError

ArrayLike = Union[float, np.ndarray]
Dielectric = Union[LorenzParams, DrudeParams]

# f² ใน GHz² -> Hz²
GHZ_SQ_EXPONENT = 18.0
MAX_ANGLE_DEG = 90.0


class MaterialClass(Enum):
    NON_METALLIC = "non-metallic"
    METALLIC = "metallic"

    @classmethod
    def parse(cls, text: Union[str, "MaterialClass"]) -> "MaterialClass":
        if isinstance(text, MaterialClass):
            return text
        key = str(text).strip().lower().replace("_", "").replace("-", "").replace(" ", "")
        aliases = {
            "nonmetallic": cls.NON_METALLIC,
            "nonmetal": cls.NON_METALLIC,
            "nm": cls.NON_METALLIC,
            "metallic": cls.METALLIC,
            "metal": cls.METALLIC,
            "m": cls.METALLIC,
        }
        if key not in aliases:
            raise ContractError(f"Unknown material class '{text}' (expected non-metallic or metallic)")
        return aliases[key]


class Conductor(Enum):
    """ตัวบ่งชี้ perfect conductor (δ → ∞) แทนการใช้ float ขนาดใหญ่ซึ่งจะ overflow ใน δ − sin²θ"""
    PERFECT = "perfect-conductor"


PERFECT_CONDUCTOR = Conductor.PERFECT


@dataclass(frozen=True)
class MaterialSurface:
    """
    อินพุตของ Fresnel แบบคลาสสิก

    Attributes:
        permittivity: δ จริง (≥ 1) หรือ PERFECT_CONDUCTOR
        roughness_sigma (float): ส่วนเบี่ยงเบนมาตรฐานของความขรุขระผิว หน่วยเมตร
    """
    permittivity: Union[float, Conductor]
    roughness_sigma: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.permittivity, Conductor):
            if not (math.isfinite(self.permittivity) and self.permittivity >= 1.0):
                raise DomainError(f"Permittivity must be finite and >= 1, got {self.permittivity}")
        if not (math.isfinite(self.roughness_sigma) and self.roughness_sigma >= 0.0):
            raise DomainError(f"roughness_sigma must be >= 0, got {self.roughness_sigma}")

    @property
    def is_perfect_conductor(self) -> bool:
        return self.permittivity is Conductor.PERFECT


@dataclass(frozen=True)
class IncidenceGeometry:
    theta_e: float          # องศา ใน [0, 90)
    frequency_ghz: float

    def __post_init__(self) -> None:
        _check_angles(self.theta_e)
        _check_frequencies(self.frequency_ghz)

    @property
    def theta_rad(self) -> float:
        return math.radians(self.theta_e)

    def wavelength_m(self, constants: PhysicalConstants = CONSTANTS) -> float:
        return constants.c / (self.frequency_ghz * 1e9)


@dataclass(frozen=True)
class StatFarcParams:
    """
    พารามิเตอร์ FARC เชิงสถิติ

    a, b, c เป็นค่า log10 ส่วน d เป็นสเกลการหน่วง (f หน่วย GHz)
    c ต้องมีเมื่อเป็น NON_METALLIC และต้องเป็น None เมื่อเป็น METALLIC
    """
    a: float
    b: float
    c: Optional[float]
    d: float
    material_class: MaterialClass = MaterialClass.NON_METALLIC

    def __post_init__(self) -> None:
        object.__setattr__(self, 'material_class', MaterialClass.parse(self.material_class))
        for name in ('a', 'b', 'd'):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"Parameter {name} must be finite")
        if not self.d > 0.0:
            raise DomainError(f"Parameter d must be > 0, got {self.d}")
        if self.material_class is MaterialClass.NON_METALLIC:
            if self.c is None or not math.isfinite(self.c):
                raise ContractError("Non-metallic parameters require a finite c")
        elif self.c is not None:
            raise ContractError("Metallic parameters must not define c")

    @property
    def is_metallic(self) -> bool:
        return self.material_class is MaterialClass.METALLIC

    def as_dict(self) -> dict:
        return {'a': self.a, 'b': self.b, 'c': self.c, 'd': self.d}


@dataclass(frozen=True)
class ReflectionCoefficient:
    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag


# ---------------------------------------------------------------------------
# Validation & numeric core
# ---------------------------------------------------------------------------

def _check_angles(theta_deg: ArrayLike) -> np.ndarray:
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(~((theta >= 0.0) & (theta < MAX_ANGLE_DEG))):
        raise DomainError("Incidence angle must lie in [0, 90) degrees")
    return theta


def _check_frequencies(f_ghz: ArrayLike) -> np.ndarray:
    f = np.asarray(f_ghz, dtype=float)
    if np.any(~((f > 0.0) & np.isfinite(f))):
        raise DomainError("Frequency must be finite and > 0 GHz")
    return f


def principal_sqrt(z: ArrayLike) -> np.ndarray:
    """
    รากที่สองแบบ principal: ส่วนจริงไม่ติดลบ และบน branch cut ให้ส่วนจินตภาพไม่ติดลบ
    (+0j ทำให้ -0.0 ในส่วนจินตภาพกลายเป็น +0.0 ก่อนเข้า np.sqrt)
    """
    return np.sqrt(np.asarray(z, dtype=complex) + 0j)


def _smooth_term(chi: ArrayLike, cos_theta: np.ndarray) -> np.ndarray:
    """(cosθ − √(δ − sin²θ)) / (cosθ + √(δ − sin²θ)) โดย δ − sin²θ = χ + cos²θ และ χ = δ − 1"""
    root = principal_sqrt(chi + cos_theta ** 2)
    return (cos_theta - root) / (cos_theta + root)


def _roughness(sigma: float, cos_theta: np.ndarray, f_ghz: np.ndarray,
               constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    wavelength = constants.c / (f_ghz * 1e9)
    return np.exp(-8.0 * (math.pi * sigma * cos_theta / wavelength) ** 2)


def _angular_frequency(f_ghz: np.ndarray) -> np.ndarray:
    # GHz -> rad/ns
    return 2.0 * math.pi * f_ghz


def _susceptibility(dielectric: Dielectric, f_ghz: np.ndarray) -> np.ndarray:
    omega = _angular_frequency(f_ghz)
    if isinstance(dielectric, LorenzParams):
        return lorenz_susceptibility(dielectric, omega)
    if isinstance(dielectric, DrudeParams):
        return drude_susceptibility(dielectric, omega)
    raise ContractError(f"Unsupported dielectric parameters: {type(dielectric).__name__}")


# ---------------------------------------------------------------------------
# Vectorized models
# ---------------------------------------------------------------------------

def fresnel_gamma(surface: MaterialSurface, theta_deg: ArrayLike, f_ghz: ArrayLike) -> np.ndarray:
    theta = _check_angles(theta_deg)
    f = _check_frequencies(f_ghz)
    cos_theta = np.cos(np.radians(theta))
    factor = _roughness(surface.roughness_sigma, cos_theta, f)
    if surface.is_perfect_conductor:
        return factor * (-1.0 + 0j)
    return factor * _smooth_term(surface.permittivity - 1.0, cos_theta)


def farc_gamma(dielectric: Dielectric, sigma: float, theta_deg: ArrayLike, f_ghz: ArrayLike) -> np.ndarray:
    if not (math.isfinite(sigma) and sigma >= 0.0):
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    theta = _check_angles(theta_deg)
    f = _check_frequencies(f_ghz)
    cos_theta = np.cos(np.radians(theta))
    chi = _susceptibility(dielectric, f)
    return _roughness(sigma, cos_theta, f) * _smooth_term(chi, cos_theta)


def statfarc_gamma(params: StatFarcParams, theta_deg: ArrayLike, f_ghz: ArrayLike) -> np.ndarray:
    theta = _check_angles(theta_deg)
    f = np.asarray(f_ghz, dtype=float)
    if params.is_metallic:
        f = _check_frequencies(f)
    elif params.c is None:
        raise ContractError("Non-metallic statistical FARC requires parameter c")
    elif np.any(~((f >= 0.0) & np.isfinite(f))):
        raise DomainError("Frequency must be finite and >= 0 GHz")
    cos_theta = np.cos(np.radians(theta))
    roughness = np.exp(-(10.0 ** params.a) * f ** 2 * cos_theta ** 2)
    if params.is_metallic:
        chi = -(10.0 ** params.b) / (params.d * f ** 2 + 1j * f)
    else:
        chi = (10.0 ** params.b) / ((10.0 ** params.c - params.d * f ** 2) - 1j * f)
    return roughness * _smooth_term(chi, cos_theta)


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------

def _scalar(value: np.ndarray) -> ReflectionCoefficient:
    return ReflectionCoefficient(complex(np.asarray(value).item()))


def roughness_factor(sigma: float, theta_e: float, frequency_ghz: float) -> float:
    """exp(−8(πσcosθ/λ)²) โดย λ = c/f หน่วยเมตร"""
    if not (math.isfinite(sigma) and sigma >= 0.0):
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    geom = IncidenceGeometry(theta_e, frequency_ghz)
    return float(_roughness(sigma, np.cos(geom.theta_rad), np.asarray(frequency_ghz, dtype=float)))


def fresnel_reflection(surface: MaterialSurface, geom: IncidenceGeometry) -> ReflectionCoefficient:
    return _scalar(fresnel_gamma(surface, geom.theta_e, geom.frequency_ghz))


def farc_nonmetallic(lorenz: LorenzParams, sigma: float, geom: IncidenceGeometry) -> ReflectionCoefficient:
    if not isinstance(lorenz, LorenzParams):
        raise ContractError("farc_nonmetallic expects LorenzParams")
    return _scalar(farc_gamma(lorenz, sigma, geom.theta_e, geom.frequency_ghz))


def farc_metallic(drude: DrudeParams, sigma: float, geom: IncidenceGeometry) -> ReflectionCoefficient:
    if not isinstance(drude, DrudeParams):
        raise ContractError("farc_metallic expects DrudeParams")
    return _scalar(farc_gamma(drude, sigma, geom.theta_e, geom.frequency_ghz))


def statfarc_eval(params: StatFarcParams, theta_e: float, f_ghz: float) -> ReflectionCoefficient:
    return _scalar(statfarc_gamma(params, theta_e, f_ghz))


# ---------------------------------------------------------------------------
# Physical <-> statistical mapping
# ---------------------------------------------------------------------------

def map_physical_to_statistical(sigma: float, dielectric: Dielectric,
                                constants: PhysicalConstants = CONSTANTS) -> StatFarcParams:
    """
    a = lg(8π²σ²/c²) + 18, b = lg(ωp²/2πγ), c = lg(ω₀²/2πγ), d = 2π/γ

    σ, c เป็น SI ส่วน dielectric ต้องเป็นหน่วย rad/ns
    """
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError("sigma must be > 0 for the statistical form (log of zero); "
                          "use the physical model directly")
    if dielectric.omega_p_sq <= 0.0:
        raise DomainError("omega_p_sq must be > 0 for the statistical form (log of zero); "
                          "use the physical model directly")
    two_pi_gamma = 2.0 * math.pi * dielectric.gamma
    a = math.log10(8.0 * math.pi ** 2 * sigma ** 2 / constants.c ** 2) + GHZ_SQ_EXPONENT
    b = math.log10(dielectric.omega_p_sq / two_pi_gamma)
    d = 2.0 * math.pi / dielectric.gamma
    if isinstance(dielectric, LorenzParams):
        c = math.log10(dielectric.omega_0 ** 2 / two_pi_gamma)
        return StatFarcParams(a, b, c, d, MaterialClass.NON_METALLIC)
    if isinstance(dielectric, DrudeParams):
        return StatFarcParams(a, b, None, d, MaterialClass.METALLIC)
    raise ContractError(f"Unsupported dielectric parameters: {type(dielectric).__name__}")


def recover_physical_params(params: StatFarcParams,
                            constants: PhysicalConstants = CONSTANTS) -> Tuple[float, Dielectric]:
    """ผกผันของ map_physical_to_statistical: γ = 2π/d, ωp² = 10ᵇ·4π²/d, ω₀² = 10ᶜ·4π²/d"""
    if not params.d > 0.0:
        raise DomainError(f"Parameter d must be > 0, got {params.d}")
    sigma = constants.c * math.sqrt(10.0 ** (params.a - GHZ_SQ_EXPONENT) / (8.0 * math.pi ** 2))
    gamma = 2.0 * math.pi / params.d
    scale = 4.0 * math.pi ** 2 / params.d
    omega_p_sq = 10.0 ** params.b * scale
    if params.is_metallic:
        return sigma, DrudeParams(omega_p_sq=omega_p_sq, gamma=gamma)
    if params.c is None:
        raise ContractError("Non-metallic parameters require c")
    return sigma, LorenzParams(omega_p_sq=omega_p_sq, omega_0=math.sqrt(10.0 ** params.c * scale), gamma=gamma)
