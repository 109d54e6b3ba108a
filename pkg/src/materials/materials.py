"""
src/materials/materials.py
คลังวัสดุอาคาร 5 ชนิดที่มากับโปรเจกต์

แต่ละรายการมีทั้งคุณสมบัติสำหรับ Fresnel (δ, σ) และพารามิเตอร์ FARC เชิงสถิติที่ฟิตจากการวัด
ช่วง 220-320 GHz พร้อม RMSE ที่รายงานไว้ (ใช้เป็นค่าอ้างอิงเท่านั้น)
"""

__version__ = "1.0.0"

from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

from src.dielectric.dielectric import DrudeParams, LorenzParams
from src.reflection.reflection import (
    PERFECT_CONDUCTOR,
    Conductor,
    MaterialClass,
    MaterialSurface,
    StatFarcParams,
    recover_physical_params,
)
from src.utils.errors import DomainError

MICROMETER = 1e-6


@dataclass(frozen=True)
class MaterialLibraryEntry:
    """
    Attributes:
        name (str): ชื่อวัสดุ
        permittivity: δ จาก Fresnel table หรือ PERFECT_CONDUCTOR
        roughness_um (float): σ หน่วยไมโครเมตร
        stat_params (StatFarcParams): แถวพารามิเตอร์ที่ฟิตแล้ว
        reported_rmse (float): RMSE ที่รายงานคู่กับแถวพารามิเตอร์
    """
    name: str
    permittivity: Union[float, Conductor]
    roughness_um: float
    stat_params: StatFarcParams
    reported_rmse: float
    aliases: Tuple[str, ...] = ()

    @property
    def material_class(self) -> MaterialClass:
        return self.stat_params.material_class

    def surface(self) -> MaterialSurface:
        return MaterialSurface(self.permittivity, self.roughness_um * MICROMETER)

    def physical_params(self) -> Tuple[float, Union[LorenzParams, DrudeParams]]:
        return recover_physical_params(self.stat_params)

    def to_dict(self) -> Dict[str, object]:
        return {
            'name': self.name,
            'class': self.material_class.value,
            'delta': None if isinstance(self.permittivity, Conductor) else self.permittivity,
            'perfect_conductor': isinstance(self.permittivity, Conductor),
            'sigma_um': self.roughness_um,
            'params': self.stat_params.as_dict(),
            'reported_rmse': self.reported_rmse,
        }


_NM = MaterialClass.NON_METALLIC

MATERIAL_LIBRARY: Tuple[MaterialLibraryEntry, ...] = (
    MaterialLibraryEntry('glass', 3.5, 0.006, StatFarcParams(-15.45, 3.93, 3.97, 0.06, _NM), 0.11),
    MaterialLibraryEntry('tile', 5.5, 0.050, StatFarcParams(-15.18, 3.96, 3.72, 0.02, _NM), 0.12),
    MaterialLibraryEntry('board', 2.8, 4.800, StatFarcParams(-15.30, 3.89, 4.04, 0.03, _NM), 0.10),
    MaterialLibraryEntry('plasterboard', 1.8, 2.200, StatFarcParams(-15.66, 3.57, 4.33, 0.10, _NM), 0.08),
    MaterialLibraryEntry(
        'aluminium alloy', PERFECT_CONDUCTOR, 4.000,
        StatFarcParams(-15.31, 6.26, None, 0.002, MaterialClass.METALLIC), 0.16,
        aliases=('aluminium', 'aluminum', 'aluminum alloy', 'al'),
    ),
)


def _normalise(name: str) -> str:
    return " ".join(name.strip().lower().replace("_", " ").replace("-", " ").split())


_INDEX: Dict[str, MaterialLibraryEntry] = {}
for _entry in MATERIAL_LIBRARY:
    for _key in (_entry.name,) + _entry.aliases:
        _INDEX[_normalise(_key)] = _entry


def list_materials() -> List[MaterialLibraryEntry]:
    return list(MATERIAL_LIBRARY)


def get_material(name: str) -> MaterialLibraryEntry:
    try:
        return _INDEX[_normalise(name)]
    except KeyError:
        known = ", ".join(entry.name for entry in MATERIAL_LIBRARY)
        raise DomainError(f"Unknown material '{name}' (known: {known})") from None
