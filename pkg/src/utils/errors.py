"""
src/utils/errors.py
ลำดับชั้น Exception ของโปรเจกต์ FARC

ทุกคลาสสืบทอดจาก ValueError เพื่อให้โค้ดที่ดัก `except ValueError` แบบเดิมยังทำงานได้
CLI จะแปลง FarcError ทั้งหมดเป็น exit code 2

อัปเดต: v1.1.0
- RowIssue อ้างอิงเลขบรรทัดจริงของไฟล์แทนลำดับแถวข้อมูล
"""

__version__ = "1.1.0"

from dataclasses import dataclass
from typing import List, Optional


class FarcError(ValueError):
    """ฐานของข้อผิดพลาดเชิงโดเมนทั้งหมด"""


class DomainError(FarcError):
    """อาร์กิวเมนต์อยู่นอกโดเมนของสูตร (เช่น ขั้วของ Drude ที่ ω = 0, log ของศูนย์)"""


class ContractError(FarcError):
    """ข้อตกลงระหว่างชนิดข้อมูลถูกละเมิด (เช่น NonMetallic แต่ไม่มีพารามิเตอร์ c)"""


class UnderdeterminedError(FarcError):
    """ข้อมูลน้อยเกินกว่าจำนวนพารามิเตอร์ที่ต้องฟิต"""


@dataclass(frozen=True)
class RowIssue:
    """line คือเลขบรรทัดจริงในไฟล์ (นับจาก 1 รวม header และบรรทัด comment)"""
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class DatasetValidationError(FarcError):
    """ไฟล์ CSV ผิดรูปแบบ พร้อมรายการปัญหารายแถว"""

    def __init__(self, message: str, issues: Optional[List[RowIssue]] = None) -> None:
        self.issues: List[RowIssue] = list(issues or [])
        detail = "; ".join(str(issue) for issue in self.issues[:10])
        if len(self.issues) > 10:
            detail += f"; ... ({len(self.issues) - 10} more)"
        super().__init__(f"{message}: {detail}" if detail else message)
