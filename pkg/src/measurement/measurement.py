"""
src/measurement/measurement.py
โมดูล Measurement: ประมวลผลข้อมูลฝั่งการวัด

- แปลงกำลังที่ calibrate แล้วเป็น |Γ| = ((d_t + d_r)/d_ref)·√(P_r/P_ref)
- กริดการวัดมาตรฐาน: 220-320 GHz ทุก 10 GHz (ยกเว้น 270, 310) × มุม 10°-80° ทุก 10°
- โหลด/ตรวจสอบ/เขียนไฟล์ CSV ของ sample และ power log
- ค่าเฉลี่ย |Γ| ข้ามมุมรายความถี่ และความผันผวนของ |Γ| ตามความถี่รายมุม

กำลังเป็นหน่วยเชิงเส้นใดก็ได้ที่สอดคล้องกัน (อัตราส่วนตัดหน่วยออก) ส่วน dB แปลงด้วย db_to_linear

อัปเดต: v1.2.0
- ข้อความ error อ้างอิงเลขบรรทัดจริงของไฟล์

v1.1.0
- เพิ่ม frequency_fluctuation และ write_samples สำหรับ CLI convert
"""

__version__ = "1.2.0"

import io
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from src.reflection.reflection import MaterialClass
from src.utils.errors import DatasetValidationError, DomainError, RowIssue
from src.utils.logger import setup_logger

logger = setup_logger("Measurement")

Source = Union[str, TextIO]

SAMPLE_COLUMNS: Tuple[str, ...] = ('frequency_ghz', 'theta_deg', 'gamma_mag')
POWER_COLUMNS: Tuple[str, ...] = ('frequency_ghz', 'theta_deg', 'p_r', 'p_ref', 'd_t_m', 'd_r_m', 'd_ref_m')

MEASUREMENT_FREQUENCIES_GHZ: Tuple[float, ...] = (220.0, 230.0, 240.0, 250.0, 260.0, 280.0, 290.0, 300.0, 320.0)
MEASUREMENT_ANGLES_DEG: Tuple[float, ...] = (10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0)

CSV_DIGITS = 9
GRID_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GridSpec:
    frequencies: Tuple[float, ...]
    angles: Tuple[float, ...]

    def __post_init__(self) -> None:
        freqs = tuple(sorted({float(f) for f in self.frequencies}))
        angles = tuple(sorted({float(a) for a in self.angles}))
        if not freqs or not angles:
            raise DomainError("Grid needs at least one frequency and one angle")
        if any(not (math.isfinite(f) and f > 0.0) for f in freqs):
            raise DomainError("Grid frequencies must be > 0 GHz")
        if any(not (0.0 <= a < 90.0) for a in angles):
            raise DomainError("Grid angles must lie in [0, 90) degrees")
        object.__setattr__(self, 'frequencies', freqs)
        object.__setattr__(self, 'angles', angles)

    @property
    def size(self) -> int:
        return len(self.frequencies) * len(self.angles)

    def has_frequency(self, f: float) -> bool:
        return bool(np.any(np.isclose(self.frequencies, f, rtol=0.0, atol=GRID_TOLERANCE)))

    def has_angle(self, theta: float) -> bool:
        return bool(np.any(np.isclose(self.angles, theta, rtol=0.0, atol=GRID_TOLERANCE)))

    def contains(self, f: float, theta: float) -> bool:
        return self.has_frequency(f) and self.has_angle(theta)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """คืน (f, θ) แบบแบนเรียงตาม frequency-major แล้วตามมุม"""
        f_mesh, theta_mesh = np.meshgrid(self.frequencies, self.angles, indexing='ij')
        return f_mesh.ravel(), theta_mesh.ravel()


MEASUREMENT_GRID = GridSpec(MEASUREMENT_FREQUENCIES_GHZ, MEASUREMENT_ANGLES_DEG)


def measurement_grid() -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    return MEASUREMENT_GRID.frequencies, MEASUREMENT_GRID.angles


@dataclass(frozen=True)
class PowerRecord:
    """
    หนึ่งแถวของ power log

    Attributes:
        p_r (float): กำลังที่รับได้จากการสะท้อน (เชิงเส้น)
        p_ref (float): กำลังอ้างอิงเมื่อหันสายอากาศเข้าหากันที่ระยะ d_ref
        d_t, d_r, d_ref (float): ระยะ TX-วัสดุ, RX-วัสดุ และระยะอ้างอิง หน่วยเมตร
    """
    frequency_ghz: float
    theta_deg: float
    p_r: float
    p_ref: float
    d_t: float = 0.05
    d_r: float = 0.05
    d_ref: float = 0.10

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p_r) and self.p_r >= 0.0):
            raise DomainError(f"p_r must be >= 0, got {self.p_r}")
        if not (math.isfinite(self.p_ref) and self.p_ref > 0.0):
            raise DomainError(f"p_ref must be > 0, got {self.p_ref}")
        for name in ('d_t', 'd_r', 'd_ref'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class ReflectionSample:
    frequency_ghz: float
    theta_deg: float
    gamma_mag: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma_mag) and self.gamma_mag >= 0.0):
            raise DomainError(f"gamma_mag must be finite and >= 0, got {self.gamma_mag}")

    @property
    def exceeds_unity(self) -> bool:
        return self.gamma_mag > 1.0

    @property
    def key(self) -> Tuple[float, float]:
        return self.frequency_ghz, self.theta_deg


@dataclass(frozen=True)
class Dataset:
    material_name: str
    material_class: MaterialClass
    samples: Tuple[ReflectionSample, ...]
    grid: GridSpec = field(default=MEASUREMENT_GRID)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'material_class', MaterialClass.parse(self.material_class))
        ordered = tuple(sorted(self.samples, key=lambda s: s.key))
        seen = set()
        for sample in ordered:
            if sample.key in seen:
                raise DatasetValidationError(f"Duplicate sample at {sample.key}")
            seen.add(sample.key)
            if not self.grid.contains(*sample.key):
                raise DatasetValidationError(f"Sample {sample.key} lies outside the declared grid")
        object.__setattr__(self, 'samples', ordered)

    def __len__(self) -> int:
        return len(self.samples)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(frequency_ghz, theta_deg, gamma_mag) เป็น numpy array"""
        if not self.samples:
            empty = np.empty(0, dtype=float)
            return empty, empty.copy(), empty.copy()
        data = np.array([(s.frequency_ghz, s.theta_deg, s.gamma_mag) for s in self.samples], dtype=float)
        return data[:, 0], data[:, 1], data[:, 2]

    def to_frame(self) -> pd.DataFrame:
        f, theta, gamma = self.arrays()
        return pd.DataFrame({'frequency_ghz': f, 'theta_deg': theta, 'gamma_mag': gamma})

    @property
    def distinct_frequencies(self) -> Tuple[float, ...]:
        return tuple(sorted({s.frequency_ghz for s in self.samples}))

    @property
    def distinct_angles(self) -> Tuple[float, ...]:
        return tuple(sorted({s.theta_deg for s in self.samples}))


# ---------------------------------------------------------------------------
# |Γ| from powers
# ---------------------------------------------------------------------------

def db_to_linear(p_db: float) -> float:
    return 10.0 ** (p_db / 10.0)


def gamma_from_powers(record: PowerRecord) -> ReflectionSample:
    if record.p_ref <= 0.0:
        raise DomainError("p_ref must be > 0")
    gamma = ((record.d_t + record.d_r) / record.d_ref) * math.sqrt(record.p_r / record.p_ref)
    sample = ReflectionSample(record.frequency_ghz, record.theta_deg, gamma)
    if sample.exceeds_unity:
        logger.warning(f"|Gamma| = {gamma:.6g} > 1 at ({record.frequency_ghz:g} GHz, {record.theta_deg:g} deg); sample kept")
    return sample


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

def _read_text(source: Source) -> str:
    if isinstance(source, str):
        with open(source, 'r', encoding='utf-8') as fh:
            return fh.read()
    return source.read()


def _data_line_numbers(text: str) -> List[int]:
    """เลขบรรทัดจริงของแถวข้อมูล (ข้าม header, บรรทัดว่าง และบรรทัด comment)"""
    content = [no for no, line in enumerate(text.splitlines(), start=1)
               if line.strip() and not line.lstrip().startswith('#')]
    return content[1:]


def _read_table(source: Source, required: Sequence[str]) -> Tuple[pd.DataFrame, List[int]]:
    """คืน (DataFrame แบบ str, เลขบรรทัดจริงของแต่ละแถว)"""
    text = _read_text(source)
    try:
        df = pd.read_csv(io.StringIO(text), comment='#', dtype=str, skipinitialspace=True, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DatasetValidationError("Input is empty (header row required)") from None
    except pd.errors.ParserError as e:
        raise DatasetValidationError(f"Malformed CSV: {e}") from None
    df.columns = [str(col).strip() for col in df.columns]
    missing = [col for col in required if col not in df.columns]
    if missing:
        raise DatasetValidationError(f"Missing required column(s): {', '.join(missing)}")
    lines = _data_line_numbers(text)
    if len(lines) != len(df):
        # pandas split rows differently (e.g. quoted newlines): assume header on line 1
        lines = [idx + 2 for idx in range(len(df))]
    return df, lines


def _parse_row(row: Dict[str, object], columns: Sequence[str], line_no: int, issues: List[RowIssue]) -> Optional[Dict[str, float]]:
    values: Dict[str, float] = {}
    for col in columns:
        raw = row[col]
        try:
            value = float(str(raw).strip())
        except (TypeError, ValueError):
            value = float('nan')
        if pd.isna(raw) or not math.isfinite(value):
            issues.append(RowIssue(line_no, f"cannot parse {col}={raw!r} as a finite number"))
            return None
        values[col] = value
    return values


def load_dataset(source: Source, material_class: Union[MaterialClass, str], material_name: str = "",
                 strict: bool = True, grid: Optional[GridSpec] = None) -> Dataset:
    """
    โหลดไฟล์ sample (frequency_ghz, theta_deg, gamma_mag) แล้วตรวจสอบ

    strict=True: ทุกจุดต้องอยู่บนกริด (ค่า default คือกริดการวัดมาตรฐาน)
    strict=False: จุดนอกกริดผ่านได้ กริดของ Dataset จะเป็นค่าที่พบจริงในไฟล์
    เลขใน error คือเลขบรรทัดจริงของไฟล์ (นับ header และบรรทัด comment ด้วย)
    """
    declared = grid or MEASUREMENT_GRID
    df, lines = _read_table(source, SAMPLE_COLUMNS)

    issues: List[RowIssue] = []
    samples: List[ReflectionSample] = []
    first_seen: Dict[Tuple[float, float], int] = {}
    off_grid = 0

    for line_no, row in zip(lines, df[list(SAMPLE_COLUMNS)].to_dict(orient='records')):
        values = _parse_row(row, SAMPLE_COLUMNS, line_no, issues)
        if values is None:
            continue
        f, theta, gamma = values['frequency_ghz'], values['theta_deg'], values['gamma_mag']
        key = (f, theta)
        if key in first_seen:
            issues.append(RowIssue(line_no, f"duplicate point ({f:g} GHz, {theta:g} deg), first seen at line {first_seen[key]}"))
            continue
        first_seen[key] = line_no
        if not declared.contains(f, theta):
            if strict:
                issues.append(RowIssue(line_no, f"point ({f:g} GHz, {theta:g} deg) is off the declared grid"))
                continue
            off_grid += 1
        try:
            samples.append(ReflectionSample(f, theta, gamma))
        except DomainError as e:
            issues.append(RowIssue(line_no, str(e)))

    if issues:
        raise DatasetValidationError("Invalid samples file", issues)
    if not samples:
        raise DatasetValidationError("Samples file contains no data rows")
    if off_grid:
        logger.warning(f"{off_grid} off-grid sample(s) passed through (permissive mode)")

    above = sum(1 for s in samples if s.exceeds_unity)
    if above:
        logger.warning(f"{above} sample(s) have |Gamma| > 1; kept as measured")

    if strict:
        dataset_grid = declared
    else:
        dataset_grid = GridSpec(tuple(s.frequency_ghz for s in samples), tuple(s.theta_deg for s in samples))
    return Dataset(material_name, MaterialClass.parse(material_class), tuple(samples), dataset_grid)


def load_power_records(source: Source, db: bool = False) -> List[PowerRecord]:
    """โหลด power log; db=True แปลง p_r และ p_ref จาก dB เป็นเชิงเส้นก่อนสร้าง PowerRecord"""
    df, lines = _read_table(source, POWER_COLUMNS)
    issues: List[RowIssue] = []
    records: List[PowerRecord] = []
    for line_no, row in zip(lines, df[list(POWER_COLUMNS)].to_dict(orient='records')):
        values = _parse_row(row, POWER_COLUMNS, line_no, issues)
        if values is None:
            continue
        p_r, p_ref = values['p_r'], values['p_ref']
        if db:
            p_r, p_ref = db_to_linear(p_r), db_to_linear(p_ref)
        try:
            records.append(PowerRecord(
                frequency_ghz=values['frequency_ghz'],
                theta_deg=values['theta_deg'],
                p_r=p_r,
                p_ref=p_ref,
                d_t=values['d_t_m'],
                d_r=values['d_r_m'],
                d_ref=values['d_ref_m'],
            ))
        except DomainError as e:
            issues.append(RowIssue(line_no, str(e)))
    if issues:
        raise DatasetValidationError("Invalid power file", issues)
    if not records:
        raise DatasetValidationError("Power file contains no data rows")
    return records


def samples_to_frame(samples: Iterable[ReflectionSample]) -> pd.DataFrame:
    rows = [(s.frequency_ghz, s.theta_deg, s.gamma_mag) for s in samples]
    return pd.DataFrame(rows, columns=list(SAMPLE_COLUMNS))


def write_samples(samples: Iterable[ReflectionSample], sink: Source, digits: int = CSV_DIGITS) -> None:
    """เขียน sample ตามลำดับที่ได้รับ (ใช้กับ convert ซึ่งต้องคงลำดับแถวอินพุต)"""
    samples_to_frame(samples).to_csv(sink, index=False, float_format=f'%.{digits}g', lineterminator='\n')


def write_dataset(dataset: Dataset, sink: Source, digits: int = CSV_DIGITS) -> None:
    """รูปแบบ canonical: header + แถวเรียง frequency-major แล้วตามมุม"""
    write_samples(dataset.samples, sink, digits)


# ---------------------------------------------------------------------------
# Aggregates
# ---------------------------------------------------------------------------

def average_over_angles(dataset: Dataset, strict: bool = True) -> pd.DataFrame:
    """
    ค่าเฉลี่ยเลขคณิตของ |Γ| ข้ามมุม แยกตามความถี่

    strict=True: ทุกความถี่ในกริดต้องมีครบทุกมุมของกริด
    คืน DataFrame คอลัมน์ frequency_ghz, mean_gamma, n_angles
    """
    df = dataset.to_frame()
    if strict:
        issues: List[str] = []
        for f in dataset.grid.frequencies:
            group = df[np.isclose(df['frequency_ghz'], f, rtol=0.0, atol=GRID_TOLERANCE)]
            covered = sum(1 for a in dataset.grid.angles
                          if np.any(np.isclose(group['theta_deg'], a, rtol=0.0, atol=GRID_TOLERANCE)))
            if group.empty:
                issues.append(f"{f:g} GHz has no samples")
            elif covered < len(dataset.grid.angles):
                issues.append(f"{f:g} GHz covers {covered}/{len(dataset.grid.angles)} angles")
        if issues:
            raise DatasetValidationError("Angle average needs full angle coverage in strict mode: " + "; ".join(issues))
    if df.empty:
        raise DatasetValidationError("Dataset has no samples")

    table = (
        df.groupby('frequency_ghz', sort=True)['gamma_mag']
        .agg(mean_gamma='mean', n_angles='count')
        .reset_index()
    )
    return table


def frequency_fluctuation(dataset: Dataset) -> pd.DataFrame:
    """ต่อมุม: ช่วงแกว่ง (max − min) ของ |Γ| ข้ามความถี่"""
    df = dataset.to_frame()
    if df.empty:
        raise DatasetValidationError("Dataset has no samples")
    table = (
        df.groupby('theta_deg', sort=True)['gamma_mag']
        .agg(min_gamma='min', max_gamma='max', n_frequencies='count')
        .reset_index()
    )
    table['fluctuation'] = table['max_gamma'] - table['min_gamma']
    return table
