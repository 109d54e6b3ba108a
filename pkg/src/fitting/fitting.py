"""
src/fitting/fitting.py
โมดูล Fitting: ฟิตพารามิเตอร์ FARC เชิงสถิติ (a, b, c, d) ให้เข้ากับข้อมูลวัด

- Objective: RMSE ระหว่าง |Γ| ของแบบจำลองกับ |Γ| ที่วัดได้ ครอบคลุมทุกจุด (f, θ) พร้อมกัน
- Optimizer: Nelder-Mead แบบมีขอบเขต (scipy) เริ่มจากหลายจุดบนกริดหยาบ + จุดสุ่มตาม seed
  เลือกผลที่ดีที่สุด (เสมอกันเลือก start index ต่ำสุด) แล้ว polish ด้วยการ restart simplex
- synth_dataset: สร้างข้อมูลจำลองจากพารามิเตอร์ที่รู้ค่า + Gaussian noise สำหรับทดสอบไป-กลับ

วัสดุโลหะมีพารามิเตอร์อิสระ 3 ตัว (a, b, d) เพราะไม่มี c

อัปเดต: v1.2.0
- ตรวจรูปแบบ bounds และชนิดค่าใน FitConfig.from_dict (ContractError)
- FitReport JSON มี start_rmse

v1.1.0
- รองรับ n_workers (ThreadPool) โดยผลลัพธ์ไม่ขึ้นกับลำดับการเสร็จของแต่ละ start
"""

__version__ = "1.2.0"

import itertools
import json
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import OptimizeResult, minimize
from tqdm import tqdm

from src.measurement.measurement import MEASUREMENT_GRID, Dataset, GridSpec, ReflectionSample
from src.reflection.reflection import MaterialClass, StatFarcParams, statfarc_gamma
from src.utils.errors import ContractError, DomainError, UnderdeterminedError
from src.utils.logger import setup_logger

logger = setup_logger("Fitting")

PARAM_NAMES: Tuple[str, ...] = ('a', 'b', 'c', 'd')
DEFAULT_BOUNDS: Dict[str, Tuple[float, float]] = {
    'a': (-20.0, -10.0),
    'b': (2.0, 8.0),
    'c': (2.0, 6.0),
    'd': (1e-4, 1.0),
}
MIN_SAMPLES = 4


def _bound_pair(name: Any, value: Any) -> Tuple[float, float]:
    try:
        lo, hi = value
        return float(lo), float(hi)
    except (TypeError, ValueError):
        raise ContractError(f"Bounds for {name} must be [lower, upper], got {value!r}") from None


def _cast_option(key: str, value: Any, cast: Callable[[Any], Any]) -> Any:
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ContractError(f"Invalid value for fitting.{key}: {value!r}") from None


@dataclass
class FitConfig:
    """
    Attributes:
        bounds: ขอบเขต (ล่าง, บน) ของแต่ละพารามิเตอร์
        grid_size (int): จำนวนจุดเริ่มต่อแกนของกริด multistart
        random_starts (int): จำนวนจุดเริ่มสุ่มเพิ่มเติม (ใช้ seed)
        tolerance (float): fatol ของ objective (mean squared error)
        x_tolerance (float): xatol ของ simplex
        max_iterations (int): จำนวน iteration สูงสุดต่อการค้นหาหนึ่งรอบ
        polish_restarts (int): จำนวนครั้งสูงสุดที่ restart simplex จากจุดที่ดีที่สุด
    """
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    grid_size: int = 2
    random_starts: int = 4
    tolerance: float = 1e-15
    x_tolerance: float = 1e-10
    max_iterations: int = 4000
    polish_restarts: int = 5
    seed: Optional[int] = 42
    n_workers: int = 1
    show_progress: bool = False

    def __post_init__(self) -> None:
        bounds = self.bounds or {}
        if not isinstance(bounds, Mapping):
            raise ContractError(f"bounds must be a mapping of name -> [lower, upper], got {bounds!r}")
        merged = dict(DEFAULT_BOUNDS)
        merged.update({str(k): _bound_pair(k, v) for k, v in bounds.items()})
        unknown = set(merged) - set(PARAM_NAMES)
        if unknown:
            raise ContractError(f"Unknown parameter bound(s): {', '.join(sorted(unknown))}")
        for name, (lo, hi) in merged.items():
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ContractError(f"Bounds for {name} must satisfy lower < upper, got ({lo}, {hi})")
        if not merged['d'][0] > 0.0:
            raise ContractError("Lower bound of d must be > 0")
        self.bounds = merged
        if not self.tolerance > 0.0 or not self.x_tolerance > 0.0:
            raise ContractError("Tolerances must be > 0")
        if self.grid_size < 1 or self.random_starts < 0:
            raise ContractError("grid_size must be >= 1 and random_starts >= 0")
        if self.max_iterations < 1 or self.polish_restarts < 0 or self.n_workers < 1:
            raise ContractError("max_iterations and n_workers must be >= 1, polish_restarts >= 0")

    @classmethod
    def from_dict(cls, cfg: Dict[str, Any]) -> "FitConfig":
        """สร้างจาก section `fitting` ของ config.yaml (คีย์ที่ไม่ระบุใช้ค่า default)"""
        kwargs: Dict[str, Any] = {}
        if cfg.get('bounds') is not None:
            kwargs['bounds'] = cfg['bounds']
        for key, cast in (('grid_size', int), ('random_starts', int), ('tolerance', float),
                          ('x_tolerance', float), ('max_iterations', int), ('polish_restarts', int),
                          ('n_workers', int), ('show_progress', bool)):
            if key in cfg:
                kwargs[key] = _cast_option(key, cfg[key], cast)
        if 'seed' in cfg:
            seed = cfg['seed']
            kwargs['seed'] = _cast_option('seed', seed, int) if seed not in ('null', None, 'None', '') else None
        return cls(**kwargs)


@dataclass
class FitReport:
    params: StatFarcParams
    rmse: float
    residuals: np.ndarray
    starts_tried: int
    converged: bool
    iterations: int
    material: str = ""
    start_rmse: Tuple[float, ...] = ()

    @property
    def n_samples(self) -> int:
        return int(len(self.residuals))

    @property
    def max_abs_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.n_samples else 0.0

    def fraction_within(self, tol: float) -> float:
        """สัดส่วนของจุดที่ |residual| ≤ tol"""
        if not self.n_samples:
            return 0.0
        return float(np.mean(np.abs(self.residuals) <= tol))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'material': self.material,
            'class': self.params.material_class.value,
            'params': {name: (None if value is None else float(value))
                       for name, value in self.params.as_dict().items()},
            'rmse': float(self.rmse),
            'n_samples': self.n_samples,
            'converged': bool(self.converged),
            'starts_tried': int(self.starts_tried),
            'iterations': int(self.iterations),
            'start_rmse': [float(v) for v in self.start_rmse],
            'residuals': [float(r) for r in self.residuals],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# ---------------------------------------------------------------------------
# Objective helpers
# ---------------------------------------------------------------------------

def _free_names(material_class: MaterialClass) -> Tuple[str, ...]:
    return ('a', 'b', 'd') if material_class is MaterialClass.METALLIC else PARAM_NAMES


def _params_from_vector(x: Sequence[float], material_class: MaterialClass) -> StatFarcParams:
    values = dict(zip(_free_names(material_class), (float(v) for v in x)))
    return StatFarcParams(values['a'], values['b'], values.get('c'), values['d'], material_class)


def _rmse_from_residuals(res: np.ndarray) -> float:
    return float(np.sqrt(np.mean(res ** 2)))


def _check_class(params: StatFarcParams, dataset: Dataset) -> None:
    if params.material_class is not dataset.material_class:
        raise ContractError(
            f"Parameter class {params.material_class.value} does not match dataset class {dataset.material_class.value}"
        )


def residuals(params: StatFarcParams, dataset: Dataset) -> np.ndarray:
    """(|Γ| แบบจำลอง − |Γ| ที่วัด) เรียงตามลำดับ sample ของ dataset"""
    if len(dataset) == 0:
        raise DomainError("Dataset is empty")
    _check_class(params, dataset)
    f, theta, gamma = dataset.arrays()
    return np.abs(statfarc_gamma(params, theta, f)) - gamma


def rmse(params: StatFarcParams, dataset: Dataset) -> float:
    return _rmse_from_residuals(residuals(params, dataset))


def model_rmse(magnitudes: Union[Sequence[float], np.ndarray], dataset: Dataset) -> float:
    """RMSE ของ |Γ| จากแบบจำลองใดๆ (เรียงตาม dataset.samples) เทียบกับข้อมูลวัด"""
    if len(dataset) == 0:
        raise DomainError("Dataset is empty")
    model = np.asarray(magnitudes, dtype=float)
    _, _, gamma = dataset.arrays()
    if model.shape != gamma.shape:
        raise ContractError(f"Expected {gamma.shape[0]} model values, got {model.shape}")
    return _rmse_from_residuals(model - gamma)


# ---------------------------------------------------------------------------
# Fitter
# ---------------------------------------------------------------------------

class StatFarcFitter:
    def __init__(self, config: Optional[FitConfig] = None) -> None:
        self.config = config or FitConfig()
        self.logger = logger

    def start_points(self, material_class: MaterialClass) -> List[np.ndarray]:
        """จุดเริ่ม: กึ่งกลางช่องของกริด grid_size^k ภายในขอบเขต ตามด้วยจุดสุ่มจาก seed"""
        names = _free_names(material_class)
        lows = np.array([self.config.bounds[n][0] for n in names])
        highs = np.array([self.config.bounds[n][1] for n in names])
        n = self.config.grid_size
        axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for lo, hi in zip(lows, highs)]
        starts = [np.array(point, dtype=float) for point in itertools.product(*axes)]
        rng = np.random.default_rng(self.config.seed)
        starts.extend(rng.uniform(lows, highs) for _ in range(self.config.random_starts))
        return starts

    def _objective(self, dataset: Dataset):
        f, theta, gamma = dataset.arrays()
        material_class = dataset.material_class

        def mse(x: np.ndarray) -> float:
            try:
                params = _params_from_vector(x, material_class)
                res = np.abs(statfarc_gamma(params, theta, f)) - gamma
            except (DomainError, ContractError):
                return math.inf
            value = float(np.mean(res ** 2))
            return value if math.isfinite(value) else math.inf

        return mse

    def _local_search(self, objective, x0: np.ndarray, bounds: List[Tuple[float, float]]) -> OptimizeResult:
        return minimize(
            objective,
            x0,
            method='Nelder-Mead',
            bounds=bounds,
            options={
                'maxiter': self.config.max_iterations,
                'xatol': self.config.x_tolerance,
                'fatol': self.config.tolerance,
            },
        )

    def fit(self, dataset: Dataset) -> FitReport:
        n_samples = len(dataset)
        if n_samples < MIN_SAMPLES:
            raise UnderdeterminedError(f"Need at least {MIN_SAMPLES} samples to fit, got {n_samples}")
        if len(dataset.distinct_frequencies) < 2 or len(dataset.distinct_angles) < 2:
            raise UnderdeterminedError("Need samples at >= 2 frequencies and >= 2 angles")

        material_class = dataset.material_class
        names = _free_names(material_class)
        bounds = [self.config.bounds[n] for n in names]
        objective = self._objective(dataset)
        starts = self.start_points(material_class)

        self.logger.info(f"Fitting {dataset.material_name or 'dataset'} ({material_class.value}, "
                         f"{n_samples} samples) from {len(starts)} start(s)")

        run = lambda x0: self._local_search(objective, x0, bounds)  # noqa: E731
        if self.config.n_workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.n_workers) as pool:
                iterator = pool.map(run, starts)
                results = list(tqdm(iterator, total=len(starts), desc="Multistart", disable=not self.config.show_progress))
        else:
            results = [run(x0) for x0 in tqdm(starts, desc="Multistart", disable=not self.config.show_progress)]

        # เรียงตาม (objective, start index) เพื่อให้ tie-break ไม่ขึ้นกับลำดับการเสร็จ
        best_index = min(range(len(results)), key=lambda i: (results[i].fun, i))
        best = results[best_index]
        iterations = int(best.nit)
        converged = bool(best.success)

        for _ in range(self.config.polish_restarts):
            polished = self._local_search(objective, best.x, bounds)
            iterations += int(polished.nit)
            gain = best.fun - polished.fun
            if polished.fun < best.fun:
                best = polished
            converged = bool(polished.success)
            if gain <= self.config.tolerance:
                break

        params = _params_from_vector(best.x, material_class)
        res = residuals(params, dataset)
        report = FitReport(
            params=params,
            rmse=_rmse_from_residuals(res),
            residuals=res,
            starts_tried=len(starts),
            converged=converged,
            iterations=iterations,
            material=dataset.material_name,
            start_rmse=tuple(math.sqrt(objective(x0)) for x0 in starts),
        )
        if not converged:
            self.logger.warning(f"Optimizer stopped before converging (best RMSE {report.rmse:.6g}); "
                                f"returning the best point found")
        else:
            self.logger.info(f"Best start #{best_index}: RMSE {report.rmse:.6g} after {iterations} iterations")
        return report


def fit_statfarc(dataset: Dataset, config: Optional[FitConfig] = None) -> FitReport:
    return StatFarcFitter(config).fit(dataset)


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------

def synth_dataset(params: StatFarcParams,
                  grid: Union[GridSpec, Tuple[Sequence[float], Sequence[float]], None] = None,
                  noise_std: float = 0.0,
                  seed: Optional[int] = None,
                  material_name: str = "synthetic") -> Dataset:
    """
    |Γ| = |statfarc| + N(0, noise_std) แล้ว clip ที่ 0 จากด้านล่างเท่านั้น
    """
    if not (math.isfinite(noise_std) and noise_std >= 0.0):
        raise DomainError(f"noise_std must be >= 0, got {noise_std}")
    if grid is None:
        grid = MEASUREMENT_GRID
    elif not isinstance(grid, GridSpec):
        grid = GridSpec(tuple(grid[0]), tuple(grid[1]))

    f, theta = grid.mesh()
    magnitude = np.abs(statfarc_gamma(params, theta, f))
    if noise_std > 0.0:
        rng = np.random.default_rng(seed)
        magnitude = magnitude + rng.normal(0.0, noise_std, size=magnitude.shape)
    magnitude = np.maximum(magnitude, 0.0)

    samples = tuple(ReflectionSample(float(fi), float(ti), float(gi)) for fi, ti, gi in zip(f, theta, magnitude))
    return Dataset(material_name, params.material_class, samples, grid)
