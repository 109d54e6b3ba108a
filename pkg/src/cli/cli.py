"""
src/cli/cli.py
Command-line ของโปรเจกต์ FARC (THz reflection coefficient toolkit)

คำสั่งย่อย:
  eval       คำนวณ Γ หนึ่งจุด (fresnel / farc / statfarc)
  sweep      กวาดกริด (f, θ) แล้วเขียน CSV สำหรับพล็อตภายนอก
  fit        ฟิตพารามิเตอร์ FARC เชิงสถิติจากไฟล์ sample แล้วเขียน FitReport JSON
  convert    แปลง power log เป็นไฟล์ sample
  materials  แสดงคลังวัสดุ 5 ชนิด
  synth      สร้างข้อมูลจำลองจากพารามิเตอร์
  average    ค่าเฉลี่ย |Γ| ข้ามมุมรายความถี่ (หรือความผันผวนรายมุม)
  compare    RMSE ของ Fresnel และ FARC เชิงสถิติเทียบกับข้อมูลวัด

Exit code: 0 สำเร็จ, 2 อินพุต/การตรวจสอบผิด, 3 I/O ผิดพลาด
ผลลัพธ์ออก stdout ส่วน log และ error ออก stderr

อัปเดต: v1.3.0
- config ที่รูปแบบผิด (bounds, grid, output) ออกด้วย exit 2 แทน traceback

v1.2.0
- เพิ่ม synth / average / compare
"""

__version__ = "1.3.0"

import argparse
import dataclasses
import json
import logging
import math
import sys
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import yaml

from src.dielectric.dielectric import DrudeParams, LorenzParams
from src.fitting.fitting import FitConfig, fit_statfarc, model_rmse, rmse, synth_dataset
from src.materials.materials import MICROMETER, MaterialLibraryEntry, get_material, list_materials
from src.measurement.measurement import (
    CSV_DIGITS,
    MEASUREMENT_GRID,
    GridSpec,
    ReflectionSample,
    average_over_angles,
    frequency_fluctuation,
    gamma_from_powers,
    load_dataset,
    load_power_records,
    write_dataset,
    write_samples,
)
from src.reflection.reflection import (
    PERFECT_CONDUCTOR,
    IncidenceGeometry,
    MaterialClass,
    MaterialSurface,
    ReflectionCoefficient,
    StatFarcParams,
    farc_gamma,
    farc_metallic,
    farc_nonmetallic,
    fresnel_gamma,
    fresnel_reflection,
    recover_physical_params,
    statfarc_eval,
    statfarc_gamma,
)
from src.utils.config import load_config_or_default, section
from src.utils.errors import ContractError, FarcError
from src.utils.logger import set_package_level, setup_logger

logger = setup_logger("CLI")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
HUMAN_DIGITS = 6
MODELS = ('fresnel', 'farc', 'statfarc')


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def parse_axis(text: str) -> Tuple[float, ...]:
    """
    'start:stop:step' (รวมปลายทั้งสองด้าน) หรือรายการคั่นด้วยจุลภาค '220,260,300'
    """
    text = text.strip()
    try:
        if ':' in text:
            parts = text.split(':')
            if len(parts) != 3:
                raise ContractError(f"Range '{text}' must look like start:stop:step")
            start, stop, step = (float(p) for p in parts)
            if not step > 0.0 or stop < start:
                raise ContractError(f"Range '{text}' needs step > 0 and stop >= start")
            n = int(math.floor((stop - start) / step + 1e-9))
            return tuple(round(start + i * step, 9) for i in range(n + 1))
        values = tuple(float(v) for v in text.split(',') if v.strip())
    except ValueError as e:
        if isinstance(e, FarcError):
            raise
        raise ContractError(f"Cannot parse axis '{text}': {e}") from None
    if not values:
        raise ContractError("Axis list is empty")
    return values


def _grid_from_config(cfg: Dict[str, Any]) -> GridSpec:
    grid_cfg = section(cfg, 'grid')
    if not grid_cfg:
        return MEASUREMENT_GRID
    return GridSpec(
        _config_axis(grid_cfg, 'frequencies', MEASUREMENT_GRID.frequencies),
        _config_axis(grid_cfg, 'angles', MEASUREMENT_GRID.angles),
    )


def _config_axis(grid_cfg: Dict[str, Any], key: str, default: Tuple[float, ...]) -> Tuple[float, ...]:
    values = grid_cfg.get(key, default)
    if not isinstance(values, (list, tuple)):
        raise ContractError(f"grid.{key} must be a list of numbers, got {values!r}")
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ContractError(f"grid.{key} must be a list of numbers, got {values!r}") from None


def _grid_from_args(args: argparse.Namespace, cfg: Dict[str, Any]) -> GridSpec:
    default = _grid_from_config(cfg)
    freqs = parse_axis(args.freqs) if args.freqs else default.frequencies
    angles = parse_axis(args.angles) if args.angles else default.angles
    return GridSpec(freqs, angles)


def _digits(cfg: Dict[str, Any], key: str, default: int) -> int:
    value = section(cfg, 'output').get(key, default)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ContractError(f"output.{key} must be an integer, got {value!r}") from None


def _material(args: argparse.Namespace) -> Optional[MaterialLibraryEntry]:
    return get_material(args.material) if getattr(args, 'material', None) else None


def _resolve_surface(args: argparse.Namespace) -> MaterialSurface:
    entry = _material(args)
    if entry is not None:
        return entry.surface()
    sigma = (args.sigma_um or 0.0) * MICROMETER
    if args.perfect_conductor:
        return MaterialSurface(PERFECT_CONDUCTOR, sigma)
    if args.delta is None:
        raise ContractError("fresnel model needs --material, --delta or --perfect-conductor")
    return MaterialSurface(args.delta, sigma)


def _resolve_stat_params(args: argparse.Namespace) -> StatFarcParams:
    entry = _material(args)
    if entry is not None:
        return entry.stat_params
    missing = [name for name in ('a', 'b', 'd') if getattr(args, name) is None]
    if missing:
        raise ContractError(f"statfarc model needs --material or --a/--b/--d (missing: {', '.join(missing)})")
    material_class = MaterialClass.parse(args.material_class or MaterialClass.NON_METALLIC)
    return StatFarcParams(args.a, args.b, args.c, args.d, material_class)


def _resolve_physical(args: argparse.Namespace) -> Tuple[float, Any]:
    """(σ หน่วยเมตร, LorenzParams | DrudeParams) สำหรับ FARC เชิงกายภาพ"""
    if args.omega_p_sq is not None and args.gamma is not None:
        sigma = (args.sigma_um or 0.0) * MICROMETER
        material_class = MaterialClass.parse(args.material_class or MaterialClass.NON_METALLIC)
        if material_class is MaterialClass.METALLIC:
            return sigma, DrudeParams.from_si(args.omega_p_sq, args.gamma)
        if args.omega_0 is None:
            raise ContractError("non-metallic farc model needs --omega-0")
        return sigma, LorenzParams.from_si(args.omega_p_sq, args.omega_0, args.gamma)
    entry = _material(args)
    if entry is not None:
        return entry.physical_params()
    return recover_physical_params(_resolve_stat_params(args))


def _model_function(args: argparse.Namespace) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """แปลง --model + พารามิเตอร์เป็นฟังก์ชัน vectorized (θ, f) -> Γ"""
    if args.model == 'fresnel':
        surface = _resolve_surface(args)
        return lambda theta, f: fresnel_gamma(surface, theta, f)
    if args.model == 'farc':
        sigma, dielectric = _resolve_physical(args)
        return lambda theta, f: farc_gamma(dielectric, sigma, theta, f)
    params = _resolve_stat_params(args)
    return lambda theta, f: statfarc_gamma(params, theta, f)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, 'w', encoding='utf-8', newline='\n') as fh:
            fh.write(text if text.endswith('\n') else text + '\n')
    else:
        print(text)


def _write_table(table, output: Optional[str], digits: int) -> None:
    sink = output if output else sys.stdout
    table.to_csv(sink, index=False, float_format=f'%.{digits}g', lineterminator='\n')


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_eval(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    geom = IncidenceGeometry(args.theta, args.freq)
    if args.model == 'fresnel':
        coeff = fresnel_reflection(_resolve_surface(args), geom)
    elif args.model == 'farc':
        sigma, dielectric = _resolve_physical(args)
        if isinstance(dielectric, DrudeParams):
            coeff = farc_metallic(dielectric, sigma, geom)
        else:
            coeff = farc_nonmetallic(dielectric, sigma, geom)
    else:
        coeff = statfarc_eval(_resolve_stat_params(args), geom.theta_e, geom.frequency_ghz)

    if args.json:
        print(json.dumps(_coefficient_dict(args, coeff), indent=2))
        return EXIT_OK

    digits = _digits(cfg, 'human_digits', HUMAN_DIGITS)
    label = args.material or "custom"
    print(f"model={args.model} material={label} theta={args.theta:g} deg f={args.freq:g} GHz")
    print(f"|Gamma| = {coeff.magnitude:.{digits}g}")
    print(f"Re = {coeff.re:.{digits}g}  Im = {coeff.im:.{digits}g}")
    return EXIT_OK


def _coefficient_dict(args: argparse.Namespace, coeff: ReflectionCoefficient) -> Dict[str, Any]:
    return {
        'model': args.model,
        'material': args.material,
        'theta_deg': args.theta,
        'frequency_ghz': args.freq,
        'magnitude': coeff.magnitude,
        're': coeff.re,
        'im': coeff.im,
    }


def cmd_sweep(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    grid = _grid_from_args(args, cfg)
    model = _model_function(args)
    f, theta = grid.mesh()
    magnitude = np.abs(model(theta, f))
    samples = [ReflectionSample(float(fi), float(ti), float(gi)) for fi, ti, gi in zip(f, theta, magnitude)]
    logger.debug(f"sweep {args.model}: {len(grid.frequencies)} frequencies x {len(grid.angles)} angles")
    write_samples(samples, args.output or sys.stdout, _digits(cfg, 'csv_digits', CSV_DIGITS))
    return EXIT_OK


def _fit_config(args: argparse.Namespace, cfg: Dict[str, Any]) -> FitConfig:
    config = FitConfig.from_dict(section(cfg, 'fitting'))
    overrides: Dict[str, Any] = {}
    for flag, key in (('seed', 'seed'), ('grid_size', 'grid_size'), ('random_starts', 'random_starts'),
                      ('max_iter', 'max_iterations'), ('workers', 'n_workers')):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    if args.progress:
        overrides['show_progress'] = True
    return dataclasses.replace(config, **overrides) if overrides else config


def cmd_fit(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    entry = _material(args)
    if args.material_class:
        material_class = MaterialClass.parse(args.material_class)
    elif entry is not None:
        material_class = entry.material_class
    else:
        material_class = MaterialClass.NON_METALLIC
    name = entry.name if entry is not None else (args.material or "")

    dataset = load_dataset(args.input, material_class, name, strict=not args.permissive, grid=_grid_from_config(cfg))
    report = fit_statfarc(dataset, _fit_config(args, cfg))
    _emit(report.to_json(), args.output)
    return EXIT_OK


def cmd_convert(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    records = load_power_records(args.input, db=args.db)
    samples = [gamma_from_powers(record) for record in records]
    write_samples(samples, args.output or sys.stdout, _digits(cfg, 'csv_digits', CSV_DIGITS))
    return EXIT_OK


def cmd_materials(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    entries = list_materials()
    if args.json:
        print(json.dumps([entry.to_dict() for entry in entries], indent=2))
        return EXIT_OK

    print(f"{'material':<16} {'class':<13} {'delta':>6} {'sigma[um]':>10}"
          f" {'a':>7} {'b':>5} {'c':>5} {'d':>6} {'RMSE':>5}")
    print("-" * 80)
    for entry in entries:
        row = entry.to_dict()
        params = row['params']
        delta = "inf" if row['perfect_conductor'] else f"{row['delta']:g}"
        c = "-" if params['c'] is None else f"{params['c']:g}"
        print(f"{entry.name:<16} {row['class']:<13} {delta:>6} {row['sigma_um']:>10g}"
              f" {params['a']:>7g} {params['b']:>5g} {c:>5} {params['d']:>6g} {row['reported_rmse']:>5g}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    params = _resolve_stat_params(args)
    grid = _grid_from_args(args, cfg)
    dataset = synth_dataset(params, grid, noise_std=args.noise, seed=args.seed,
                            material_name=args.material or "synthetic")
    write_dataset(dataset, args.output or sys.stdout, _digits(cfg, 'csv_digits', CSV_DIGITS))
    return EXIT_OK


def cmd_average(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    dataset = load_dataset(args.input, MaterialClass.NON_METALLIC, strict=not args.permissive,
                           grid=_grid_from_config(cfg))
    if args.fluctuation:
        table = frequency_fluctuation(dataset)
    else:
        table = average_over_angles(dataset, strict=not args.permissive)
    _write_table(table, args.output, _digits(cfg, 'csv_digits', CSV_DIGITS))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, cfg: Dict[str, Any]) -> int:
    entry = get_material(args.material)
    dataset = load_dataset(args.input, entry.material_class, entry.name, strict=not args.permissive,
                           grid=_grid_from_config(cfg))
    f, theta, _ = dataset.arrays()
    result = {
        'material': entry.name,
        'n_samples': len(dataset),
        'fresnel_rmse': model_rmse(np.abs(fresnel_gamma(entry.surface(), theta, f)), dataset),
        'statfarc_rmse': rmse(entry.stat_params, dataset),
        'reported_rmse': entry.reported_rmse,
    }
    if args.json:
        print(json.dumps(result, indent=2))
        return EXIT_OK
    digits = _digits(cfg, 'human_digits', HUMAN_DIGITS)
    print(f"material: {entry.name} ({len(dataset)} samples)")
    print(f"Fresnel RMSE         = {result['fresnel_rmse']:.{digits}g}")
    print(f"Statistical FARC RMSE = {result['statfarc_rmse']:.{digits}g} (reported {entry.reported_rmse:g})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _model_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--material', help="bundled material name (see `materials`)")
    parent.add_argument('--class', dest='material_class', help="non-metallic | metallic")
    group = parent.add_argument_group('fresnel inputs')
    group.add_argument('--delta', type=float, help="real relative permittivity")
    group.add_argument('--perfect-conductor', action='store_true')
    group.add_argument('--sigma-um', type=float, help="surface roughness in micrometers")
    group = parent.add_argument_group('statistical parameters')
    for name in ('a', 'b', 'c', 'd'):
        group.add_argument(f'--{name}', type=float)
    group = parent.add_argument_group('physical parameters (SI, rad/s)')
    group.add_argument('--omega-p-sq', type=float)
    group.add_argument('--omega-0', type=float)
    group.add_argument('--gamma', type=float)
    return parent


def _grid_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--freqs', help="GHz, start:stop:step or comma list (default: measurement grid)")
    parent.add_argument('--angles', help="degrees, start:stop:step or comma list (default: measurement grid)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='farc', description="THz reflection coefficient models and fitting")
    parser.add_argument('--config', help="YAML config (default: ./config.yaml when present)")
    parser.add_argument('--verbose', action='store_true', help="debug logging on stderr")
    sub = parser.add_subparsers(dest='command', required=True)
    model_opts, grid_opts = _model_options(), _grid_options()

    p = sub.add_parser('eval', parents=[model_opts], help="evaluate one (theta, f) point")
    p.add_argument('--model', choices=MODELS, default='statfarc')
    p.add_argument('--theta', type=float, required=True, help="incidence angle in degrees")
    p.add_argument('--freq', type=float, required=True, help="frequency in GHz")
    p.add_argument('--json', action='store_true')
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser('sweep', parents=[model_opts, grid_opts], help="write |Gamma| over a grid as CSV")
    p.add_argument('--model', choices=MODELS, default='statfarc')
    p.add_argument('--output', '-o')
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser('fit', help="fit statistical FARC parameters to a samples CSV")
    p.add_argument('input')
    p.add_argument('--class', dest='material_class')
    p.add_argument('--material')
    p.add_argument('--permissive', action='store_true', help="accept off-grid samples")
    p.add_argument('--seed', type=int)
    p.add_argument('--grid-size', type=int)
    p.add_argument('--random-starts', type=int)
    p.add_argument('--max-iter', type=int)
    p.add_argument('--workers', type=int)
    p.add_argument('--progress', action='store_true')
    p.add_argument('--output', '-o')
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser('convert', help="power log CSV -> samples CSV")
    p.add_argument('input')
    p.add_argument('--db', action='store_true', help="p_r and p_ref are given in dB")
    p.add_argument('--output', '-o')
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser('materials', help="print the bundled material library")
    p.add_argument('--json', action='store_true')
    p.set_defaults(handler=cmd_materials)

    p = sub.add_parser('synth', parents=[model_opts, grid_opts], help="synthetic samples from statistical parameters")
    p.add_argument('--noise', type=float, default=0.0, help="Gaussian noise std on |Gamma|")
    p.add_argument('--seed', type=int)
    p.add_argument('--output', '-o')
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser('average', help="mean |Gamma| over angles per frequency")
    p.add_argument('input')
    p.add_argument('--permissive', action='store_true')
    p.add_argument('--fluctuation', action='store_true', help="per-angle max-min across frequencies instead")
    p.add_argument('--output', '-o')
    p.set_defaults(handler=cmd_average)

    p = sub.add_parser('compare', help="Fresnel vs statistical FARC RMSE against a samples CSV")
    p.add_argument('input')
    p.add_argument('--material', required=True)
    p.add_argument('--permissive', action='store_true')
    p.add_argument('--json', action='store_true')
    p.set_defaults(handler=cmd_compare)

    return parser


def _configure_logging(args: argparse.Namespace, cfg: Dict[str, Any]) -> None:
    if args.verbose:
        set_package_level(logging.DEBUG)
        return
    level_name = str(section(cfg, 'logging').get('level', 'INFO')).upper()
    set_package_level(getattr(logging, level_name, logging.INFO))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        cfg = load_config_or_default(args.config)
        _configure_logging(args, cfg)
        return args.handler(args, cfg)
    except (FarcError, ValueError, yaml.YAMLError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_IO
