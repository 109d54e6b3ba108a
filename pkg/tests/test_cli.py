"""
Unit Tests สำหรับ Command-line (src/cli/cli.py)

ทดสอบทุกคำสั่งย่อยผ่าน main(argv) พร้อม exit code (0 / 2 / 3)
ใช้ capsys จับ stdout/stderr, tmp_path สำหรับไฟล์ และ mocker สำหรับแทนที่ตัวฟิต

ประวัติการแก้ไข (Version Control):
- v1.2.0: config รูปแบบผิดต้องได้ exit 2
- v1.1.0: เพิ่ม synth / average / compare
- v1.0.0: สร้าง Unit Test
"""

__version__ = "1.2.0"

import sys
import os

# แก้ปัญหา ModuleNotFoundError: No module named 'src' ตอนรัน pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import io
import json
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.cli.cli import main, parse_axis
from src.fitting.fitting import FitReport
from src.materials.materials import get_material
from src.reflection.reflection import statfarc_eval
from src.utils.errors import ContractError

POWER_HEADER = "frequency_ghz,theta_deg,p_r,p_ref,d_t_m,d_r_m,d_ref_m\n"
SAMPLE_HEADER = "frequency_ghz,theta_deg,gamma_mag\n"


def run(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def glass_samples(tmp_path: Path, capsys) -> Path:
    path = tmp_path / "glass.csv"
    code, _, _ = run(capsys, "synth", "--material", "glass", "--output", str(path))
    assert code == 0
    return path


class TestParseAxis:

    def test_inclusive_range(self) -> None:
        values = parse_axis("10:80:1")
        assert len(values) == 71
        assert values[0] == 10.0 and values[-1] == 80.0

    def test_fractional_step(self) -> None:
        assert parse_axis("220:221:0.1")[-1] == 221.0

    def test_list(self) -> None:
        assert parse_axis("220, 260,300") == (220.0, 260.0, 300.0)

    @pytest.mark.parametrize("text", ["1:2", "a:b:c", "10:5:1", "10:20:0", ""])
    def test_invalid(self, text: str) -> None:
        with pytest.raises(ContractError):
            parse_axis(text)


class TestEval:

    def test_fresnel_glass(self, capsys) -> None:
        code, out, _ = run(capsys, "eval", "--model", "fresnel", "--material", "glass",
                           "--theta", "0", "--freq", "260", "--json")
        assert code == 0
        assert json.loads(out)['magnitude'] == pytest.approx(0.303, abs=1e-3)

    def test_human_output_precision(self, capsys) -> None:
        code, out, _ = run(capsys, "eval", "--model", "fresnel", "--delta", "3.5",
                           "--theta", "0", "--freq", "260")
        expected = (math.sqrt(3.5) - 1.0) / (math.sqrt(3.5) + 1.0)
        assert code == 0
        assert f"|Gamma| = {expected:.6g}" in out
        assert "Re = " in out and "Im = " in out

    def test_statfarc_matches_library(self, capsys) -> None:
        code, out, _ = run(capsys, "eval", "--model", "statfarc", "--material", "glass",
                           "--theta", "40", "--freq", "260", "--json")
        coeff = statfarc_eval(get_material("glass").stat_params, 40.0, 260.0)
        doc = json.loads(out)
        assert code == 0
        assert doc['magnitude'] == coeff.magnitude
        assert (doc['re'], doc['im']) == (coeff.re, coeff.im)

    def test_statfarc_explicit_params(self, capsys) -> None:
        code, out, _ = run(capsys, "eval", "--a", "-15.31", "--b", "6.26", "--d", "0.002",
                           "--class", "metallic", "--theta", "40", "--freq", "260", "--json")
        coeff = statfarc_eval(get_material("aluminium").stat_params, 40.0, 260.0)
        assert code == 0
        assert json.loads(out)['magnitude'] == coeff.magnitude

    def test_physical_matches_statistical(self, capsys) -> None:
        _, out_farc, _ = run(capsys, "eval", "--model", "farc", "--material", "tile",
                             "--theta", "30", "--freq", "300", "--json")
        _, out_stat, _ = run(capsys, "eval", "--model", "statfarc", "--material", "tile",
                             "--theta", "30", "--freq", "300", "--json")
        farc, stat = json.loads(out_farc), json.loads(out_stat)
        assert farc['magnitude'] == pytest.approx(stat['magnitude'], rel=1e-10)

    def test_farc_vacuum_from_si(self, capsys) -> None:
        code, out, _ = run(capsys, "eval", "--model", "farc", "--omega-p-sq", "0", "--omega-0", "1e12",
                           "--gamma", "1e11", "--theta", "20", "--freq", "260", "--json")
        assert code == 0
        assert json.loads(out)['magnitude'] == 0.0

    def test_unknown_material(self, capsys) -> None:
        code, _, err = run(capsys, "eval", "--model", "fresnel", "--material", "unobtainium",
                           "--theta", "10", "--freq", "260")
        assert code == 2
        assert "[ERROR]" in err and "unobtainium" in err

    @pytest.mark.parametrize("theta,freq", [("90", "260"), ("-1", "260"), ("10", "0")])
    def test_invalid_geometry(self, capsys, theta: str, freq: str) -> None:
        code, _, _ = run(capsys, "eval", "--material", "glass", "--theta", theta, "--freq", freq)
        assert code == 2

    def test_missing_parameters(self, capsys) -> None:
        code, _, err = run(capsys, "eval", "--a", "-15", "--theta", "10", "--freq", "260")
        assert code == 2
        assert "missing" in err

    def test_unknown_command(self) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["teleport"])
        assert exc.value.code == 2


class TestSweep:

    def test_default_grid(self, capsys) -> None:
        code, out, _ = run(capsys, "sweep", "--material", "glass")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0] == "frequency_ghz,theta_deg,gamma_mag"
        assert len(lines) == 73

    def test_fine_angles(self, capsys) -> None:
        code, out, _ = run(capsys, "sweep", "--material", "glass", "--freqs", "260", "--angles", "10:80:1")
        assert code == 0
        assert len(out.strip().splitlines()) == 1 + 71

    def test_row_order(self, capsys) -> None:
        _, out, _ = run(capsys, "sweep", "--material", "board", "--model", "fresnel")
        df = pd.read_csv(io.StringIO(out))
        expected = df.sort_values(['frequency_ghz', 'theta_deg']).reset_index(drop=True)
        pd.testing.assert_frame_equal(df, expected)

    def test_plasterboard_trend(self, capsys) -> None:
        _, out, _ = run(capsys, "sweep", "--material", "plasterboard", "--angles", "50:80:10")
        df = pd.read_csv(io.StringIO(out))
        for _, group in df.groupby('frequency_ghz'):
            assert np.all(np.diff(group.sort_values('theta_deg')['gamma_mag'].to_numpy()) >= 0.0)

    def test_output_file(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", "--material", "aluminium", "--output", str(path))
        assert code == 0
        assert out == ""
        assert len(path.read_text().splitlines()) == 73

    def test_unwritable_path(self, capsys, tmp_path: Path) -> None:
        code, _, err = run(capsys, "sweep", "--material", "glass",
                           "--output", str(tmp_path / "missing_dir" / "out.csv"))
        assert code == 3
        assert "[ERROR]" in err


class TestFit:

    def test_round_trip(self, capsys, glass_samples: Path) -> None:
        code, out, _ = run(capsys, "fit", str(glass_samples), "--material", "glass", "--seed", "7")
        doc = json.loads(out)
        assert code == 0
        assert doc['rmse'] < 1e-6
        assert doc['class'] == 'non-metallic'
        assert doc['material'] == 'glass'
        assert doc['n_samples'] == 72

    def test_deterministic_output(self, capsys, glass_samples: Path) -> None:
        args = ("fit", str(glass_samples), "--seed", "7", "--grid-size", "1", "--random-starts", "3")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_too_few_rows(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "tiny.csv"
        path.write_text(SAMPLE_HEADER + "220,10,0.2\n230,20,0.3\n240,30,0.4\n")
        code, _, err = run(capsys, "fit", str(path))
        assert code == 2
        assert "at least" in err

    def test_malformed_rows(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "bad.csv"
        path.write_text(SAMPLE_HEADER + "220,10,0.2\n230,20,oops\n")
        code, _, err = run(capsys, "fit", str(path))
        assert code == 2
        assert "line 3" in err

    def test_missing_file(self, capsys, tmp_path: Path) -> None:
        code, _, _ = run(capsys, "fit", str(tmp_path / "nope.csv"))
        assert code == 3

    def test_flags_reach_config(self, capsys, mocker, glass_samples: Path) -> None:
        material = get_material("glass")
        fake = FitReport(params=material.stat_params, rmse=0.0, residuals=np.zeros(72),
                         starts_tried=1, converged=False, iterations=0, material="glass")
        fit = mocker.patch("src.cli.cli.fit_statfarc", return_value=fake)
        code, out, _ = run(capsys, "fit", str(glass_samples), "--seed", "5", "--grid-size", "3",
                           "--random-starts", "0", "--max-iter", "50", "--workers", "2")
        assert code == 0
        assert json.loads(out)['converged'] is False
        config = fit.call_args.args[1]
        assert (config.seed, config.grid_size, config.random_starts) == (5, 3, 0)
        assert (config.max_iterations, config.n_workers) == (50, 2)

    def test_output_file(self, capsys, mocker, glass_samples: Path, tmp_path: Path) -> None:
        fake = FitReport(params=get_material("glass").stat_params, rmse=0.01, residuals=np.zeros(72),
                         starts_tried=1, converged=True, iterations=10)
        mocker.patch("src.cli.cli.fit_statfarc", return_value=fake)
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "fit", str(glass_samples), "--output", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())['rmse'] == 0.01


class TestConvert:

    def test_identity_row(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "power.csv"
        path.write_text(POWER_HEADER + "260,40,1.0,1.0,0.05,0.05,0.10\n")
        code, out, _ = run(capsys, "convert", str(path))
        df = pd.read_csv(io.StringIO(out))
        assert code == 0
        assert df['gamma_mag'].tolist() == [1.0]

    def test_db_flag(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "power_db.csv"
        path.write_text(POWER_HEADER + "260,40,-3,0,0.05,0.05,0.10\n")
        code, out, _ = run(capsys, "convert", str(path), "--db")
        df = pd.read_csv(io.StringIO(out))
        assert code == 0
        assert df['gamma_mag'].iloc[0] == pytest.approx(math.sqrt(10 ** -0.3), rel=1e-8)
        assert df['gamma_mag'].iloc[0] == pytest.approx(0.708, abs=1e-3)

    def test_keeps_input_order(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "power.csv"
        path.write_text(POWER_HEADER + "300,40,0.25,1,0.05,0.05,0.10\n220,10,0.16,1,0.05,0.05,0.10\n")
        _, out, _ = run(capsys, "convert", str(path))
        df = pd.read_csv(io.StringIO(out))
        assert df['frequency_ghz'].tolist() == [300.0, 220.0]
        assert df['gamma_mag'].tolist() == pytest.approx([0.5, 0.4])

    def test_missing_column(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "power.csv"
        path.write_text("frequency_ghz,theta_deg,p_r,p_ref,d_t_m,d_r_m\n260,40,1.0,1.0,0.05,0.05\n")
        code, _, err = run(capsys, "convert", str(path))
        assert code == 2
        assert "d_ref_m" in err


class TestMaterials:

    def test_table(self, capsys) -> None:
        code, out, _ = run(capsys, "materials")
        assert code == 0
        lines = out.splitlines()
        glass = next(line for line in lines if line.startswith("glass"))
        assert "3.5" in glass and "0.006" in glass
        plaster = next(line for line in lines if line.startswith("plasterboard"))
        assert all(value in plaster for value in ("-15.66", "3.57", "4.33", "0.1"))
        alu = next(line for line in lines if line.startswith("aluminium alloy"))
        assert " - " in alu and "inf" in alu

    def test_json(self, capsys) -> None:
        code, out, _ = run(capsys, "materials", "--json")
        rows = {row['name']: row for row in json.loads(out)}
        assert code == 0
        assert len(rows) == 5
        assert rows['glass']['delta'] == 3.5 and rows['glass']['sigma_um'] == 0.006
        assert rows['plasterboard']['params'] == {'a': -15.66, 'b': 3.57, 'c': 4.33, 'd': 0.10}
        assert rows['aluminium alloy']['params']['c'] is None


class TestSynthAverageCompare:

    def test_synth_is_deterministic(self, capsys) -> None:
        args = ("synth", "--material", "tile", "--noise", "0.05", "--seed", "3")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second
        assert len(first.strip().splitlines()) == 73

    def test_synth_negative_noise(self, capsys) -> None:
        code, _, _ = run(capsys, "synth", "--material", "tile", "--noise", "-1")
        assert code == 2

    def test_average_constant(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "flat.csv"
        rows = [f"{f},{a},0.5" for f in (220, 230, 240, 250, 260, 280, 290, 300, 320)
                for a in range(10, 90, 10)]
        path.write_text(SAMPLE_HEADER + "\n".join(rows) + "\n")
        code, out, _ = run(capsys, "average", str(path))
        df = pd.read_csv(io.StringIO(out))
        assert code == 0
        assert len(df) == 9
        assert np.allclose(df['mean_gamma'], 0.5)

    def test_average_needs_full_coverage(self, capsys, tmp_path: Path) -> None:
        path = tmp_path / "partial.csv"
        path.write_text(SAMPLE_HEADER + "260,10,0.2\n260,80,0.8\n")
        code, _, _ = run(capsys, "average", str(path))
        assert code == 2
        code, out, _ = run(capsys, "average", str(path), "--permissive")
        assert code == 0
        assert pd.read_csv(io.StringIO(out))['mean_gamma'].tolist() == [0.5]

    def test_fluctuation(self, capsys, glass_samples: Path) -> None:
        code, out, _ = run(capsys, "average", str(glass_samples), "--fluctuation")
        df = pd.read_csv(io.StringIO(out))
        assert code == 0
        assert list(df.columns) == ['theta_deg', 'min_gamma', 'max_gamma', 'n_frequencies', 'fluctuation']
        assert len(df) == 8

    def test_compare(self, capsys, glass_samples: Path) -> None:
        code, out, _ = run(capsys, "compare", str(glass_samples), "--material", "glass", "--json")
        doc = json.loads(out)
        assert code == 0
        assert doc['statfarc_rmse'] < 1e-8
        assert doc['fresnel_rmse'] > 0.01
        assert doc['reported_rmse'] == 0.11


class TestAmbient:

    def test_verbose_sets_debug(self, capsys, mocker) -> None:
        set_level = mocker.patch("src.cli.cli.set_package_level")
        run(capsys, "--verbose", "materials")
        set_level.assert_called_once_with(logging.DEBUG)

    def test_missing_explicit_config(self, capsys, tmp_path: Path) -> None:
        code, _, err = run(capsys, "--config", str(tmp_path / "absent.yaml"), "materials")
        assert code == 3
        assert "[ERROR]" in err

    def test_config_overrides_grid(self, capsys, tmp_path: Path) -> None:
        cfg = tmp_path / "config.yaml"
        cfg.write_text("grid:\n  frequencies: [260]\n  angles: [10, 20]\noutput:\n  csv_digits: 4\n")
        code, out, _ = run(capsys, "--config", str(cfg), "sweep", "--material", "glass")
        lines = out.strip().splitlines()
        assert code == 0
        assert len(lines) == 3
        assert len(lines[1].split(',')[2].replace('0.', '', 1)) <= 4

    @pytest.mark.parametrize("text", [
        "fitting:\n  bounds: 5\n",
        "fitting:\n  bounds:\n    a: [1]\n",
        "fitting:\n  grid_size: [2]\n",
    ])
    def test_malformed_fitting_config(self, capsys, tmp_path: Path, glass_samples: Path, text: str) -> None:
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(text)
        code, out, err = run(capsys, "--config", str(cfg), "fit", str(glass_samples))
        assert code == 2
        assert out == ""
        assert err.startswith("[ERROR]")

    @pytest.mark.parametrize("text", [
        "grid:\n  frequencies: 260\n",
        "grid:\n  angles: [10, null]\n",
        "output:\n  csv_digits: [9]\n",
        "- grid\n- output\n",
    ])
    def test_malformed_sweep_config(self, capsys, tmp_path: Path, text: str) -> None:
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(text)
        code, out, err = run(capsys, "--config", str(cfg), "sweep", "--material", "glass")
        assert code == 2
        assert out == ""
        assert err.startswith("[ERROR]")
