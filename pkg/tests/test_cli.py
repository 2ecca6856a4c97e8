import json
import shutil
from pathlib import Path

import pytest

from resonlab import cli, counting, fixtures

RECIPES = Path(__file__).resolve().parent.parent / "recipes"


def write_config(tmp_path, **overrides):
    cfg = {
        "dimension": 2,
        "steps": [{"radius": 1.0, "height": 4.0}],
        "sheets": [1, -1],
        "r_max": 8.0,
        "tolerances": {"winding": 1e-6, "newton": 1e-10},
        "seed": 0,
        "out_dir": str(tmp_path / "out"),
    }
    cfg.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_scan_step_d3(tmp_path):
    out = tmp_path / "d3"
    code = cli.main(["scan", "--config", str(RECIPES / "step_d3.json"), "--sheet", "-1", "--rmax", "30",
                     "--out-dir", str(out), "--workers", "1"])
    assert code == cli.EXIT_OK
    lines = (out / "resonances.csv").read_text().splitlines()
    assert lines[0] == counting.CSV_HEADER
    assert len(lines) > 1
    report = json.loads((out / "report.json").read_text())
    assert {c["name"] for c in report["criteria"]} >= {"lower_bound_d3_m-1", "symmetry_self_m-1"}
    assert report["scans"][0]["winding_total"] == report["scans"][0]["isolated_total"]
    curve = json.loads((out / "curve.json").read_text())
    assert curve["radii"][-1] == 30.0 and len(curve["counts"]) == 7


def test_scan_free(tmp_path, capsys):
    out = tmp_path / "free"
    code = cli.main(["scan", "--config", str(RECIPES / "free.json"), "--out-dir", str(out)])
    assert code == cli.EXIT_OK
    assert (out / "resonances.csv").read_text() == counting.CSV_HEADER + "\n"
    report = json.loads((out / "report.json").read_text())
    assert "zero resonances found" in report["notes"]


def test_scan_bad_radius(tmp_path, capsys):
    path = write_config(tmp_path, steps=[{"radius": -1.0, "height": 4.0}])
    assert cli.main(["scan", "--config", str(path)]) == cli.EXIT_CONFIG
    assert "steps[0].radius" in capsys.readouterr().err


@pytest.mark.parametrize("overrides,field", [
    (dict(sheets=[0]), "sheets[0]"),
    (dict(r_max="big"), "r_max"),
    (dict(tolerances={"winding": 1e-6}), "tolerances.newton"),
    (dict(dimension=0), "dimension"),
    (dict(checks=["nope"]), "checks"),
    (dict(steps=[{"radius": 1.0}]), "steps[0].height"),
])
def test_config_errors_name_field(tmp_path, capsys, overrides, field):
    path = write_config(tmp_path, **overrides)
    assert cli.main(["scan", "--config", str(path)]) == cli.EXIT_CONFIG
    assert field in capsys.readouterr().err


def test_missing_field(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"dimension": 2}))
    assert cli.main(["verify", "--config", str(path)]) == cli.EXIT_CONFIG
    assert "'steps'" in capsys.readouterr().err


def test_invalid_json_reports_position(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text('{\n  "dimension": 2,\n  "steps": [\n}\n')
    assert cli.main(["scan", "--config", str(path)]) == cli.EXIT_CONFIG
    assert "line 4" in capsys.readouterr().err


def test_scan_is_deterministic(tmp_path):
    path = write_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["scan", "--config", str(path), "--out-dir", str(a)]) == cli.EXIT_OK
    assert cli.main(["scan", "--config", str(path), "--out-dir", str(b)]) == cli.EXIT_OK
    for name in ("resonances.csv", "curve.json", "report.json", "curve_sheet1.json", "curve_sheet-1.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_csv_round_trip_through_cli(tmp_path):
    path = write_config(tmp_path)
    out = tmp_path / "rt"
    assert cli.main(["scan", "--config", str(path), "--out-dir", str(out)]) == cli.EXIT_OK
    cfg = cli.load_config(path)
    sets = cli._scan_all(cfg, cfg.sheets)
    expected = [e for m in sorted(sets) for e in sets[m].entries]
    assert counting.read_resonances(out / "resonances.csv") == expected


def test_fixtures_check(capsys):
    assert cli.main(["fixtures", "check"]) == cli.EXIT_OK
    assert "0 failures" in capsys.readouterr().out


def test_fixtures_corrupted_line(tmp_path, capsys):
    bad = tmp_path / "golden.txt"
    lines = fixtures.GOLDEN_PATH.read_text().splitlines()
    lines[9] = "0 0.1 0 not-a-number 0 J"
    bad.write_text("\n".join(lines) + "\n")
    assert cli.main(["fixtures", "check", "--path", str(bad)]) == cli.EXIT_CONFIG
    assert ":10" in capsys.readouterr().err


def test_fixtures_wrong_value_listed(tmp_path, capsys):
    bad = tmp_path / "golden.txt"
    lines = fixtures.GOLDEN_PATH.read_text().splitlines()
    fields = lines[8].split()
    fields[3] = repr(float(fields[3]) * (1 + 1e-6))
    lines[8] = " ".join(fields)
    bad.write_text("\n".join(lines) + "\n")
    assert cli.main(["fixtures", "check", "--path", str(bad)]) == cli.EXIT_CONFIG
    assert "line 9" in capsys.readouterr().out


def test_fixtures_regen_grid(tmp_path):
    grid = tmp_path / "grid.txt"
    shutil.copy(fixtures.GRID_PATH, grid)
    golden_before = fixtures.GOLDEN_PATH.read_bytes()
    assert cli.main(["fixtures", "regen-grid", "--nu-max", "60", "--path", str(grid)]) == cli.EXIT_OK
    assert grid.read_bytes() == fixtures.GRID_PATH.read_bytes()
    assert fixtures.GOLDEN_PATH.read_bytes() == golden_before


def test_verify_zworski(tmp_path):
    out = tmp_path / "z"
    assert cli.main(["verify", "--config", str(RECIPES / "zworski_1d.json"), "--out-dir", str(out)]) == cli.EXIT_OK
    crit = json.loads((out / "report.json").read_text())["criteria"]
    rep = next(c for c in crit if c["name"] == "zworski_1d")
    assert 0.95 <= rep["measured"]["ratio"] <= 1.05 and rep["status"] == "PASS"


def test_verify_seeds(tmp_path):
    out = tmp_path / "s"
    assert cli.main(["verify", "--config", str(RECIPES / "seeds.json"), "--out-dir", str(out)]) == cli.EXIT_OK
    crit = json.loads((out / "report.json").read_text())["criteria"]
    assert crit[0]["measured"]["converged_fraction"] >= 0.9


@pytest.mark.slow
def test_verify_step_d3_reports_order(tmp_path):
    out = tmp_path / "v3"
    code = cli.main(["verify", "--config", str(RECIPES / "step_d3.json"), "--out-dir", str(out)])
    crit = json.loads((out / "report.json").read_text())["criteria"]
    rep = next(c for c in crit if c["name"].startswith("lower_bound"))
    assert rep["measured"]["fitted_order"] >= 2.85
    # the exit code mirrors the statuses in the report
    failed = any(c["status"] == "FAIL" for c in crit)
    assert code == (cli.EXIT_FAILED if failed else cli.EXIT_OK)
