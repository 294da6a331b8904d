"""Command-line behavior: schemas, exit codes, determinism."""

import json
from pathlib import Path

import pytest

from orbit_localize.cli import main

SU2 = {
    "algebra": {"family": "su", "n": 2},
    "weight": [1.0],
    "grid": {"axes": [{"start": -1.5, "stop": 1.5, "steps": 7}]},
    "oracle": {"seed": 9, "samples": 20000},
    "output": {"format": "csv"},
}

SL2 = {
    "algebra": {"family": "sl_real", "n": 2},
    "weight": [1.0],
    "s0": -1,
    "grid": {"axes": [{"start": 0.3, "stop": 1.2, "steps": 4}]},
    "oracle": {"seed": 4, "samples": 20000,
               "eps_schedule": [0.2, 0.1, 0.05],
               "scale_schedule_log2": 20},
    "output": {"format": "csv"},
}


def write_config(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=1))
    return str(path)


def test_eval_csv_schema_and_wall_flag(tmp_path):
    cfg = write_config(tmp_path, SU2)
    out = tmp_path / "out.csv"
    code = main(["eval", "--config", cfg, "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x0,re_f,im_f,degenerate,mode,s0,version"
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 7
    wall = [r for r in rows if r[0] == "0.0"]
    assert wall and wall[0][3] == "1"   # t = 0 flagged degenerate
    for r in rows:
        if r[3] == "0":
            assert abs(float(r[2])) < 1e-12   # compact values here are real


def test_eval_two_axis_grid(tmp_path):
    su3 = {
        "algebra": {"family": "su", "n": 3},
        "weight": [0.9, 0.4],
        "grid": {"axes": [
            {"start": 0.3, "stop": 0.9, "steps": 3},
            {"start": -0.8, "stop": -0.2, "steps": 3},
        ]},
        "output": {"format": "csv"},
    }
    cfg = write_config(tmp_path, su3, "su3.json")
    out = tmp_path / "grid.csv"
    assert main(["eval", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("x0,x1,re_f")
    assert len(lines) == 1 + 9


def test_eval_json_includes_config_and_terms(tmp_path):
    cfg_dict = dict(SU2, output={"format": "json"})
    cfg = write_config(tmp_path, cfg_dict)
    out = tmp_path / "out.json"
    assert main(["eval", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["algebra"]["family"] == "su"
    live = [r for r in doc["rows"] if not r["degenerate"]]
    assert live and all(len(r["terms"]) == 2 for r in live)


def test_eval_split_grid_real_values(tmp_path):
    cfg = write_config(tmp_path, SL2)
    out = tmp_path / "out.csv"
    assert main(["eval", "--config", cfg, "--out", str(out)]) == 0
    for ln in out.read_text().strip().splitlines()[1:]:
        parts = ln.split(",")
        assert parts[3] == "0"
        assert abs(float(parts[2])) <= 1e-12


def test_eval_elliptic_sector_all_zero(tmp_path):
    cfg_dict = dict(SL2)
    cfg_dict = json.loads(json.dumps(cfg_dict))
    cfg_dict["grid"] = {"axes": [{
        "start": 0.3, "stop": 2.0, "steps": 5,
        "direction": [0.0, 1.0, -1.0],       # rotation generator: elliptic
    }]}
    cfg = write_config(tmp_path, cfg_dict)
    out = tmp_path / "out.csv"
    assert main(["eval", "--config", cfg, "--out", str(out)]) == 0
    for ln in out.read_text().strip().splitlines()[1:]:
        parts = ln.split(",")
        assert float(parts[1]) == 0.0 and float(parts[2]) == 0.0


def test_eval_degenerate_only_grid_exit_3(tmp_path):
    cfg_dict = json.loads(json.dumps(SU2))
    cfg_dict["grid"] = {"axes": [{"start": 0.0, "stop": 0.0, "steps": 1}]}
    cfg = write_config(tmp_path, cfg_dict)
    assert main(["eval", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == 3


def test_config_errors_named(tmp_path, capsys):
    missing = dict(SU2)
    del missing["weight"]
    cfg = write_config(tmp_path, missing)
    assert main(["eval", "--config", cfg]) == 2
    assert "weight" in capsys.readouterr().err

    assert main(["eval", "--config", str(tmp_path / "absent.json")]) == 2
    assert "not found" in capsys.readouterr().err

    nogrid = {k: v for k, v in SU2.items() if k != "grid"}
    cfg = write_config(tmp_path, nogrid, "nogrid.json")
    assert main(["eval", "--config", cfg]) == 2
    assert "grid" in capsys.readouterr().err

    singular = json.loads(json.dumps(SU2))
    singular["weight"] = [0.0]
    cfg = write_config(tmp_path, singular, "singular.json")
    assert main(["eval", "--config", cfg]) == 2
    assert "singular" in capsys.readouterr().err


def test_unknown_suite_rejected(tmp_path):
    cfg = write_config(tmp_path, SU2)
    with pytest.raises(SystemExit) as err:
        main(["verify", "--config", cfg, "--suite", "nonsense"])
    assert err.value.code == 2


def test_verify_algebra_suite_passes(tmp_path):
    cfg = write_config(tmp_path, SU2)
    out = tmp_path / "report.json"
    code = main(["verify", "--config", cfg, "--suite", "algebra",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and all(c["passed"] for c in doc["checks"])


def test_calibrate_writes_sibling_never_in_place(tmp_path, capsys):
    cfg = write_config(tmp_path, SU2)
    before = Path(cfg).read_text()
    assert main(["calibrate", "--config", cfg]) == 0
    capsys.readouterr()
    assert Path(cfg).read_text() == before
    sibling = Path(cfg).with_suffix(".calibrated.json")
    doc = json.loads(sibling.read_text())
    assert "calibration" in doc
    prov = doc["calibration"]["provenance"]
    assert prov["seed"] == 9 and prov["samples"] == 20000
    assert main(["calibrate", "--config", cfg, "--out", cfg]) == 2
    assert "overwrite" in capsys.readouterr().err


def test_calibrate_requires_oracle_block(tmp_path, capsys):
    no_oracle = {k: v for k, v in SU2.items() if k != "oracle"}
    cfg = write_config(tmp_path, no_oracle)
    assert main(["calibrate", "--config", cfg]) == 2
    assert "oracle" in capsys.readouterr().err


def test_oracle_and_cycle_limit_outputs(tmp_path):
    cfg = write_config(tmp_path, SL2, "sl2.json")
    out = tmp_path / "oracle.csv"
    assert main(["oracle", "--config", cfg, "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("eps,")
    assert "extrapolated," in text and "formula," in text

    cyc = tmp_path / "cycle.csv"
    assert main(["cycle-limit", "--config", cfg, "--out", str(cyc)]) == 0
    lines = cyc.read_text().strip().splitlines()
    assert lines[0] == "s,base_defect,moment_defect"
    assert lines[1].startswith("1.0,")
    assert any(ln.startswith("at_floor,") for ln in lines)


def test_user_supplied_mode_through_cli(tmp_path):
    user = {
        "algebra": {"family": "sl_real", "n": 2},
        "weight": [1.0],
        "mode": "user_supplied",
        "multiplicities": {"e": -1, "s1": 1},
        "grid": {"axes": [{"start": 0.7, "stop": 0.7, "steps": 1}]},
        "output": {"format": "csv"},
    }
    cfg = write_config(tmp_path, user, "user.json")
    out = tmp_path / "user.csv"
    assert main(["eval", "--config", cfg, "--out", str(out)]) == 0
    row = out.read_text().strip().splitlines()[1].split(",")
    # matches the calibrated automatic mode: cos(8 * 0.7) / 0.7
    assert float(row[1]) == pytest.approx(1.1079512550146426, rel=1e-12)
    assert main(["verify", "--config", cfg, "--suite", "fixedpoints"]) == 0


def test_oracle_suite_restricted_to_rank_one_split(tmp_path, capsys):
    sl3 = json.loads(json.dumps(SL2))
    sl3["algebra"] = {"family": "sl_real", "n": 3}
    sl3["weight"] = [0.9, 0.4]
    cfg = write_config(tmp_path, sl3, "sl3.json")
    assert main(["verify", "--config", cfg, "--suite", "oracle"]) == 2
    assert "sl(2,R)" in capsys.readouterr().err


def test_cycle_limit_requires_sl2(tmp_path, capsys):
    cfg = write_config(tmp_path, SU2)
    assert main(["cycle-limit", "--config", cfg]) == 2
    assert "sl(2,R)" in capsys.readouterr().err


def test_seed_required_for_oracle_commands(tmp_path, capsys):
    no_seed = json.loads(json.dumps(SL2))
    del no_seed["oracle"]["seed"]
    cfg = write_config(tmp_path, no_seed)
    assert main(["oracle", "--config", cfg]) == 2
    assert "seed" in capsys.readouterr().err


def test_eval_thread_cap_env(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, SU2)
    serial = tmp_path / "serial.csv"
    assert main(["eval", "--config", cfg, "--out", str(serial)]) == 0
    monkeypatch.setenv("ORBIT_LOCALIZE_THREADS", "4")
    threaded = tmp_path / "threaded.csv"
    assert main(["eval", "--config", cfg, "--out", str(threaded)]) == 0
    assert serial.read_bytes() == threaded.read_bytes()


def test_eval_determinism_bytes(tmp_path):
    cfg = write_config(tmp_path, SU2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["eval", "--config", cfg, "--out", str(a)]) == 0
    assert main(["eval", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_calibrate_determinism_bytes(tmp_path, capsys):
    cfg = write_config(tmp_path, SU2)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["calibrate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["calibrate", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
