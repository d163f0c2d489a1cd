"""Run-configuration validation and command-line interface tests."""

import csv
import json
import math
import os

import numpy as np
import pytest

from ionreg import ConfigError, load_config
from ionreg.cli import main
from ionreg.runconfig import validate_config_dict


def _rabi_config(**overrides):
    cfg = {
        "experiment": "rabi",
        "seed": 17,
        "shots": 100,
        "noise": {"eps1": 0.02, "eps2": 0.02},
        "rabi": {"points": 31},
    }
    cfg.update(overrides)
    return cfg


def test_validate_good_config():
    violations, config = validate_config_dict(_rabi_config())
    assert violations == []
    assert config.experiment == "rabi"
    assert config.seed == 17
    assert config.shots == 100
    assert config.params.points == 31
    assert config.noise.eps1 == 0.02


def test_validate_rejects_unknown_keys():
    violations, config = validate_config_dict(_rabi_config(bogus=1))
    assert config is None
    assert any("bogus" in v for v in violations)


def test_validate_rejects_wrong_block():
    cfg = _rabi_config()
    del cfg["rabi"]
    cfg["crosstalk"] = {}
    violations, config = validate_config_dict(cfg)
    assert config is None
    assert any("does not match" in v for v in violations)


def test_validate_reports_multiple_violations():
    cfg = {
        "experiment": "cycle-bench",
        "seed": -3,
        "shots": "many",
        "noise": {"eps1": 2.0},
        "cycle_bench": {"m1": 6, "m2": 8},
    }
    violations, config = validate_config_dict(cfg)
    assert config is None
    joined = "\n".join(violations)
    assert "seed" in joined
    assert "shots" in joined
    assert "m1" in joined and "multiple of 4" in joined
    assert "eps1" in joined or "noise" in joined
    assert len(violations) >= 4


def test_validate_noise_field_names():
    cfg = _rabi_config(noise={"epsilon1": 0.02})
    violations, config = validate_config_dict(cfg)
    assert config is None
    assert any("epsilon1" in v for v in violations)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="line"):
        load_config(bad)
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps(_rabi_config(seed=-1)))
    with pytest.raises(ConfigError, match="seed"):
        load_config(invalid)


def test_load_config_defaults(tmp_path):
    p = tmp_path / "ok.json"
    p.write_text(json.dumps({"experiment": "parity-scan", "seed": 3}))
    cfg = load_config(p)
    assert cfg.experiment == "parity-scan"
    assert cfg.shots == 0  # defaults to exact mode
    assert cfg.params.points == 37


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj, indent=1))
    return p


def test_cli_validate_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, "good.json", _rabi_config())
    assert main(["validate", "--config", str(good)]) == 0
    out = capsys.readouterr().out
    assert "OK" in out
    bad = _write(tmp_path, "bad.json", _rabi_config(seed=-1))
    assert main(["validate", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "seed" in err


def test_cli_rabi_run_artifacts(tmp_path):
    cfg = _write(tmp_path, "rabi.json", _rabi_config())
    out = tmp_path / "out"
    assert main(["rabi", "--config", str(cfg), "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert names == ["analysis.json", "data.csv", "manifest.json"]

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "rabi"
    assert manifest["seed"] == 17
    assert manifest["mode"] == "sampled"
    assert manifest["rng_algorithm"] == "numpy-pcg64"

    text = (out / "data.csv").read_text()
    assert text.endswith("\n")
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["t_s", "p2bright", "p1bright", "p0bright"]
    assert len(rows) == 1 + 31
    for row in rows[1:]:
        for cell in row:
            float(cell)  # parseable numbers

    analysis = json.loads((out / "analysis.json").read_text())
    assert "sine_fit" in analysis


def test_cli_rerun_is_byte_identical(tmp_path):
    cfg = _write(tmp_path, "rabi.json", _rabi_config())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["rabi", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["rabi", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ("data.csv", "analysis.json", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cli_seed_override_changes_data(tmp_path):
    cfg = _write(tmp_path, "rabi.json", _rabi_config())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["rabi", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["rabi", "--config", str(cfg), "--out", str(out2), "--seed", "18"]) == 0
    assert (out1 / "data.csv").read_bytes() != (out2 / "data.csv").read_bytes()
    manifest = json.loads((out2 / "manifest.json").read_text())
    assert manifest["seed"] == 18


def test_cli_exact_override(tmp_path):
    cfg = _write(tmp_path, "rabi.json", _rabi_config())
    out = tmp_path / "out"
    assert main(["rabi", "--config", str(cfg), "--out", str(out), "--exact"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["mode"] == "exact"
    assert manifest["shots"] == 0


def test_cli_command_config_mismatch(tmp_path, capsys):
    cfg = _write(tmp_path, "rabi.json", _rabi_config())
    assert main(["crosstalk", "--config", str(cfg)]) == 2
    assert "rabi" in capsys.readouterr().err


def test_cli_csv_significant_digits(tmp_path):
    cfg = _write(
        tmp_path,
        "parity.json",
        {
            "experiment": "parity-scan",
            "seed": 5,
            "shots": 0,
            "noise": {"phi_offset_rad": 0.17453292519943295},
            "parity_scan": {"points": 9},
        },
    )
    out = tmp_path / "out"
    assert main(["parity-scan", "--config", str(cfg), "--out", str(out)]) == 0
    rows = (out / "data.csv").read_text().splitlines()
    assert rows[0] == "phi_dds_rad,parity,sigma"
    # floats are rendered with 12 significant digits
    value = rows[1].split(",")[0]
    assert value == f"{float(value):.12g}"
    assert len(value.replace("-", "").replace(".", "").replace("e", "").lstrip("0")) <= 13


def test_cli_runtime_error_exit_code(tmp_path, capsys):
    # an impossible crossing: offset pushes the zero far outside the scanned window
    cfg = _write(
        tmp_path,
        "parity.json",
        {
            "experiment": "parity-scan",
            "seed": 5,
            "shots": 0,
            "noise": {"phi_offset_rad": 0.0},
            "parity_scan": {"phi_min_rad": 0.1, "phi_max_rad": 0.6, "points": 9},
        },
    )
    out = tmp_path / "out"
    code = main(["parity-scan", "--config", str(cfg), "--out", str(out)])
    assert code == 3
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"]["type"] == "NoCrossingError"


def test_cli_transpile_outputs(tmp_path):
    circ = tmp_path / "circ.txt"
    circ.write_text("RY q1 1.5707963267948966\nRX q2 3.141592653589793\nMS\nRZ q1 0.5\n")
    cfg = _write(
        tmp_path,
        "transpile.json",
        {
            "experiment": "transpile",
            "seed": 0,
            "shots": 0,
            "noise": {"phi_offset_rad": 0.1},
            "transpile": {"circuit_file": "circ.txt"},
        },
    )
    out = tmp_path / "out"
    assert main(["transpile", "--config", str(cfg), "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert names == ["analysis.json", "manifest.json", "program.json"]
    program = json.loads((out / "program.json").read_text())
    ops = program["ops"]
    assert all(op["op"] in ("sq_pulse", "ms_pulse", "transport", "barrier") for op in ops)
    analysis = json.loads((out / "analysis.json").read_text())
    assert analysis["transports_after"] <= analysis["transports_before"]
    assert analysis["duration_after_s"] <= analysis["duration_before_s"]
    # synthesizer phases already carry the compensation
    pulses = [op for op in ops if op["op"] == "sq_pulse"]
    assert any(abs(op["phi_dds_rad"] - (0.5 * math.pi - 0.1)) < 1e-12 for op in pulses)


def test_cli_transpile_missing_circuit(tmp_path, capsys):
    cfg = _write(
        tmp_path,
        "transpile.json",
        {
            "experiment": "transpile",
            "seed": 0,
            "shots": 0,
            "noise": {},
            "transpile": {"circuit_file": "nope.txt"},
        },
    )
    assert main(["transpile", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "nope.txt" in capsys.readouterr().err


def test_cli_cycle_bench_run(tmp_path):
    cfg = _write(
        tmp_path,
        "cb.json",
        {
            "experiment": "cycle-bench",
            "seed": 23,
            "shots": 60,
            "noise": {"p_dep": 0.01},
            "cycle_bench": {"bootstrap_resamples": 200},
        },
    )
    out = tmp_path / "out"
    assert main(["cycle-bench", "--config", str(cfg), "--out", str(out)]) == 0
    rows = (out / "data.csv").read_text().splitlines()
    assert rows[0] == "P1,P2,m,l,f"
    assert len(rows) == 1 + 30
    analysis = json.loads((out / "analysis.json").read_text())
    assert 0.9 < analysis["fidelity"] < 1.01
    assert analysis["sigma"] > 0
