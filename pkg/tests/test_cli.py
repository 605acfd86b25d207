"""Command-line interface: config validation and output determinism."""

import json

import pytest

from llasym.cli import load_config, main
from llasym.errors import ConfigError


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_load_config_rejects_unknown_key(tmp_path):
    path = _write(tmp_path, "bad.json", {"paramz": {"k": 0.5}})
    with pytest.raises(ConfigError, match="paramz"):
        load_config(path)


def test_load_config_rejects_bad_tolerance(tmp_path):
    path = _write(tmp_path, "bad.json",
                  {"tolerances": {"quad_rel": -1.0}})
    with pytest.raises(ConfigError, match="positive"):
        load_config(path)


def test_load_config_rejects_J_and_modulus(tmp_path):
    path = _write(tmp_path, "bad.json",
                  {"params": {"J": [0.0, 1.0, 2.0], "k": 0.5}})
    with pytest.raises(ConfigError, match="not both"):
        load_config(path)


def test_load_config_rejects_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="valid JSON"):
        load_config(str(path))


def test_main_config_error_exit_code_and_json(tmp_path, capsys):
    path = _write(tmp_path, "bad.json", {"bogus_key": 1})
    with pytest.raises(SystemExit) as exc:
        main(["stationary-point", "--kappa", "1.0", "--config", path])
    assert exc.value.code == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["type"] == "ConfigError"
    assert "bogus_key" in err["error"]["message"]


def test_stationary_point_json(capsys):
    assert main(["stationary-point", "--kappa", "1.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["kappa"] == 1.0
    assert -4.0 < out["lambda0"] < 0.0
    assert out["phi0"] > 0.0
    assert abs(out["residual"]) < 1e-10


def test_asymptotics_csv_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json",
                 {"reflection": {"type": "synthetic", "c": 0.5, "s": 1.0},
                  "kappa": 1.0, "t_list": [25.0, 50.0]})
    out1, out2 = str(tmp_path / "a1.csv"), str(tmp_path / "a2.csv")
    assert main(["asymptotics", "--config", cfg, "--out", out1]) == 0
    assert main(["asymptotics", "--config", cfg, "--out", out2]) == 0
    b1 = open(out1, "rb").read()
    assert b1 == open(out2, "rb").read()
    lines = b1.decode().strip().split("\n")
    assert lines[0].startswith("t,x,L1,L2,L3")
    assert len(lines) == 3


def test_parametrix_check_json(capsys):
    assert main(["parametrix-check"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] is True
    assert out["residuals"]["ray_jump_constancy"] < 1e-8
