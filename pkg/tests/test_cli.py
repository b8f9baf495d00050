"""Command-line behaviour: output formats, diagnostics, cache, config."""

import io
import json
import os

import pytest

from hilbk3 import cli
from hilbk3.config import Config
from hilbk3.series import qseries_from_json


def run_cli(argv):
    import contextlib

    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue(), err.getvalue()


def test_expand_pretty_and_json():
    code, out, _ = run_cli(["expand", "Delta", "--qmax", "3", "--format", "pretty"])
    assert code == 0
    assert "q^1: 1" in out and "q^2: -24" in out and "q^3: 252" in out
    code, out, _ = run_cli(["expand", "G", "--qmax", "1", "--format", "json"])
    assert code == 0
    payload = json.loads(out.splitlines()[-1])
    series = qseries_from_json(payload)
    assert series.coeff(0, 0) == 1
    assert series.coeff_y(1, -2) == 1 and series.coeff_y(1, 0) == 6
    code, out, _ = run_cli(["expand", "F", "--qmax", "0"])
    assert code == 0 and "s^-1" in out


def test_expand_unknown_name_lists_valid():
    code, _out, err = run_cli(["expand", "zeta"])
    assert code == 2
    assert "unknown generator" in err and "Delta" in err


def test_wdvv_commands():
    code, out, _ = run_cli(["wdvv", "solve", "--qmax", "2", "--k-window", "4"])
    assert code == 0
    assert out.splitlines()[0] == "d,k,H,I,T"
    assert any(line.startswith("0,1,1,0,8") for line in out.splitlines())
    code, out, _ = run_cli(["wdvv", "verify", "--qmax", "2", "--k-window", "4"])
    assert code == 0 and "OK" in out and "FAIL" not in out


def test_bracket_evaluation_and_errors():
    code, out, _ = run_cli(
        ["bracket", "p(-1,F) p(-1,F) 1", "p(-1,F) p(-1,F) 1", "--qmax", "2"]
    )
    assert code == 0
    assert "q^-1: -1*s^-2 + 2 + -1*s^2" in out
    code, _, err = run_cli(["bracket", "p(-2,w) 1", "p(-1,F) 1"])
    assert code == 2 and "energy mismatch" in err
    code, _, err = run_cli(["bracket", "p(-2,zz) 1", "p(-1,F) p(-1,e) 1"])
    assert code == 2 and "unknown class" in err
    code, _, err = run_cli(["bracket", "p(+2,w) 1", "p(-1,F) p(-1,e) 1"])
    assert code == 2 and "creation" in err
    code, _, err = run_cli(["bracket", "p(-2,w)", "p(-1,F) p(-1,e) 1"])
    assert code == 2 and "vacuum" in err


def test_bracket_fit_flag():
    code, out, _ = run_cli(
        ["bracket", "p(-2,w) 1", "p(-1,F) p(-1,e) 1", "--qmax", "4", "--fit"]
    )
    assert code == 0
    assert "# fit:" in out and "index 1" in out and "holomorphic at z=0: True" in out


def test_table_command():
    code, out, _ = run_cli(["table", "--h-max", "5", "--g-max", "3"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "h,g2,g3"
    assert lines[1] == "2,1,0"
    assert lines[3] == "4,672,6"


def test_verify_single_suite_and_unknown():
    code, out, _ = run_cli(["verify", "yau-zaslow"])
    assert code == 0 and out.startswith("PASS")
    code, _, err = run_cli(["verify", "bogus"])
    assert code == 2 and "unknown suites" in err


def test_cache_round_trip(tmp_path):
    cache_dir = str(tmp_path / "cache")
    args = ["expand", "Delta", "--qmax", "2", "--format", "json", "--cache-dir", cache_dir]
    code1, out1, _ = run_cli(args)
    code2, out2, _ = run_cli(args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert any(name.endswith(".json") for name in os.listdir(cache_dir))


def test_config_precedence(tmp_path, monkeypatch):
    cfg_file = tmp_path / "conf.json"
    cfg_file.write_text(json.dumps({"q_max": 9, "output": "csv"}))
    cfg = Config.load(config_path=str(cfg_file))
    assert cfg.q_max == 9 and cfg.output == "csv"
    monkeypatch.setenv("HILBK3_Q_MAX", "7")
    cfg = Config.load(config_path=str(cfg_file))
    assert cfg.q_max == 7  # env beats file
    cfg = Config.load(flag_values={"q_max": 3}, config_path=str(cfg_file))
    assert cfg.q_max == 3  # flag beats env
    monkeypatch.delenv("HILBK3_Q_MAX")
    with pytest.raises(ValueError):
        Config.load(flag_values={"zz": 1})
