import csv
import io
import json

import pytest
import yaml

from sigmadamp import cli
from sigmadamp.errors import ConfigError

EX3 = {"sigma": "3/2", "delta": "1/8", "n": 3, "m": "5/4"}


def run(tmp_path, command, cfg, *extra):
    path = tmp_path / f"{command}.yaml"
    path.write_text(yaml.safe_dump(cfg), encoding="utf-8")
    return cli.main([command, "--config", str(path), "--out", str(tmp_path / "runs"), *extra])


def only_run_dir(tmp_path, command):
    (d,) = sorted((tmp_path / "runs").glob(f"{command}-*"))
    return d


def test_rates_shows_critical_exponent(tmp_path, capsys):
    assert run(tmp_path, "rates", {"params": dict(EX3, p=2, q=4)}) == 0
    assert "critical exponent = 103/43" in capsys.readouterr().out
    d = only_run_dir(tmp_path, "rates")
    rows = list(csv.DictReader(io.StringIO((d / "rates.csv").read_text())))
    assert rows[0]["corollary"] == "C22" and rows[0]["loss_p"] == "3411/11000"
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["config"]["rates"]["eps_slack"] == "1/1000"


def test_rates_single_regime_note(tmp_path, capsys):
    assert run(tmp_path, "rates", {"params": {"sigma": 1, "delta": "1/2", "n": 3}}) == 0
    assert "k- = k+" in capsys.readouterr().out


def test_rates_c22_diagnostic(tmp_path, capsys):
    cfg = {"params": {"sigma": 1, "delta": "1/2", "n": 1}, "rates": {"corollary": "C22"}}
    assert run(tmp_path, "rates", cfg) == 2
    err = capsys.readouterr().err
    assert "rates.corollary" in err and "n > m0*k_minus" in err


def test_regions_single_point(tmp_path):
    cfg = {"params": EX3, "regions": {"p": [2, 2, 1], "q": [4, 4, 1], "theorems": ["T1A"]}}
    assert run(tmp_path, "regions", cfg) == 0
    text = (only_run_dir(tmp_path, "regions") / "regions.csv").read_bytes()
    assert text == b"p,q,theorem,admissible,first_violated\r\n2,4,T1A,true,\r\n"


def test_regions_blowup_vs_t1b(tmp_path):
    cfg = {"params": {"sigma": 2, "delta": 1, "n": 1}, "regions": {"theorems": ["T1B", "Blowup"]}}
    assert run(tmp_path, "regions", cfg) == 0
    rows = list(csv.DictReader(io.StringIO((only_run_dir(tmp_path, "regions") / "regions.csv").read_text())))
    at22 = {r["theorem"]: r["admissible"] for r in rows if r["p"] == "2" and r["q"] == "2"}
    assert at22 == {"T1B": "false", "Blowup": "true"}


def test_determinism(tmp_path):
    cfg = {"params": EX3, "regions": {"p": ["2", "3", "0.5"], "q": ["3", "4", "0.5"]}}
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    run(a, "regions", cfg)
    run(b, "regions", cfg)
    da, db = only_run_dir(a, "regions"), only_run_dir(b, "regions")
    assert da.name == db.name
    for name in ("manifest.json", "regions.csv", "checks.json"):
        assert (da / name).read_bytes() == (db / name).read_bytes()


@pytest.mark.parametrize(
    "cfg, field",
    [
        ({"params": {"sigma": 1, "delta": 2, "n": 1}}, "params.delta"),
        ({"params": {"sigma": 1, "delta": "1/2", "n": 1, "colour": 3}}, "params.colour"),
        ({"grid": {"points_per_axis": 64}, "params": {"n": 1}, "simulate": {"dt": -1, "linear": True}}, "simulate.dt"),
    ],
)
def test_config_errors_name_field(tmp_path, capsys, cfg, field):
    assert run(tmp_path, "simulate", cfg) == 2
    assert field in capsys.readouterr().err


def test_resolve_rejects_unknown_section():
    with pytest.raises(ConfigError, match="bogus"):
        cli.resolve_config("rates", {"bogus": {}})


def test_simulate_linear_consistency(tmp_path):
    cfg = {
        "params": {"sigma": 1, "delta": "1/2", "n": 1},
        "grid": {"points_per_axis": 64, "half_length": 20.0},
        "simulate": {"linear": True, "horizon": 20.0, "dt": 0.1, "samples": 10},
    }
    assert run(tmp_path, "simulate", cfg) == 0
    d = only_run_dir(tmp_path, "simulate")
    checks = json.loads((d / "checks.json").read_text())
    assert checks["pass"] and any(c["id"] == "linear_consistency" for c in checks["checks"])
    for name in ("series.csv", "series.json", "u_final.bin", "u_final_slice.csv"):
        assert (d / name).exists()


def test_sweep_lifespan_and_report(tmp_path, capsys):
    cfg = {
        "params": {"sigma": 2, "delta": 1, "n": 1, "p": 2, "q": 2},
        "grid": {"points_per_axis": 256, "half_length": 50.0},
        "data": {
            "u0": {"profile": "zero"},
            "u1": {"profile": "bump"},
            "v0": {"profile": "zero"},
            "v1": {"profile": "bump"},
        },
    }
    assert run(tmp_path, "sweep-lifespan", cfg) == 0
    d = only_run_dir(tmp_path, "sweep-lifespan")
    rep = json.loads((d / "report.json").read_text())
    assert rep[0]["case_id"] == "lifespan_slope" and rep[0]["predicted"] == -0.5
    assert abs(rep[0]["measured"] + 0.5) <= 0.125
    capsys.readouterr()
    assert run(tmp_path, "report", {"report": {"inputs": [str(d)]}}) == 0
    assert "1/1 checks pass" in capsys.readouterr().out


def test_failing_check_exit_code(tmp_path, capsys):
    rep = tmp_path / "report.json"
    rep.write_text(json.dumps([{"case_id": "x", "predicted": 1, "measured": 2, "tolerance": 0, "pass": False}]))
    assert run(tmp_path, "report", {"report": {"inputs": [str(rep)]}}) == 1
    assert json.loads(capsys.readouterr().err)["failed"][0]["id"] == "x"
