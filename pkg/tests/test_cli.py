import csv
import io
import json
import math
import subprocess
import sys

import pytest

from scaled_fields.cli import run


def write_cfg(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_default_passes(capsys):
    code, out, _ = invoke(capsys, "verify", "--seed", "7")
    payload = json.loads(out)
    assert code == 0 and payload["passed"] and payload["seed"] == 7
    assert "cross_universe" in payload["suites"]


def test_integrate_default(capsys):
    code, out, _ = invoke(capsys, "integrate")
    payload = json.loads(out)
    assert code == 0
    assert payload["value"]["scaled"]["re"] == pytest.approx(math.e - 1, abs=1e-8)
    assert payload["value"]["unscaled"]["re"] == pytest.approx(1.0, abs=1e-14)
    assert payload["converged"]


def test_integrate_log_linear(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        {"theta": {"preset": "log_linear", "params": {"a": [1.0]}}, "field": {"kind": "linear"}},
    )
    code, out, _ = invoke(capsys, "integrate", "--config", cfg)
    assert code == 0
    assert json.loads(out)["value"]["scaled"]["re"] == pytest.approx(5 / 6, abs=1e-8)


def test_integrate_dump(tmp_path, capsys):
    dump = tmp_path / "nodes.csv"
    code, _, _ = invoke(capsys, "integrate", "--cells", "8", "--dump", str(dump))
    rows = list(csv.DictReader(dump.open()))
    assert code == 0 and len(rows) == 9
    assert set(rows[0]) == {"u0", "integrand_re", "integrand_im", "factor", "weight"}


def test_cosmo_constant_theta_gives_unit_factor(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"theta": {"preset": "constant", "params": {"c": 3.0}}})
    code, out, _ = invoke(capsys, "cosmo", "--config", cfg)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 60
    assert all(float(r["factor"]) == 1.0 for r in rows)
    assert all(float(r["scaled_ds2"]) == 1.0 for r in rows)


def test_cosmo_offset_invariance(tmp_path, capsys):
    base = {"theta": {"preset": "inflation"}}
    shifted = {"theta": {"preset": "inflation", "offset": 5.0}}
    _, a, _ = invoke(capsys, "cosmo", "--config", write_cfg(tmp_path, base, "a.json"))
    _, b, _ = invoke(capsys, "cosmo", "--config", write_cfg(tmp_path, shifted, "b.json"))
    ra, rb = list(csv.DictReader(io.StringIO(a))), list(csv.DictReader(io.StringIO(b)))
    for x, y in zip(ra, rb):
        assert float(y["theta"]) == pytest.approx(float(x["theta"]) + 5.0, abs=1e-12)
        assert float(y["factor"]) == pytest.approx(float(x["factor"]), rel=1e-12)


def test_cosmo_inflation_shape(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"theta": {"preset": "inflation"}})
    _, out, _ = invoke(capsys, "cosmo", "--config", cfg)
    factors = [float(r["factor"]) for r in csv.DictReader(io.StringIO(out))]
    assert factors[0] < 1e-3 and factors[-1] == 1.0
    assert all(b > a for a, b in zip(factors, factors[1:]))


def test_du_check_csv(capsys):
    code, out, _ = invoke(capsys, "du-check")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows
    assert set(rows[0]) == {"h", "rho", "deviation", "endpoint_scaled_ratio"}


def test_derivative_and_wavepacket(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        {"field": {"kind": "linear"}, "derivative": {"at": [1.0]}, "quadrature": {"box": [[-1, 1]], "n_cells": 64, "rule": "midpoint"}},
    )
    code, out, _ = invoke(capsys, "derivative", "--config", cfg)
    assert code == 0
    assert json.loads(out)["value"][0]["re"] == pytest.approx(2.0, abs=1e-7)
    code, out, _ = invoke(capsys, "wavepacket", "--config", cfg)
    assert code == 0 and json.loads(out)["cells"] == 64


@pytest.mark.parametrize(
    "data",
    [
        {"quadrature": {"box": [[0, 1]], "n_cells": 7, "rule": "simpson"}},
        {"theta": {"preset": "no_such_preset"}},
        {"dimension": 2},
        {"field": {"kind": "linear", "params": {"bogus": 1}}},
        {"reference": [0.0, 1.0]},
    ],
)
def test_config_errors_exit_2(tmp_path, capsys, data):
    code, _, err = invoke(capsys, "integrate", "--config", write_cfg(tmp_path, data))
    assert code == 2 and "config error" in err


def test_bad_json_and_missing_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert invoke(capsys, "integrate", "--config", str(bad))[0] == 2
    assert invoke(capsys, "integrate", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_domain_failure_exits_1(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        {"theta": {"preset": "inflation"}, "quadrature": {"box": [[0, 2]], "n_cells": 16}, "reference": [1.0]},
    )
    code, _, err = invoke(capsys, "integrate", "--config", cfg)
    assert code == 1 and "DomainError" in err


def test_output_is_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"v{i}.json"
        assert run(["verify", "--seed", "11", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("SCALED_FIELDS_SEED", "42")
    _, out, _ = invoke(capsys, "verify")
    assert json.loads(out)["seed"] == 42
    _, out, _ = invoke(capsys, "verify", "--seed", "3")
    assert json.loads(out)["seed"] == 3
    monkeypatch.setenv("SCALED_FIELDS_SEED", "abc")
    assert invoke(capsys, "verify")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "scaled_fields", "integrate", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    row = next(csv.DictReader(io.StringIO(proc.stdout)))
    assert float(row["scaled_re"]) == pytest.approx(math.e - 1, abs=1e-8)


FULL_CONFIG = {
    "dimension": 1,
    "chart": {"preset": "tanh", "params": {"scale": 1.5}},
    "theta": {"preset": "inflation", "params": {"t0": 1.0, "rate": 10.0, "plateau": 20.0}, "offset": 0.0},
    "field": {"kind": "gaussian", "params": {"center": [0.5], "sigma": 0.2, "amplitude": [1.0, 0.0]}},
    "quadrature": {"box": [[0.5, 2.0]], "n_cells": 128, "rule": "simpson", "tolerance": 1e-8},
    "reference": [1.0],
    "derivative": {"at": [1.0], "axis": 0, "h": 1e-4, "link": {"kind": "u1_phase", "phase": [0.3]}},
    "du_check": {"at": [1.0], "axis": 0, "steps": [0.1, 0.01, 0.001]},
    "cosmo": {"times": {"start": 0.01, "stop": 14.0, "num": 60, "spacing": "log"}, "present_age": 14.0, "ds2": 1.0},
    "output": {"format": "json"},
}


@pytest.mark.parametrize("command", ["verify", "integrate", "derivative", "wavepacket", "du-check", "cosmo"])
def test_every_section_in_one_config(tmp_path, capsys, command):
    code, out, _ = invoke(capsys, command, "--config", write_cfg(tmp_path, FULL_CONFIG))
    assert code == 0
    assert json.loads(out)["op"] == command
