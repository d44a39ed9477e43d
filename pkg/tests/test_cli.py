import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from thindex import PCMultiplier as M
from thindex.cli import ConfigError, main, parse_config, winding_from_csv

SHIFT = {"p": 2, "multipliers": {"a": {"trig": {"1": 1}}, "z": {"constant": 0}},
         "expression": {"TH": ["a", "z"]}, "grid": {"t": 64, "lambda": 33}}
CHORD = {"p": 2, "multipliers": {"a": {"piecewise_constant": {
    "breaks": ["pi:1/2", "pi:3/2"], "values": [1, -1]}}}, "expression": {"T": "a"}}
JUMPY = {"p": 3, "multipliers": {
    "a": {"piecewise_constant": {"breaks": [0.5, 2.0, 4.0], "values": [2, [0, 1.5], -1]}},
    "b": {"pieces": [{"from": 1.0, "to": 5.0, "poly": [0.2, 0.05]}], "constant": "0.1j"}},
    "expression": {"sum": [{"TH": ["a", "b"]}, {"scale": [0.5, {"prod": [{"T": "a"}, "I"]}]}]},
    "grid": {"t": 48, "lambda": 25}}


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg) if not isinstance(cfg, str) else cfg)
    return str(path)


def _lines(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_parse_angles_and_values():
    cfg = parse_config(json.dumps(JUMPY))
    a = cfg.multipliers["a"]
    assert a(1.0) == 2 and a(3.0) == 1.5j and a(5.0) == -1
    b = cfg.multipliers["b"]
    assert b(2.0) == pytest.approx(0.2 + 0.05 + 0.1j)
    assert b(0.5) == pytest.approx(0.1j)
    c = parse_config(json.dumps(CHORD)).multipliers["a"]
    assert list(c.jump_set()) == pytest.approx([math.pi / 2, 3 * math.pi / 2])


def test_parse_errors_are_located():
    with pytest.raises(ConfigError, match="line 2, column"):
        parse_config('{"p": 2,\n "multipliers": }')
    bad = dict(CHORD, expression={"T": "nope"})
    with pytest.raises(ConfigError, match="nope"):
        parse_config(json.dumps(bad))
    with pytest.raises(ConfigError):
        parse_config(json.dumps(dict(CHORD, p=1)))
    with pytest.raises(ConfigError):
        parse_config(json.dumps(dict(CHORD, expression={"frob": 1})))


def test_check_and_index_exit_codes(tmp_path, capsys):
    assert main(["check", _write(tmp_path, SHIFT)]) == 0
    assert _lines(capsys.readouterr().out)["fredholm"] == "yes"
    assert main(["index", _write(tmp_path, SHIFT)]) == 0
    out = _lines(capsys.readouterr().out)
    assert out["index"] == "-1" and out["winding"] == "1"
    assert main(["check", _write(tmp_path, CHORD)]) == 1
    out = _lines(capsys.readouterr().out)
    assert out["fredholm"] == "no"
    assert abs(float(out["witness_t_angle"]) - math.pi / 2) < 1e-2
    assert main(["index", _write(tmp_path, CHORD)]) == 1
    assert main(["check", _write(tmp_path, "{oops")]) == 3
    assert "line 1" in capsys.readouterr().err


def test_unresolved_exit_code(tmp_path, capsys):
    cfg = {"p": 2, "multipliers": {"a": {"piecewise_constant": {
        "breaks": ["pi:1/2", "pi:3/2"], "values": [[1, 1e-3], [-1, 1e-3]]}}},
        "expression": {"T": "a"}, "grid": {"t": 32, "lambda": 33}}
    assert main(["check", _write(tmp_path, cfg)]) == 2
    assert _lines(capsys.readouterr().out)["fredholm"] == "unresolved"


def test_command_line_overrides(tmp_path, capsys):
    path = _write(tmp_path, JUMPY)
    assert main(["index", path, "--p", "1.5", "--grid-t", "32", "--grid-lambda", "17"]) == 0
    assert "index" in _lines(capsys.readouterr().out)


def test_doubled_index(tmp_path, capsys):
    cfg = dict(SHIFT, expression={"TH": ["a", "z"]})
    assert main(["index", _write(tmp_path, cfg), "--doubled"]) == 0
    assert _lines(capsys.readouterr().out)["index"] == "-2"


def test_curve_round_trip(tmp_path, capsys):
    for cfg in (SHIFT, JUMPY):
        out = str(tmp_path / "curve.csv")
        assert main(["curve", _write(tmp_path, cfg), "--out", out]) == 0
        winding = int(_lines(capsys.readouterr().out)["winding"])
        assert winding_from_csv(out) == winding
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["lambda"] == "-inf" and rows[-1]["lambda"] == "+inf"
        assert float(rows[0]["re_W"]) == 1.0 and float(rows[-1]["re_W"]) == 1.0
        assert {r["segment_kind"] for r in rows} <= {"lambda", "t"}
        assert all(r["lambda"] == "" for r in rows if r["segment_kind"] == "t")


def test_curve_not_written_when_singular(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["curve", _write(tmp_path, CHORD), "--out", str(out)]) == 1
    assert not out.exists()


def test_outputs_are_deterministic(tmp_path, capsys):
    path = _write(tmp_path, JUMPY)
    blobs = []
    for k in range(2):
        out = tmp_path / f"c{k}.csv"
        main(["curve", path, "--out", str(out)])
        blobs.append(out.read_bytes())
        main(["spectrum", path, "--out", str(tmp_path / f"s{k}.csv")])
        blobs.append((tmp_path / f"s{k}.csv").read_bytes())
    capsys.readouterr()
    assert blobs[0] == blobs[2] and blobs[1] == blobs[3]


def test_spectrum_output(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", _write(tmp_path, SHIFT), "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["re", "im", "t_angle", "lambda"]
    z = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    assert np.allclose(np.abs(z), 1.0)


def test_oracle_command(tmp_path, capsys):
    assert main(["oracle", _write(tmp_path, SHIFT)]) == 0
    text = capsys.readouterr().out
    assert "laurent_index: pass" in text and "fail" not in text
    beta = {"p": 2, "multipliers": {"a": {"trig": {"1": 1, "0": 3}}, "z": {"constant": 0},
                                    "c": {"indicator": ["pi:1/3", "pi:1"]}},
            "expression": {"T": "a"}, "beta": [[["a", "z"], ["c", "z"]], [["c", "a"], ["a", "z"]]],
            "grid": {"t": 24, "lambda": 17}}
    assert main(["oracle", _write(tmp_path, beta)]) == 0
    text = capsys.readouterr().out
    assert "extension_equivalence: pass" in text and "extension_index: pass" in text
    # roots on the circle: the root-count checks are skipped, not failed
    near = dict(SHIFT, multipliers={"a": {"trig": {"0": 1, "1": 1}}, "z": {"constant": 0}})
    assert main(["oracle", _write(tmp_path, near)]) == 0
    assert "laurent_index: skip" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "thindex", "index", _write(tmp_path, SHIFT)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "index: -1" in res.stdout


def test_multiplier_kinds_sum(tmp_path):
    cfg = {"p": 2, "multipliers": {
        "m": {"constant": 1, "trig": {"2": 0.5}, "indicator": [1.0, 2.0],
              "piecewise_linear": {"knots": [0, "pi:1"], "values": [0, 1]}}},
        "expression": {"T": "m"}}
    m = parse_config(json.dumps(cfg)).multipliers["m"]
    x = 1.5
    want = 1 + 0.5 * np.exp(2j * x) + 1 + M.piecewise_linear([0.0, math.pi], [0, 1])(x)
    assert m(x) == pytest.approx(want)
