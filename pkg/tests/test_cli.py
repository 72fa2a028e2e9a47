import json

import pytest

from antiwick.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, build_parser, main

SMALL = {"version": 1, "h": [1.0], "ladder": [16, 24],
         "symbols": [{"id": "one", "kind": "constant", "value": 1.0,
                      "semiclassical": {"m": 0, "rho": 0, "N0": 0}},
                     {"id": "z2", "kind": "polynomial", "coeffs": [[1, 1, 1.0]]}]}


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(SMALL, indent=1))
    return str(p)


def run(*argv):
    return main(list(argv))


def test_sweep_csv(tmp_path, config, capsys):
    assert run("sweep", "--config", config, "--out", str(tmp_path)) == EXIT_OK
    path = capsys.readouterr().out.strip()
    lines = open(path).read().splitlines()
    assert path.endswith("gap_report.csv") and len(lines) == 3


def test_sweep_timings(tmp_path, config):
    assert run("sweep", "--config", config, "--out", str(tmp_path), "--timings") == EXIT_OK
    rows = (tmp_path / "gap_report.csv").read_text().splitlines()[1:]
    assert all(not r.endswith(",") for r in rows)


def test_gap_json(tmp_path, config):
    assert run("gap", "--config", config, "--out", str(tmp_path), "--format", "json") == EXIT_OK
    doc = json.loads((tmp_path / "gap_estimates.json").read_text())
    assert {r["symbol_id"] for r in doc["rows"]} == {"one", "z2"}


def test_semiclassical_needs_metadata(tmp_path, config, capsys):
    # z2 in the small config carries no metadata
    assert run("semiclassical", "--config", config, "--out", str(tmp_path)) == EXIT_CONFIG
    assert "no semiclassical metadata" in capsys.readouterr().err


def test_semiclassical(tmp_path):
    doc = dict(SMALL, symbols=SMALL["symbols"][:1])
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    assert run("semiclassical", "--config", str(p), "--out", str(tmp_path), "--N", "2") == EXIT_OK
    assert "slack h^2" in (tmp_path / "semiclassical_report.csv").read_text()


def test_quantize(tmp_path, config):
    assert run("quantize", "--config", config, "--out", str(tmp_path), "--h", "0.5",
               "--N-b", "8") == EXIT_OK
    assert (tmp_path / "operator_z2.txt").exists()


def test_ainfty(tmp_path, config):
    assert run("ainfty", "--config", config, "--out", str(tmp_path)) == EXIT_OK
    rows = json.loads((tmp_path / "ainfty.json").read_text())
    assert rows[0]["constant_estimate"] == pytest.approx(1.0)


def test_config_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n "version": 1,\n "symbols": [{"id": "a", "kind": "spline"}]\n}\n')
    assert run("sweep", "--config", str(p)) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "config error (line 3)" in err and "kind" in err


def test_missing_config(capsys):
    assert run("gap", "--config", "/nonexistent.json") == EXIT_CONFIG


def test_numeric_failure(tmp_path):
    doc = dict(SMALL, symbols=[{"id": "boom", "kind": "radial", "profile": "exp_root", "scale": 1e6}])
    p = tmp_path / "b.json"
    p.write_text(json.dumps(doc))
    assert run("sweep", "--config", str(p), "--out", str(tmp_path)) == EXIT_NUMERIC
    assert "error:" in (tmp_path / "gap_report.csv").read_text()


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
