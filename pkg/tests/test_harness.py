import csv
import io
import json
from pathlib import Path

import pytest

from antiwick.errors import ConfigError, ValidationError
from antiwick.harness import (CSV_COLUMNS, SweepConfig, config_from_dict, emit_report, failed,
                              load_config, parse_json_report, render_csv, render_json, run_gaps,
                              run_semiclassical, run_sweep, semiclassical_suite, standard_suite)

Z2 = {"id": "z2", "kind": "polynomial", "coeffs": [[1, 1, 1.0]]}
CONFIGS = Path(__file__).resolve().parents[1] / "configs"
ONE = {"id": "one", "kind": "constant", "value": 1.0}


def small(symbols, **kw):
    kw.setdefault("h", (0.1, 1.0))
    kw.setdefault("ladder", (16, 32))
    return SweepConfig(symbols=symbols, **kw)


@pytest.fixture(scope="module")
def rows():
    recs = [r for r in standard_suite() if r["id"] in ("one", "z2", "x2", "z2+5")]
    return run_sweep(small(recs))


def by_id(reports, sid):
    return [r for r in reports if r.symbol_id == sid]


def test_row_order(rows):
    keys = [(r.symbol_id, r.h) for r in rows]
    assert keys == sorted(keys) and len(keys) == 8


def test_constant_ratio_one(rows):
    for r in by_id(rows, "one"):
        assert r.ratio == pytest.approx(1.0, abs=1e-12) and r.converged


def test_modulus_squared_ratio(rows):
    for r in by_id(rows, "z2"):
        assert r.spec_bottom == pytest.approx(2 * r.h, rel=1e-10)
        assert r.ratio == pytest.approx(4.0, rel=1e-3)
        assert r.ess_ratio is None


def test_x_squared_ess(rows):
    for r in by_id(rows, "x2"):
        assert r.ess_reference == pytest.approx(r.h / 2)
        assert r.ess_ratio == pytest.approx(2.0, rel=2e-2)


def test_offset_row(rows):
    for shifted, base in zip(by_id(rows, "z2+5"), by_id(rows, "z2")):
        assert shifted.spec_bottom - 5.0 == pytest.approx(base.spec_bottom, abs=1e-6)
        assert shifted.ratio == pytest.approx(base.ratio, rel=1e-6)
        assert any("a - 5" in c for c in shifted.caveats)


def test_runtime_blank_by_default(rows):
    assert all(r.runtime_ms is None for r in rows)
    assert all(line.endswith(",") for line in render_csv(rows).splitlines()[1:])


def test_timings_filled():
    reps = run_gaps(small([ONE], h=(1.0,), timings=True))
    assert reps[0].runtime_ms > 0


def test_csv_header_and_determinism(rows):
    text = render_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    recs = [r for r in standard_suite() if r["id"] in ("one", "z2", "x2", "z2+5")]
    assert render_csv(run_sweep(small(recs))) == text
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert parsed[0]["converged"] in ("true", "false")


def test_json_round_trip(rows):
    back = parse_json_report(render_json(rows))
    assert render_csv(back) == render_csv(rows)
    doc = json.loads(render_json(rows))
    assert doc["schema_version"] == 1 and "uniformity_band" in doc


def test_infinite_values_survive_json():
    reps = run_gaps(small([Z2], h=(1.0,)))
    assert reps[0].lam_ess == float("inf")
    assert parse_json_report(render_json(reps))[0].lam_ess == float("inf")


def test_row_isolation():
    bad = {"id": "boom", "kind": "radial", "profile": "exp_root", "scale": 1e6}
    reps = run_sweep(small([bad, ONE], h=(1.0,)))
    assert failed(reps)
    boom, one = by_id(reps, "boom")[0], by_id(reps, "one")[0]
    assert boom.error and "error:" in boom.csv_row()["caveats"]
    assert one.error is None and one.ratio == pytest.approx(1.0)


def test_gap_mode_skips_bottom():
    r = run_gaps(small([Z2], h=(0.5,)))[0]
    assert r.spec_bottom != r.spec_bottom and r.lam == pytest.approx(0.25, rel=1e-3)


def test_semiclassical_rows():
    cfg = small(semiclassical_suite(), h=(0.01, 0.1))
    reps = run_semiclassical(cfg, N=3)
    for r in reps:
        assert r.slack == pytest.approx(max(r.h ** 3, 1e-12))
        assert any("slack" in c for c in r.caveats)
    for r in by_id(reps, "z2"):
        assert r.ratio == pytest.approx(2.0, rel=2e-2)


def test_semiclassical_validation():
    with pytest.raises(ValidationError):
        run_semiclassical(small([Z2]))
    with pytest.raises(ValidationError):
        run_semiclassical(small(semiclassical_suite(), h=(2.0,)))


def test_workers_agree():
    cfg = small([ONE, Z2], h=(1.0,))
    one = render_csv(run_gaps(cfg))
    cfg.workers = 2
    assert render_csv(run_gaps(cfg)) == one


def test_sweep_config_validation():
    with pytest.raises(ValidationError):
        SweepConfig(symbols=[])
    with pytest.raises(ValidationError):
        SweepConfig(symbols=[ONE, ONE])
    with pytest.raises(ValidationError):
        SweepConfig(symbols=[ONE], h=(0.0,))


@pytest.mark.parametrize("doc,where", [
    ({"version": 2, "symbols": [ONE]}, "version"),
    ({"version": 1, "symbols": [{"id": "a", "kind": "spline"}]}, "symbols/0/kind"),
    ({"version": 1, "symbols": [ONE], "h": [-1.0]}, "h/0"),
    ({"version": 1, "symbols": [ONE], "extra": 1}, "<root>"),
    ({"version": 1, "symbols": [{"id": "p", "kind": "polynomial", "coeffs": [[1, 0, 1.0]]}]},
     "symbols/0"),
])
def test_config_errors(doc, where):
    with pytest.raises(ConfigError) as info:
        config_from_dict(doc)
    assert info.value.path.startswith(where)


def test_config_error_line(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{\n "version": 1,\n "symbols": [\n  {"id": "a", "kind": "spline"}\n ]\n}\n')
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert info.value.line == 4


def test_malformed_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"version": 1,\n')
    with pytest.raises(ConfigError):
        load_config(p)


def test_shipped_configs_load():
    for name in ("standard_suite", "semiclassical"):
        cfg = load_config(CONFIGS / f"{name}.json")
        assert cfg.symbols


def test_emit(tmp_path, rows):
    path = emit_report(rows, tmp_path / "out", "json", "r")
    assert path.endswith("r.json")
    with pytest.raises(ValidationError):
        emit_report(rows, tmp_path, "xml")
    with pytest.raises(ValidationError):
        emit_report([], tmp_path)
