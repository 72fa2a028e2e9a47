"""Sweep runner: assembly, eigensolve and gap estimation per (symbol, h) row."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Sequence

import jsonschema
import numpy as np

from .coherent import CoherentFrame
from .errors import AntiWickError, ConfigError, ValidationError
from .gaps import (SearchConfig, default_shells, lambda_ess_gap, lambda_gap, lambda_sup_ess_gap,
                   lambda_sup_gap, merged_infimum)
from .quantize import default_phase_grid
from .spectral import converge_bottom
from .symbols import Symbol, parse_symbol

SCHEMA_VERSION = 1
CSV_COLUMNS = ("symbol_id", "h", "N_b", "spec_bottom", "lambda", "lambda_ess", "lambda_sup",
               "lambda_sup_ess", "ratio", "ess_ratio", "converged", "caveats", "runtime_ms")
DEFAULT_H = tuple(float(v) for v in np.logspace(-3, 0, 7))
DEFAULT_LADDER = (64, 128, 256)
UNIFORMITY_BAND = 1.25  # calibration of this toolkit, not a derived constant

_SEMI = {"type": "object", "required": ["m", "rho", "N0"],
         "properties": {"m": {"type": "number"},
                        "rho": {"type": "number", "minimum": 0, "exclusiveMaximum": 0.5},
                        "N0": {"type": "integer", "minimum": 0}}}

SYMBOL_SCHEMA = {
    "type": "object",
    "required": ["id", "kind"],
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "kind": {"enum": ["constant", "polynomial", "abs_power", "radial"]},
        "dim": {"type": "integer", "minimum": 1, "maximum": 2},
        "value": {"type": "number", "minimum": 0},
        "coeffs": {"type": "array"},
        "poly": {"type": "array"},
        "beta": {"type": "number"},
        "scale": {"type": "number"},
        "profile": {"enum": ["power", "gaussian", "exp_root"]},
        "offset": {"type": "number"},
        "decays": {"type": "boolean"},
        "ess_bottom": {"type": "object", "required": ["coeff"],
                       "properties": {"coeff": {"type": "number"}, "power": {"type": "number"}}},
        "semiclassical": _SEMI,
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["version", "symbols"],
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "symbols": {"type": "array", "minItems": 1, "items": SYMBOL_SCHEMA},
        "h": {"type": "array", "minItems": 1,
              "items": {"type": "number", "exclusiveMinimum": 0}},
        "ladder": {"type": "array", "minItems": 1,
                   "items": {"type": "integer", "minimum": 1, "maximum": 2048}},
        "grid": {"type": "object", "additionalProperties": False,
                 "properties": {"route": {"enum": ["auto", "polynomial", "radial", "quadrature"]},
                                "tail": {"type": "number", "exclusiveMinimum": 0},
                                "spacing_factor": {"type": "number", "exclusiveMinimum": 0}}},
        "search": {"type": "object", "additionalProperties": False,
                   "properties": {"half_width": {"type": "number", "exclusiveMinimum": 0},
                                  "coarse": {"type": "integer", "minimum": 2},
                                  "max_iter": {"type": "integer", "minimum": 1},
                                  "shells": {"type": "integer", "minimum": 1},
                                  "angles": {"type": "integer", "minimum": 1},
                                  "candidates": {"type": "integer", "minimum": 1},
                                  "cap": {"type": "number", "exclusiveMinimum": 0}}},
        "shell_factors": {"type": "array", "minItems": 3,
                          "items": {"type": "number", "exclusiveMinimum": 0}},
        "semiclassical_N": {"type": "integer", "minimum": 0},
        "output": {"type": "object", "additionalProperties": False,
                   "properties": {"dir": {"type": "string"},
                                  "format": {"enum": ["csv", "json"]},
                                  "stem": {"type": "string"}}},
        "workers": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "timings": {"type": "boolean"},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class GridPolicy:
    route: str = "auto"
    tail: float = 1e-12
    spacing_factor: float = 0.25  # phase-grid step in units of sqrt(h)


@dataclass
class SweepConfig:
    symbols: list
    h: tuple = DEFAULT_H
    ladder: tuple = DEFAULT_LADDER
    grid: GridPolicy = field(default_factory=GridPolicy)
    search: SearchConfig = field(default_factory=SearchConfig)
    shell_factors: tuple = (4.0, 8.0, 16.0, 32.0)
    semiclassical_N: int = 4
    out_dir: str = "."
    out_format: str = "csv"
    out_stem: str = "gap_report"
    workers: int = 1
    seed: int = 0
    timings: bool = False

    def __post_init__(self):
        if not self.symbols:
            raise ValidationError("sweep needs at least one symbol")
        if any(not h > 0 for h in self.h):
            raise ValidationError("all h must be positive")
        ids = [s["id"] for s in self.symbols]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate symbol ids in {ids}")
        self.h = tuple(float(v) for v in self.h)
        self.ladder = tuple(int(n) for n in self.ladder)


def _locate(text: str, path) -> Optional[int]:
    """Best-effort line of the last key or index on ``path`` in ``text``."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    needle = f'"{keys[-1]}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def config_from_dict(doc: dict, text: str = "") -> SweepConfig:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}", path, _locate(text, exc.absolute_path)) from None
    for i, rec in enumerate(doc["symbols"]):
        try:
            parse_symbol(rec)
        except (AntiWickError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"symbols/{i}: {exc}", f"symbols/{i}",
                              _locate(text, ["symbols", rec.get("id", "")])) from None
    out = doc.get("output", {})
    kw = dict(symbols=list(doc["symbols"]),
              grid=GridPolicy(**doc.get("grid", {})),
              search=SearchConfig(**doc.get("search", {})),
              out_dir=out.get("dir", "."), out_format=out.get("format", "csv"),
              out_stem=out.get("stem", "gap_report"))
    for key, attr in (("h", "h"), ("ladder", "ladder"), ("shell_factors", "shell_factors"),
                      ("semiclassical_N", "semiclassical_N"), ("workers", "workers"),
                      ("seed", "seed"), ("timings", "timings")):
        if key in doc:
            kw[attr] = tuple(doc[key]) if isinstance(doc[key], list) else doc[key]
    return SweepConfig(**kw)


def load_config(path) -> SweepConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    return config_from_dict(doc, text)


def standard_suite() -> list:
    """The default symbol records."""
    z2 = [[1, 1, 1.0]]
    x2 = [[2, 0, 0.25], [1, 1, 0.5], [0, 2, 0.25]]
    return [
        {"id": "one", "kind": "constant", "value": 1.0,
         "semiclassical": {"m": 0, "rho": 0, "N0": 0}},
        {"id": "z2", "kind": "polynomial", "coeffs": z2,
         "semiclassical": {"m": 0, "rho": 0, "N0": 3}},
        {"id": "x2", "kind": "polynomial", "coeffs": x2, "ess_bottom": {"coeff": 0.5, "power": 1},
         "semiclassical": {"m": 0, "rho": 0, "N0": 3}},
        {"id": "r-0.4", "kind": "radial", "profile": "power", "beta": -0.4, "decays": True},
        {"id": "r0.5", "kind": "radial", "profile": "power", "beta": 0.5},
        {"id": "r2", "kind": "radial", "profile": "power", "beta": 2.0},
        {"id": "z2+5", "kind": "polynomial", "coeffs": z2, "offset": 5.0},
    ]


def standard_config(**overrides) -> SweepConfig:
    return SweepConfig(symbols=standard_suite(), **overrides)


# --------------------------------------------------------------------------
# rows

@dataclass
class GapReport:
    symbol_id: str
    h: float
    N_b: int
    spec_bottom: float = math.nan
    lam: float = math.nan
    lam_ess: float = math.nan
    lam_sup: float = math.nan
    lam_sup_ess: float = math.nan
    ratio: Optional[float] = None
    ess_ratio: Optional[float] = None
    converged: bool = False
    monotone: bool = True
    caveats: tuple = ()
    runtime_ms: Optional[float] = None
    error: Optional[str] = None
    ess_reference: Optional[float] = None
    slack: Optional[float] = None
    history: tuple = ()

    def csv_row(self):
        return {"symbol_id": self.symbol_id, "h": _fmt(self.h), "N_b": str(self.N_b),
                "spec_bottom": _fmt(self.spec_bottom), "lambda": _fmt(self.lam),
                "lambda_ess": _fmt(self.lam_ess), "lambda_sup": _fmt(self.lam_sup),
                "lambda_sup_ess": _fmt(self.lam_sup_ess), "ratio": _fmt(self.ratio),
                "ess_ratio": _fmt(self.ess_ratio), "converged": "true" if self.converged else "false",
                "caveats": "; ".join(self.caveats + ((f"error: {self.error}",) if self.error else ())),
                "runtime_ms": _fmt(self.runtime_ms)}

    def to_json(self):
        d = asdict(self)
        d["caveats"] = list(self.caveats)
        d["history"] = [list(p) for p in self.history]
        return {k: _json_num(v) for k, v in d.items()}

    @classmethod
    def from_json(cls, d):
        kw = {k: (_from_json_num(v) if isinstance(v, str) and k not in ("symbol_id", "error") else v)
              for k, v in d.items()}
        kw["caveats"] = tuple(kw.get("caveats", ()))
        kw["history"] = tuple(tuple(p) for p in kw.get("history", ()))
        return cls(**kw)


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{v:.12g}"


def _json_num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def _from_json_num(v):
    return float(v) if v in ("nan", "inf", "-inf") else v


def _positive_ratio(num, den):
    if num is None or den is None or not (math.isfinite(num) and math.isfinite(den)) or den <= 0:
        return None
    return num / den


def _row_task(task: dict) -> dict:
    """Worker entry point: plain dicts in and out so it pickles cleanly."""
    cfg: SweepConfig = task["cfg"]
    rec, h, mode = task["record"], task["h"], task["mode"]
    t0 = time.perf_counter()
    report = GapReport(rec["id"], h, cfg.ladder[-1])
    try:
        _fill_row(report, parse_symbol(rec), h, cfg, mode)
    except (AntiWickError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
    if cfg.timings:
        report.runtime_ms = (time.perf_counter() - t0) * 1e3
    return report.to_json()


def _fill_row(rep: GapReport, sym: Symbol, h: float, cfg: SweepConfig, mode: str):
    caveats = []
    frame = CoherentFrame(h)
    gp = cfg.grid

    def policy(hh, n):
        return default_phase_grid(hh, n, frame, gp.tail, gp.spacing_factor * math.sqrt(hh))

    if mode != "gap":
        res = converge_bottom(sym, frame, cfg.ladder, gp.route, policy)
        rep.spec_bottom, rep.converged, rep.monotone = res.bottom, res.converged, res.monotone
        rep.history = res.history
        if not res.converged:
            caveats.append(f"bottom unconverged (last step {res.delta:.3g})")
        if not res.monotone:
            caveats.append("bottom not monotone along ladder")
    else:
        rep.converged = True

    shells = default_shells(h, cfg.shell_factors)
    ess = lambda_ess_gap(sym, h, shells, cfg.search)
    sup_ess = lambda_sup_ess_gap(sym, h, shells, cfg.search)
    lam = merged_infimum(lambda_gap(sym, h, cfg.search), ess)
    lam_sup = merged_infimum(lambda_sup_gap(sym, h, cfg.search), sup_ess)
    rep.lam, rep.lam_sup, rep.lam_ess, rep.lam_sup_ess = lam.value, lam_sup.value, ess.value, sup_ess.value
    caveats.append(lam.caveat)
    lam_cmp, sup_cmp = lam.value, lam_sup.value
    if sym.decays:
        # the infimum sits at infinity; compare on the disc the truncated basis resolves
        reach = math.sqrt(2 * h * cfg.ladder[-1])
        disc = SearchConfig(**{**_search_kw(cfg.search), "half_width": reach, "region": "disc"})
        lam_cmp = lambda_gap(sym, h, disc).value
        sup_cmp = lambda_sup_gap(sym, h, disc).value
        caveats.append(f"decaying symbol: ratio uses centres with |c| <= {reach:.6g}")
    ref = sym.analytic_ess_bottom(h)
    rep.ess_reference = ref

    if mode == "semiclassical":
        if sym.semiclassical is None:
            raise ValidationError(f"symbol {sym.name} has no semiclassical metadata")
        if h > 1:
            raise ValidationError(f"semiclassical rows need h <= 1, got {h}")
        N = cfg.semiclassical_N
        rep.slack = max(h ** N, 1e-12)
        rep.ratio = _positive_ratio(rep.spec_bottom, sup_cmp)
        rep.ess_ratio = _positive_ratio(ref, rep.lam_sup_ess)
        caveats.append(f"slack h^{N} = {rep.slack:.6g}")
    else:
        if sym.offset:
            # compare a - inf a, whose bottom is the unshifted one
            base_lam = lambda_gap(sym.base, h, cfg.search).value
            rep.ratio = _positive_ratio(rep.spec_bottom - sym.offset, base_lam)
            caveats.append(f"ratio uses a - {sym.offset:g}")
        else:
            rep.ratio = _positive_ratio(rep.spec_bottom, lam_cmp)
        rep.ess_ratio = _positive_ratio(ref, rep.lam_ess)
    if ess.diverging:
        caveats.append("lambda_ess diverges")
    rep.caveats = tuple(caveats)


def _search_kw(s: SearchConfig) -> dict:
    return {f.name: getattr(s, f.name) for f in fields(s) if f.init}


def _run(cfg: SweepConfig, mode: str) -> list:
    tasks = [{"cfg": cfg, "record": rec, "h": h, "mode": mode}
             for rec in cfg.symbols for h in cfg.h]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(_row_task, tasks))
    else:
        rows = [_row_task(t) for t in tasks]
    reports = [GapReport.from_json(r) for r in rows]
    return sorted(reports, key=lambda r: (r.symbol_id, r.h))


def run_sweep(cfg: SweepConfig) -> list:
    """One report per (symbol, h), merged in (symbol_id, h) order."""
    return _run(cfg, "sweep")


def run_gaps(cfg: SweepConfig) -> list:
    """Estimator columns only; spectral columns stay empty."""
    return _run(cfg, "gap")


def run_semiclassical(cfg: SweepConfig, N: Optional[int] = None) -> list:
    """Bottom versus the ball-sup functional, with an h^N slack column."""
    for rec in cfg.symbols:
        if "semiclassical" not in rec:
            raise ValidationError(f"symbol {rec['id']} has no semiclassical metadata")
    if any(h > 1 for h in cfg.h):
        raise ValidationError("semiclassical sweeps need h in (0, 1]")
    if N is not None:
        cfg = SweepConfig(**{**{f.name: getattr(cfg, f.name) for f in fields(cfg)},
                             "semiclassical_N": int(N)})
    return _run(cfg, "semiclassical")


def semiclassical_suite() -> list:
    return [r for r in standard_suite() if "semiclassical" in r]


# --------------------------------------------------------------------------
# output

def render_csv(reports: Sequence[GapReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def render_json(reports: Sequence[GapReport]) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "uniformity_band": UNIFORMITY_BAND,
           "rows": [r.to_json() for r in reports]}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def parse_json_report(text: str) -> list:
    return [GapReport.from_json(r) for r in json.loads(text)["rows"]]


def emit_report(reports: Sequence[GapReport], out_dir, fmt: str = "csv",
                stem: str = "gap_report") -> str:
    """Write the reports and return the file path."""
    if not reports:
        raise ValidationError("no reports to write")
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown format {fmt!r}")
    text = render_csv(reports) if fmt == "csv" else render_json(reports)
    path = os.path.join(out_dir, f"{stem}.{fmt}")
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def shell_profile_csv(profile) -> str:
    """Long-form (shell_radius, value) export of a shell profile."""
    lines = ["shell_radius,value"] + [f"{R:.12g},{v:.12g}" for R, v, _ in profile]
    return "\n".join(lines) + "\n"


def failed(reports) -> bool:
    return any(r.error for r in reports)
