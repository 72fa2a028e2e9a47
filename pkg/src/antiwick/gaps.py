"""Ball-average functionals of a symbol that bracket the bottom of the spectrum.

All infima over ball centres are computed by a deterministic coarse scan of a
bounded region followed by Nelder-Mead refinement of the best candidates, so
each value is an upper estimate of the true infimum over that region.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import ValidationError
from .symbols import Symbol, _sphere_dirs, ball_averages, ball_sups, ball_volume


@dataclass(frozen=True)
class SearchConfig:
    """Centre-search settings.

    ``half_width`` None means max(10, 10 * radius).  ``region`` is "box"
    (|c_i| <= S) or "disc" (|c| <= S).
    """

    half_width: Optional[float] = None
    coarse: int = 41
    max_iter: int = 200
    shells: int = 32
    angles: int = 64
    region: str = "box"
    candidates: int = 3
    cap: float = 1e12
    growth_factor: float = 10.0
    shell_radii: int = 9
    shell_angles: int = 64
    method: str = field(default="nelder-mead", init=False)

    def __post_init__(self):
        if self.half_width is not None and not self.half_width > 0:
            raise ValidationError("search half-width must be positive")
        if self.coarse < 2 or self.max_iter < 1:
            raise ValidationError("coarse grid needs >= 2 points and iterations >= 1")
        if self.region not in ("box", "disc"):
            raise ValidationError(f"unknown search region {self.region!r}")

    def width(self, radius: float) -> float:
        return self.half_width if self.half_width is not None else max(10.0, 10.0 * radius)


@dataclass(frozen=True)
class GapEstimate:
    value: float
    center: tuple
    caveat: str = ""


@dataclass(frozen=True)
class ShellEstimate:
    value: float
    profile: tuple  # (shell radius, value, argmin centre)
    diverging: bool = False
    caveat: str = ""

    @property
    def finite(self):
        return math.isfinite(self.value)


@dataclass(frozen=True)
class GapValues:
    """All four functionals at one h."""

    lam: GapEstimate
    lam_ess: ShellEstimate
    lam_sup: GapEstimate
    lam_sup_ess: ShellEstimate
    c_r: dict = field(default_factory=dict)

    def __post_init__(self):
        tol = 1e-9
        if self.lam.value > self.lam_ess.value + tol * max(1.0, abs(self.lam.value)):
            raise ValidationError("lambda exceeds lambda_ess")
        if self.lam.value > self.lam_sup.value + tol * max(1.0, abs(self.lam.value)):
            raise ValidationError("lambda exceeds lambda_sup")


Functional = Callable[[np.ndarray], np.ndarray]


def _mean_functional(sym, radius, h, cfg) -> Functional:
    return lambda c: ball_averages(sym, c, radius, h, cfg.shells, cfg.angles)


def _sup_functional(sym, radius, h, cfg) -> Functional:
    return lambda c: ball_sups(sym, c, radius, h, cfg.shells, cfg.angles)


def _best(values, centers, k):
    """Indices of the k smallest values; ties broken by lexicographic centre."""
    keys = [tuple(c) for c in centers]
    order = sorted(range(len(values)), key=lambda i: (values[i], keys[i]))
    return order[:k]


def _refine(fn: Functional, start, step, project, max_iter):
    """Nelder-Mead from a fixed simplex; returns (value, centre)."""
    n = len(start)

    def obj(c):
        return float(fn(project(c)[None, :])[0])

    simplex = np.vstack([start] + [start + step * np.eye(n)[i] for i in range(n)])
    res = minimize(obj, start, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxiter": max_iter,
                            "xatol": 1e-9 * max(1.0, step), "fatol": 1e-14})
    c = project(res.x)
    return obj(c), c


def _search(fn: Functional, candidates: np.ndarray, project, step, cfg: SearchConfig):
    vals = fn(candidates)
    best_val, best_c = math.inf, None
    for i in _best(vals, candidates, cfg.candidates):
        v, c = float(vals[i]), candidates[i]
        if v < best_val or (v == best_val and tuple(c) < tuple(best_c)):
            best_val, best_c = v, c
        rv, rc = _refine(fn, candidates[i], step, project, cfg.max_iter)
        if rv < best_val or (rv == best_val and tuple(rc) < tuple(best_c)):
            best_val, best_c = rv, rc
    return best_val, np.asarray(best_c)


def _region_candidates(dim, S, cfg: SearchConfig):
    n = cfg.coarse if dim == 1 else min(cfg.coarse, 11)
    axis = np.linspace(-S, S, n)
    grids = np.meshgrid(*([axis] * (2 * dim)), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    step = axis[1] - axis[0]
    if cfg.region == "disc":
        pts = pts[np.linalg.norm(pts, axis=1) <= S]
        if dim == 1:
            th = 2 * np.pi * np.arange(4 * n) / (4 * n)
            pts = np.vstack([pts, S * np.stack([np.cos(th), np.sin(th)], axis=-1)])

        def project(c):
            r = np.linalg.norm(c)
            return c if r <= S else c * (S / r)
    else:
        def project(c):
            return np.clip(c, -S, S)
    return pts, step, project


def _infimum(fn: Functional, sym: Symbol, radius: float, cfg: SearchConfig, what: str):
    S = cfg.width(radius)
    cands, step, project = _region_candidates(sym.dim, S, cfg)
    val, c = _search(fn, cands, project, step, cfg)
    caveat = f"{what}: infimum restricted to {cfg.region} of half-width {S:.6g}"
    return GapEstimate(val, tuple(float(v) for v in c), caveat)


def lambda_gap(sym: Symbol, h: float, cfg: SearchConfig = SearchConfig()) -> GapEstimate:
    """inf over centres of the mean of ``sym`` on balls of radius sqrt(h)."""
    r = math.sqrt(h)
    return _infimum(_mean_functional(sym, r, h, cfg), sym, r, cfg, "lambda")


def lambda_sup_gap(sym: Symbol, h: float, cfg: SearchConfig = SearchConfig()) -> GapEstimate:
    """inf over centres of the sup of ``sym`` on balls of radius sqrt(h)."""
    r = math.sqrt(h)
    return _infimum(_sup_functional(sym, r, h, cfg), sym, r, cfg, "lambda_sup")


def c_r_profile(sym: Symbol, radii: Sequence[float], cfg: SearchConfig = SearchConfig(),
                h: float = 1.0) -> dict:
    """C_r = inf over centres of the mean on balls of radius r, for r in (0, 1].

    The r = 1 entry is the unit-ball quantity I_UP.
    """
    out = {}
    for r in radii:
        r = float(r)
        if not 0 < r <= 1:
            raise ValidationError(f"C_r radii must lie in (0, 1], got {r}")
        out[r] = _infimum(_mean_functional(sym, r, h, cfg), sym, r, cfg, "C_r").value
    return out


# --------------------------------------------------------------------------
# shell (liminf at infinity) estimators

def _annulus_candidates(dim, R, cfg: SearchConfig):
    radii = np.linspace(R, 2 * R, cfg.shell_radii)
    if dim == 1:
        th = 2 * np.pi * np.arange(cfg.shell_angles) / cfg.shell_angles
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    else:
        dirs = _sphere_dirs(dim, cfg.shell_angles)
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 2 * dim)

    def project(c):
        r = np.linalg.norm(c)
        if r == 0:
            return np.eye(2 * dim)[0] * R
        return c * (min(max(r, R), 2 * R) / r)

    step = R / (cfg.shell_radii - 1)
    return pts, step, project


def shell_profile(fn: Functional, dim: int, shells: Sequence[float], cfg: SearchConfig):
    shells = [float(s) for s in shells]
    if any(b <= a for a, b in zip(shells, shells[1:])):
        raise ValidationError(f"shell radii must increase strictly: {shells}")
    prof = []
    for R in shells:
        cands, step, project = _annulus_candidates(dim, R, cfg)
        v, c = _search(fn, cands, project, step, cfg)
        prof.append((R, v, tuple(float(t) for t in c)))
    return tuple(prof)


def _diverging(values, cfg: SearchConfig) -> bool:
    """Strictly increasing and either large growth or non-decelerating steps.

    Shell radii double, so any unbounded power-like growth keeps its steps
    from shrinking, while a profile approaching a limit halves them.
    """
    vals = np.asarray(values, dtype=float)
    if vals[-1] > cfg.cap:
        return True
    d = np.diff(vals)
    if not np.all(d > 1e-9 * np.maximum(1.0, np.abs(vals[1:]))):
        return False
    return bool(vals[-1] > cfg.growth_factor * vals[0] or np.all(d[1:] >= 0.99 * d[:-1]))


def _liminf(prof, cfg: SearchConfig, what: str) -> ShellEstimate:
    vals = [p[1] for p in prof]
    if _diverging(vals, cfg):
        return ShellEstimate(math.inf, prof, True, f"{what}: shell profile diverges")
    return ShellEstimate(min(vals[-2:]), prof, False,
                         f"{what}: liminf approximated by the last two shells")


def default_shells(h: float, factors=(4, 8, 16, 32)):
    return tuple(f * math.sqrt(h) for f in factors)


def lambda_ess_gap(sym: Symbol, h: float, shells: Optional[Sequence[float]] = None,
                   cfg: SearchConfig = SearchConfig()) -> ShellEstimate:
    shells = default_shells(h) if shells is None else shells
    if len(shells) < 3:
        raise ValidationError("need at least 3 shells")
    fn = _mean_functional(sym, math.sqrt(h), h, cfg)
    return _liminf(shell_profile(fn, sym.dim, shells, cfg), cfg, "lambda_ess")


def lambda_sup_ess_gap(sym: Symbol, h: float, shells: Optional[Sequence[float]] = None,
                       cfg: SearchConfig = SearchConfig()) -> ShellEstimate:
    shells = default_shells(h) if shells is None else shells
    if len(shells) < 3:
        raise ValidationError("need at least 3 shells")
    fn = _sup_functional(sym, math.sqrt(h), h, cfg)
    return _liminf(shell_profile(fn, sym.dim, shells, cfg), cfg, "lambda_sup_ess")


def discreteness_indicator(sym: Symbol, h: float, shells: Optional[Sequence[float]] = None,
                           cfg: SearchConfig = SearchConfig()):
    """Verdict on whether ball integrals of radius sqrt(h) blow up at infinity.

    "discrete" when the shell minima increase strictly and grow by more than
    ``cfg.growth_factor`` (or pass ``cfg.cap``); "not-discrete" when the last
    two shells agree within 10%; otherwise "inconclusive".
    """
    shells = default_shells(h) if shells is None else shells
    if len(shells) < 4:
        raise ValidationError("need at least 4 shells")
    r = math.sqrt(h)
    vol = ball_volume(sym.dim, r)
    fn = _mean_functional(sym, r, h, cfg)
    prof = tuple((R, v * vol, c) for R, v, c in shell_profile(fn, sym.dim, shells, cfg))
    vals = [p[1] for p in prof]
    if _diverging(vals, cfg):
        verdict = "discrete"
    elif abs(vals[-1] - vals[-2]) <= 0.1 * max(abs(vals[-1]), abs(vals[-2])):
        verdict = "not-discrete"
    else:
        verdict = "inconclusive"
    return verdict, prof


def merged_infimum(est: GapEstimate, shell: ShellEstimate) -> GapEstimate:
    """Infimum over every centre visited, box scan and shell scans together."""
    best = est
    for R, v, c in shell.profile:
        if v < best.value:
            best = GapEstimate(v, c, f"{est.caveat}; improved on shell {R:.6g}")
    return best


def gap_values(sym: Symbol, h: float, cfg: SearchConfig = SearchConfig(),
               shells: Optional[Sequence[float]] = None) -> GapValues:
    ess = lambda_ess_gap(sym, h, shells, cfg)
    sup_ess = lambda_sup_ess_gap(sym, h, shells, cfg)
    return GapValues(merged_infimum(lambda_gap(sym, h, cfg), ess), ess,
                     merged_infimum(lambda_sup_gap(sym, h, cfg), sup_ess), sup_ess)
