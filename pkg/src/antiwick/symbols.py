"""Phase-space symbols, ball quadrature, and weight diagnostics.

A symbol is a nonnegative function a(x, w) on R^{2d} (optionally depending on
the semiclassical parameter h).  Points are arrays whose last axis has length
2d and is ordered (x_1..x_d, w_1..w_d).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, NumericError, ValidationError

Evaluator = Callable[[np.ndarray, np.ndarray, float], np.ndarray]

KINDS = ("generic", "polynomial", "abs_power", "radial", "constant")


@dataclass(frozen=True)
class Semiclassical:
    m: float
    rho: float
    N0: int

    def __post_init__(self):
        if not 0.0 <= self.rho < 0.5:
            raise ValidationError(f"rho must lie in [0, 1/2), got {self.rho}")
        if self.N0 < 0:
            raise ValidationError(f"N0 must be a natural number, got {self.N0}")


@dataclass(frozen=True, eq=False)
class Symbol:
    """A nonnegative phase-space symbol.

    ``evaluator(x, w, h)`` receives arrays of shape (..., d) and returns an
    array of shape (...).  ``offset`` records a known additive constant
    (a = base + offset) so that spectral comparisons can be made for
    ``a - inf a``; ``base`` is then the symbol without it.
    """

    dim: int
    evaluator: Evaluator
    kind: str = "generic"
    params: dict = field(default_factory=dict)
    h_dependent: bool = False
    semiclassical: Optional[Semiclassical] = None
    name: str = "a"
    offset: float = 0.0
    base: Optional["Symbol"] = None
    decays: bool = False
    ess_bottom: Optional[tuple] = None
    record: Optional[dict] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"dim must be positive, got {self.dim}")
        if self.kind not in KINDS:
            raise ValidationError(f"unknown symbol kind {self.kind!r}")

    def __call__(self, x, w, h=1.0):
        return eval_symbol(self, x, w, h)

    def analytic_ess_bottom(self, h: float) -> Optional[float]:
        """Known bottom of the essential spectrum at h, when declared."""
        if self.ess_bottom is None:
            return None
        coeff, power = self.ess_bottom
        return float(coeff) * h ** float(power)


# --------------------------------------------------------------------------
# evaluation

def _split_point(x, w, dim):
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if dim == 1:
        if x.ndim == 0 or x.shape[-1:] != (1,):
            x = x[..., None]
        if w.ndim == 0 or w.shape[-1:] != (1,):
            w = w[..., None]
    if x.shape[-1] != dim or w.shape[-1] != dim:
        raise ValidationError(f"expected trailing axis of length {dim}")
    return np.broadcast_arrays(x, w)


def eval_symbol(sym: Symbol, x, w, h: float = 1.0):
    """Evaluate ``sym`` at (x, w).  Scalars in, scalar out for d = 1."""
    if h <= 0:
        raise ValidationError(f"h must be positive, got {h}")
    scalar = np.ndim(x) == 0 and np.ndim(w) == 0
    xa, wa = _split_point(x, w, sym.dim)
    val = np.asarray(sym.evaluator(xa, wa, float(h)), dtype=float)
    if scalar or val.ndim == 0:
        return float(val.reshape(-1)[0]) if val.size == 1 else val
    return val


def eval_points(sym: Symbol, pts: np.ndarray, h: float) -> np.ndarray:
    """Evaluate on stacked phase-space points of shape (..., 2d)."""
    d = sym.dim
    return np.asarray(sym.evaluator(pts[..., :d], pts[..., d:], float(h)), dtype=float)


def _raise_singular(mask, x, w, what):
    idx = np.argwhere(mask)[0]
    xp = x[tuple(idx)]
    wp = w[tuple(idx)]
    raise DomainError(f"{what} evaluated on its singular set at x={xp.tolist()}, w={wp.tolist()}")


def constant(c: float, dim: int = 1, name: Optional[str] = None) -> Symbol:
    c = float(c)
    if c < 0 or not math.isfinite(c):
        raise ValidationError(f"constant symbol must be finite and nonnegative, got {c}")

    def ev(x, w, h):
        return np.full(np.broadcast_shapes(x.shape[:-1], w.shape[:-1]), c)

    return Symbol(dim, ev, "constant", {"value": c}, name=name or f"{c:g}",
                  ess_bottom=(c, 0.0),
                  record={"kind": "constant", "value": c, "dim": dim})


def _as_multi(idx, dim):
    if isinstance(idx, (int, np.integer)):
        idx = (int(idx),)
    idx = tuple(int(i) for i in idx)
    if len(idx) != dim or any(i < 0 for i in idx):
        raise ValidationError(f"bad multi-index {idx} for dim {dim}")
    return idx


def _as_complex(c):
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise ValidationError(f"complex coefficient must be [re, im], got {c}")
        return complex(float(c[0]), float(c[1]))
    return complex(c)


def check_hermitian_table(table, tol: float = 1e-14):
    """Raise unless c_{ab} = conj(c_{ba}) for every entry of the table."""
    lookup = {}
    for a, b, c in table:
        lookup[(a, b)] = lookup.get((a, b), 0j) + c
    for (a, b), c in lookup.items():
        partner = lookup.get((b, a), 0j)
        if abs(c - partner.conjugate()) > tol * max(1.0, abs(c)):
            raise ValidationError(
                f"non-Hermitian coefficient table: c[{a},{b}]={c} but c[{b},{a}]={partner}")


def polynomial(coeffs, dim: int = 1, name: Optional[str] = None) -> Symbol:
    """Polynomial symbol sum c_ab z^a conj(z)^b with z = x + i w.

    ``coeffs`` is a sequence of (alpha, beta, c) triples; multi-indices may be
    plain integers when dim == 1.
    """
    table = tuple((_as_multi(a, dim), _as_multi(b, dim), _as_complex(c)) for a, b, c in coeffs)
    if not table:
        raise ValidationError("empty coefficient table")
    check_hermitian_table(table)
    degree = max(sum(a) + sum(b) for a, b, _ in table)

    def ev(x, w, h):
        z = x + 1j * w
        zc = np.conj(z)
        out = np.zeros(np.broadcast_shapes(x.shape, w.shape)[:-1], dtype=complex)
        for a, b, c in table:
            term = np.full(out.shape, c, dtype=complex)
            for j in range(dim):
                if a[j]:
                    term = term * z[..., j] ** a[j]
                if b[j]:
                    term = term * zc[..., j] ** b[j]
            out += term
        return out.real

    rec = {"kind": "polynomial", "dim": dim,
           "coeffs": [[list(a), list(b), [c.real, c.imag]] for a, b, c in table]}
    return Symbol(dim, ev, "polynomial", {"table": table, "degree": degree},
                  name=name or "poly", record=rec)


def _poly_real(terms, pts_x, pts_w, dim):
    out = np.zeros(np.broadcast_shapes(pts_x.shape, pts_w.shape)[:-1])
    for exps, c in terms:
        t = np.full(out.shape, c)
        for j in range(dim):
            if exps[j]:
                t = t * pts_x[..., j] ** exps[j]
            if exps[dim + j]:
                t = t * pts_w[..., j] ** exps[dim + j]
        out = out + t
    return out


def abs_power(terms, beta: float, dim: int = 1, name: Optional[str] = None) -> Symbol:
    """|P(x, w)|^beta for a real polynomial P.

    ``terms`` is a sequence of (exponents, coefficient) with exponents a tuple
    of length 2d ordered (x_1..x_d, w_1..w_d).
    """
    terms = tuple((tuple(int(e) for e in ex), float(c)) for ex, c in terms)
    for ex, _ in terms:
        if len(ex) != 2 * dim or any(e < 0 for e in ex):
            raise ValidationError(f"bad exponent tuple {ex} for dim {dim}")
    beta = float(beta)

    def ev(x, w, h):
        p = np.abs(_poly_real(terms, x, w, dim))
        if beta < 0:
            zero = p == 0
            if np.any(zero):
                xb, wb = np.broadcast_arrays(x, w)
                _raise_singular(zero, xb, wb, "abs_power symbol")
        return p ** beta

    rec = {"kind": "abs_power", "dim": dim, "beta": beta,
           "poly": [[list(ex), c] for ex, c in terms]}
    return Symbol(dim, ev, "abs_power", {"terms": terms, "beta": beta},
                  name=name or f"|P|^{beta:g}", record=rec)


def _profile(profile: str, beta: float, scale: float):
    if profile == "power":
        def g(s):
            if beta < 0 and np.any(s == 0):
                raise DomainError("radial power profile evaluated at the origin")
            return s ** beta
    elif profile == "gaussian":
        def g(s):
            return np.exp(-scale * s)
    elif profile == "exp_root":
        def g(s):
            with np.errstate(over="ignore"):  # overflow surfaces as a NumericError downstream
                return np.exp(scale * np.sqrt(s))
    else:
        raise ValidationError(f"unknown radial profile {profile!r}")
    return g


def radial(profile="power", beta: float = 1.0, scale: float = 1.0, dim: int = 1,
           name: Optional[str] = None) -> Symbol:
    """a(x, w) = g(|x|^2 + |w|^2).

    ``profile`` is either a callable g or one of "power" (s**beta),
    "gaussian" (exp(-scale*s)) and "exp_root" (exp(scale*sqrt(s))).
    """
    if callable(profile):
        g = profile
        pname = getattr(profile, "__name__", "g")
        rec = None
    else:
        g = _profile(profile, float(beta), float(scale))
        pname = profile
        rec = {"kind": "radial", "dim": dim, "profile": profile, "beta": float(beta),
               "scale": float(scale)}

    def ev(x, w, h):
        s = np.sum(x * x, axis=-1) + np.sum(w * w, axis=-1)
        try:
            return g(s)
        except DomainError:
            zero = s == 0
            xb, wb = np.broadcast_arrays(x, w)
            _raise_singular(zero, xb, wb, "radial symbol")

    params = {"profile": g, "profile_name": pname, "beta": float(beta), "scale": float(scale)}
    return Symbol(dim, ev, "radial", params, name=name or f"radial-{pname}", record=rec)


def generic(fn: Evaluator, dim: int = 1, h_dependent: bool = False,
            name: str = "generic", **meta) -> Symbol:
    return Symbol(dim, fn, "generic", {}, h_dependent=h_dependent, name=name, **meta)


def shifted(sym: Symbol, c: float, name: Optional[str] = None) -> Symbol:
    """sym + c, remembering the shift (the base symbol stays accessible)."""
    c = float(c)
    base = sym.base if sym.base is not None else sym
    total = sym.offset + c
    if sym.kind == "polynomial":
        table = list(sym.params["table"]) + [((0,) * sym.dim, (0,) * sym.dim, complex(c))]
        out = polynomial(table, sym.dim)
        ev, params = out.evaluator, out.params
        rec = out.record
    else:
        def ev(x, w, h):
            return sym.evaluator(x, w, h) + c
        params = dict(sym.params)
        rec = None
    if sym.record is not None:
        rec = dict(sym.record)
        rec["offset"] = total
    kind = sym.kind if sym.kind in ("polynomial", "constant") else "generic"
    ess = None
    if base.ess_bottom is not None and base.ess_bottom[1] == 0.0:
        ess = (base.ess_bottom[0] + total, 0.0)
    return Symbol(sym.dim, ev, kind, params, sym.h_dependent, sym.semiclassical,
                  name or f"{base.name}+{total:g}", total, base, sym.decays, ess, rec)


def translated(sym: Symbol, v) -> Symbol:
    """a(. - v) for a phase-space vector v of length 2d."""
    v = np.asarray(v, dtype=float)
    d = sym.dim

    def ev(x, w, h):
        return sym.evaluator(x - v[:d], w - v[d:], h)

    return Symbol(d, ev, "generic", {}, sym.h_dependent, sym.semiclassical,
                  f"{sym.name}(.-{v.tolist()})")


def dilated(sym: Symbol, s: float) -> Symbol:
    """a(s .): polynomial and radial kinds keep their structure."""
    s = float(s)
    d = sym.dim
    if sym.kind == "constant":
        return sym
    if sym.kind == "polynomial":
        table = [(a, b, c * s ** (sum(a) + sum(b))) for a, b, c in sym.params["table"]]
        return polynomial(table, d, name=f"{sym.name}({s:g}.)")
    if sym.kind == "radial":
        g = sym.params["profile"]

        def gs(t):
            return g(s * s * t)

        out = radial(gs, dim=d, name=f"{sym.name}({s:g}.)")
        return out

    def ev(x, w, h):
        return sym.evaluator(s * x, s * w, h)

    return Symbol(d, ev, "generic", {}, sym.h_dependent, sym.semiclassical,
                  f"{sym.name}({s:g}.)")


def summed(a: Symbol, b: Symbol, alpha: float = 1.0, beta: float = 1.0) -> Symbol:
    if a.dim != b.dim:
        raise ValidationError("dimension mismatch")

    def ev(x, w, h):
        return alpha * a.evaluator(x, w, h) + beta * b.evaluator(x, w, h)

    return Symbol(a.dim, ev, "generic", {}, a.h_dependent or b.h_dependent,
                  name=f"{alpha:g}*{a.name}+{beta:g}*{b.name}")


# --------------------------------------------------------------------------
# ball quadrature

@dataclass(frozen=True)
class BallSpec:
    center: tuple
    radius: float
    shells: int = 32
    angles: int = 64
    frame_angle: float = 0.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError(f"ball radius must be positive, got {self.radius}")
        if self.shells < 1 or self.angles < 1:
            raise ValidationError("quadrature resolution must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self):
        return len(self.center) // 2

    def nodes(self) -> np.ndarray:
        unit = unit_ball_nodes(self.dim, self.shells, self.angles, self.frame_angle)
        return np.asarray(self.center) + self.radius * unit


def _sphere_dirs(dim: int, angles: int, frame_angle: float = 0.0) -> np.ndarray:
    if dim == 1:
        th = 2 * np.pi * (np.arange(angles) + 0.5) / angles + frame_angle
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    if dim == 2:
        # Hopf coordinates on S^3: the surface measure is uniform in
        # (sin^2 eta, theta1, theta2), so a midpoint product rule has equal weights.
        nt = max(4, int(round((2 * angles) ** (1 / 3))))
        nu = max(2, angles // (nt * nt))
        u = (np.arange(nu) + 0.5) / nu
        th = 2 * np.pi * (np.arange(nt) + 0.5) / nt + frame_angle
        U, T1, T2 = np.meshgrid(u, th, th, indexing="ij")
        c, s = np.sqrt(1 - U), np.sqrt(U)
        # ordering (x1, x2, w1, w2); the pair (x1, w1) and (x2, w2) rotate together
        return np.stack([c * np.cos(T1), s * np.cos(T2), c * np.sin(T1), s * np.sin(T2)],
                        axis=-1).reshape(-1, 4)
    raise ValidationError(f"ball quadrature implemented for d in (1, 2), got d={dim}")


@lru_cache(maxsize=64)
def _unit_nodes_cached(dim, shells, angles, frame_angle):
    n = 2 * dim
    # equal-volume shells, node at the volume midpoint of each shell
    r = ((np.arange(shells) + 0.5) / shells) ** (1.0 / n)
    dirs = _sphere_dirs(dim, angles, frame_angle)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    nodes.setflags(write=False)
    return nodes


def unit_ball_nodes(dim: int, shells: int, angles: int, frame_angle: float = 0.0) -> np.ndarray:
    """Equal-weight nodes for the open unit ball of R^{2d}, row-major in (shell, angle)."""
    return _unit_nodes_cached(int(dim), int(shells), int(angles), float(frame_angle))


@lru_cache(maxsize=16)
def _ring_cached(dim, angles, frame_angle, frac):
    ring = frac * _sphere_dirs(dim, angles, frame_angle)
    ring.setflags(write=False)
    return ring


def ball_volume(dim: int, radius: float) -> float:
    n = 2 * dim
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * radius ** n


def _chunks(n_centers, n_nodes, budget=2_000_000):
    step = max(1, budget // max(1, n_nodes))
    for lo in range(0, n_centers, step):
        yield lo, min(n_centers, lo + step)


def ball_values(sym: Symbol, centers, radius: float, h: float, shells=32, angles=64,
                frame_angle=0.0) -> np.ndarray:
    """Symbol values at the quadrature nodes: shape (n_centers, n_nodes)."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    unit = unit_ball_nodes(sym.dim, shells, angles, frame_angle)
    pts = centers[:, None, :] + radius * unit[None, :, :]
    return eval_points(sym, pts, h)


def ball_averages(sym: Symbol, centers, radius: float, h: float, shells=32, angles=64,
                  frame_angle=0.0) -> np.ndarray:
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    unit = unit_ball_nodes(sym.dim, shells, angles, frame_angle)
    out = np.empty(len(centers))
    for lo, hi in _chunks(len(centers), len(unit)):
        pts = centers[lo:hi, None, :] + radius * unit[None, :, :]
        vals = eval_points(sym, pts, h)
        out[lo:hi] = np.mean(vals, axis=1)
    if not np.all(np.isfinite(out)):
        raise NumericError(f"non-finite ball average for symbol {sym.name} (radius {radius})")
    return out


def ball_average(sym: Symbol, ball: BallSpec, h: float = 1.0) -> float:
    """Quadrature approximation of the mean of ``sym`` over ``ball``."""
    if ball.dim != sym.dim:
        raise ValidationError("ball and symbol dimensions differ")
    return float(ball_averages(sym, [ball.center], ball.radius, h, ball.shells, ball.angles,
                               ball.frame_angle)[0])


def ball_integral(sym: Symbol, ball: BallSpec, h: float = 1.0) -> float:
    return ball_average(sym, ball, h) * ball_volume(sym.dim, ball.radius)


def ball_sups(sym: Symbol, centers, radius: float, h: float, shells=32, angles=64,
              ring_frac=0.999) -> np.ndarray:
    """Max of ``sym`` over interior nodes plus a ring at ``ring_frac`` * radius."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    unit = np.concatenate([unit_ball_nodes(sym.dim, shells, angles),
                           _ring_cached(sym.dim, 4 * angles, 0.0, float(ring_frac))])
    out = np.empty(len(centers))
    for lo, hi in _chunks(len(centers), len(unit)):
        pts = centers[lo:hi, None, :] + radius * unit[None, :, :]
        out[lo:hi] = np.max(eval_points(sym, pts, h), axis=1)
    if not np.all(np.isfinite(out)):
        raise NumericError(f"non-finite ball sup for symbol {sym.name}")
    return out


# --------------------------------------------------------------------------
# Muckenhoupt diagnostics

@dataclass(frozen=True)
class AInftyReport:
    p: float
    constant_estimate: float
    n_balls_sampled: int
    worst_ball: Optional[BallSpec]
    radius_range: tuple

    def __post_init__(self):
        if self.constant_estimate < 1 - 1e-9:
            raise NumericError(f"A_p product below 1: {self.constant_estimate}")


def _ap_product(vals: np.ndarray, p: float) -> np.ndarray:
    """(mean w) * (mean w^{-1/(p-1)})^{p-1}, row-wise."""
    q = 1.0 / (p - 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        avg = np.mean(vals, axis=1)
        inv = np.mean(vals ** (-q), axis=1)
        prod = avg * inv ** (p - 1.0)
    flat = np.ptp(vals, axis=1) == 0
    prod = np.where(flat & (vals[:, 0] > 0), 1.0, prod)
    prod = np.where(np.isfinite(prod), prod, np.inf)
    # Jensen: the equal-weight product is >= 1; remove sub-ulp rounding only
    return np.maximum(prod, 1.0)


def ainfty_constant(sym: Symbol, p: float, centers, radii, h: float = 1.0,
                    shells: int = 32, angles: int = 64) -> AInftyReport:
    """Sampled A_p-type constant sup_B (avg w)(avg w^{-p'/p})^{p/p'}.

    A lower estimate of the true supremum over all balls; +inf when the
    negative power is not integrable on some sampled ball.
    """
    if not p > 1:
        raise ValidationError(f"p must exceed 1, got {p}")
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = [float(r) for r in radii]
    best, worst = -np.inf, None
    n = 0
    for r in radii:
        for lo, hi in _chunks(len(centers), shells * angles):
            try:
                vals = ball_values(sym, centers[lo:hi], r, h, shells, angles)
                prods = _ap_product(vals, p)
            except DomainError:
                prods = np.full(hi - lo, np.inf)
            n += hi - lo
            k = int(np.argmax(prods))
            if prods[k] > best:
                best = float(prods[k])
                worst = BallSpec(tuple(centers[lo + k]), r, shells, angles)
    return AInftyReport(float(p), best, n, worst, (min(radii), max(radii)))


def ainfty_sweep(sym: Symbol, centers, radii, h: float = 1.0, ps=(2.0, 4.0, 8.0),
                 shells: int = 32, angles: int = 64):
    """Per-exponent reports and the smallest sampled constant over ``ps``."""
    reports = {float(p): ainfty_constant(sym, p, centers, radii, h, shells, angles) for p in ps}
    best = min(reports.values(), key=lambda r: r.constant_estimate)
    return reports, best


@dataclass(frozen=True)
class GrowthFit:
    C: float
    N: float
    residual: float
    warning: bool
    radii: tuple
    integrals: tuple

    def __iter__(self):
        return iter((self.C, self.N))


def growth_check(sym: Symbol, radii: Sequence[float] = tuple(2.0 ** k for k in range(9)),
                 h: float = 1.0, shells: int = 64, angles: int = 64) -> GrowthFit:
    """Fit log int_{B(0,r)} a against log(1 + r).

    C is raised so that every sample satisfies int <= C (1+r)^N.  The warning
    flag marks fits whose log residual is large or whose local slope keeps
    climbing (super-polynomial growth).
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size == 0:
        raise ValidationError("radii must be nonempty")
    origin = np.zeros(2 * sym.dim)
    with np.errstate(over="ignore"):
        ints = np.array([ball_integral(sym, BallSpec(origin, r, shells, angles), h)
                         for r in radii])
    if np.any(ints <= 0):
        raise NumericError("ball integrals must be positive for a growth fit")
    X = np.log1p(radii)
    Y = np.log(ints)
    if radii.size == 1:
        N, c0 = 0.0, Y[0]
    else:
        N, c0 = np.polyfit(X, Y, 1)
    res = Y - (c0 + N * X)
    rms = float(np.sqrt(np.mean(res ** 2)))
    C = float(np.exp(c0 + max(0.0, res.max())))
    warn = rms > 0.5
    if radii.size >= 3:
        slopes = np.diff(Y) / np.diff(X)
        warn = warn or slopes[-1] > 1.5 * max(N, 1e-12)
    return GrowthFit(C, float(N), rms, bool(warn), tuple(radii), tuple(ints))


def doubling_ratios(sym: Symbol, centers, radius: float, h: float = 1.0, shells=32,
                    angles=64) -> np.ndarray:
    """int_{2B} a / int_B a for balls B(center, radius)."""
    n = 2 * sym.dim
    big = ball_averages(sym, centers, 2 * radius, h, shells, angles)
    small = ball_averages(sym, centers, radius, h, shells, angles)
    return big / small * 2.0 ** n


# --------------------------------------------------------------------------
# declarative records

def _semiclassical(rec):
    if rec is None:
        return None
    return Semiclassical(float(rec["m"]), float(rec["rho"]), int(rec["N0"]))


def parse_symbol(record: dict) -> Symbol:
    """Build a symbol from a config record (kind tag plus parameters)."""
    if not isinstance(record, dict) or "kind" not in record:
        raise ValidationError("symbol record must be an object with a 'kind' field")
    kind = record["kind"]
    dim = int(record.get("dim", 1))
    name = record.get("id")
    if kind == "constant":
        sym = constant(float(record["value"]), dim, name)
    elif kind == "polynomial":
        sym = polynomial(record["coeffs"], dim, name)
    elif kind == "abs_power":
        sym = abs_power(record["poly"], float(record["beta"]), dim, name)
    elif kind == "radial":
        sym = radial(record.get("profile", "power"), float(record.get("beta", 1.0)),
                     float(record.get("scale", 1.0)), dim, name)
    else:
        raise ValidationError(f"symbol kind {kind!r} is not constructible from a record")
    offset = float(record.get("offset", 0.0))
    if offset:
        sym = shifted(sym, offset, name)
    ess = record.get("ess_bottom")
    ess_t = (float(ess["coeff"]), float(ess.get("power", 1.0))) if ess else sym.ess_bottom
    rec = dict(record)
    return Symbol(sym.dim, sym.evaluator, sym.kind, sym.params, sym.h_dependent,
                  _semiclassical(record.get("semiclassical")), name or sym.name,
                  sym.offset, sym.base, bool(record.get("decays", False)), ess_t, rec)


def coeff_triples(sym: Symbol):
    """Serialize a polynomial table as (alpha, beta, [re, im]) triples."""
    if sym.kind != "polynomial":
        raise ValidationError("only polynomial symbols carry a coefficient table")
    return [[list(a), list(b), [c.real, c.imag]] for a, b, c in sym.params["table"]]
