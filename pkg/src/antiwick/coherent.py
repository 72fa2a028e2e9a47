"""Coherent states, the short-time Fourier transform V f(x, w) = <f, phi^h_{(x,w)}>,
and quadrature checks of Parseval, the reproducing formula, and the form Q_{a,h}.

Everything here is one-dimensional in configuration space (phase space R^2).
Spatial integrals use the trapezoid rule on a truncated box; phase-space sums
use cell-centred grids so no node sits on the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import erfc, gammaincc

from .errors import CoverageError, ShapeError, ValidationError
from .hermite import coherent_overlaps, hermite_functions, hermite_functions_h, mode_reach
from .symbols import Symbol, eval_symbol

PI_QUARTER = math.pi ** -0.25


@dataclass(frozen=True)
class SpatialGrid:
    L: float
    M: int

    def __post_init__(self):
        if self.M < 8:
            raise ValidationError(f"spatial grid needs at least 8 points, got {self.M}")
        if not self.L > 0:
            raise ValidationError("spatial half-width must be positive")

    @property
    def delta(self) -> float:
        return 2 * self.L / self.M

    @property
    def nodes(self) -> np.ndarray:
        return -self.L + self.delta * np.arange(self.M)

    @classmethod
    def auto(cls, h: float, n_modes: int = 1, center: float = 0.0, max_freq: float = 0.0,
             tail: float = 1e-12) -> "SpatialGrid":
        """Box holding the first ``n_modes`` h-Hermite modes about ``center``,
        sampled finely enough for transforms up to frequency ``max_freq``."""
        sh = math.sqrt(h)
        reach = math.sqrt(2 * mode_reach(n_modes, tail))
        L = abs(center) + sh * (reach + 6.0)
        band = max_freq + sh * (reach + 8.0)
        delta = min(sh / 4, math.pi * h / band)
        M = int(math.ceil(2 * L / delta))
        M += M % 2
        return cls(L, max(M, 8))


@dataclass(frozen=True)
class PhaseGrid:
    """Cell-centred rectangular grid on R^2 = (x, w)."""

    Lx: float
    Lw: float
    Mx: int
    Mw: int
    cx: float = 0.0
    cw: float = 0.0
    tail_mass: float = float("nan")

    def __post_init__(self):
        if self.Mx < 1 or self.Mw < 1 or not (self.Lx > 0 and self.Lw > 0):
            raise ValidationError("phase grid needs positive extents and counts")

    @property
    def dx(self):
        return 2 * self.Lx / self.Mx

    @property
    def dw(self):
        return 2 * self.Lw / self.Mw

    @property
    def cell_area(self):
        return self.dx * self.dw

    @property
    def xs(self):
        return self.cx - self.Lx + self.dx * (np.arange(self.Mx) + 0.5)

    @property
    def ws(self):
        return self.cw - self.Lw + self.dw * (np.arange(self.Mw) + 0.5)

    def mesh(self):
        return np.meshgrid(self.xs, self.ws, indexing="ij")

    @classmethod
    def auto(cls, h: float, n_modes: int = 1, center=(0.0, 0.0), spacing: Optional[float] = None,
             tail: float = 1e-12) -> "PhaseGrid":
        """Grid whose box contains the disc carrying all but ``tail`` of the
        phase-space mass of each of the first ``n_modes`` modes (recentred at
        ``center``)."""
        t = mode_reach(n_modes, tail)
        L = math.sqrt(2 * h * t)
        spacing = spacing or math.sqrt(h) / 4
        M = int(math.ceil(2 * L / spacing))
        M += M % 2  # even count keeps nodes off the centre
        return cls(L, L, M, M, float(center[0]), float(center[1]),
                   float(gammaincc(n_modes, L * L / (2 * h))))

    def mode_tail(self, n_modes: int, h: float) -> float:
        """Mass of mode n_modes-1 (centred at the grid centre) outside the box."""
        L = min(self.Lx, self.Lw)
        return float(gammaincc(n_modes, L * L / (2 * h)))


@dataclass(frozen=True)
class CoherentFrame:
    """Window plus semiclassical parameter.

    ``window=None`` is the Gaussian pi^{-1/4} exp(-x^2/2); otherwise it is a
    vector of coefficients in the (h = 1) Hermite basis.
    """

    h: float
    window: Optional[tuple] = None
    dim: int = 1

    def __post_init__(self):
        if not self.h > 0:
            raise ValidationError(f"h must be positive, got {self.h}")
        if self.dim != 1:
            raise ValidationError("coherent transforms are implemented for d = 1")
        if self.window is not None:
            c = np.asarray(self.window, dtype=complex)
            object.__setattr__(self, "window", tuple(c.tolist()))
        if abs(self.window_norm() - 1.0) > 1e-10:
            raise ValidationError(f"window must have unit L2 norm, got {self.window_norm()!r}")

    @classmethod
    def from_hermite(cls, h, coeffs, normalize=True):
        c = np.asarray(coeffs, dtype=complex)
        if normalize:
            c = c / np.linalg.norm(c)
        return cls(h, tuple(c.tolist()))

    @property
    def is_gaussian(self) -> bool:
        return self.window is None or (
            abs(self.window[0]) == 1.0 and not any(self.window[1:]))

    @property
    def window_degree(self) -> int:
        return 0 if self.window is None else len(self.window) - 1

    def window_values(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.window is None:
            return PI_QUARTER * np.exp(-0.5 * u * u) + 0j
        c = np.asarray(self.window)
        return np.tensordot(c, hermite_functions(len(c), u), axes=1)

    def window_norm(self) -> float:
        reach = math.sqrt(2 * mode_reach(self.window_degree + 1, 1e-16)) + 8
        u = np.linspace(-reach, reach, 4097)
        vals = np.abs(self.window_values(u)) ** 2
        return math.sqrt(float(np.sum(vals) * (u[1] - u[0])))

    def window_tail(self, U: float) -> float:
        """Mass of |window|^2 outside [-U, U]."""
        if self.window is None:
            return float(erfc(U))
        reach = max(U, math.sqrt(2 * mode_reach(self.window_degree + 1, 1e-16)) + 8)
        u = np.linspace(-reach, reach, 8193)
        dens = np.abs(self.window_values(u)) ** 2
        inside = np.abs(u) <= U
        return float(np.sum(dens[~inside]) * (u[1] - u[0]))

    def coherent_values(self, x0, w0, y) -> np.ndarray:
        """phi^h_{(x0,w0)}(y) for broadcastable x0, w0, y."""
        h = self.h
        return h ** -0.25 * np.exp(1j * w0 * y / h) * self.window_values((y - x0) / math.sqrt(h))


@dataclass
class StateVector:
    """A function on R, stored as grid samples or as h-Hermite coefficients."""

    grid: Optional[SpatialGrid] = None
    values: Optional[np.ndarray] = None
    coeffs: Optional[np.ndarray] = None
    basis_h: Optional[float] = None
    norm_cache: float = field(default=float("nan"))

    def __post_init__(self):
        if (self.values is None) == (self.coeffs is None):
            raise ValidationError("state needs exactly one of samples or Hermite coefficients")
        if self.values is not None:
            if self.grid is None:
                raise ValidationError("sampled state needs its grid")
            self.values = np.asarray(self.values, dtype=complex)
            if self.values.shape != (self.grid.M,):
                raise ShapeError(f"samples shape {self.values.shape} != grid size {self.grid.M}")
        else:
            if self.basis_h is None:
                raise ValidationError("Hermite state needs basis_h")
            self.coeffs = np.asarray(self.coeffs, dtype=complex)
        self.norm_cache = self._norm()

    @classmethod
    def from_samples(cls, grid, values):
        return cls(grid=grid, values=values)

    @classmethod
    def from_hermite(cls, coeffs, h):
        return cls(coeffs=coeffs, basis_h=float(h))

    @property
    def is_sampled(self):
        return self.values is not None

    def _norm(self):
        if self.values is not None:
            return math.sqrt(float(np.sum(np.abs(self.values) ** 2) * self.grid.delta))
        return float(np.linalg.norm(self.coeffs))

    def norm(self) -> float:
        return self.norm_cache

    def to_samples(self, grid: Optional[SpatialGrid] = None, max_freq: float = 0.0) -> "StateVector":
        if self.values is not None and (grid is None or grid == self.grid):
            return self
        if self.values is not None:
            raise ShapeError("resampling sampled states is not supported; build on the target grid")
        n = len(self.coeffs)
        grid = grid or SpatialGrid.auto(self.basis_h, n, max_freq=max_freq)
        vals = self.coeffs @ hermite_functions_h(n, grid.nodes, self.basis_h)
        return StateVector(grid=grid, values=vals)

    def scaled(self, c) -> "StateVector":
        if self.values is not None:
            return StateVector(grid=self.grid, values=c * self.values)
        return StateVector(coeffs=c * self.coeffs, basis_h=self.basis_h)


def hermite_state(h: float, coeffs, grid: Optional[SpatialGrid] = None) -> StateVector:
    """Samples of sum_n c_n psi^h_n on ``grid`` (auto-sized when omitted)."""
    return StateVector.from_hermite(coeffs, h).to_samples(grid)


def random_hermite_coeffs(rng: np.random.Generator, n_modes: int) -> np.ndarray:
    c = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
    return c / np.linalg.norm(c)


# --------------------------------------------------------------------------

def coherent_state(frame: CoherentFrame, x0: float, w0: float, grid: SpatialGrid) -> StateVector:
    """Samples of h^{-1/4} e^{i w0 x/h} phi((x - x0)/sqrt(h))."""
    h = frame.h
    sh = math.sqrt(h)
    right = grid.L - grid.delta - x0
    left = grid.L + x0
    U = min(left, right) / sh
    if U <= 0 or frame.window_tail(U) > 1e-8:
        U_need = 4.1
        while frame.window_tail(U_need) > 1e-8:
            U_need += 0.5
        raise CoverageError(
            f"grid half-width {grid.L} too small for a coherent state at x0={x0} (h={h}); "
            f"need L >= {abs(x0) + U_need * sh + grid.delta:.6g}",
            required_half_width=abs(x0) + U_need * sh + grid.delta)
    if grid.delta > sh / 2:
        raise CoverageError(f"grid spacing {grid.delta} does not resolve width sqrt(h)={sh}")
    return StateVector.from_samples(grid, frame.coherent_values(x0, w0, grid.nodes))


def _check_compatible(frame: CoherentFrame, f: StateVector, wmax: float):
    g = f.grid
    band = wmax + 6 * math.sqrt(frame.h) * (1 + math.sqrt(frame.window_degree))
    if g.delta * band / frame.h > math.pi:
        raise ShapeError(
            f"spatial spacing {g.delta:.4g} cannot resolve frequencies up to {wmax:.4g} at h={frame.h}")


def stft_points(frame: CoherentFrame, f: StateVector, x, w) -> np.ndarray:
    """<f, phi^h_{(x,w)}> at arbitrary broadcastable points (x, w)."""
    x, w = np.broadcast_arrays(np.asarray(x, float), np.asarray(w, float))
    if not f.is_sampled:
        f = f.to_samples(max_freq=float(np.max(np.abs(w), initial=0.0)))
    _check_compatible(frame, f, float(np.max(np.abs(w), initial=0.0)))
    y = f.grid.nodes
    out = np.empty(x.shape, dtype=complex)
    flat_x, flat_w = x.reshape(-1), w.reshape(-1)
    res = out.reshape(-1)
    step = max(1, 2_000_000 // len(y))
    for lo in range(0, len(flat_x), step):
        hi = min(len(flat_x), lo + step)
        phi = frame.coherent_values(flat_x[lo:hi, None], flat_w[lo:hi, None], y[None, :])
        res[lo:hi] = (np.conj(phi) @ f.values) * f.grid.delta
    return out


def stft(frame: CoherentFrame, f: StateVector, pgrid: PhaseGrid) -> np.ndarray:
    """Matrix V[j, k] = <f, phi^h_{(x_j, w_k)}> over ``pgrid`` by spatial quadrature.

    The central phase e^{it} of the Heisenberg group action is dropped.
    """
    wmax = float(np.max(np.abs(pgrid.ws)))
    if not f.is_sampled:
        f = f.to_samples(max_freq=wmax)
    _check_compatible(frame, f, wmax)
    h = frame.h
    y = f.grid.nodes
    # separable: V = delta h^{-1/4} [conj(window)((y - x_j)/sqrt h) f(y)] @ e^{-i w_k y / h}
    G = np.conj(frame.window_values((y[None, :] - pgrid.xs[:, None]) / math.sqrt(h))) * f.values[None, :]
    E = np.exp(-1j * np.outer(y, pgrid.ws) / h)
    return (G @ E) * (f.grid.delta * h ** -0.25)


def _phase_norm2(V, pgrid, h):
    return float(np.sum(np.abs(V) ** 2) * pgrid.cell_area / (2 * math.pi * h))


def parseval_defect(frame: CoherentFrame, f: StateVector, pgrid: PhaseGrid) -> float:
    """Relative defect |(2 pi h)^{-1} sum |Vf|^2 dA - |f|^2| / |f|^2."""
    n2 = f.norm() ** 2
    if n2 == 0:
        return 0.0
    V = stft(frame, f, pgrid)
    return abs(_phase_norm2(V, pgrid, frame.h) - n2) / n2


def overlap_kernel(frame: CoherentFrame, x, w, xp, wp) -> np.ndarray:
    """K = <phi^h_{(xp,wp)}, phi^h_{(x,w)}> (Gaussian window closed form)."""
    h = frame.h
    if not frame.is_gaussian:
        raise ValidationError("closed-form overlap kernel needs the Gaussian window")
    return np.exp(-((x - xp) ** 2 + (w - wp) ** 2) / (4 * h)) * \
        np.exp(1j * (wp - w) * (x + xp) / (2 * h))


def default_probes(pgrid: PhaseGrid, n: int = 3) -> np.ndarray:
    """Deterministic probe points in the central half of ``pgrid``."""
    fr = (np.arange(n) + 0.5) / n - 0.5
    px = pgrid.cx + fr * pgrid.Lx
    pw = pgrid.cw + fr * pgrid.Lw
    X, W = np.meshgrid(px, pw, indexing="ij")
    return np.stack([X.ravel(), W.ravel()], axis=-1)


def reproducing_defect(frame: CoherentFrame, f: StateVector, pgrid: PhaseGrid,
                       probes: Optional[np.ndarray] = None) -> float:
    """max over probes of |Vf(z) - (2 pi h)^{-1} sum_z' Vf(z') K(z, z') dA|."""
    if f.norm() == 0:
        return 0.0
    h = frame.h
    probes = default_probes(pgrid) if probes is None else np.atleast_2d(probes)
    V = stft(frame, f, pgrid)
    X, W = pgrid.mesh()
    direct = stft_points(frame, f, probes[:, 0], probes[:, 1])
    worst = 0.0
    for (px, pw), v in zip(probes, direct):
        if frame.is_gaussian:
            K = overlap_kernel(frame, px, pw, X, W)
        else:
            g = coherent_state(frame, px, pw, SpatialGrid.auto(
                h, frame.window_degree + 1, center=px, max_freq=float(np.max(np.abs(pgrid.ws)))))
            K = np.conj(stft(frame, g, pgrid))
        rec = np.sum(V * K) * pgrid.cell_area / (2 * math.pi * h)
        worst = max(worst, abs(v - rec))
    return float(worst)


def dilate(f: StateVector, h: float) -> StateVector:
    """Unitary dilation D_h f(x) = h^{1/4} f(sqrt(h) x).

    Sampled states are carried exactly onto the grid scaled by 1/sqrt(h);
    Hermite states change only the scale of their basis.
    """
    if not h > 0:
        raise ValidationError("dilation parameter must be positive")
    if f.is_sampled:
        g = SpatialGrid(f.grid.L / math.sqrt(h), f.grid.M)
        return StateVector.from_samples(g, h ** 0.25 * f.values)
    return StateVector.from_hermite(f.coeffs, f.basis_h / h)


def quadratic_form(sym: Symbol, frame: CoherentFrame, f: StateVector, pgrid: PhaseGrid) -> float:
    """(2 pi h)^{-1} sum a(x, w) |<f, phi^h_{(x,w)}>|^2 dA."""
    V = stft(frame, f, pgrid)
    X, W = pgrid.mesh()
    a = np.asarray(eval_symbol(sym, X, W, frame.h))
    return float(np.sum(a * np.abs(V) ** 2) * pgrid.cell_area / (2 * math.pi * frame.h))


# --------------------------------------------------------------------------
# state import/export

def _fmt(v):
    return f"{v:.12g}"


def save_state(path, f: StateVector, h: float):
    """Text export: a header line with L, M, d, h followed by 're im' rows."""
    if not f.is_sampled:
        raise ValidationError("export sampled states only")
    with open(path, "w") as fh:
        fh.write(f"# L={f.grid.L!r} M={f.grid.M} d=1 h={h!r}\n")
        for v in f.values:
            fh.write(f"{_fmt(v.real)} {_fmt(v.imag)}\n")


def load_state(path):
    """Inverse of :func:`save_state`; returns (state, h)."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValidationError(f"{path}: missing grid header")
        fields = dict(kv.split("=") for kv in header[1:].split())
        data = np.loadtxt(fh, ndmin=2)
    grid = SpatialGrid(float(fields["L"]), int(fields["M"]))
    return StateVector.from_samples(grid, data[:, 0] + 1j * data[:, 1]), float(fields["h"])
