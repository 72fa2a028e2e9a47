"""Matrices of anti-Wick operators in the h-scaled Hermite basis.

Three assembly routes:

* quadrature: phase-space sum of a(z) <psi_m, phi_z><phi_z, psi_n>;
* polynomial: sum c_ab A^a (A^+)^b with the ladder matrices A = sqrt(2h) b,
  A^+ = sqrt(2h) b^dagger (so Op(|z|^2) = A A^+ = diag(2h(n+1)));
* radial (d = 1): diagonal entries mu_n = E[g(2h T)], T ~ Gamma(n+1, 1).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .coherent import CoherentFrame, PhaseGrid, SpatialGrid, stft
from .errors import CoverageError, NumericError, ValidationError
from .hermite import coherent_overlaps, hermite_functions_h
from .symbols import Symbol, check_hermitian_table, eval_symbol


@dataclass(frozen=True, eq=False)
class HermiteOperator:
    N_b: int
    h: float
    dim: int
    matrix: np.ndarray
    assembly: str
    symbol_id: str = "a"
    exact_block: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.N_b, self.N_b):
            raise ValidationError(f"matrix shape {m.shape} != ({self.N_b}, {self.N_b})")
        if not np.all(np.isfinite(m)):
            raise NumericError("operator matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-10 * scale:
            raise ValidationError("operator matrix is not Hermitian")
        m.setflags(write=False)

    def __add__(self, other):
        if self.N_b != other.N_b or self.h != other.h:
            raise ValidationError("operators live on different bases")
        return HermiteOperator(self.N_b, self.h, self.dim, self.matrix + other.matrix,
                               self.assembly, f"{self.symbol_id}+{other.symbol_id}")

    def rayleigh(self, coeffs) -> float:
        c = np.asarray(coeffs, dtype=complex)
        return float(np.real(np.vdot(c, self.matrix @ c)) / np.vdot(c, c).real)


def _finish(M):
    M = 0.5 * (M + M.conj().T)
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if np.iscomplexobj(M) and np.max(np.abs(M.imag), initial=0.0) <= 1e-14 * scale:
        M = np.ascontiguousarray(M.real)
    return M


def _require_d1(sym: Symbol):
    if sym.dim != 1:
        raise ValidationError(f"Hermite assembly is implemented for d = 1 (got d = {sym.dim})")


def default_phase_grid(h: float, N_b: int, frame: Optional[CoherentFrame] = None,
                       tail: float = 1e-12, spacing: Optional[float] = None) -> PhaseGrid:
    extra = 0 if frame is None else frame.window_degree
    return PhaseGrid.auto(h, N_b + extra, spacing=spacing, tail=tail)


def _numeric_overlaps(frame: CoherentFrame, N_b: int, X, W) -> np.ndarray:
    """<psi^h_n, phi^h_z> for a non-Gaussian window, by spatial quadrature."""
    h = frame.h
    wmax = float(np.max(np.abs(W), initial=0.0))
    n = N_b + frame.window_degree
    # the integrand psi_n * conj(phi_z) lives where psi_n does
    grid = SpatialGrid.auto(h, n, max_freq=wmax)
    y = grid.nodes
    psi = hermite_functions_h(N_b, y, h)
    out = np.empty(X.shape + (N_b,), dtype=complex)
    for j in range(X.shape[0]):
        phi = frame.coherent_values(X[j][:, None], W[j][:, None], y[None, :])
        out[j] = (np.conj(phi) @ psi.T) * grid.delta
    return out


def assemble_quadrature(sym: Symbol, frame: CoherentFrame, N_b: int,
                        pgrid: Optional[PhaseGrid] = None) -> HermiteOperator:
    """Weak definition evaluated by a cell-centred phase-space sum."""
    _require_d1(sym)
    if N_b < 1:
        raise ValidationError("N_b must be at least 1")
    h = frame.h
    pgrid = pgrid or default_phase_grid(h, N_b, frame)
    n_reach = N_b + frame.window_degree
    tail = pgrid.mode_tail(n_reach, h)
    if tail > 1e-8:
        need = math.sqrt(2 * h * _reach(n_reach))
        raise CoverageError(
            f"phase grid half-width {min(pgrid.Lx, pgrid.Lw):.4g} leaves mass {tail:.2e} of "
            f"Hermite mode {N_b - 1} outside; need >= {need:.4g}", required_half_width=need)
    xs, ws = pgrid.xs, pgrid.ws
    M = np.zeros((N_b, N_b), dtype=complex)
    # rows of x are accumulated in a fixed order
    rows = max(1, 400_000 // (len(ws) * max(N_b, 1)))
    for lo in range(0, len(xs), rows):
        X, W = np.meshgrid(xs[lo:lo + rows], ws, indexing="ij")
        a = np.asarray(eval_symbol(sym, X, W, h), dtype=float).reshape(-1)
        if frame.is_gaussian:
            C = coherent_overlaps(N_b, X, W, h).reshape(-1, N_b)
            if frame.window is not None:
                C = C * np.conj(frame.window[0])
        else:
            C = _numeric_overlaps(frame, N_b, X, W).reshape(-1, N_b)
        M += (C.conj() * a[:, None]).T @ C
    M *= pgrid.cell_area / (2 * math.pi * h)
    meta = {"route": "quadrature", "grid": {"Lx": pgrid.Lx, "Lw": pgrid.Lw, "Mx": pgrid.Mx,
                                            "Mw": pgrid.Mw, "tail": tail}}
    return HermiteOperator(N_b, h, 1, _finish(M), "quadrature", sym.name, N_b, meta)


def _reach(n):
    from .hermite import mode_reach
    return mode_reach(n, 1e-12)


def ladder_matrices(size: int, h: float):
    """(A, A^+) with A = h d/dx + x = sqrt(2h) b on the first ``size`` modes."""
    A = np.diag(np.sqrt(2.0 * h * np.arange(1, size)), 1)
    return A, A.T.copy()


def assemble_polynomial(sym: Symbol, h: float, N_b: int, pad: bool = True) -> HermiteOperator:
    """Exact matrix of sum c_ab A^a (A^+)^b.

    With ``pad`` the ladder products are formed on N_b + degree modes before
    truncation, so the returned matrix is the exact compression of the
    operator onto the first N_b modes; without it only the leading
    N_b - degree block is exact.
    """
    _require_d1(sym)
    if sym.kind not in ("polynomial", "constant"):
        raise ValidationError(f"polynomial route needs a polynomial symbol, got {sym.kind}")
    if sym.kind == "constant":
        table = (((0,), (0,), complex(sym.params["value"])),)
    else:
        table = sym.params["table"]
    check_hermitian_table(table)
    g = max(sum(a) + sum(b) for a, b, _ in table)
    size = N_b + g if pad else N_b
    A, Ad = ladder_matrices(size, h)
    M = np.zeros((size, size), dtype=complex)
    for a, b, c in table:
        M += c * (np.linalg.matrix_power(A, a[0]) @ np.linalg.matrix_power(Ad, b[0]))
    M = M[:N_b, :N_b]
    exact = N_b if pad else max(0, N_b - g)
    meta = {"route": "polynomial", "degree": g, "padded": pad}
    return HermiteOperator(N_b, h, 1, _finish(M), "polynomial", sym.name, exact, meta)


@dataclass(frozen=True)
class RadialQuadrature:
    """Trapezoid rule in u = log t around the Gamma(n+1) peak.

    ``margin`` is the log-density drop at which the range is cut.
    """

    nodes: int = 801
    margin: float = 60.0


def _log_range(n: int, margin: float, power: float):
    k_lo = max(n + 1.0 + min(power, 0.0), 0.05)
    k_hi = n + 1.0 + max(power, 0.0)

    def drop(v, k):
        return k * (math.expm1(v) - v) - margin

    lo = brentq(drop, -margin / k_lo - 50.0, 0.0, args=(k_lo,))
    hi = brentq(drop, 0.0, 60.0, args=(k_hi,))
    return math.log(k_lo) + lo, math.log(k_hi) + hi


def radial_means(sym: Symbol, h: float, N_b: int, rquad: RadialQuadrature = RadialQuadrature()):
    """mu_n = int_0^inf g(2 h t) t^n e^{-t} / n! dt for n < N_b."""
    power = sym.params.get("beta", 0.0) if sym.params.get("profile_name") == "power" else 0.0
    mu = np.empty(N_b)
    for n in range(N_b):
        lo, hi = _log_range(n, rquad.margin, power)
        u = np.linspace(lo, hi, rquad.nodes)
        t = np.exp(u)
        s = 2.0 * h * t
        vals = np.asarray(eval_symbol(sym, np.sqrt(s), np.zeros_like(s), h), dtype=float)
        logd = (n + 1.0) * u - t - gammaln(n + 1.0)
        f = vals * np.exp(logd)
        mu[n] = np.trapezoid(f, u)
    return mu


def assemble_radial(sym: Symbol, h: float, N_b: int,
                    rquad: RadialQuadrature = RadialQuadrature()) -> HermiteOperator:
    """Diagonal operator for a(x, w) = g(x^2 + w^2); d = 1 only."""
    if sym.dim != 1:
        raise ValidationError(f"radial route supports d = 1 only (got d = {sym.dim})")
    if sym.kind not in ("radial", "constant"):
        raise ValidationError(f"radial route needs a radial symbol, got {sym.kind}")
    if sym.kind == "constant":
        mu = np.full(N_b, sym.params["value"])
    else:
        mu = radial_means(sym, h, N_b, rquad)
    meta = {"route": "radial", "nodes": rquad.nodes, "margin": rquad.margin}
    return HermiteOperator(N_b, h, 1, np.diag(mu), "radial", sym.name, N_b, meta)


def assemble(sym: Symbol, h: float, N_b: int, frame: Optional[CoherentFrame] = None,
             pgrid: Optional[PhaseGrid] = None, route: str = "auto") -> HermiteOperator:
    """Pick the cheapest exact route for the symbol's structure."""
    gaussian = frame is None or frame.is_gaussian
    if route == "auto":
        if gaussian and sym.kind in ("polynomial", "constant"):
            route = "polynomial"
        elif gaussian and sym.kind == "radial" and sym.dim == 1:
            route = "radial"
        else:
            route = "quadrature"
    if route == "polynomial":
        return assemble_polynomial(sym, h, N_b)
    if route == "radial":
        return assemble_radial(sym, h, N_b)
    if route == "quadrature":
        return assemble_quadrature(sym, frame or CoherentFrame(h), N_b, pgrid)
    raise ValidationError(f"unknown assembly route {route!r}")


# --------------------------------------------------------------------------

def export_operator(op: HermiteOperator, path):
    """Dense text export: one JSON header line, then row-major entries (17 sig. digits)."""
    header = {"symbol_id": op.symbol_id, "h": op.h, "N_b": op.N_b, "assembly": op.assembly,
              "exact_block": op.exact_block, "complex": bool(np.iscomplexobj(op.matrix)),
              "certificate": op.meta}
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        for row in op.matrix:
            if np.iscomplexobj(row):
                fh.write(" ".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in row) + "\n")
            else:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def import_operator(path) -> HermiteOperator:
    with open(path) as fh:
        header = json.loads(fh.readline()[1:])
        rows = [line.split() for line in fh if line.strip()]
    conv = complex if header["complex"] else float
    M = np.array([[conv(v) for v in r] for r in rows])
    return HermiteOperator(header["N_b"], header["h"], 1, M, header["assembly"],
                           header["symbol_id"], header["exact_block"], header["certificate"])
