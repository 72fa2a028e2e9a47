"""Hermite functions in h-scaled coordinates and Gaussian coherent-state overlaps.

psi^h_n(x) = h^{-1/4} psi_n(x / sqrt(h)), where psi_n are the L^2-normalized
Hermite functions.  Values are produced by the three-term recurrence with a
running log-scale, so no factorials are formed and modes up to a few thousand
neither overflow nor underflow.
"""
from __future__ import annotations

import numpy as np
from scipy.special import gammainccinv, gammaln

_RESCALE = 1e150


def hermite_functions(n_modes: int, u) -> np.ndarray:
    """psi_0..psi_{n_modes-1} at points u; shape (n_modes, *u.shape)."""
    u = np.asarray(u, dtype=float)
    out = np.empty((n_modes,) + u.shape)
    logscale = -0.5 * u * u
    prev = np.zeros_like(u)
    cur = np.full_like(u, np.pi ** -0.25)
    out[0] = cur * np.exp(logscale)
    for n in range(1, n_modes):
        nxt = np.sqrt(2.0 / n) * u * cur - np.sqrt((n - 1) / n) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            logscale = logscale + np.log(s)
        with np.errstate(under="ignore", over="ignore"):
            out[n] = cur * np.exp(logscale)
    return out


def hermite_functions_h(n_modes: int, x, h: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return h ** -0.25 * hermite_functions(n_modes, x / np.sqrt(h))


def coherent_overlaps(n_modes: int, x, w, h: float) -> np.ndarray:
    """<psi^h_n, phi^h_{(x,w)}> for the Gaussian window; shape (*x.shape, n_modes).

    With alpha = (x + i w)/sqrt(2h) this equals
    exp(-i x w/(2h)) exp(-|alpha|^2/2) conj(alpha)^n / sqrt(n!),
    evaluated in log-magnitude form.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    x, w = np.broadcast_arrays(x, w)
    alpha = (x + 1j * w) / np.sqrt(2.0 * h)
    mod2 = np.abs(alpha) ** 2
    n = np.arange(n_modes)
    with np.errstate(divide="ignore"):
        logmod = np.log(np.sqrt(mod2))
    logmag = (-0.5 * mod2)[..., None] + n * np.where(mod2 > 0, logmod, 0.0)[..., None] \
        - 0.5 * gammaln(n + 1.0)
    phase = -(x * w / (2.0 * h))[..., None] - n * np.angle(alpha)[..., None]
    out = np.exp(logmag + 1j * phase)
    if np.any(mod2 == 0):
        zero = mod2 == 0
        out[zero, 1:] = 0.0
    return out


def mode_reach(n_modes: int, tail: float = 1e-12) -> float:
    """t with P(T > t) = tail for T ~ Gamma(n_modes, 1).

    The phase-space density of mode n_modes-1, |<psi_n, phi_z>|^2, in the
    variable t = |z|^2/(2h) is exactly this Gamma density, and lower modes
    are more concentrated, so a disc |z|^2 <= 2 h t captures all but
    ``tail`` of every mode's mass.
    """
    return float(gammainccinv(n_modes, tail))
