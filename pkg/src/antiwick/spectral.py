"""Bottom of the spectrum of assembled operators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .coherent import CoherentFrame
from .errors import NumericError, ValidationError
from .quantize import HermiteOperator, assemble
from .symbols import Symbol


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    N_b: int
    delta: float = float("nan")
    monotone: bool = True
    converged: bool = True
    vectors: Optional[np.ndarray] = None
    residuals: Optional[np.ndarray] = None
    history: tuple = field(default_factory=tuple)

    @property
    def bottom(self) -> float:
        return float(self.eigenvalues[0])


def spectrum_bottom(op: HermiteOperator, k: int = 1, vectors: bool = False) -> SpectrumResult:
    """k smallest eigenvalues by a dense Hermitian solve, with residual check."""
    A = op.matrix
    if not 1 <= k <= op.N_b:
        raise ValidationError(f"k must lie in [1, {op.N_b}], got {k}")
    if not np.all(np.isfinite(A)):
        raise NumericError("operator matrix has non-finite entries")
    try:
        w, v = scipy.linalg.eigh(A, subset_by_index=[0, k - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    res = np.linalg.norm(A @ v - v * w, axis=0)
    # the induced 1-norm bounds the spectral norm of a Hermitian matrix
    scale = max(float(np.linalg.norm(A, 1)), np.finfo(float).tiny)
    if np.any(res > 1e-8 * scale):
        raise NumericError(f"eigenpair residuals {res.max():.3e} exceed 1e-8 * |A| ({scale:.3e})")
    return SpectrumResult(np.asarray(w), op.N_b, vectors=v if vectors else None, residuals=res)


def is_converged(prev: float, cur: float) -> bool:
    return abs(cur - prev) < max(1e-8, 1e-4 * abs(cur))


def converge_bottom(sym: Symbol, frame: CoherentFrame, ladder: Sequence[int],
                    route: str = "auto", pgrid_policy=None) -> SpectrumResult:
    """Bottom eigenvalue along an increasing ladder of basis sizes.

    ``pgrid_policy(h, N_b)`` may supply phase grids for the quadrature route.
    The result is flagged unconverged (never raised) when the last step moves
    the bottom by more than max(1e-8, 1e-4 * bottom).
    """
    ladder = [int(n) for n in ladder]
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValidationError(f"ladder must be strictly increasing: {ladder}")
    h = frame.h
    bottoms = []
    for n in ladder:
        pgrid = pgrid_policy(h, n) if pgrid_policy else None
        op = assemble(sym, h, n, frame, pgrid, route)
        bottoms.append(spectrum_bottom(op, 1).bottom)
    diffs = np.diff(bottoms)
    monotone = bool(np.all(diffs <= 1e-9))
    delta = float(diffs[-1]) if len(diffs) else float("nan")
    converged = len(bottoms) > 1 and is_converged(bottoms[-2], bottoms[-1])
    return SpectrumResult(np.array([bottoms[-1]]), ladder[-1], delta, monotone, converged,
                          history=tuple(zip(ladder, bottoms)))


def eigen_accumulation(op: HermiteOperator, k: int) -> np.ndarray:
    """Consecutive gaps between the k lowest eigenvalues."""
    if k < 2:
        raise ValidationError("need k >= 2 for gaps")
    return np.diff(spectrum_bottom(op, k).eigenvalues)


def ground_overlap(res: SpectrumResult, coeffs) -> float:
    """|<v_0, c>|^2 for the lowest eigenvector and a unit coefficient vector."""
    if res.vectors is None:
        raise ValidationError("spectrum was computed without eigenvectors")
    c = np.asarray(coeffs, dtype=complex)
    return float(abs(np.vdot(res.vectors[:, 0], c)) ** 2 / np.vdot(c, c).real)
