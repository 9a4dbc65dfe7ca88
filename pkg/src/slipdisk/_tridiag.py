"""Batched Thomas solver for stacks of tridiagonal systems.

Every per-Fourier-mode radial operator in this package is tridiagonal and
diagonally dominant, so a pivot-free LU is stable and can be vectorized
over the mode axis: one factorization pass, then O(n) sweeps whose inner
operations act on whole mode batches at once.
"""

from __future__ import annotations

import numpy as np


class TridiagonalBatch:
    """LU factorization of a batch of tridiagonal systems.

    Bands have shape (n_batch, n): lower[:, j] multiplies x_{j-1} in row j
    (lower[:, 0] is ignored), upper[:, j] multiplies x_{j+1} (upper[:, -1]
    is ignored). Intended for diagonally dominant systems; a vanishing
    pivot raises rather than pivoting.
    """

    def __init__(self, lower: np.ndarray, diag: np.ndarray, upper: np.ndarray):
        lower = np.asarray(lower, dtype=float)
        diag = np.asarray(diag, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if not (lower.shape == diag.shape == upper.shape) or diag.ndim != 2:
            raise ValueError("bands must share a common (n_batch, n) shape")
        n = diag.shape[1]
        piv = np.empty_like(diag)
        fac = np.zeros_like(diag)
        piv[:, 0] = diag[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            for j in range(1, n):
                fac[:, j - 1] = upper[:, j - 1] / piv[:, j - 1]
                piv[:, j] = diag[:, j] - lower[:, j] * fac[:, j - 1]
        if not np.all(np.isfinite(piv)) or np.any(piv == 0.0):
            raise ZeroDivisionError("zero pivot in tridiagonal factorization")
        self._lower = lower
        self._piv = piv
        self._fac = fac
        self.n = n

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for each batch row; rhs (n_batch, n), real or complex."""
        if rhs.shape != self._piv.shape:
            raise ValueError(f"rhs shape {rhs.shape} does not match bands {self._piv.shape}")
        n = self.n
        y = np.empty_like(rhs)
        y[:, 0] = rhs[:, 0] / self._piv[:, 0]
        for j in range(1, n):
            y[:, j] = (rhs[:, j] - self._lower[:, j] * y[:, j - 1]) / self._piv[:, j]
        x = y
        for j in range(n - 2, -1, -1):
            x[:, j] = y[:, j] - self._fac[:, j] * x[:, j + 1]
        return x


def apply_tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray,
                      x: np.ndarray) -> np.ndarray:
    """Matrix-vector product for the same banded layout, batched."""
    out = diag * x
    out[:, 1:] += lower[:, 1:] * x[:, :-1]
    out[:, :-1] += upper[:, :-1] * x[:, 1:]
    return out
