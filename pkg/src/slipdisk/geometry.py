"""Staggered polar grid on the unit disk and its boundary trace.

The grid places nodes at cell centers in radius, r_j = (j - 1/2) dr with
dr = 1/n_r, so neither the pole nor the boundary circle carries a node.
Angles are uniform, theta_i = i * dtheta with dtheta = 2*pi/n_theta.
Quadrature is the midpoint rule in r times the exact trapezoid rule in
theta, with weights w = r * dr * dtheta; the weights sum to pi exactly
(up to roundoff).

The boundary trace carries per-angle samples of the friction coefficient
alpha, the curvature kappa (identically 1 on the unit circle), and the
outward normal and counterclockwise tangent as Cartesian unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PolarGrid:
    """Staggered polar grid on the unit disk."""

    n_r: int
    n_theta: int
    r: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    dr: float = 0.0
    dtheta: float = 0.0
    weights: np.ndarray = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)

    @property
    def r_col(self) -> np.ndarray:
        """Node radii as an (n_r, 1) column, broadcastable against fields."""
        return self.r[:, None]

    @property
    def r_face(self) -> np.ndarray:
        """Cell-face radii j*dr, j = 0..n_r; faces 0 and n_r sit at the pole and boundary."""
        return np.arange(self.n_r + 1) * self.dr


def build_grid(n_r: int, n_theta: int) -> PolarGrid:
    """Build the staggered polar grid.

    n_theta must be even: radial stencils close across the pole by the
    half-turn shift theta -> theta + pi, which must land on a grid angle.
    """
    if n_r <= 0 or n_theta <= 0:
        raise ValueError(f"grid sizes must be positive, got n_r={n_r}, n_theta={n_theta}")
    if n_theta % 2 != 0:
        raise ValueError(f"n_theta must be even for pole parity ghosts, got {n_theta}")
    dr = 1.0 / n_r
    dtheta = 2.0 * np.pi / n_theta
    r = (np.arange(1, n_r + 1) - 0.5) * dr
    theta = np.arange(n_theta) * dtheta
    weights = np.broadcast_to(r[:, None] * dr * dtheta, (n_r, n_theta)).copy()
    return PolarGrid(n_r=n_r, n_theta=n_theta, r=r, theta=theta,
                     dr=dr, dtheta=dtheta, weights=weights)


def integrate(grid: PolarGrid, values: np.ndarray) -> float:
    """Quadrature of a node-sampled function over the disk."""
    return float(np.sum(grid.weights * values))


@dataclass(frozen=True)
class BoundaryTrace:
    """Per-angle data on the boundary circle r = 1."""

    theta: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    normal: np.ndarray = field(repr=False)   # (n_theta, 2) outward, Cartesian
    tangent: np.ndarray = field(repr=False)  # (n_theta, 2) counterclockwise, Cartesian

    @property
    def n_theta(self) -> int:
        return self.theta.size


def alpha_function(alpha_spec):
    """Turn a friction-coefficient spec into a callable of theta.

    Accepted specs: a number (constant), a dict {"const": c} or
    {"fourier": [[k, a_k, b_k], ...]} meaning sum of a_k cos(k theta)
    + b_k sin(k theta), or an already-callable theta -> alpha.
    """
    if callable(alpha_spec):
        return alpha_spec
    if isinstance(alpha_spec, (int, float)):
        c = float(alpha_spec)
        return lambda theta: np.full_like(np.asarray(theta, dtype=float), c)
    if isinstance(alpha_spec, dict):
        if "const" in alpha_spec:
            c = float(alpha_spec["const"])
            return lambda theta: np.full_like(np.asarray(theta, dtype=float), c)
        if "fourier" in alpha_spec:
            terms = [(int(k), float(a), float(b)) for k, a, b in alpha_spec["fourier"]]

            def alpha(theta, terms=terms):
                theta = np.asarray(theta, dtype=float)
                out = np.zeros_like(theta)
                for k, a, b in terms:
                    out += a * np.cos(k * theta) + b * np.sin(k * theta)
                return out

            return alpha
    raise ValueError(f"unrecognized alpha spec: {alpha_spec!r}")


def boundary_trace(grid: PolarGrid, alpha_spec) -> BoundaryTrace:
    """Sample alpha, kappa, normal, and tangent at the grid angles."""
    theta = grid.theta
    alpha = np.asarray(alpha_function(alpha_spec)(theta), dtype=float)
    if alpha.shape != theta.shape:
        raise ValueError(f"alpha samples have shape {alpha.shape}, expected {theta.shape}")
    if not np.all(np.isfinite(alpha)):
        raise ValueError("alpha samples must be finite")
    kappa = np.ones_like(theta)
    normal = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    tangent = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    return BoundaryTrace(theta=theta, alpha=alpha, kappa=kappa,
                         normal=normal, tangent=tangent)
