"""Pressure recovery from a velocity snapshot on the disk.

Taking the divergence of the momentum equation removes the time
derivative of a divergence-free tangent field, leaving the Neumann
problem

    Laplace(p) = -div((u.grad)u),
    dp/dr |_{r=1} = nu (Laplace u).r - ((u.grad)u).r,

where (Laplace u).r on the boundary is evaluated as the rotated gradient
of the vorticity, -(1/r) d_theta omega, so no second radial derivatives
of u are needed at the wall.

The right-hand side is assembled in flux form with the same staggered
faces as the stream-function solver, and the boundary face value of the
radial acceleration equals the trace used in the Neumann data. With that
shared value the discrete compatibility identity

    integral(rhs) + boundary integral(g) = 0

telescopes to roundoff whenever u is divergence-free, so the mode-0
Neumann system is consistent by construction; the data is nevertheless
projected (its mean subtracted) and the defect reported. The recovered
pressure is normalized to zero quadrature mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._tridiag import TridiagonalBatch, apply_tridiagonal
from .field import (VECTOR_PARITY, ScalarField, VectorField, boundary_values,
                    divergence, grad, lp_norm, radial_derivative,
                    theta_derivative)
from .geometry import BoundaryTrace, PolarGrid, integrate

TANGENCY_TOL = 1e-6
COMPATIBILITY_TOL = 1e-6


def advective_acceleration(u: VectorField) -> VectorField:
    """(u.grad)u in polar components, curvature terms included:

    a_r     = u_r d_r u_r + (u_theta/r) d_theta u_r - u_theta^2 / r
    a_theta = u_r d_r u_theta + (u_theta/r) d_theta u_theta + u_r u_theta / r
    """
    grid = u.grid
    r = grid.r_col
    dur = radial_derivative(u.u_r, grid, parity=VECTOR_PARITY)
    dut = radial_derivative(u.u_theta, grid, parity=VECTOR_PARITY)
    a_r = u.u_r * dur + u.u_theta / r * theta_derivative(u.u_r) - u.u_theta ** 2 / r
    a_t = u.u_r * dut + u.u_theta / r * theta_derivative(u.u_theta) + u.u_r * u.u_theta / r
    return VectorField(grid, a_r, a_t)


def flux_divergence(a: VectorField) -> tuple[ScalarField, np.ndarray]:
    """Divergence of a vector field in flux form on the staggered faces.

    Radial fluxes live on the faces j dr: interior face values are
    arithmetic means of the neighbouring nodes, the pole face carries no
    flux (r = 0 factor), and the outer face takes the quadratically
    extrapolated trace of a_r. Returns the divergence and that trace; a
    caller that reuses the trace in boundary data inherits the exact
    telescoping of the radial fluxes under the disk quadrature.
    """
    grid = a.grid
    r, dr = grid.r, grid.dr
    faces = grid.r_face
    a_r1 = boundary_values(a.u_r, grid)
    flux = np.empty((grid.n_r + 1, grid.n_theta))
    flux[0] = 0.0
    flux[1:-1] = faces[1:-1, None] * 0.5 * (a.u_r[:-1] + a.u_r[1:])
    flux[-1] = a_r1
    div = (flux[1:] - flux[:-1]) / (r[:, None] * dr)
    div += theta_derivative(a.u_theta) / r[:, None]
    return ScalarField(grid, div), a_r1


def neumann_laplacian_bands(grid: PolarGrid):
    """Tridiagonal bands of the flux-form radial Laplacian per rfft mode
    with a Neumann closure: the outer face flux is the boundary datum
    itself, so the last row is exact for radial quadratics with exact
    data. Returns (lower, diag, upper, data_coeff); the datum g_k enters
    the last row of the right-hand side as -data_coeff * g_k.
    """
    n_r, dr = grid.n_r, grid.dr
    r = grid.r
    faces = grid.r_face
    k = np.arange(grid.n_theta // 2 + 1, dtype=float)
    k2 = (k ** 2)[:, None]

    lower = np.broadcast_to(faces[:-1] / (r * dr ** 2), (k.size, n_r)).copy()
    upper = np.broadcast_to(faces[1:] / (r * dr ** 2), (k.size, n_r)).copy()
    diag = np.broadcast_to(-(faces[:-1] + faces[1:]) / (r * dr ** 2),
                           (k.size, n_r)).copy()
    diag -= k2 / r[None, :] ** 2

    rn = r[-1]
    lower[:, -1] = faces[-2] / (rn * dr ** 2)
    diag[:, -1] = -faces[-2] / (rn * dr ** 2) - k2[:, 0] / rn ** 2
    upper[:, -1] = 0.0
    data_coeff = 1.0 / (rn * dr)
    return lower, diag, upper, data_coeff


class PoissonNeumannSolver:
    """Factorized mode-wise solver for Laplace(p) = f, dp/dr(1) = g.

    The mode-0 operator annihilates constants; its first row is replaced
    by the gauge condition p_0 = 0 and the solution is re-normalized to
    zero quadrature mean afterwards. Immutable after construction.
    """

    def __init__(self, grid: PolarGrid):
        self.grid = grid
        lower, diag, upper, self._data_coeff = neumann_laplacian_bands(grid)
        self._lower, self._diag, self._upper = lower, diag, upper
        pinned = (lower.copy(), diag.copy(), upper.copy())
        pinned[0][0, 0] = 0.0
        pinned[1][0, 0] = 1.0
        pinned[2][0, 0] = 0.0
        self._lu = TridiagonalBatch(*pinned)

    def solve(self, rhs: ScalarField, neumann: np.ndarray) -> ScalarField:
        grid = self.grid
        n = grid.n_theta
        if neumann.shape != (n,):
            raise ValueError("Neumann data must be sampled on the theta grid")
        f_modes = np.fft.rfft(rhs.values, axis=1).T.copy()
        g_modes = np.fft.rfft(neumann)
        f_modes[:, -1] -= self._data_coeff * g_modes
        f_modes[0, 0] = 0.0  # pinned gauge row
        p_modes = self._lu.solve(f_modes)
        p = np.fft.irfft(p_modes.T, n=n, axis=1)
        p -= integrate(grid, p) / np.sum(grid.weights)
        return ScalarField(grid, p)

    def apply(self, p: ScalarField, neumann: np.ndarray) -> ScalarField:
        """Unpinned operator action plus boundary data, for residual checks."""
        n = self.grid.n_theta
        modes = np.fft.rfft(p.values, axis=1).T.copy()
        out = apply_tridiagonal(self._lower, self._diag, self._upper, modes)
        out[:, -1] += self._data_coeff * np.fft.rfft(neumann)
        return ScalarField(self.grid, np.fft.irfft(out.T, n=n, axis=1))


_solver_cache: dict[tuple[int, int], PoissonNeumannSolver] = {}


def _cached_neumann(grid: PolarGrid) -> PoissonNeumannSolver:
    key = (grid.n_r, grid.n_theta)
    solver = _solver_cache.get(key)
    if solver is None:
        solver = _solver_cache[key] = PoissonNeumannSolver(grid)
    return solver


def project_neumann_data(rhs: ScalarField, g: np.ndarray) -> tuple[np.ndarray, float]:
    """Shift g by a constant so the discrete Gauss identity
    integral(rhs) = boundary integral(g) holds exactly, making the mode-0
    Neumann system consistent. Returns the projected data and the defect
    that was removed. Any constant shift of g is absorbed here, which is
    what makes the recovery gauge invariant in the data.
    """
    vol = float(integrate(rhs.grid, rhs.values))
    flux = float(np.sum(g) * rhs.grid.dtheta)
    return g - (flux - vol) / (2.0 * np.pi), abs(vol - flux)


@dataclass(frozen=True)
class PressureSolve:
    """Recovered pressure with its certificate.

    p has zero quadrature mean. pde_residual is the max-norm residual of
    the discrete Poisson system (boundary row included); bc_residual is an
    independent one-sided check of dp/dr(1) against the Neumann data;
    compatibility_defect is |integral(f) - boundary integral(g)| before
    projection.
    """
    p: ScalarField
    pde_residual: float
    bc_residual: float
    compatibility_defect: float
    neumann_data: np.ndarray
    acceleration: VectorField


def recover_pressure(u: VectorField, omega: ScalarField, nu: float,
                     trace: BoundaryTrace | None = None) -> PressureSolve:
    """Solve the pressure Poisson problem for one velocity snapshot.

    u must be discretely divergence-free and tangent (both traces below
    1e-6); fields reconstructed by this package satisfy both to roundoff.
    The compatibility defect of the Neumann data is projected out and
    reported; a defect above 1e-6 signals an inconsistent velocity field
    and raises.
    """
    grid = u.grid
    if omega.grid is not grid and omega.grid.shape != grid.shape:
        raise ValueError("omega and u live on different grids")
    if trace is not None and trace.theta.shape != grid.theta.shape:
        raise ValueError("boundary trace does not match the grid")
    div_max = float(np.abs(divergence(u).values).max())
    if div_max > TANGENCY_TOL:
        raise ValueError(f"velocity is not divergence-free: max |div u| = {div_max:.3e}")
    tang = float(np.abs(boundary_values(u.u_r, grid)).max())
    if tang > TANGENCY_TOL:
        raise ValueError(f"velocity is not tangent: max |u.n| at r=1 is {tang:.3e}")

    a = advective_acceleration(u)
    div_a, a_r1 = flux_divergence(a)
    rhs = ScalarField(grid, -div_a.values)

    omega_trace = boundary_values(omega.values, grid)
    lap_u_r = -theta_derivative(omega_trace[None, :])[0]
    g, defect = project_neumann_data(rhs, nu * lap_u_r - a_r1)
    if defect > COMPATIBILITY_TOL:
        raise ValueError(f"Neumann data incompatible with the source "
                         f"(defect {defect:.3e}); velocity snapshot inconsistent")

    solver = _cached_neumann(grid)
    p = solver.solve(rhs, g)
    residual = solver.apply(p, g).values - rhs.values
    pde_residual = float(np.abs(residual).max())
    dp_wall = (2.0 * p.values[-1] - 3.0 * p.values[-2] + p.values[-3]) / grid.dr
    bc_residual = float(np.abs(dp_wall - g).max())
    return PressureSolve(p=p, pde_residual=pde_residual, bc_residual=bc_residual,
                         compatibility_defect=defect, neumann_data=g,
                         acceleration=a)


def pressure_estimate_slack(p: PressureSolve | ScalarField, u: VectorField,
                            omega: ScalarField, nu: float) -> float:
    """Slack of the gradient bound

        ||grad p||_2 <= ||(u.grad)u||_2 + nu ||grad omega||_2,

    returned as RHS - LHS. The bound is the contraction property of the
    gradient part of the Helmholtz decomposition, so the slack is
    nonnegative up to discretization error.
    """
    field = p.p if isinstance(p, PressureSolve) else p
    a = p.acceleration if isinstance(p, PressureSolve) else advective_acceleration(u)
    rhs = lp_norm(a, 2.0) + nu * lp_norm(grad(omega), 2.0)
    lhs = lp_norm(grad(field), 2.0)
    return rhs - lhs
