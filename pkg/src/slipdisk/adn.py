"""Executable ellipticity theory for boundary value systems with weights.

Given a matrix operator L, boundary operators B, and integer weights
(s, t, r), this module checks the four conditions that make the system
elliptic in the weighted sense: degree-correct principal parts, a
nonvanishing and two-sided-bounded determinant on the unit sphere, the
root-count (supplementary) condition for the pencil sigma -> L(xi + sigma n),
and the complementing condition that the boundary rows stay linearly
independent modulo the stable factor M+ of that pencil.

Everything is numeric sampling: quantifiers over boundary points and
cotangent directions are replaced by finite deterministic sample sets,
and each verdict records the samples used. Failures always carry a
witness (the sample and the vanishing combination).

Polynomials in the pencil variable live in PolyC (ascending complex
coefficients); matrices of them in MatPolyC, which supports products,
determinants, and adjugates by cofactor expansion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field
from typing import Callable

import numpy as np

from .geometry import alpha_function

REAL_AXIS_TOL = 1e-9
CLUSTER_TOL = 1e-7
DET_TOL = 1e-10
RANK_RATIO_TOL = 1e-8
TRIM_TOL = 1e-12


class DegenerateConfigurationError(ValueError):
    """A pencil root landed on the real axis: the sampled configuration
    does not separate stable from unstable factors."""


# ---------------------------------------------------------------------------
# polynomial arithmetic
# ---------------------------------------------------------------------------

class PolyC:
    """Polynomial in one variable with complex coefficients, ascending
    degree. Coefficients within TRIM_TOL of zero relative to the largest
    magnitude are trimmed so the recorded degree is meaningful."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        scale = np.abs(c).max() if c.size else 0.0
        if scale == 0.0:
            c = np.zeros(1, dtype=complex)
        else:
            keep = np.nonzero(np.abs(c) > TRIM_TOL * scale)[0]
            c = c[: keep[-1] + 1] if keep.size else np.zeros(1, dtype=complex)
        self.coeffs = c

    @classmethod
    def zero(cls) -> "PolyC":
        return cls([0.0])

    @classmethod
    def one(cls) -> "PolyC":
        return cls([1.0])

    @classmethod
    def from_roots(cls, roots) -> "PolyC":
        out = cls.one()
        for r in roots:
            out = out * cls([-r, 1.0])
        return out

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    def __call__(self, sigma: complex) -> complex:
        out = 0.0 + 0.0j
        for c in self.coeffs[::-1]:
            out = out * sigma + c
        return out

    def __add__(self, other: "PolyC") -> "PolyC":
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        a[: self.coeffs.size] = self.coeffs
        a[: other.coeffs.size] += other.coeffs
        return PolyC(a)

    def __sub__(self, other: "PolyC") -> "PolyC":
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        a[: self.coeffs.size] = self.coeffs
        a[: other.coeffs.size] -= other.coeffs
        return PolyC(a)

    def __mul__(self, other) -> "PolyC":
        if isinstance(other, PolyC):
            if self.is_zero or other.is_zero:
                return PolyC.zero()
            return PolyC(np.convolve(self.coeffs, other.coeffs))
        return PolyC(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __neg__(self) -> "PolyC":
        return PolyC(-self.coeffs)

    def divmod(self, divisor: "PolyC") -> tuple["PolyC", "PolyC"]:
        """Euclidean division, stable for the monic divisors built from
        root lists; returns (quotient, remainder)."""
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = self.coeffs.astype(complex).copy()
        d = divisor.coeffs
        dd = divisor.degree
        lead = d[-1]
        if rem.size - 1 < dd:
            return PolyC.zero(), PolyC(rem)
        quot = np.zeros(rem.size - dd, dtype=complex)
        for k in range(rem.size - 1, dd - 1, -1):
            q = rem[k] / lead
            quot[k - dd] = q
            rem[k - dd: k + 1] -= q * d
        return PolyC(quot), PolyC(rem[:dd] if dd > 0 else [0.0])

    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max())

    def __repr__(self) -> str:
        return f"PolyC({self.coeffs.tolist()})"


class MatPolyC:
    """Rectangular matrix of PolyC entries."""

    def __init__(self, entries):
        self.entries = [list(row) for row in entries]
        self.shape = (len(self.entries), len(self.entries[0]) if self.entries else 0)
        for row in self.entries:
            if len(row) != self.shape[1]:
                raise ValueError("ragged polynomial matrix")

    def __getitem__(self, idx) -> PolyC:
        i, j = idx
        return self.entries[i][j]

    def __matmul__(self, other: "MatPolyC") -> "MatPolyC":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = [[PolyC.zero() for _ in range(m)] for _ in range(n)]
        for i in range(n):
            for j in range(m):
                acc = PolyC.zero()
                for l in range(k):
                    acc = acc + self.entries[i][l] * other.entries[l][j]
                out[i][j] = acc
        return MatPolyC(out)

    def det(self) -> PolyC:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        if n == 1:
            return self.entries[0][0]
        acc = PolyC.zero()
        for j in range(n):
            minor = MatPolyC([row[:j] + row[j + 1:] for row in self.entries[1:]])
            term = self.entries[0][j] * minor.det()
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    def adjugate(self) -> "MatPolyC":
        """Cofactor transpose; satisfies A @ adj(A) = det(A) I."""
        n, m = self.shape
        if n != m:
            raise ValueError("adjugate of a non-square matrix")
        if n == 1:
            return MatPolyC([[PolyC.one()]])
        out = [[PolyC.zero() for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                rows = [r for k, r in enumerate(self.entries) if k != i]
                minor = MatPolyC([row[:j] + row[j + 1:] for row in rows])
                c = minor.det()
                out[j][i] = c if (i + j) % 2 == 0 else -c
        return MatPolyC(out)

    def evaluate(self, sigma: complex) -> np.ndarray:
        n, m = self.shape
        out = np.empty((n, m), dtype=complex)
        for i in range(n):
            for j in range(m):
                out[i, j] = self.entries[i][j](sigma)
        return out


def adjugate(a: MatPolyC) -> MatPolyC:
    return a.adjugate()


# ---------------------------------------------------------------------------
# problems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryPoint:
    """A boundary sample: position, outward normal, tangent, and the
    parameter angle they came from."""
    x: tuple
    n: tuple
    tau: tuple
    theta: float


def disk_boundary(theta: float) -> BoundaryPoint:
    c, s = np.cos(theta), np.sin(theta)
    return BoundaryPoint(x=(c, s), n=(c, s), tau=(-s, c), theta=theta)


def _const(value):
    v = complex(value)
    return lambda point: v


def _as_coeff(c) -> Callable[[BoundaryPoint], complex]:
    return c if callable(c) else _const(c)


@dataclass(frozen=True)
class AdnProblem:
    """A weighted boundary value system.

    L_coeffs entries are (i, j, multi_index, coefficient), 0-indexed rows
    and columns, coefficient a number or a function of a BoundaryPoint;
    B_coeffs likewise with boundary row l. Weights follow the usual
    bookkeeping: deg L_ij <= s_i + t_j, deg B_lj <= r_l + t_j, and the
    number of boundary rows equals the half-order m.
    """
    M: int
    L_coeffs: tuple
    B_coeffs: tuple
    s: tuple
    t: tuple
    r: tuple
    boundary: Callable[[float], BoundaryPoint] = disk_boundary
    name: str = ""

    @property
    def n_boundary_rows(self) -> int:
        return len(self.r)


def _pencil_monomial(mi, xi, xi_prime) -> PolyC:
    out = PolyC.one()
    for d, power in enumerate(mi):
        lin = PolyC([xi[d], xi_prime[d]]) if xi_prime is not None else PolyC([xi[d]])
        for _ in range(int(power)):
            out = out * lin
    return out


def principal_parts(problem: AdnProblem):
    """Validate the weight bookkeeping and return the two principal-part
    evaluators.

    Each evaluator maps (point, xi) to a numeric complex matrix, or
    (point, xi, xi_prime) to a MatPolyC in the pencil variable along
    xi + sigma xi_prime. Only terms of exact weighted degree survive.
    """
    for (i, j, mi, _) in problem.L_coeffs:
        order = int(sum(mi))
        limit = problem.s[i] + problem.t[j]
        if limit < 0:
            raise ValueError(f"L entry ({i + 1},{j + 1}) with weights s+t={limit} < 0 "
                             f"must vanish, got multi-index {tuple(mi)}")
        if order > limit:
            raise ValueError(f"L entry ({i + 1},{j + 1}) multi-index {tuple(mi)} has "
                             f"order {order} > s_i + t_j = {limit}")
    for (l, j, mi, _) in problem.B_coeffs:
        order = int(sum(mi))
        limit = problem.r[l] + problem.t[j]
        if order > limit:
            raise ValueError(f"B entry ({l + 1},{j + 1}) multi-index {tuple(mi)} has "
                             f"order {order} > r_l + t_j = {limit}")

    def build(entries, n_rows, row_weight):
        def evaluate(point, xi, xi_prime=None):
            if xi_prime is None:
                out = np.zeros((n_rows, problem.M), dtype=complex)
            else:
                out = [[PolyC.zero() for _ in range(problem.M)] for _ in range(n_rows)]
            for (i, j, mi, coeff) in entries:
                if int(sum(mi)) != row_weight(i) + problem.t[j]:
                    continue
                c = _as_coeff(coeff)(point)
                if xi_prime is None:
                    out[i, j] += c * np.prod([complex(xi[d]) ** int(p)
                                              for d, p in enumerate(mi)])
                else:
                    out[i][j] = out[i][j] + c * _pencil_monomial(mi, xi, xi_prime)
            return out if xi_prime is None else MatPolyC(out)
        return evaluate

    lp = build(problem.L_coeffs, problem.M, lambda i: problem.s[i])
    bp = build(problem.B_coeffs, problem.n_boundary_rows, lambda l: problem.r[l])
    return lp, bp


# ---------------------------------------------------------------------------
# the four conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdnReport:
    """Verdicts for the four ellipticity conditions with the constants
    measured on the sample set. Failed conditions carry a witness."""
    verdicts: dict[str, bool]
    ellipticity_min: float
    ellipticity_max: float
    m: int
    witnesses: dict = dataclass_field(default_factory=dict)
    sample_counts: dict = dataclass_field(default_factory=dict)
    name: str = ""

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> str:
        def clean(obj):
            if isinstance(obj, complex):
                return {"re": obj.real, "im": obj.imag}
            if isinstance(obj, (np.floating, np.integer)):
                return obj.item()
            if isinstance(obj, (list, tuple, np.ndarray)):
                return [clean(v) for v in obj]
            if isinstance(obj, dict):
                return {k: clean(v) for k, v in obj.items()}
            return obj
        payload = {"name": self.name, "passed": self.passed,
                   "verdicts": self.verdicts, "m": self.m,
                   "ellipticity_min": self.ellipticity_min,
                   "ellipticity_max": self.ellipticity_max,
                   "witnesses": clean(self.witnesses),
                   "sample_counts": self.sample_counts}
        return json.dumps(payload, indent=2, sort_keys=True)


def check_ellipticity(problem: AdnProblem, x_samples, xi_samples) -> AdnReport:
    """Conditions on the determinant alone: nonvanishing on the unit
    sphere (tolerance DET_TOL) and the measured two-sided constants.
    The half-order m comes from the pencil determinant degree."""
    if not len(x_samples) or not len(xi_samples):
        raise ValueError("need at least one x sample and one xi sample")
    lp, _ = principal_parts(problem)

    # Degenerate directions can drop the pencil degree, so the half-order
    # is the max over samples; for elliptic systems every sample agrees.
    deg = max(lp(p, np.asarray(p.tau, dtype=float), p.n).det().degree
              for p in x_samples)
    if deg < 0 or deg % 2:
        raise ValueError(f"pencil determinant degree {deg} is not an even "
                         f"positive integer")
    m = deg // 2

    det_min, det_max = np.inf, 0.0
    witness = None
    for point in x_samples:
        for xi in xi_samples:
            xi = np.asarray(xi, dtype=float)
            d = abs(np.linalg.det(lp(point, xi / np.linalg.norm(xi))))
            if d < det_min:
                det_min = d
                if d < DET_TOL:
                    witness = {"x": point.x, "theta": point.theta,
                               "xi": tuple((xi / np.linalg.norm(xi)).tolist()),
                               "det": d}
            det_max = max(det_max, d)
    verdicts = {"ellipticity": bool(det_min >= DET_TOL),
                "uniform_ellipticity": bool(det_min >= DET_TOL and np.isfinite(det_max))}
    witnesses = {} if witness is None else {"ellipticity": witness}
    return AdnReport(verdicts=verdicts, ellipticity_min=float(det_min),
                     ellipticity_max=float(det_max), m=m, witnesses=witnesses,
                     sample_counts={"x": len(x_samples), "xi": len(xi_samples)},
                     name=problem.name)


def roots_positive_imag(lp_eval, point: BoundaryPoint, xi, xi_prime) -> list:
    """Roots of sigma -> det L(point, xi + sigma xi_prime) in the upper
    half plane, with multiplicity recovered by clustering (tolerance
    CLUSTER_TOL) and each cluster averaged.

    A root within REAL_AXIS_TOL of the real axis means the pencil does
    not split into stable and unstable factors and raises
    DegenerateConfigurationError.
    """
    xi = np.asarray(xi, dtype=float)
    xip = np.asarray(xi_prime, dtype=float)
    if abs(xi[0] * xip[1] - xi[1] * xip[0]) < 1e-12 * max(1.0, np.linalg.norm(xi) * np.linalg.norm(xip)):
        raise ValueError("xi and xi_prime must be linearly independent")
    det = lp_eval(point, xi, xip).det()
    roots = np.roots(det.coeffs[::-1])
    on_axis = roots[np.abs(roots.imag) <= REAL_AXIS_TOL]
    if on_axis.size:
        raise DegenerateConfigurationError(
            f"pencil root {on_axis[0]:.3e} on the real axis at theta={point.theta:.4f}, "
            f"xi={tuple(xi.tolist())}")
    upper = sorted(roots[roots.imag > REAL_AXIS_TOL],
                   key=lambda z: (z.real, z.imag))
    clustered = []
    for z in upper:
        if clustered and abs(z - clustered[-1][-1]) <= CLUSTER_TOL:
            clustered[-1].append(z)
        else:
            clustered.append([z])
    out = []
    for group in clustered:
        center = complex(np.mean(group))
        out.extend([center] * len(group))
    return out


@dataclass(frozen=True)
class ComplementingVerdict:
    passed: bool
    singular_ratio: float
    witness: tuple | None
    point: BoundaryPoint
    xi: tuple


def complementing_check(problem: AdnProblem, point: BoundaryPoint, xi) -> ComplementingVerdict:
    """Linear independence of the boundary rows modulo the stable pencil
    factor M+.

    Builds B(point, xi + sigma n) adj(L)(point, xi + sigma n), reduces
    every entry modulo M+ = prod (sigma - root), stacks the remainder
    coefficients row by row, and tests full row rank by the singular
    value ratio (threshold RANK_RATIO_TOL after per-row max
    normalization). A failing verdict carries the vanishing row
    combination as witness.
    """
    xi = np.asarray(xi, dtype=float)
    norm = np.linalg.norm(xi)
    if norm < 1e-14:
        raise ValueError("xi must be nonzero")
    if abs(float(np.dot(xi, point.n))) > 1e-12 * norm:
        raise ValueError(f"xi must be orthogonal to the normal at the sample: "
                         f"xi.n = {float(np.dot(xi, point.n)):.3e}")
    lp, bp = principal_parts(problem)
    roots = roots_positive_imag(lp, point, xi, point.n)
    m = len(roots)
    m_plus = PolyC.from_roots(roots)
    product = bp(point, xi, point.n) @ lp(point, xi, point.n).adjugate()
    n_rows = problem.n_boundary_rows
    stacked = np.zeros((n_rows, problem.M * m), dtype=complex)
    for l in range(n_rows):
        for j in range(problem.M):
            _, rem = product[l, j].divmod(m_plus)
            c = rem.coeffs
            stacked[l, j * m: j * m + c.size] = c
    scales = np.abs(stacked).max(axis=1)
    if np.any(scales < 1e-300):
        l = int(np.argmin(scales))
        witness = tuple(1.0 + 0.0j if k == l else 0.0j for k in range(n_rows))
        return ComplementingVerdict(False, 0.0, witness, point, tuple(xi.tolist()))
    normalized = stacked / scales[:, None]
    u, sing, _ = np.linalg.svd(normalized)
    ratio = float(sing[-1] / sing[0]) if n_rows > 1 else 1.0
    if ratio >= RANK_RATIO_TOL and sing.size == n_rows:
        return ComplementingVerdict(True, ratio, None, point, tuple(xi.tolist()))
    c = np.conj(u[:, -1])
    first = int(np.nonzero(np.abs(c) >= 0.5 * np.abs(c).max())[0][0])
    c = c / c[first]
    return ComplementingVerdict(False, ratio, tuple(c.tolist()), point, tuple(xi.tolist()))


def _xi_scalings(count: int) -> np.ndarray:
    mags = 0.5 * (1 + np.arange((count + 1) // 2))
    out = np.empty(count)
    out[0::2] = mags[: out[0::2].size]
    out[1::2] = -mags[: out[1::2].size]
    return out


def check_all(problem: AdnProblem, n_boundary_samples: int = 32,
              n_xi_samples: int = 8) -> AdnReport:
    """All four conditions on the deterministic sample set: boundary
    angles uniform on the circle, unit-sphere directions for the
    determinant, and tangential xi = c tau over both-sign scalings c for
    the root and complementing conditions."""
    if n_boundary_samples < 8 or n_xi_samples < 8:
        raise ValueError("need at least 8 boundary and 8 xi samples")
    angles = np.linspace(0.0, 2.0 * np.pi, n_boundary_samples, endpoint=False)
    points = [problem.boundary(float(a)) for a in angles]
    sphere = [(np.cos(p), np.sin(p))
              for p in np.linspace(0.0, 2.0 * np.pi, n_xi_samples, endpoint=False)]
    report = check_ellipticity(problem, points, sphere)
    verdicts = dict(report.verdicts)
    witnesses = dict(report.witnesses)
    m = report.m
    if problem.n_boundary_rows != m:
        raise ValueError(f"{problem.n_boundary_rows} boundary rows for half-order "
                         f"m={m}: the counts must agree")

    lp, _ = principal_parts(problem)
    scalings = _xi_scalings(n_xi_samples)
    root_ok, comp_ok = True, True
    for point in points:
        tau = np.asarray(point.tau, dtype=float)
        for c in scalings:
            xi = c * tau
            try:
                roots = roots_positive_imag(lp, point, xi, point.n)
            except DegenerateConfigurationError as err:
                if root_ok:
                    witnesses["supplementary"] = {"theta": point.theta,
                                                  "xi": tuple(xi.tolist()),
                                                  "error": str(err)}
                root_ok = False
                continue
            if len(roots) != m:
                if root_ok:
                    witnesses["supplementary"] = {"theta": point.theta,
                                                  "xi": tuple(xi.tolist()),
                                                  "roots": roots}
                root_ok = False
                continue
            verdict = complementing_check(problem, point, xi)
            if not verdict.passed and comp_ok:
                witnesses["complementing"] = {"theta": point.theta,
                                              "xi": verdict.xi,
                                              "combination": verdict.witness,
                                              "singular_ratio": verdict.singular_ratio}
                comp_ok = False
    verdicts["supplementary"] = root_ok
    verdicts["complementing"] = comp_ok and root_ok
    counts = dict(report.sample_counts)
    counts["pencil"] = n_boundary_samples * n_xi_samples
    return AdnReport(verdicts=verdicts, ellipticity_min=report.ellipticity_min,
                     ellipticity_max=report.ellipticity_max, m=m,
                     witnesses=witnesses, sample_counts=counts, name=problem.name)


# ---------------------------------------------------------------------------
# instances and JSON I/O
# ---------------------------------------------------------------------------

def navier_laplacian_problem(alpha_spec=0.0, kappa: float = 1.0) -> AdnProblem:
    """The velocity Laplacian with impermeability and slip rows.

    L = I2 Laplace, weights s = (0,0), t = (2,2). Boundary row 1 is the
    normal trace n.u (weight -2); row 2 is tau.(n.grad)u + (alpha - kappa)
    tau.u (weight -1), whose zeroth-order term drops from the principal
    part, making every verdict independent of alpha.
    """
    alpha = alpha_function(alpha_spec)
    lap = [(i, i, mi, 1.0) for i in range(2) for mi in ((2, 0), (0, 2))]
    b = [(0, 0, (0, 0), lambda p: complex(p.n[0])),
         (0, 1, (0, 0), lambda p: complex(p.n[1])),
         (1, 0, (0, 0), lambda p: complex((alpha(p.theta) - kappa) * p.tau[0])),
         (1, 1, (0, 0), lambda p: complex((alpha(p.theta) - kappa) * p.tau[1])),
         (1, 0, (1, 0), lambda p: complex(p.n[0] * p.tau[0])),
         (1, 1, (1, 0), lambda p: complex(p.n[0] * p.tau[1])),
         (1, 0, (0, 1), lambda p: complex(p.n[1] * p.tau[0])),
         (1, 1, (0, 1), lambda p: complex(p.n[1] * p.tau[1]))]
    return AdnProblem(M=2, L_coeffs=tuple(lap), B_coeffs=tuple(b),
                      s=(0, 0), t=(2, 2), r=(-2, -1),
                      name="navier_laplacian")


_SYMBOLS = {"n1": lambda p: complex(p.n[0]), "n2": lambda p: complex(p.n[1]),
            "tau1": lambda p: complex(p.tau[0]), "tau2": lambda p: complex(p.tau[1])}


def _parse_coeff(c):
    """Numbers stay numbers; strings are '*'-separated products of the
    geometric symbols n1, n2, tau1, tau2 and numeric literals."""
    if not isinstance(c, str):
        return complex(c)
    factors = []
    for token in c.split("*"):
        token = token.strip()
        if token in _SYMBOLS:
            factors.append(_SYMBOLS[token])
        else:
            value = complex(token)
            factors.append(lambda p, v=value: v)
    def coeff(point):
        out = 1.0 + 0.0j
        for f in factors:
            out *= f(point)
        return out
    return coeff


def load_problem(source) -> AdnProblem:
    """Build an AdnProblem from a JSON file path or an already-parsed
    dict. Entries use 1-indexed rows and columns:

        {"M": 2, "s": [0, 0], "t": [2, 2], "r": [-2, -1],
         "L": [{"i": 1, "j": 1, "mi": [2, 0], "c": 1}, ...],
         "B": [{"i": 1, "j": 1, "mi": [0, 0], "c": "n1"}, ...]}

    or name a built-in: {"builtin": "navier_laplacian", "alpha": 1.0}.
    """
    if isinstance(source, (str,)):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = source
    if "builtin" in data:
        if data["builtin"] != "navier_laplacian":
            raise ValueError(f"unknown builtin problem {data['builtin']!r}")
        return navier_laplacian_problem(data.get("alpha", 0.0),
                                        float(data.get("kappa", 1.0)))
    def entries(rows):
        return tuple((int(e["i"]) - 1, int(e["j"]) - 1, tuple(e["mi"]),
                      _parse_coeff(e["c"])) for e in rows)
    return AdnProblem(M=int(data["M"]), L_coeffs=entries(data["L"]),
                      B_coeffs=entries(data["B"]), s=tuple(data["s"]),
                      t=tuple(data["t"]), r=tuple(data["r"]),
                      name=str(data.get("name", "")))
