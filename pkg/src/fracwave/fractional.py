"""Discrete fractional calculus on uniform time meshes and periodic grids.

Time direction: fractional integrals use product integration with exact
kernel moments against the piecewise-linear interpolant of the samples, so
polynomials up to degree one are integrated exactly for every order.  The
Caputo derivative of order in (1, 2) composes the fractional integral of
order 2 - alpha with a second-order finite-difference second derivative; the
Riemann-Liouville derivative of order in (0, 1) forward-differences the
fractional integral of the complementary order.

Space direction: one-sided fractional derivatives and their symmetric
combination act as Fourier multipliers on a uniform periodic grid, with the
zero frequency always mapped to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SingularOrderError, SizeError
from .special import gamma

__all__ = [
    "TimeMesh",
    "SpatialGrid",
    "GridFunction",
    "Trajectory",
    "pi_weights",
    "rl_integral",
    "caputo_derivative",
    "rl_derivative",
    "caputo_derivative_01",
    "first_difference",
    "second_difference",
    "liouville_multiplier",
    "apply_multiplier",
    "sobolev_norm",
    "InequalityReport",
    "inequality_diagnostic",
]


@dataclass(frozen=True)
class TimeMesh:
    """Uniform mesh t_k = k * dt on [0, t_max] with n_steps cells."""

    t_max: float
    n_steps: int

    def __post_init__(self):
        if not self.t_max > 0.0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if self.n_steps < 2:
            raise ValueError(f"n_steps must be at least 2, got {self.n_steps!r}")

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on [-L, L) with a power-of-two point count."""

    half_length: float
    n_points: int

    def __post_init__(self):
        if not self.half_length > 0.0:
            raise ValueError(f"half_length must be positive, got {self.half_length!r}")
        n = self.n_points
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= 8, got {n!r}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @property
    def x(self) -> np.ndarray:
        return -self.half_length + self.dx * np.arange(self.n_points)

    @property
    def xi(self) -> np.ndarray:
        """Angular frequencies in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass
class GridFunction:
    """Complex samples attached to a periodic grid."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise SizeError(
                f"expected {self.grid.n_points} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals.view(float))):
            raise ValueError("grid function samples must be finite")
        self.values = vals

    def l2_norm(self) -> float:
        """Discrete L2 norm, dx-weighted."""
        return math.sqrt(self.grid.dx * float(np.sum(np.abs(self.values) ** 2)))


@dataclass
class Trajectory:
    """Time-indexed states: values[k] is the state at mesh node k.

    grid is set for spatially distributed states and None for abstract
    vector-valued problems (scalars are vectors of length one).
    """

    mesh: TimeMesh
    values: np.ndarray
    grid: Optional[SpatialGrid] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 2 or vals.shape[0] != self.mesh.n_nodes:
            raise SizeError(
                f"expected ({self.mesh.n_nodes}, dim) values, got shape {vals.shape}"
            )
        if self.grid is not None and vals.shape[1] != self.grid.n_points:
            raise SizeError("state dimension does not match the grid")
        self.values = vals

    def frame(self, k: int) -> GridFunction:
        if self.grid is None:
            raise SizeError("trajectory has no spatial grid attached")
        return GridFunction(self.grid, self.values[k])

    def norms(self, weight: Optional[float] = None) -> np.ndarray:
        """Euclidean (or dx-weighted when attached to a grid) norm per node."""
        w = self.grid.dx if self.grid is not None else (weight or 1.0)
        return np.sqrt(w * np.sum(np.abs(self.values) ** 2, axis=1))


def pi_weights(gamma_ord: float, n_nodes: int, dt: float) -> np.ndarray:
    """Product-integration weight matrix W for the fractional integral.

    (W f)[n] approximates J^gamma f(t_n) with exact moments of the kernel
    (t_n - tau)**(gamma-1) against the piecewise-linear interpolant of f, so
    the rule is exact for piecewise-linear signals.  Powers are evaluated at
    physical times to stay inside the double range even for large orders.
    """
    if gamma_ord <= 0.0:
        raise SingularOrderError("integral order must be positive")
    if n_nodes < 2:
        raise SizeError("need at least two mesh nodes")
    gp1 = gamma_ord + 1.0
    scale = 1.0 / math.gamma(gamma_ord + 2.0)
    ext = dt * np.arange(n_nodes + 1)
    extp = ext**gp1
    # offset kernel: dt**gamma * b_m = (t_{m+1}^(g+1) - 2 t_m^(g+1) + t_{m-1}^(g+1)) / dt
    b = np.zeros(n_nodes)
    b[1:] = (extp[2 : n_nodes + 1] - 2.0 * extp[1:n_nodes] + extp[0 : n_nodes - 1]) / dt
    n_idx = np.arange(n_nodes)
    offsets = np.subtract.outer(n_idx, n_idx)
    w = np.where(offsets >= 1, b[np.clip(offsets, 0, n_nodes - 1)], 0.0)
    # left endpoint: dt**gamma * a_n = t_{n-1}^(g+1)/dt - (n-1-gamma) t_n^gamma
    times = ext[:n_nodes]
    a = np.zeros(n_nodes)
    a[1:] = extp[0 : n_nodes - 1] / dt - (n_idx[1:] - 1.0 - gamma_ord) * (times[1:] ** gamma_ord)
    w[:, 0] = a
    np.fill_diagonal(w, dt**gamma_ord)
    w[0, :] = 0.0
    return w * scale


def rl_integral(samples: np.ndarray, gamma_ord: float, mesh: TimeMesh) -> np.ndarray:
    """Fractional integral of the sampled signal along axis 0.

    Order zero returns the input unchanged; the value at t_0 is zero for any
    positive order.
    """
    arr = np.asarray(samples, dtype=complex)
    if arr.shape[0] != mesh.n_nodes:
        raise SizeError(
            f"signal has {arr.shape[0]} nodes but the mesh has {mesh.n_nodes}"
        )
    if gamma_ord == 0.0:
        return arr.copy()
    w = pi_weights(gamma_ord, mesh.n_nodes, mesh.dt)
    flat = arr.reshape(mesh.n_nodes, -1)
    out = w @ flat
    return out.reshape(arr.shape)


def first_difference(samples: np.ndarray, dt: float) -> np.ndarray:
    """Second-order first derivative: central interior, one-sided ends."""
    arr = np.asarray(samples, dtype=complex)
    if arr.shape[0] < 3:
        raise SizeError("need at least three nodes for the derivative stencils")
    out = np.empty_like(arr)
    out[1:-1] = (arr[2:] - arr[:-2]) / (2.0 * dt)
    out[0] = (-3.0 * arr[0] + 4.0 * arr[1] - arr[2]) / (2.0 * dt)
    out[-1] = (3.0 * arr[-1] - 4.0 * arr[-2] + arr[-3]) / (2.0 * dt)
    return out


def second_difference(samples: np.ndarray, dt: float) -> np.ndarray:
    """Second derivative: central interior, second-order one-sided ends."""
    arr = np.asarray(samples, dtype=complex)
    if arr.shape[0] < 4:
        raise SizeError("need at least four nodes for the one-sided stencils")
    out = np.empty_like(arr)
    out[1:-1] = (arr[2:] - 2.0 * arr[1:-1] + arr[:-2]) / dt**2
    out[0] = (2.0 * arr[0] - 5.0 * arr[1] + 4.0 * arr[2] - arr[3]) / dt**2
    out[-1] = (2.0 * arr[-1] - 5.0 * arr[-2] + 4.0 * arr[-3] - arr[-4]) / dt**2
    return out


def caputo_derivative(samples: np.ndarray, alpha: float, mesh: TimeMesh) -> np.ndarray:
    """Caputo derivative of order alpha in (1, 2) along axis 0."""
    if not (1.0 < alpha < 2.0):
        raise SingularOrderError(f"Caputo order must lie in (1, 2), got {alpha:g}")
    d2 = second_difference(np.asarray(samples, dtype=complex), mesh.dt)
    return rl_integral(d2, 2.0 - alpha, mesh)


def rl_derivative(samples: np.ndarray, gamma_ord: float, mesh: TimeMesh) -> np.ndarray:
    """Riemann-Liouville derivative of order in (0, 1) along axis 0.

    Differentiates the fractional integral of order 1 - gamma with the
    second-order stencils; accuracy at the first nodes is limited by the
    t**(1-gamma) leading behavior of the integral, not by the stencil.
    """
    if not (0.0 < gamma_ord < 1.0):
        raise SingularOrderError(f"derivative order must lie in (0, 1), got {gamma_ord:g}")
    g = rl_integral(samples, 1.0 - gamma_ord, mesh)
    return first_difference(g, mesh.dt)


def caputo_derivative_01(samples: np.ndarray, gamma_ord: float, mesh: TimeMesh) -> np.ndarray:
    """Caputo derivative of order in (0, 1): integrate the first difference.

    The difference-then-integrate route; it agrees with rl_derivative applied
    to samples minus their initial value up to scheme order.
    """
    if not (0.0 < gamma_ord < 1.0):
        raise SingularOrderError(f"derivative order must lie in (0, 1), got {gamma_ord:g}")
    arr = np.asarray(samples, dtype=complex)
    d1 = np.empty_like(arr)
    d1[:-1] = (arr[1:] - arr[:-1]) / mesh.dt
    d1[-1] = (arr[-1] - arr[-2]) / mesh.dt
    return rl_integral(d1, 1.0 - gamma_ord, mesh)


_MULTIPLIER_KINDS = ("left", "right", "riesz")


def liouville_multiplier(kind: str, beta: float, grid: SpatialGrid) -> np.ndarray:
    """Fourier symbol of a one-sided or symmetric fractional derivative.

    left  -> (i xi)**beta,  right -> (-i xi)**beta,
    riesz -> -|xi|**beta (the normalized symmetric combination; beta = 1 is
    singular for it and rejected).  The zero frequency maps to zero.
    """
    if kind not in _MULTIPLIER_KINDS:
        raise ValueError(f"kind must be one of {_MULTIPLIER_KINDS}, got {kind!r}")
    if not (0.0 < beta <= 2.0):
        raise SingularOrderError(f"order must lie in (0, 2], got {beta:g}")
    xi = grid.xi
    mag = np.abs(xi) ** beta
    if kind == "riesz":
        if abs(math.cos(beta * math.pi / 2.0)) < 1e-12:
            raise SingularOrderError("symmetric combination is singular at order 1")
        out = -mag.astype(complex)
    else:
        sign = 1.0 if kind == "left" else -1.0
        phase = np.exp(1j * sign * (math.pi * beta / 2.0) * np.sign(xi))
        out = mag * phase
    out[xi == 0.0] = 0.0
    return out


def apply_multiplier(multiplier: np.ndarray, u: GridFunction) -> GridFunction:
    """Apply a Fourier multiplier to a grid function."""
    m = np.asarray(multiplier)
    if m.shape != u.values.shape:
        raise SizeError(
            f"multiplier length {m.shape} does not match grid size {u.values.shape}"
        )
    out = np.fft.ifft(m * np.fft.fft(u.values))
    return GridFunction(u.grid, out)


def sobolev_norm(u: GridFunction, beta: float) -> float:
    """Fractional Sobolev norm of regularity index beta.

    For beta in (0, 1): L2 norm plus the one-sided derivative seminorm.
    For beta in (1, 2): additionally the first-derivative L2 norm.
    Index 1 (and anything outside (0, 2)) is rejected.
    """
    if not (0.0 < beta < 2.0) or beta == 1.0:
        raise SingularOrderError(
            f"regularity index must lie in (0,1) or (1,2), got {beta:g}"
        )
    total = u.l2_norm() ** 2
    frac = apply_multiplier(liouville_multiplier("left", beta, u.grid), u)
    total += frac.l2_norm() ** 2
    if beta > 1.0:
        dxu = apply_multiplier(1j * u.grid.xi, u)
        total += dxu.l2_norm() ** 2
    return math.sqrt(total)


@dataclass
class InequalityReport:
    """Left/right sides and their ratio for a fractional product or
    composition estimate; constants are unspecified so only the ratio is
    reported.  violation flags a nonzero left side against a vanishing right
    side."""

    case: str
    order: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.lhs == 0.0:
            return 0.0
        if self.rhs == 0.0:
            return math.inf
        return self.lhs / self.rhs

    @property
    def violation(self) -> bool:
        return self.rhs == 0.0 and self.lhs > 0.0


def _d_norm(u: GridFunction, order: float) -> float:
    return apply_multiplier(liouville_multiplier("left", order, u.grid), u).l2_norm()


def _d_sup(u: GridFunction, order: float) -> float:
    out = apply_multiplier(liouville_multiplier("left", order, u.grid), u)
    return float(np.max(np.abs(out.values)))


def _dx_sup(u: GridFunction) -> float:
    out = apply_multiplier(1j * u.grid.xi, u)
    return float(np.max(np.abs(out.values)))


def inequality_diagnostic(
    case: str,
    order: float,
    *,
    u: Optional[GridFunction] = None,
    fn: Optional[Callable] = None,
    fn_prime: Optional[Callable] = None,
    f: Optional[GridFunction] = None,
    g: Optional[GridFunction] = None,
) -> InequalityReport:
    """Measured two-sided data for the fractional chain and product rules.

    Cases:
      chain_low     order in (0,1):  |D^a f(u)|        vs |f'(u)|_inf |D^a u|
      product_low   order in (0,1):  |D^a (fg)|        vs |f|_inf |D^a g| + |D^a f| |g|_inf
      chain_high    order in (1,2):  |D^a f(u)|        vs |f'(u)|_inf |D^a u|
                                          + |D^(a-1) f'(u)|_inf * H^a-norm of u
      product_high  order in (1,2):  |D^a (fg)|        vs the four-term right side
                                          with first-derivative sup factors

    Only ratios are meaningful; the report never asserts a constant.
    """
    if case in ("chain_low", "chain_high"):
        if u is None or fn is None or fn_prime is None:
            raise ValueError(f"case {case!r} needs u, fn and fn_prime")
        if case == "chain_low" and not (0.0 < order < 1.0):
            raise SingularOrderError("chain_low needs order in (0, 1)")
        if case == "chain_high" and not (1.0 < order < 2.0):
            raise SingularOrderError("chain_high needs order in (1, 2)")
        fu = GridFunction(u.grid, fn(u.values))
        fpu = GridFunction(u.grid, fn_prime(u.values))
        lhs = _d_norm(fu, order)
        rhs = float(np.max(np.abs(fpu.values))) * _d_norm(u, order)
        if case == "chain_high":
            rhs += _d_sup(fpu, order - 1.0) * sobolev_norm(u, order)
        return InequalityReport(case, order, lhs, rhs)
    if case in ("product_low", "product_high"):
        if f is None or g is None:
            raise ValueError(f"case {case!r} needs the factor pair f, g")
        if case == "product_low" and not (0.0 < order < 1.0):
            raise SingularOrderError("product_low needs order in (0, 1)")
        if case == "product_high" and not (1.0 < order < 2.0):
            raise SingularOrderError("product_high needs order in (1, 2)")
        prod = GridFunction(f.grid, f.values * g.values)
        lhs = _d_norm(prod, order)
        f_sup = float(np.max(np.abs(f.values)))
        g_sup = float(np.max(np.abs(g.values)))
        if case == "product_low":
            rhs = f_sup * _d_norm(g, order) + _d_norm(f, order) * g_sup
        else:
            rhs = (
                _dx_sup(f) * _d_norm(g, order - 1.0)
                + _d_norm(f, order) * g_sup
                + f_sup * _d_norm(g, order)
                + _d_norm(f, order - 1.0) * _dx_sup(g)
            )
        return InequalityReport(case, order, lhs, rhs)
    raise ValueError(f"unknown case {case!r}")
