"""Window, quadrature constants and the translation-invariant stencil.

The discrete fractional Laplacian at a lattice point ``y_i`` is

    C h^d [ A1 u_i - sum_{j != i} u_j / |y_i - y_j|^(d+alpha)
            + (A2 + A3) L_FD u_i ],

with ``L_FD`` the standard (2d+1)-point Laplacian.  ``A1`` is a pure
lattice sum, ``A2`` a windowed lattice moment and ``A3`` the matching
windowed integral that puts back what the subtraction removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConfigurationError, ConsistencyError, DomainError
from .lattice import lattice_sum

__all__ = [
    "WindowSpec",
    "OperatorConstants",
    "KernelTable",
    "WINDOW_COEFFS",
    "window_poly",
    "window_eval",
    "window_complement",
    "normalizing_constant",
    "sphere_measure",
    "compute_A2",
    "compute_A3",
    "build_constants",
    "build_stencil",
]

# 1 - 35 t^4 + 84 t^5 - 70 t^6 + 20 t^7, ascending powers
WINDOW_COEFFS = (1.0, 0.0, 0.0, 0.0, -35.0, 84.0, -70.0, 20.0)

DEFAULT_RADIUS_POINTS = 20
DEFAULT_LATTICE_TOL = 1e-12


def window_poly() -> np.polynomial.Polynomial:
    """The window profile on ``[0, 1]`` as an exact polynomial in ``t = r / delta``."""
    return np.polynomial.Polynomial(WINDOW_COEFFS)


@dataclass(frozen=True)
class WindowSpec:
    """Compactly supported window of radius ``delta = radius_points * h``."""

    h: float
    radius_points: int = DEFAULT_RADIUS_POINTS

    def __post_init__(self):
        if self.h <= 0:
            raise ConfigurationError(f"grid spacing must be positive, got {self.h}")
        if int(self.radius_points) != self.radius_points or self.radius_points < 2:
            raise ConfigurationError(f"window needs radius_points >= 2, got {self.radius_points}")

    @property
    def delta(self) -> float:
        return self.radius_points * self.h


def window_eval(r, spec: WindowSpec):
    """Evaluate the C^3 polynomial window at distance(s) ``r >= 0``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError("window is defined for r >= 0 only")
    t = r / spec.delta
    inside = t < 1.0
    tc = np.where(inside, t, 0.0)
    # 1 - t^4 (...) on the inner half, factored (1-t)^4 (1 + 4t + 10t^2 + 20t^3)
    # on the outer half, so both ends stay inside [0, 1] without cancellation
    near = 1.0 - tc**4 * (35.0 + tc * (-84.0 + tc * (70.0 - 20.0 * tc)))
    far = (1.0 - tc) ** 4 * (1.0 + tc * (4.0 + tc * (10.0 + 20.0 * tc)))
    value = np.where(tc < 0.5, near, far)
    out = np.where(inside, value, 0.0)
    return float(out) if out.ndim == 0 else out


def window_complement(r, spec: WindowSpec):
    """``1 - w(r)`` evaluated from the tail polynomial, free of cancellation near ``r = 0``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError("window is defined for r >= 0 only")
    t = np.minimum(r / spec.delta, 1.0)
    out = t**4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
    return float(out) if out.ndim == 0 else out


def normalizing_constant(alpha: float, d: int) -> float:
    """``C = 2^alpha Gamma((d+alpha)/2) / (pi^(d/2) |Gamma(-alpha/2)|)``."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    return 2.0**alpha * math.gamma((d + alpha) / 2.0) / (math.pi ** (d / 2.0) * abs(math.gamma(-alpha / 2.0)))


def sphere_measure(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2, 2 pi, 4 pi for d = 1, 2, 3)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _ball_points(d: int, radius: int) -> np.ndarray:
    ax = np.arange(-radius, radius + 1)
    pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    n2 = np.sum(pts**2, axis=1)
    return pts[(n2 > 0) & (n2 < radius * radius)]


def compute_A2(alpha: float, d: int, spec: WindowSpec) -> float:
    """Windowed second moment ``1/2 sum_{j != 0} w(|y_j|) (e_1 . y_j)^2 / |y_j|^(d+alpha)``.

    Only lattice points strictly inside the window radius contribute.
    """
    h = spec.h
    pts = _ball_points(d, spec.radius_points).astype(float)
    norm = np.sqrt(np.sum(pts**2, axis=1))
    w = window_eval(norm * h, spec)
    total = np.sum(w * pts[:, 0] ** 2 * norm ** (-(d + alpha)))
    return 0.5 * h ** (2.0 - d - alpha) * float(total)


def _window_radial_moment(alpha: float) -> float:
    """``int_0^1 s^(1-alpha) p(s) ds`` for the window polynomial ``p``."""
    return sum(c / (k + 2.0 - alpha) for k, c in enumerate(WINDOW_COEFFS) if c != 0.0)


def compute_A3(alpha: float, d: int, h: float, spec: WindowSpec) -> float:
    """Closed form of ``-(h^-d / 2) int w(|y|) (e_1 . y)^2 / |y|^(d+alpha) dy``."""
    if not 0.0 < alpha < 2.0:
        raise ConfigurationError(f"A3 is singular unless 0 < alpha < 2, got {alpha}")
    delta = spec.delta
    radial = delta ** (2.0 - alpha) * _window_radial_moment(alpha)
    return -0.5 * h ** (-d) * sphere_measure(d) / d * radial


@dataclass(frozen=True)
class OperatorConstants:
    alpha: float
    d: int
    h: float
    radius_points: int
    C_ad: float
    A1: float
    A2: float
    A3: float
    lattice_tol: float = DEFAULT_LATTICE_TOL

    @property
    def delta(self) -> float:
        return self.radius_points * self.h

    @property
    def fd_coefficient(self) -> float:
        """``A2 + A3`` (negative), the weight of the finite-difference Laplacian."""
        return self.A2 + self.A3

    @property
    def laplacian_weight(self) -> float:
        """``C h^d |A2 + A3|``: M contains this multiple of the negative FD Laplacian."""
        return self.C_ad * self.h**self.d * abs(self.A2 + self.A3)

    def row(self) -> dict:
        return {
            "alpha": self.alpha,
            "d": self.d,
            "h": self.h,
            "delta": self.delta,
            "C": self.C_ad,
            "A1": self.A1,
            "A2": self.A2,
            "A3": self.A3,
        }


def build_constants(
    alpha: float,
    d: int,
    h: float,
    radius_points: int = DEFAULT_RADIUS_POINTS,
    lattice_tol: float = DEFAULT_LATTICE_TOL,
) -> OperatorConstants:
    """All scalars needed to materialize the stencil on a grid of spacing ``h``."""
    if d not in (1, 2, 3):
        raise ConfigurationError(f"dimension must be 1, 2 or 3, got {d}")
    C = normalizing_constant(alpha, d)
    spec = WindowSpec(h, radius_points)
    A1 = lattice_sum(d, d + alpha, lattice_tol) * h ** (-(d + alpha))
    A2 = compute_A2(alpha, d, spec)
    A3 = compute_A3(alpha, d, h, spec)
    if not (A1 > 0 and A2 > 0 and A3 < 0 and A2 + A3 < 0):
        raise ConsistencyError(f"constant signs violated: A1={A1}, A2={A2}, A3={A3}")
    return OperatorConstants(alpha, d, h, int(radius_points), C, A1, A2, A3, lattice_tol)


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Stencil entries ``T(o)`` for offsets ``o`` in ``{-(m-1), ..., m-1}^d``.

    The stencil only depends on ``|o_k|``, so the nonnegative orthant
    (shape ``(m,)*d``) is stored; :meth:`at` resolves arbitrary offsets.
    """

    d: int
    m: int
    orthant: np.ndarray

    def at(self, offset) -> float:
        idx = tuple(abs(int(o)) for o in np.atleast_1d(offset))
        if len(idx) != self.d or max(idx) >= self.m:
            raise IndexError(f"offset {offset} outside the table range")
        return float(self.orthant[idx])

    def full(self) -> np.ndarray:
        """Table over all offsets, index ``o + (m - 1)`` along each axis."""
        idx = np.abs(np.arange(-(self.m - 1), self.m))
        return self.orthant[np.ix_(*([idx] * self.d))]


def build_stencil(grid, consts: OperatorConstants) -> KernelTable:
    """Fused kernel + finite-difference stencil for ``grid``."""
    d, m, h = grid.d, grid.m, consts.h
    if d != consts.d or not math.isclose(grid.h, h, rel_tol=1e-12):
        raise ConfigurationError("constants were built for a different grid")
    s = d + consts.alpha
    pref = consts.C_ad * h**d
    ax2 = np.arange(m, dtype=float) ** 2
    r2 = np.zeros((m,) * d)
    for k in range(d):
        r2 = r2 + ax2.reshape((1,) * k + (m,) + (1,) * (d - k - 1))
    r2.flat[0] = 1.0
    orthant = -pref * (h * h * r2) ** (-s / 2.0)
    fd = consts.fd_coefficient / h**2
    orthant.flat[0] = pref * (consts.A1 - 2 * d * fd)
    for k in range(d):
        unit = [0] * d
        unit[k] = 1
        orthant[tuple(unit)] += pref * fd
    return KernelTable(d, m, orthant)
