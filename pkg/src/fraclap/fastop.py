"""The discrete fractional Laplacian as a fast convolution.

Zero-extended input is convolved with the stencil through an FFT of an
embedding lattice of at least ``2m - 1`` points per axis, so there is no
wraparound.  The stencil is even along every axis, hence its DFT is real
and only the real half-spectrum is cached.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DimensionError, SizeError
from .grid import Field, Grid
from .kernel import KernelTable, OperatorConstants, build_constants, build_stencil

__all__ = [
    "FracLapOperator",
    "build_operator",
    "operator_for_grid",
    "apply",
    "apply_dense",
    "apply_fd_laplacian",
    "dense_matrix",
    "dense_split",
    "fd_laplacian_full",
    "DENSE_CAP",
]

DENSE_CAP = 10_000


def _embedding_size(m: int) -> int:
    return sfft.next_fast_len(2 * m - 1, real=True)


def _circulant(table: KernelTable, size: int) -> np.ndarray:
    m, d = table.m, table.d
    i = np.arange(size)
    wrapped = np.minimum(i, size - i)
    used = wrapped < m
    idx = np.where(used, wrapped, 0)
    c = table.orthant[np.ix_(*([idx] * d))]
    for k in range(d):
        shape = [1] * d
        shape[k] = size
        c = c * used.reshape(shape)
    return c


@dataclass(frozen=True, eq=False)
class FracLapOperator:
    """Fast apply of ``M`` on the active points of ``grid``."""

    grid: Grid
    consts: OperatorConstants
    table: KernelTable
    multiplier: np.ndarray = field(repr=False)
    size: int
    build_time: float = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        n = self.grid.n_active
        return (n, n)

    def matvec(self, values: np.ndarray) -> np.ndarray:
        """``M u`` on raw active-point values."""
        grid = self.grid
        full = grid.to_full(np.asarray(values, dtype=float))
        spec = sfft.rfftn(full, s=(self.size,) * grid.d)
        spec *= self.multiplier
        out = sfft.irfftn(spec, s=(self.size,) * grid.d)
        out = out[(slice(0, grid.m),) * grid.d]
        return grid.from_full(out)

    def __call__(self, values):
        return self.matvec(values)


def build_operator(grid: Grid, consts: OperatorConstants) -> FracLapOperator:
    """Cache the spectral multiplier of the zero-padded stencil."""
    if consts.d != grid.d or not math.isclose(consts.h, grid.h, rel_tol=1e-12):
        raise ConfigurationError(
            f"constants (d={consts.d}, h={consts.h}) do not match grid (d={grid.d}, h={grid.h})"
        )
    t0 = time.perf_counter()
    table = build_stencil(grid, consts)
    size = _embedding_size(grid.m)
    multiplier = sfft.rfftn(_circulant(table, size)).real.copy()
    multiplier.setflags(write=False)
    return FracLapOperator(grid, consts, table, multiplier, size, time.perf_counter() - t0)


def operator_for_grid(grid: Grid, alpha: float, radius_points: int = 20, lattice_tol: float = 1e-12):
    """Convenience: constants and operator in one call."""
    return build_operator(grid, build_constants(alpha, grid.d, grid.h, radius_points, lattice_tol))


def _check_field(op_grid: Grid, u) -> np.ndarray:
    if isinstance(u, Field):
        if not u.grid.compatible(op_grid):
            raise DimensionError("field lives on a different grid than the operator")
        return u.values
    u = np.asarray(u, dtype=float)
    if u.shape != (op_grid.n_active,):
        raise DimensionError(f"expected {op_grid.n_active} values, got shape {u.shape}")
    return u


def apply(op: FracLapOperator, u: Field) -> Field:
    return Field(op.grid, op.matvec(_check_field(op.grid, u)))


def fd_laplacian_full(full: np.ndarray, h: float) -> np.ndarray:
    """``(sum of axis neighbours - 2d u) / h^2`` with zeros beyond the lattice."""
    d = full.ndim
    padded = np.pad(full, 1)
    inner = (slice(1, -1),) * d
    out = -2.0 * d * full
    for k in range(d):
        lo = list(inner)
        hi = list(inner)
        lo[k] = slice(0, -2)
        hi[k] = slice(2, None)
        out = out + padded[tuple(lo)] + padded[tuple(hi)]
    return out / (h * h)


def apply_fd_laplacian(grid: Grid, coeff: float, u) -> Field:
    """``coeff * L_FD u``; inactive neighbours count as zero (Dirichlet)."""
    values = _check_field(grid, u)
    full = grid.to_full(values)
    return Field(grid, coeff * grid.from_full(fd_laplacian_full(full, grid.h)))


def dense_split(op: FracLapOperator) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(K, L)`` with ``M = C h^d (K + L)``, built entry by entry.

    ``K`` holds ``A1`` on the diagonal and ``-|y_i - y_j|^-(d+alpha)`` off it;
    ``L = (A2 + A3) / h^2 * (adjacency - 2d I)`` over active points.
    """
    grid, c = op.grid, op.consts
    n = grid.n_active
    if n > DENSE_CAP:
        raise SizeError(f"dense evaluation capped at {DENSE_CAP} points, grid has {n}")
    j = grid.indices()
    diff = j[:, None, :] - j[None, :, :]
    dist = grid.h * np.sqrt(np.sum(diff.astype(float) ** 2, axis=-1))
    np.fill_diagonal(dist, 1.0)
    K = -(dist ** (-(grid.d + c.alpha)))
    np.fill_diagonal(K, c.A1)
    manhattan = np.sum(np.abs(diff), axis=-1)
    L = np.where(manhattan == 1, 1.0, 0.0)
    np.fill_diagonal(L, -2.0 * grid.d)
    L *= c.fd_coefficient / grid.h**2
    return K, L


def dense_matrix(op: FracLapOperator) -> np.ndarray:
    K, L = dense_split(op)
    return op.consts.C_ad * op.grid.h**op.grid.d * (K + L)


def apply_dense(op: FracLapOperator, u) -> Field:
    """Quadratic-cost evaluation of ``M u`` straight from the quadrature formula."""
    return Field(op.grid, dense_matrix(op) @ _check_field(op.grid, u))
