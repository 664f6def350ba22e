"""Uniform Cartesian grids, occluded subsets and fields living on them.

A grid has ``m`` interior points per axis on an axis-aligned box, so the
spacing is ``h = (upper - lower) / (m + 1)`` and the points are
``y_j = lower + h * j`` for ``j`` in ``{1, ..., m}^d``.  Occluded domains
(e.g. the L-shape) keep the full bounding lattice and switch points off
through a boolean mask; that keeps the operator translation invariant on
the bounding box.

Arrays over the full lattice are indexed with 0-based ``i = j - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "make_l_shape",
    "restrict",
    "sample",
]


def _normalize_box(d: int, box) -> tuple[tuple[float, ...], tuple[float, ...]]:
    arr = np.asarray(box, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (d, 1))
    if arr.shape != (d, 2):
        raise ConfigurationError(f"box must be (lower, upper) or {d} such pairs, got shape {arr.shape}")
    if np.any(arr[:, 1] <= arr[:, 0]):
        raise ConfigurationError(f"empty box {arr.tolist()}")
    return tuple(arr[:, 0].tolist()), tuple(arr[:, 1].tolist())


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform lattice on a hypercube with an activity mask."""

    d: int
    m: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    active: np.ndarray = field(repr=False)

    def __post_init__(self):
        active = np.array(self.active, dtype=bool)
        if active.shape != self.shape:
            raise DimensionError(f"mask shape {active.shape} does not match lattice {self.shape}")
        active.setflags(write=False)
        object.__setattr__(self, "active", active)
        object.__setattr__(self, "_n_active", int(active.sum()))
        object.__setattr__(self, "_full", bool(self._n_active == active.size))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.m,) * self.d

    @property
    def h(self) -> float:
        return (self.upper[0] - self.lower[0]) / (self.m + 1)

    @property
    def n_active(self) -> int:
        return self._n_active

    @property
    def is_full(self) -> bool:
        return self._full

    @property
    def box(self) -> np.ndarray:
        return np.column_stack([self.lower, self.upper])

    def axis(self, k: int = 0) -> np.ndarray:
        """Coordinates of the interior points along axis ``k``."""
        return self.lower[k] + self.h * np.arange(1, self.m + 1)

    def indices(self) -> np.ndarray:
        """1-based lattice indices ``j`` of the active points, shape (n_active, d).

        Rows are in lexicographic order of ``(j_1, ..., j_d)``.
        """
        return np.argwhere(self.active) + 1

    def coordinates(self, indices=None) -> np.ndarray:
        """Physical coordinates of the active points (or of given indices)."""
        j = self.indices() if indices is None else np.asarray(indices)
        return np.asarray(self.lower) + self.h * j

    def nearest_index(self, x) -> np.ndarray:
        """Nearest 1-based lattice index of each coordinate row in ``x``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.rint((x - np.asarray(self.lower)) / self.h).astype(int)

    def to_full(self, values) -> np.ndarray:
        """Scatter active values into a zero-filled array over the full lattice."""
        values = np.asarray(values)
        if values.shape != (self.n_active,):
            raise DimensionError(f"expected {self.n_active} values, got shape {values.shape}")
        if self.is_full:
            return values.reshape(self.shape).copy()
        out = np.zeros(self.shape, dtype=values.dtype)
        out[self.active] = values
        return out

    def from_full(self, array) -> np.ndarray:
        """Gather the active entries of a full-lattice array."""
        array = np.asarray(array)
        if array.shape != self.shape:
            raise DimensionError(f"expected lattice shape {self.shape}, got {array.shape}")
        if self.is_full:
            return array.reshape(-1).copy()
        return array[self.active]

    def compatible(self, other: "Grid") -> bool:
        return (
            self is other
            or (
                self.d == other.d
                and self.m == other.m
                and self.lower == other.lower
                and self.upper == other.upper
                and np.array_equal(self.active, other.active)
            )
        )

    def describe(self) -> str:
        kind = "full" if self.is_full else "occluded"
        return f"{kind} grid d={self.d} m={self.m} h={self.h:.6g} N={self.n_active}"


@dataclass(frozen=True, eq=False)
class Field:
    """Real values on the active points of a grid, in lexicographic order."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_active,):
            raise DimensionError(
                f"field has {values.shape} values, grid has {self.grid.n_active} active points"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.values.size

    def full(self) -> np.ndarray:
        """Values on the whole lattice, zero at inactive points."""
        return self.grid.to_full(self.values)

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)


def make_grid(d: int, m: int, box=(0.0, 1.0)) -> Grid:
    """Full grid with ``m`` interior points per axis.

    Examples
    --------
    >>> make_grid(1, 511, (-1, 1)).h
    0.00390625
    """
    if d not in (1, 2, 3):
        raise ConfigurationError(f"dimension must be 1, 2 or 3, got {d}")
    if int(m) != m or m < 3:
        raise ConfigurationError(f"need at least 3 points per axis, got {m}")
    lower, upper = _normalize_box(d, box)
    extents = np.subtract(upper, lower)
    if not np.allclose(extents, extents[0], rtol=1e-14, atol=0.0):
        raise ConfigurationError(f"box must be a hypercube, extents are {extents.tolist()}")
    return Grid(d, int(m), lower, upper, np.ones((int(m),) * d, dtype=bool))


def make_l_shape(m: int, box=(0.0, 1.0)) -> Grid:
    """2-D grid with the upper-right ``(m+1)/2`` x ``(m+1)/2`` corner switched off."""
    if int(m) != m or m < 3 or m % 2 == 0:
        raise ConfigurationError(f"L-shape needs an odd point count m >= 3, got {m}")
    grid = make_grid(2, m, box)
    cut = (m + 1) // 2
    mask = np.ones((m, m), dtype=bool)
    mask[m - cut:, m - cut:] = False
    return Grid(2, m, grid.lower, grid.upper, mask)


def sample(grid: Grid, func) -> Field:
    """Field from a function evaluated at the active coordinates.

    ``func`` receives an ``(n_active, d)`` array and returns ``n_active`` values.
    """
    return Field(grid, np.asarray(func(grid.coordinates()), dtype=float).reshape(-1))


def _nested_view(fine_full: np.ndarray, levels: int = 1) -> np.ndarray:
    out = fine_full
    for _ in range(levels):
        out = out[(slice(1, None, 2),) * out.ndim]
    return out


def restrict(fine: Field, coarse: Grid) -> Field:
    """Values of ``fine`` at the points of the nested grid ``coarse``.

    Coarse index ``j`` coincides with fine index ``2 j`` when
    ``m_fine = 2 m_coarse + 1``; repeated nesting is followed automatically.
    """
    fg = fine.grid
    if fg.d != coarse.d or not np.allclose(fg.box, coarse.box, rtol=1e-14, atol=1e-14):
        raise DimensionError("grids do not share a dimension and box")
    levels, m = 0, fg.m
    while m > coarse.m:
        if (m - 1) % 2:
            raise DimensionError(f"m={fg.m} is not nested over m={coarse.m}")
        m = (m - 1) // 2
        levels += 1
    if m != coarse.m:
        raise DimensionError(f"m={fg.m} is not nested over m={coarse.m}")
    if levels == 0:
        if not fg.compatible(coarse):
            raise DimensionError("grids have equal size but different masks")
        return Field(coarse, fine.values)
    if not np.all(_nested_view(fg.active, levels)[coarse.active]):
        raise DimensionError("coarse active points map to inactive fine points")
    view = _nested_view(fine.full(), levels)
    return Field(coarse, view[coarse.active] if not coarse.is_full else view.reshape(-1))


def coarse_sizes(m_fine: int, levels: int) -> Sequence[int]:
    """Per-axis counts of successively nested coarser grids, finest first."""
    sizes = [m_fine]
    for _ in range(levels):
        sizes.append((sizes[-1] - 1) // 2)
    return sizes

