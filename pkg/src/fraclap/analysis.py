"""Error norms, log-log rate fits and three-grid Richardson rates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateReferenceError, DimensionError, FitError
from .grid import Field, restrict

__all__ = ["RateEstimate", "norm", "relative_error", "richardson_rate", "fit_rate"]


def _vec(x) -> np.ndarray:
    return np.asarray(x.values if isinstance(x, Field) else x, dtype=float)


def norm(v, p=2) -> float:
    """Unweighted vector norm; ``p`` is 2 or ``inf``."""
    v = _vec(v)
    if p in (2, "2"):
        return float(np.linalg.norm(v))
    if p in (np.inf, "inf", math.inf):
        return float(np.max(np.abs(v))) if v.size else 0.0
    raise ValueError(f"unsupported norm {p!r}")


def relative_error(u, v, p=2) -> float:
    """``||u - v||_p / ||v||_p``."""
    if isinstance(u, Field) and isinstance(v, Field) and not u.grid.compatible(v.grid):
        raise DimensionError("fields live on different grids")
    a, b = _vec(u), _vec(v)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    ref = norm(b, p)
    if ref == 0.0:
        raise DegenerateReferenceError("reference field has zero norm")
    return norm(a - b, p) / ref


@dataclass(frozen=True)
class RateEstimate:
    p_norm: object
    rate: float
    m_coarse: int
    m_medium: int
    m_fine: int
    diff_coarse: float  # ||f_m - f_c||
    diff_fine: float  # ||f_f - f_m||


def richardson_rate(coarse: Field, medium: Field, fine: Field, p=2) -> RateEstimate:
    """Observed order from three nested solutions, compared on the coarse grid.

    ``rate = (log||f_f - f_m|| - log||f_m - f_c||) / log(1/2)``.
    """
    cg = coarse.grid
    if medium.grid.m != 2 * cg.m + 1 or fine.grid.m != 2 * medium.grid.m + 1:
        raise DimensionError(
            f"grids are not nested: m = {cg.m}, {medium.grid.m}, {fine.grid.m}"
        )
    mc = restrict(medium, cg).values
    fc = restrict(fine, cg).values
    lo = norm(mc - coarse.values, p)
    hi = norm(fc - mc, p)
    if lo == 0.0 or hi == 0.0:
        raise DegenerateReferenceError("identical levels, rate undefined")
    rate = (math.log(hi) - math.log(lo)) / math.log(0.5)
    return RateEstimate(p, rate, cg.m, medium.grid.m, fine.grid.m, lo, hi)


def fit_rate(sizes, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(N)``."""
    n = np.asarray(sizes, dtype=float)
    e = np.asarray(errors, dtype=float)
    if n.shape != e.shape or n.ndim != 1:
        raise FitError("sizes and errors must be 1-D and of equal length")
    if n.size < 3:
        raise FitError(f"need at least 3 points, got {n.size}")
    if np.any(e <= 0) or np.any(n <= 0) or not np.all(np.isfinite(e)):
        raise FitError("sizes and errors must be positive and finite")
    if np.unique(n).size < 2:
        raise FitError("all sizes coincide")
    slope, _ = np.polyfit(np.log(n), np.log(e), 1)
    return float(slope)
