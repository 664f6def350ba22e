r"""Lattice sums :math:`S_d(s) = \sum_{j \in Z^d, j \ne 0} |j|^{-s}`.

For ``d = 1`` and ``d = 2`` closed forms exist,

    S_1(s) = 2 zeta(s),      S_2(s) = 4 zeta(s/2) beta(s/2),

with ``beta`` the Dirichlet beta function.  Any dimension can be handled
by the theta-function (Ewald) splitting of the Epstein zeta function,

    pi^{-s/2} Gamma(s/2) S_d(s)
        = sum_{j != 0} Gamma(s/2, pi |j|^2) (pi |j|^2)^{-s/2}
        + sum_{k != 0} Gamma((d-s)/2, pi |k|^2) (pi |k|^2)^{(s-d)/2}
        + 2/(s-d) - 2/s,

where both sums converge like ``exp(-pi |j|^2)``; a handful of shells
reach machine precision.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import ConfigurationError, DivergenceError

__all__ = ["lattice_sum", "epstein_zeta", "dirichlet_beta", "upper_gamma"]


def dirichlet_beta(x):
    """Dirichlet beta function for ``x > 1`` via Hurwitz zeta values."""
    return 4.0 ** (-x) * (special.zeta(x, 0.25) - special.zeta(x, 0.75))


def upper_gamma(a: float, x):
    """Non-normalized upper incomplete gamma ``Gamma(a, x)`` for ``x > 0``, any real ``a``.

    Negative orders are reached by the downward recurrence
    ``Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a``.
    """
    x = np.asarray(x, dtype=float)
    if a > 0:
        return special.gammaincc(a, x) * special.gamma(a)
    if a == 0:
        return special.exp1(x)
    return (upper_gamma(a + 1.0, x) - x**a * np.exp(-x)) / a


def _shell_counts(d: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct squared norms of nonzero lattice points in the cube and their multiplicities."""
    ax = np.arange(-radius, radius + 1)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    n2 = sum(g.astype(np.int64) ** 2 for g in grids).ravel()
    n2 = n2[n2 > 0]
    values, counts = np.unique(n2, return_counts=True)
    return values.astype(float), counts.astype(float)


def epstein_zeta(d: int, s: float, tol: float = 1e-12) -> float:
    """Theta-transform evaluation of ``S_d(s)`` for ``s > d``."""
    if s <= d:
        raise DivergenceError(f"lattice sum diverges for s={s} <= d={d}")
    # terms decay like exp(-pi n^2); keep every shell with pi n^2 below log(1/tol) + margin
    radius = int(math.ceil(math.sqrt((math.log(1.0 / tol) + 10.0) / math.pi))) + 1
    n2, counts = _shell_counts(d, radius)
    x = math.pi * n2
    direct = np.sum(counts * upper_gamma(s / 2.0, x) * x ** (-s / 2.0))
    dual = np.sum(counts * upper_gamma((d - s) / 2.0, x) * x ** ((s - d) / 2.0))
    total = direct + dual + 2.0 / (s - d) - 2.0 / s
    return float(math.pi ** (s / 2.0) / math.gamma(s / 2.0) * total)


def lattice_sum(d: int, s: float, tol: float = 1e-12, method: str = "auto") -> float:
    """Sum of ``|j|^{-s}`` over the nonzero points of ``Z^d``.

    Parameters
    ----------
    d : int
        Lattice dimension.
    s : float
        Exponent, must exceed ``d``.
    tol : float
        Requested relative accuracy, at most ``1e-6``.
    method : {"auto", "identity", "theta"}
        ``"identity"`` uses the zeta/beta closed forms (d <= 2 only),
        ``"theta"`` the Epstein splitting; ``"auto"`` prefers the closed form.
    """
    if s <= d:
        raise DivergenceError(f"lattice sum diverges for s={s} <= d={d}")
    if not 0.0 < tol <= 1e-6:
        raise ConfigurationError(f"tol must lie in (0, 1e-6], got {tol}")
    if method not in ("auto", "identity", "theta"):
        raise ConfigurationError(f"unknown lattice-sum method {method!r}")
    if method == "identity" and d > 2:
        raise ConfigurationError("no closed form for d > 2")
    if method != "theta" and d == 1:
        return float(2.0 * special.zeta(s))
    if method != "theta" and d == 2:
        return float(4.0 * special.zeta(s / 2.0) * dirichlet_beta(s / 2.0))
    return epstein_zeta(d, s, tol)
