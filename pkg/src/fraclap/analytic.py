"""Closed-form right-hand sides, solutions and initial conditions.

The 1-D reference pairs come from the identity (Dyda 2012)

    (-Delta)^{a/2} (1 - x^2)_+^p
        = 2^a Gamma((1+a)/2) Gamma(p+1) / (sqrt(pi) Gamma(p+1-a/2))
          * 2F1((1+a)/2, a/2 - p; 1/2; x^2),     |x| < 1,

used with ``p = 2 + a/2`` (terminating hypergeometric, smooth case) and
``p = a/2`` (constant right-hand side, rough case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "ReferenceCase",
    "rhs_smooth_1d",
    "smooth_constant",
    "sol_smooth_1d",
    "rough_constant",
    "sol_rough_1d",
    "bump",
    "get_case",
    "CASES",
]


def rhs_smooth_1d(alpha: float, x):
    """``2F1((1+alpha)/2, -2; 1/2; x^2)``, a quartic polynomial in ``x``."""
    x2 = np.asarray(x, dtype=float) ** 2
    return 1.0 - 2.0 * (1.0 + alpha) * x2 + (1.0 + alpha) * (3.0 + alpha) / 3.0 * x2 * x2


def smooth_constant(alpha: float) -> float:
    """``K`` with ``(-Delta)^{alpha/2} (1 - x^2)_+^{2 + alpha/2} = K * rhs_smooth_1d``."""
    return 2.0**alpha * math.gamma((1.0 + alpha) / 2.0) * math.gamma(3.0 + alpha / 2.0) / (2.0 * math.sqrt(math.pi))


def sol_smooth_1d(alpha: float, x):
    """Exact solution for :func:`rhs_smooth_1d` with zero exterior data."""
    x = np.asarray(x, dtype=float)
    base = np.clip(1.0 - x * x, 0.0, None)
    return base ** (2.0 + alpha / 2.0) / smooth_constant(alpha)


def rough_constant(alpha: float) -> float:
    """``K'`` making ``K' (1 - x^2)_+^{alpha/2}`` the solution for a unit right-hand side."""
    return math.sqrt(math.pi) / (2.0**alpha * math.gamma(1.0 + alpha / 2.0) * math.gamma((1.0 + alpha) / 2.0))


def sol_rough_1d(alpha: float, x):
    x = np.asarray(x, dtype=float)
    base = np.clip(1.0 - x * x, 0.0, None)
    return rough_constant(alpha) * base ** (alpha / 2.0)


def bump(x, nu=None):
    """Product of squared raised cosines ``(1/4)(1 + cos(2 pi nu_i x_i - pi))^2``.

    ``x`` has shape ``(n, d)``; ``nu`` defaults to all ones.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    nu = np.ones(x.shape[1]) if nu is None else np.asarray(nu, dtype=float)
    if nu.shape != (x.shape[1],):
        raise ConfigurationError(f"need one frequency per axis, got {nu.tolist()}")
    factors = 0.25 * (1.0 + np.cos(2.0 * np.pi * nu * x - np.pi)) ** 2
    return np.prod(factors, axis=1)


@dataclass(frozen=True)
class ReferenceCase:
    """A named right-hand side with (optionally) its exact solution.

    ``rhs`` and ``solution`` take points of shape ``(n, d)``.
    """

    name: str
    alpha: float
    d: int
    box: tuple
    rhs: Callable[[np.ndarray], np.ndarray]
    solution: Optional[Callable[[np.ndarray], np.ndarray]] = None


def _ones(x):
    return np.ones(np.atleast_2d(x).shape[0])


def _smooth1d(alpha, d, nu):
    return ReferenceCase(
        "smooth1d",
        alpha,
        1,
        (-1.0, 1.0),
        lambda x: rhs_smooth_1d(alpha, np.atleast_2d(x)[:, 0]),
        lambda x: sol_smooth_1d(alpha, np.atleast_2d(x)[:, 0]),
    )


def _rough1d(alpha, d, nu):
    return ReferenceCase(
        "rough1d", alpha, 1, (-1.0, 1.0), _ones, lambda x: sol_rough_1d(alpha, np.atleast_2d(x)[:, 0])
    )


def _bump(alpha, d, nu):
    return ReferenceCase("bump", alpha, d, (0.0, 1.0), lambda x: bump(x, nu))


def _ones_case(alpha, d, nu):
    return ReferenceCase("ones", alpha, d, (0.0, 1.0), _ones)


def _parabolic(alpha, d, nu):
    nu = (3, 11, 2)[:d] if nu is None else nu
    return ReferenceCase("parabolic_ic", alpha, d, (0.0, 1.0), lambda x: bump(x, nu))


CASES = {
    "smooth1d": _smooth1d,
    "rough1d": _rough1d,
    "bump": _bump,
    "ones": _ones_case,
    "parabolic_ic": _parabolic,
}


def get_case(name: str, alpha: float, d: int = 1, nu=None) -> ReferenceCase:
    """Look up a reference case by name."""
    try:
        factory = CASES[name]
    except KeyError:
        raise ConfigurationError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None
    case = factory(alpha, d, nu)
    if case.d != d and name in ("smooth1d", "rough1d"):
        raise ConfigurationError(f"case {name!r} is one-dimensional")
    return case
