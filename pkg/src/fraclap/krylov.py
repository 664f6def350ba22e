"""Preconditioned conjugate gradients with residual bookkeeping."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import BreakdownError, ConfigurationError
from .grid import Field

__all__ = ["SolveReport", "pcg", "solve_elliptic", "write_history", "default_max_iterations"]


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    relative_residual: float
    residual_history: list = field(default_factory=list)
    wall_time: float = 0.0

    def row(self) -> dict:
        return {
            "iters": self.iterations,
            "converged": int(self.converged),
            "relres": self.relative_residual,
            "t_cg": self.wall_time,
        }


def default_max_iterations(d: int) -> int:
    return 250 if d == 3 else 1000


def _matvec(op):
    if op is None:
        return None
    if hasattr(op, "matvec"):
        return op.matvec
    if callable(op):
        return op
    raise ConfigurationError(f"cannot use {type(op).__name__} as a linear operator")


def pcg(A, b, tol=1e-6, max_iterations=1000, Minv=None, x0=None):
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    Parameters
    ----------
    A : callable or object with ``matvec``
        The system operator.
    b : Field or ndarray
        Right-hand side.
    tol : float
        Relative residual target ``||b - A x|| / ||b||``.
    max_iterations : int
        Iteration cap.
    Minv : callable or object with ``matvec``, optional
        Applies the inverse preconditioner; ``None`` means no preconditioning.
    x0 : Field or ndarray, optional
        Initial guess (zero by default).

    Returns
    -------
    x : same type as ``b``
    report : SolveReport

    Notes
    -----
    Iteration stops once the recurrence residual meets ``tol``; the true
    residual is then recomputed and, if it still misses the target, the
    recurrence restarts from it.  ``report.relative_residual`` is always
    the recomputed value.
    """
    if not 0.0 < tol < 1.0:
        raise ConfigurationError(f"tol must lie in (0, 1), got {tol}")
    t0 = time.perf_counter()
    apply_A = _matvec(A)
    apply_M = _matvec(Minv)
    grid = b.grid if isinstance(b, Field) else None
    bv = np.asarray(b.values if isinstance(b, Field) else b, dtype=float)
    x = np.zeros_like(bv) if x0 is None else np.array(x0.values if isinstance(x0, Field) else x0, dtype=float)

    def wrap(v):
        return Field(grid, v) if grid is not None else v

    bnorm = np.linalg.norm(bv)
    if bnorm == 0.0:
        return wrap(np.zeros_like(bv)), SolveReport(0, True, 0.0, [0.0], time.perf_counter() - t0)

    r = bv - apply_A(x) if x0 is not None else bv.copy()
    relres = np.linalg.norm(r) / bnorm
    history = [relres]
    if relres <= tol:
        return wrap(x), SolveReport(0, True, relres, history, time.perf_counter() - t0)

    z = apply_M(r) if apply_M else r
    p = z.copy()
    rz = r @ z
    it = 0
    while it < max_iterations:
        it += 1
        Ap = apply_A(p)
        curv = p @ Ap
        if not curv > 0:
            raise BreakdownError(f"non-positive curvature {curv:.3e} at iteration {it}", it)
        step = rz / curv
        x += step * p
        r -= step * Ap
        relres = np.linalg.norm(r) / bnorm
        history.append(relres)
        if relres <= tol:
            r = bv - apply_A(x)
            relres = np.linalg.norm(r) / bnorm
            if relres <= tol:
                break
            # recurrence drifted: restart from the true residual
            z = apply_M(r) if apply_M else r
            p = z.copy()
            rz = r @ z
            continue
        z = apply_M(r) if apply_M else r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    else:
        relres = np.linalg.norm(bv - apply_A(x)) / bnorm

    report = SolveReport(it, bool(relres <= tol), float(relres), history, time.perf_counter() - t0)
    return wrap(x), report


def solve_elliptic(op, f, tol=1e-9, precond=None, max_iterations=None, x0=None):
    """``M u = f`` with optional preconditioner (``None`` disables it)."""
    if max_iterations is None:
        max_iterations = default_max_iterations(op.grid.d)
    return pcg(op, f, tol=tol, max_iterations=max_iterations, Minv=precond, x0=x0)


def write_history(report: SolveReport, path) -> None:
    """Dump ``iter,relres`` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "relres"])
        for i, value in enumerate(report.residual_history):
            writer.writerow([i, repr(float(value))])
