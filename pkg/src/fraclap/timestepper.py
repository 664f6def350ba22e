"""Crank–Nicolson stepping for ``u_t + M u = f`` with zero exterior data.

Each step solves

    (I + dt/2 M) u_{k+1} = (I - dt/2 M) u_k + dt/2 (f_k + f_{k+1})

by PCG, preconditioned with ``(I + dt/2 * laplacian_weight * L)^{-1}`` and
seeded with ``u_k``.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigurationError, DimensionError, StepError
from .grid import Field
from .krylov import default_max_iterations, pcg

__all__ = ["EvolutionConfig", "Trajectory", "cn_step", "evolve", "default_dt", "ShiftedOperator"]

Source = Union[None, Field, np.ndarray, Callable[[float], np.ndarray]]


def default_dt(m: int) -> float:
    """``1/(m+1)``, i.e. the time step equals the grid spacing on the unit box."""
    return 1.0 / (m + 1)


@dataclass(frozen=True)
class EvolutionConfig:
    """Time stepping parameters.

    ``source`` may be ``None`` (no forcing), a time-independent field/array,
    or a callable ``t -> values`` returning active-point values.
    ``record`` keeps every ``record``-th state (0 disables snapshots).
    """

    dt: float
    T: float
    source: Source = None
    tol: float = 1e-9
    record: int = 0
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not self.T > 0:
            raise ConfigurationError(f"final time must be positive, got {self.T}")
        ratio = self.T / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
            raise ConfigurationError(f"T/dt = {ratio!r} is not a positive integer")
        if self.record < 0:
            raise ConfigurationError("record stride must be nonnegative")

    @property
    def steps(self) -> int:
        return int(round(self.T / self.dt))


class ShiftedOperator:
    """``v -> v + a M v``."""

    def __init__(self, op, a: float):
        self.op = op
        self.a = a

    def matvec(self, v):
        return v + self.a * self.op.matvec(v)

    __call__ = matvec


def _values(x, n) -> np.ndarray:
    v = np.asarray(x.values if isinstance(x, Field) else x, dtype=float)
    if v.shape != (n,):
        raise DimensionError(f"expected {n} values, got shape {v.shape}")
    return v


def _source_at(source: Source, t: float, n: int) -> Optional[np.ndarray]:
    if source is None:
        return None
    if callable(source) and not isinstance(source, (Field, np.ndarray)):
        return _values(source(t), n)
    return _values(source, n)


def cn_step(op, pc, u_k, f_k=None, f_k1=None, dt=None, tol=1e-9, max_iterations=None):
    """Advance one Crank–Nicolson step.

    Parameters
    ----------
    op : FracLapOperator
    pc : PoissonPreconditioner or None
        Should be built with ``sigma = 1`` and ``gamma = dt/2 * laplacian_weight``.
    u_k : Field or ndarray
    f_k, f_k1 : Field, ndarray or None
        Source at the old and new time levels.
    dt : float
    tol : float

    Returns
    -------
    u_next : same type as ``u_k``
    report : SolveReport

    Raises
    ------
    StepError
        If PCG misses ``tol`` within the iteration cap.
    """
    if dt is None or not dt > 0:
        raise ConfigurationError(f"time step must be positive, got {dt}")
    n = op.grid.n_active
    if isinstance(u_k, Field) and not u_k.grid.compatible(op.grid):
        raise DimensionError("state lives on a different grid than the operator")
    u = _values(u_k, n)
    a = 0.5 * dt
    rhs = u - a * op.matvec(u)
    for f in (f_k, f_k1):
        if f is not None:
            rhs = rhs + a * _values(f, n)
    if max_iterations is None:
        max_iterations = default_max_iterations(op.grid.d)
    x, report = pcg(ShiftedOperator(op, a), rhs, tol=tol, max_iterations=max_iterations, Minv=pc, x0=u)
    if not report.converged:
        raise StepError(
            f"CN solve stalled at relres {report.relative_residual:.3e} after {report.iterations} iterations",
            report,
        )
    if isinstance(u_k, Field):
        return Field(op.grid, x), report
    return x, report


@dataclass
class Trajectory:
    """Per-step bookkeeping of :func:`evolve`."""

    dt: float
    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (step, t, values)
    wall_time: float = 0.0

    @property
    def iterations(self) -> list:
        return [r["iters"] for r in self.rows]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "t", "iters", "relres"])
            for r in self.rows:
                w.writerow([r["step"], repr(r["t"]), r["iters"], repr(r["relres"])])


def evolve(op, pc, u0, config: EvolutionConfig):
    """March from ``t = 0`` to ``config.T``.

    Returns the final state (same type as ``u0``) and a :class:`Trajectory`.
    A failing step raises :class:`StepError` with ``step`` and the partial
    trajectory attached.
    """
    n = op.grid.n_active
    u = _values(u0, n).copy()
    traj = Trajectory(config.dt)
    if config.record:
        traj.snapshots.append((0, 0.0, u.copy()))
    t0 = time.perf_counter()
    f_old = _source_at(config.source, 0.0, n)
    for k in range(config.steps):
        t_new = (k + 1) * config.dt
        f_new = _source_at(config.source, t_new, n)
        try:
            u, report = cn_step(op, pc, u, f_old, f_new, config.dt, config.tol, config.max_iterations)
        except StepError as exc:
            traj.wall_time = time.perf_counter() - t0
            raise StepError(str(exc), exc.report, step=k + 1, partial=traj) from exc
        traj.rows.append(
            {"step": k + 1, "t": t_new, "iters": report.iterations, "relres": report.relative_residual}
        )
        if config.record and (k + 1) % config.record == 0:
            traj.snapshots.append((k + 1, t_new, u.copy()))
        f_old = f_new
    traj.wall_time = time.perf_counter() - t0
    out = Field(op.grid, u) if isinstance(u0, Field) else u
    return out, traj
