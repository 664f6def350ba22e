"""Drivers for the numerical experiments (shared by the CLI and the test suite).

Every function returns plain dicts (one table row each) so results can be
written straight to CSV.
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from . import analytic
from .analysis import relative_error, richardson_rate
from .fastop import operator_for_grid
from .grid import Field, make_grid, make_l_shape, sample
from .krylov import default_max_iterations, solve_elliptic, pcg
from .precond import cn_precond, elliptic_precond
from .timestepper import EvolutionConfig, ShiftedOperator, default_dt, evolve

__all__ = [
    "median_time",
    "smooth_1d",
    "rough_1d",
    "cg_counts",
    "default_rhs",
    "build_domain",
    "richardson_apply",
    "richardson_solve",
    "single_step",
    "parabolic_final",
    "parabolic_richardson",
    "cn_norms",
]

# e_sol needs the algebraic error well below the discretization error; for
# alpha near 2 and m = 4095 the true residual cannot go much below ~5e-11
ACCURATE_TOL = 1e-10


def median_time(fn, repeats: int = 3):
    """Run ``fn`` ``repeats`` times; return (last result, median seconds)."""
    times, out = [], None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def build_domain(d: int, m: int, domain: str = "box", box=(0.0, 1.0)):
    if domain == "lshape":
        return make_l_shape(m, box)
    return make_grid(d, m, box)


def smooth_1d(alpha: float, m: int, radius_points: int = 20, tol: float = ACCURATE_TOL, repeats: int = 1) -> dict:
    """Apply and solve errors for the quartic right-hand side on ``[-1, 1]``."""
    case = analytic.get_case("smooth1d", alpha)
    grid = make_grid(1, m, case.box)
    op, t_con = median_time(lambda: operator_for_grid(grid, alpha, radius_points), repeats)
    u_true = sample(grid, case.solution)
    f = sample(grid, case.rhs)
    Mu, t_app = median_time(lambda: op.matvec(u_true.values), repeats)
    e_app = relative_error(Mu, f.values)
    u, rep = solve_elliptic(op, f, tol=tol, precond=elliptic_precond(op), max_iterations=1000)
    return {
        "alpha": alpha,
        "d": 1,
        "N": grid.n_active,
        "e_app": e_app,
        "e_sol": relative_error(u, u_true),
        "t_con": t_con,
        "t_app": t_app,
        "iters": rep.iterations,
        "converged": rep.converged,
    }


def rough_1d(alpha: float, m: int, radius_points: int = 20, tol: float = ACCURATE_TOL) -> dict:
    """Solve error against ``K' (1 - x^2)^{alpha/2}`` for a unit right-hand side."""
    case = analytic.get_case("rough1d", alpha)
    grid = make_grid(1, m, case.box)
    op = operator_for_grid(grid, alpha, radius_points)
    u, rep = solve_elliptic(op, sample(grid, case.rhs), tol=tol, precond=elliptic_precond(op), max_iterations=1000)
    return {"alpha": alpha, "d": 1, "N": grid.n_active, "e_sol": relative_error(u, sample(grid, case.solution)),
            "iters": rep.iterations, "converged": rep.converged}


def default_rhs(d: int, domain: str = "box"):
    """Case used for iteration counts: the quartic on ``[-1,1]`` in 1-D, ``f = 1`` otherwise."""
    if d == 1 and domain == "box":
        return "smooth1d"
    return "ones"


def cg_counts(alpha, d, m, tol, domain="box", case=None, unpreconditioned=True, max_iterations=None,
              radius_points=20) -> dict:
    """Iterations with and without the Poisson preconditioner."""
    case = case or default_rhs(d, domain)
    ref = analytic.get_case(case, alpha, d)
    grid = build_domain(d, m, domain, ref.box)
    op = operator_for_grid(grid, alpha, radius_points)
    f = sample(grid, ref.rhs)
    cap = max_iterations or default_max_iterations(d)
    t0 = time.perf_counter()
    pc = elliptic_precond(op)
    t_pc = time.perf_counter() - t0
    _, rp = solve_elliptic(op, f, tol=tol, precond=pc, max_iterations=cap)
    row = {
        "alpha": alpha, "d": d, "domain": domain, "N": grid.n_active, "tol": tol, "case": case,
        "t_pc": t_pc, "iters_pc": rp.iterations, "converged_pc": int(rp.converged), "t_cg_pc": rp.wall_time,
        "relres_pc": rp.relative_residual,
    }
    if unpreconditioned:
        _, rn = solve_elliptic(op, f, tol=tol, precond=None, max_iterations=cap)
        row.update(iters_nopc=rn.iterations, converged_nopc=int(rn.converged), t_cg_nopc=rn.wall_time,
                   relres_nopc=rn.relative_residual)
    return row


def _nested(m_coarse: int):
    return (m_coarse, 2 * m_coarse + 1, 4 * m_coarse + 3)


def richardson_apply(alpha: float, d: int, m_coarse: int, radius_points: int = 20) -> dict:
    """Grid rates of ``M g`` for the raised-cosine bump with unit frequencies."""
    fields = []
    for m in _nested(m_coarse):
        grid = make_grid(d, m)
        op = operator_for_grid(grid, alpha, radius_points)
        g = sample(grid, lambda x: analytic.bump(x))
        fields.append(Field(grid, op.matvec(g.values)))
        del op
    r2 = richardson_rate(*fields, p=2)
    ri = richardson_rate(*fields, p=np.inf)
    return {"alpha": alpha, "d": d, "m_coarse": m_coarse, "R2": r2.rate, "Rinf": ri.rate}


def richardson_solve(alpha: float, d: int, m_coarse: int, tol: float = 1e-10, radius_points: int = 20) -> dict:
    """Grid rates of the discrete solution for ``f = 1``."""
    fields, iters = [], []
    for m in _nested(m_coarse):
        grid = make_grid(d, m)
        op = operator_for_grid(grid, alpha, radius_points)
        u, rep = solve_elliptic(op, np.ones(grid.n_active), tol=tol, precond=elliptic_precond(op),
                                max_iterations=2000)
        fields.append(Field(grid, u))
        iters.append(rep.iterations)
        del op
    r2 = richardson_rate(*fields, p=2)
    ri = richardson_rate(*fields, p=np.inf)
    return {"alpha": alpha, "d": d, "m_coarse": m_coarse, "R2": r2.rate, "Rinf": ri.rate,
            "iters": "/".join(map(str, iters))}


def single_step(alpha, d, m, tol=1e-9, seed=0, dt=None, unpreconditioned=True, radius_points=20) -> dict:
    """One implicit solve ``(I + dt/2 M) x = b`` with a seeded uniform(-1, 1) ``b`` and zero start."""
    grid = make_grid(d, m)
    dt = default_dt(m) if dt is None else dt
    op = operator_for_grid(grid, alpha, radius_points)
    b = np.random.default_rng(seed).uniform(-1.0, 1.0, grid.n_active)
    A = ShiftedOperator(op, 0.5 * dt)
    cap = default_max_iterations(d)
    _, rp = pcg(A, b, tol=tol, max_iterations=cap, Minv=cn_precond(op, dt))
    row = {"alpha": alpha, "d": d, "N": grid.n_active, "dt": dt, "tol": tol, "seed": seed,
           "iters_pc": rp.iterations, "converged_pc": int(rp.converged), "t_cg_pc": rp.wall_time}
    if unpreconditioned:
        _, rn = pcg(A, b, tol=tol, max_iterations=cap)
        row.update(iters_nopc=rn.iterations, converged_nopc=int(rn.converged), t_cg_nopc=rn.wall_time)
    return row


def parabolic_final(alpha, d, m, T=0.25, nu=None, tol=1e-9, dt=None, radius_points=20):
    """March the modulated bump to ``T`` with ``f = 0``; returns (Field, Trajectory)."""
    grid = make_grid(d, m)
    dt = default_dt(m) if dt is None else dt
    op = operator_for_grid(grid, alpha, radius_points)
    u0 = sample(grid, analytic.get_case("parabolic_ic", alpha, d, nu).rhs)
    return evolve(op, cn_precond(op, dt), u0, EvolutionConfig(dt=dt, T=T, tol=tol))


def parabolic_richardson(alpha, d, m_coarse, T=0.25, nu=None, tol=1e-9, radius_points=20) -> dict:
    """Joint space-time refinement rates at the final time (``dt = 1/(m+1)`` on each level)."""
    fields, steps, iters = [], [], []
    for m in _nested(m_coarse):
        u, traj = parabolic_final(alpha, d, m, T=T, nu=nu, tol=tol, radius_points=radius_points)
        fields.append(u)
        steps.append(len(traj.rows))
        iters.append(max(traj.iterations))
    r2 = richardson_rate(*fields, p=2)
    ri = richardson_rate(*fields, p=np.inf)
    return {"alpha": alpha, "d": d, "m_coarse": m_coarse, "R2": r2.rate, "Rinf": ri.rate,
            "steps": "/".join(map(str, steps)), "max_iters": "/".join(map(str, iters))}


def cn_norms(alpha, m=127, steps=50, dt=None, seed=0, tol=1e-10, d=2) -> np.ndarray:
    """l2 norms of an unforced CN trajectory from a random start (``steps + 1`` values)."""
    grid = make_grid(d, m)
    dt = default_dt(m) if dt is None else dt
    op = operator_for_grid(grid, alpha)
    u = np.random.default_rng(seed).uniform(-1.0, 1.0, grid.n_active)
    config = EvolutionConfig(dt=dt, T=steps * dt, tol=tol, record=1)
    _, traj = evolve(op, cn_precond(op, dt), u, config)
    return np.array([np.linalg.norm(s[2]) for s in traj.snapshots])
