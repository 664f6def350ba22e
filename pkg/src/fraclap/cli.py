"""Command-line front end: ``fraclap {constants,apply,solve,evolve,reproduce}``.

Every command prints CSV to stdout (or ``--out``).  Options may also come
from a ``key=value`` file given with ``--config``; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import analytic, experiments
from .analysis import relative_error
from .errors import FracLapError
from .experiments import build_domain, median_time
from .fastop import operator_for_grid
from .fieldio import write_binary, write_csv
from .grid import Field, sample
from .kernel import build_constants
from .krylov import default_max_iterations, solve_elliptic, write_history
from .precond import cn_precond, elliptic_precond
from .timestepper import EvolutionConfig, default_dt, evolve

log = logging.getLogger("fraclap")

ALPHAS = (1.25, 1.5, 1.75)


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17e}"
    return str(v)


def emit(rows, out=None, columns=None):
    """Write dict rows as CSV to ``out`` (path) or stdout."""
    rows = list(rows)
    if not rows:
        return
    columns = columns or list(rows[0])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c, "")) for c in columns])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def load_config(path) -> dict:
    """``key=value`` lines; ``#`` starts a comment; keys may use dashes or underscores."""
    values = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FracLapError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _box(text):
    parts = [float(p) for p in str(text).split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("box is 'lower,upper'")
    return tuple(parts)


def _ints(text):
    return tuple(int(p) for p in str(text).split(","))


def _add_common(p):
    p.add_argument("--config", help="key=value file with defaults")
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--m", type=int, default=255)
    p.add_argument("--box", type=_box, default=None, help="lower,upper (default from the case)")
    p.add_argument("--case", default=None)
    p.add_argument("--domain", choices=("box", "lshape"), default="box")
    p.add_argument("--delta-points", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--precond", choices=("on", "off"), default="on")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--T", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nu", type=_ints, default=None, help="comma-separated bump frequencies")
    p.add_argument("--repeats", type=int, default=3, help="timing repeats (median)")
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print alpha,d,h,delta,C,A1,A2,A3")
    _add_common(p)

    p = sub.add_parser("apply", help="apply error against a known solution, or Richardson rates")
    _add_common(p)
    p.add_argument("--richardson", action="store_true", help="use m, 2m+1, 4m+3 and report grid rates")

    p = sub.add_parser("solve", help="PCG solve of M u = f")
    _add_common(p)
    p.add_argument("--richardson", action="store_true")
    p.add_argument("--history", default=None, help="write iter,relres to this CSV")
    p.add_argument("--field-out", default=None, help="dump the solution (.csv or .bin)")

    p = sub.add_parser("evolve", help="Crank-Nicolson time stepping")
    _add_common(p)
    p.add_argument("--single-step", action="store_true", help="one solve with a seeded random right-hand side")
    p.add_argument("--richardson", action="store_true")
    p.add_argument("--field-out", default=None)

    p = sub.add_parser("reproduce", help="regenerate the experiment tables as CSV files")
    p.add_argument("--tables", default="all", help="comma-separated: " + ",".join(TABLES))
    p.add_argument("--outdir", default="results")
    p.add_argument("--quick", action="store_true", help="smaller sizes for a fast smoke run")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = getattr(args, "config", None)
    if cfg:
        # re-parse with file values as defaults so explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        defaults = {}
        actions = {a.dest: a for a in sub._actions}
        for key, raw in load_config(cfg).items():
            if key not in actions:
                raise FracLapError(f"unknown config key {key!r}")
            act = actions[key]
            if act.type is not None:
                defaults[key] = act.type(raw)
            elif isinstance(act, argparse._StoreTrueAction):
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = raw
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _case_for(args, default):
    name = args.case or default
    ref = analytic.get_case(name, args.alpha, args.d, args.nu)
    box = args.box if args.box is not None else ref.box
    return ref, box


def cmd_constants(args):
    grid = build_domain(args.d, args.m, args.domain, args.box or (0.0, 1.0))
    c = build_constants(args.alpha, args.d, grid.h, args.delta_points)
    emit([c.row()], args.out, ["alpha", "d", "h", "delta", "C", "A1", "A2", "A3"])


def cmd_apply(args):
    if args.richardson:
        if args.domain != "box":
            raise FracLapError("Richardson runs need a full box")
        row = experiments.richardson_apply(args.alpha, args.d, args.m, args.delta_points)
        emit([row], args.out)
        return
    ref, box = _case_for(args, "smooth1d" if args.d == 1 else "bump")
    if ref.solution is None:
        raise FracLapError(f"case {ref.name!r} has no closed-form solution; use --richardson")
    grid = build_domain(args.d, args.m, args.domain, box)
    op, t_con = median_time(lambda: operator_for_grid(grid, args.alpha, args.delta_points), args.repeats)
    u = sample(grid, ref.solution)
    f = sample(grid, ref.rhs)
    Mu, t_app = median_time(lambda: op.matvec(u.values), args.repeats)
    e_app = relative_error(Mu, f.values)
    emit([{"alpha": args.alpha, "d": args.d, "N": grid.n_active, "e_app": e_app, "t_con": t_con, "t_app": t_app}],
         args.out)


def cmd_solve(args):
    if args.richardson:
        row = experiments.richardson_solve(args.alpha, args.d, args.m, args.tol, args.delta_points)
        emit([row], args.out)
        return
    ref, box = _case_for(args, experiments.default_rhs(args.d, args.domain))
    grid = build_domain(args.d, args.m, args.domain, box)
    op = operator_for_grid(grid, args.alpha, args.delta_points)
    pc = elliptic_precond(op) if args.precond == "on" else None
    f = sample(grid, ref.rhs)
    cap = args.max_iters or default_max_iterations(args.d)
    (u, rep), _ = median_time(lambda: solve_elliptic(op, f, args.tol, pc, cap), args.repeats)
    row = {"alpha": args.alpha, "d": args.d, "N": grid.n_active, "precond": args.precond, "tol": args.tol,
           "iters": rep.iterations, "converged": int(rep.converged), "t_cg": rep.wall_time,
           "relres": rep.relative_residual}
    cols = list(row)
    if ref.solution is not None:
        row["e_sol"] = relative_error(u, sample(grid, ref.solution))
        cols.append("e_sol")
    emit([row], args.out, cols)
    if args.history:
        write_history(rep, args.history)
    if args.field_out:
        _dump(u, args.field_out)


def _dump(field: Field, path):
    if str(path).endswith(".bin"):
        write_binary(field, path)
    else:
        write_csv(field, path)


def cmd_evolve(args):
    if args.single_step:
        row = experiments.single_step(args.alpha, args.d, args.m, args.tol, args.seed, args.dt,
                                      unpreconditioned=args.precond == "off", radius_points=args.delta_points)
        if args.precond == "off":
            row = {k: v for k, v in row.items() if not k.endswith("_pc")}
        emit([row], args.out)
        return
    if args.richardson:
        row = experiments.parabolic_richardson(args.alpha, args.d, args.m, args.T, args.nu, args.tol,
                                               args.delta_points)
        emit([row], args.out)
        return
    ref, box = _case_for(args, "parabolic_ic")
    grid = build_domain(args.d, args.m, args.domain, box)
    dt = args.dt or default_dt(args.m)
    op = operator_for_grid(grid, args.alpha, args.delta_points)
    pc = cn_precond(op, dt) if args.precond == "on" else None
    u0 = sample(grid, ref.rhs)
    u, traj = evolve(op, pc, u0, EvolutionConfig(dt=dt, T=args.T, tol=args.tol, max_iterations=args.max_iters))
    if args.field_out:
        _dump(u, args.field_out)
    rows = [dict(r, **({"field": args.field_out} if args.field_out and r is traj.rows[-1] else {}))
            for r in traj.rows]
    emit(rows, args.out, ["step", "t", "iters", "relres"] + (["field"] if args.field_out else []))


# -- reproduce ---------------------------------------------------------------

def _t_1d_con(quick):
    ms = (511, 1023) if quick else (511, 1023, 2047, 4095)
    return [experiments.smooth_1d(a, m) for a in (0.75, 1.25, 1.5, 1.75) for m in ms]


def _t_1d_rough(quick):
    ms = (511, 1023) if quick else (511, 1023, 2047, 4095)
    return [experiments.rough_1d(a, m) for a in (0.75, 1.25, 1.5, 1.75) for m in ms]


def _t_cg(d, sizes, domain="box", alphas=ALPHAS):
    return [experiments.cg_counts(a, d, m, tol, domain) for a in alphas for m in sizes for tol in (1e-6, 1e-9)]


def _t_1d_cg(quick):
    return _t_cg(1, (511, 1023) if quick else (511, 1023, 2047, 4095))


def _t_2d_cg(quick):
    return _t_cg(2, (127,) if quick else (127, 255, 511))


def _t_3d_cg(quick):
    return _t_cg(3, (15,) if quick else (31, 63))


def _t_lshape(quick):
    return _t_cg(2, (63,) if quick else (127, 255, 511), "lshape", (1.75,))


def _t_2d_rich(quick):
    mc = 63 if quick else 255
    rows = []
    for a in ALPHAS:
        fa = experiments.richardson_apply(a, 2, mc)
        su = experiments.richardson_solve(a, 2, mc)
        rows.append({"alpha": a, "d": 2, "m_coarse": mc, "R2_u": su["R2"], "Rinf_u": su["Rinf"],
                     "R2_f": fa["R2"], "Rinf_f": fa["Rinf"]})
    return rows


def _t_3d_rich(quick):
    mc = 7 if quick else 31
    rows = []
    for a in ALPHAS:
        fa = experiments.richardson_apply(a, 3, mc)
        su = experiments.richardson_solve(a, 3, mc)
        rows.append({"alpha": a, "d": 3, "m_coarse": mc, "R2_u": su["R2"], "Rinf_u": su["Rinf"],
                     "R2_f": fa["R2"], "Rinf_f": fa["Rinf"]})
    return rows


def _t_td_its(quick):
    rows = []
    for d, sizes in ((2, (127,) if quick else (255, 511, 1023)), (3, (15,) if quick else (63, 127))):
        rows += [experiments.single_step(a, d, m) for a in ALPHAS for m in sizes]
    return rows


def _t_richpara(quick):
    mc = 31 if quick else 255
    return [experiments.parabolic_richardson(a, 2, mc) for a in ALPHAS]


TABLES = {
    "1d_con": _t_1d_con,
    "1d_rough": _t_1d_rough,
    "1d_cg": _t_1d_cg,
    "2d_cg": _t_2d_cg,
    "2d_rich": _t_2d_rich,
    "3d_cg": _t_3d_cg,
    "3d_rich": _t_3d_rich,
    "lshape": _t_lshape,
    "td_its": _t_td_its,
    "richpara": _t_richpara,
}


def cmd_reproduce(args):
    names = list(TABLES) if args.tables == "all" else [t.strip() for t in args.tables.split(",")]
    unknown = [n for n in names if n not in TABLES]
    if unknown:
        raise FracLapError(f"unknown tables {unknown}; choose from {sorted(TABLES)}")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in names:
        log.info("table %s", name)
        rows = TABLES[name](args.quick)
        path = outdir / f"{name}.csv"
        emit(rows, path)
        print(path)


COMMANDS = {
    "constants": cmd_constants,
    "apply": cmd_apply,
    "solve": cmd_solve,
    "evolve": cmd_evolve,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except FracLapError as exc:
        print(f"fraclap: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except FracLapError as exc:
        print(f"fraclap: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
