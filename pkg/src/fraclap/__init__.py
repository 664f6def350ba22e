"""Discrete integral fractional Laplacian on Cartesian grids.

Quick start::

    from fraclap import make_grid, operator_for_grid, elliptic_precond, solve_elliptic
    grid = make_grid(2, 255)
    op = operator_for_grid(grid, alpha=1.5)
    u, report = solve_elliptic(op, np.ones(grid.n_active), tol=1e-9, precond=elliptic_precond(op))
"""

from .analysis import RateEstimate, fit_rate, relative_error, richardson_rate
from .analytic import ReferenceCase, bump, get_case, rhs_smooth_1d, sol_rough_1d, sol_smooth_1d
from .errors import (
    BreakdownError,
    ConfigurationError,
    ConsistencyError,
    DegenerateReferenceError,
    DimensionError,
    DivergenceError,
    DomainError,
    FitError,
    FracLapError,
    SizeError,
    StepError,
)
from .fastop import (
    FracLapOperator,
    apply,
    apply_dense,
    apply_fd_laplacian,
    build_operator,
    operator_for_grid,
)
from .fieldio import read_binary, read_csv, write_binary, write_csv
from .grid import Field, Grid, make_grid, make_l_shape, restrict, sample
from .kernel import (
    KernelTable,
    OperatorConstants,
    WindowSpec,
    build_constants,
    build_stencil,
    compute_A2,
    compute_A3,
    normalizing_constant,
    window_eval,
)
from .krylov import SolveReport, pcg, solve_elliptic
from .lattice import lattice_sum
from .precond import PoissonPreconditioner, apply_precond, build_precond, cn_precond, elliptic_precond
from .timestepper import EvolutionConfig, cn_step, evolve

__version__ = "0.1.0"
