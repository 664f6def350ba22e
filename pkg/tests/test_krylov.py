import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap.errors import BreakdownError, ConfigurationError
from fraclap.fastop import dense_matrix, operator_for_grid
from fraclap.grid import Field, make_grid, make_l_shape
from fraclap.krylov import default_max_iterations, pcg, solve_elliptic, write_history
from fraclap.precond import elliptic_precond


def _spd(n, rng, cond=100.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (q * np.geomspace(1, cond, n)) @ q.T


def test_identity_one_iteration(rng):
    b = rng.standard_normal(20)
    x, rep = pcg(lambda v: v, b, tol=1e-12)
    assert rep.iterations == 1 and rep.converged
    np.testing.assert_allclose(x, b)


def test_exact_preconditioner_one_iteration(rng):
    A = _spd(30, rng)
    Ainv = np.linalg.inv(A)
    _, rep = pcg(lambda v: A @ v, rng.standard_normal(30), tol=1e-10, Minv=lambda r: Ainv @ r)
    assert rep.iterations == 1


def test_matches_direct_solve(rng):
    A = _spd(40, rng, cond=1e4)
    b = rng.standard_normal(40)
    x, rep = pcg(lambda v: A @ v, b, tol=1e-12, max_iterations=500)
    assert rep.converged
    assert np.linalg.norm(A @ x - b) <= 1e-12 * np.linalg.norm(b) * 1.0001
    assert rep.relative_residual == pytest.approx(np.linalg.norm(A @ x - b) / np.linalg.norm(b), rel=1e-6)


def test_a_norm_error_monotone(rng):
    # energy norm of the error never increases under CG
    A = _spd(50, rng, cond=1e3)
    xs = rng.standard_normal(50)
    b = A @ xs
    errs = []
    for k in range(1, 40):
        x, _ = pcg(lambda v: A @ v, b, tol=1e-15, max_iterations=k)
        e = x - xs
        errs.append(e @ A @ e)
    assert np.all(np.diff(errs) <= 1e-12 * errs[0])


def test_preconditioner_scaling_invariance(rng):
    op = operator_for_grid(make_grid(2, 31), 1.25)
    pc = elliptic_precond(op)
    b = rng.standard_normal(op.grid.n_active)
    _, r1 = pcg(op, b, tol=1e-8, Minv=pc)
    _, r2 = pcg(op, b, tol=1e-8, Minv=lambda r: 7.5 * pc.matvec(r))
    assert r1.iterations == r2.iterations
    np.testing.assert_allclose(r1.residual_history, r2.residual_history, rtol=1e-6)


def test_preconditioning_helps():
    op = operator_for_grid(make_grid(2, 63), 1.5)
    b = Field(op.grid, np.ones(op.grid.n_active))
    x1, r1 = solve_elliptic(op, b, tol=1e-8, precond=elliptic_precond(op))
    x2, r2 = solve_elliptic(op, b, tol=1e-8)
    assert r1.converged and r2.converged
    assert r1.iterations < r2.iterations
    assert isinstance(x1, Field)
    np.testing.assert_allclose(x1.values, x2.values, rtol=1e-6, atol=1e-7 * np.abs(x1.values).max())


def test_l_shape_dense_agreement(rng):
    op = operator_for_grid(make_l_shape(15), 1.7)
    b = rng.standard_normal(op.grid.n_active)
    x, rep = solve_elliptic(op, b, tol=1e-12, precond=elliptic_precond(op))
    np.testing.assert_allclose(x, np.linalg.solve(dense_matrix(op), b), rtol=1e-9, atol=1e-12)


def test_zero_rhs():
    x, rep = pcg(lambda v: 2 * v, np.zeros(5))
    assert rep.iterations == 0 and rep.converged and np.all(x == 0)


def test_good_initial_guess(rng):
    A = _spd(10, rng)
    b = rng.standard_normal(10)
    _, rep = pcg(lambda v: A @ v, b, x0=np.linalg.solve(A, b), tol=1e-8)
    assert rep.iterations == 0


def test_cap_reported_not_converged(rng):
    A = _spd(60, rng, cond=1e6)
    _, rep = pcg(lambda v: A @ v, rng.standard_normal(60), tol=1e-12, max_iterations=3)
    assert rep.iterations == 3 and not rep.converged
    assert len(rep.residual_history) == 4


def test_breakdown_indefinite():
    A = np.diag([1.0, -1.0])
    with pytest.raises(BreakdownError) as exc:
        pcg(lambda v: A @ v, np.array([0.0, 1.0]))
    assert exc.value.iteration == 1


def test_bad_tol_and_operator():
    with pytest.raises(ConfigurationError):
        pcg(lambda v: v, np.ones(3), tol=0.0)
    with pytest.raises(ConfigurationError):
        pcg(42, np.ones(3))


def test_default_caps():
    assert default_max_iterations(3) == 250
    assert default_max_iterations(2) == 1000


def test_history_csv(tmp_path, rng):
    A = _spd(10, rng)
    _, rep = pcg(lambda v: A @ v, rng.standard_normal(10), tol=1e-10)
    path = tmp_path / "h.csv"
    write_history(rep, path)
    rows = path.read_text().splitlines()
    assert rows[0] == "iter,relres"
    assert len(rows) == len(rep.residual_history) + 1
    assert float(rows[1].split(",")[1]) == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 25), seed=st.integers(0, 10_000))
def test_random_spd_converges(n, seed):
    r = np.random.default_rng(seed)
    A = _spd(n, r, cond=50)
    b = r.standard_normal(n)
    x, rep = pcg(lambda v: A @ v, b, tol=1e-10, max_iterations=10 * n)
    assert rep.converged
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)
