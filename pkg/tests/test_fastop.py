import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclap import analytic
from fraclap.errors import ConfigurationError, DimensionError, SizeError
from fraclap.fastop import (
    apply,
    apply_dense,
    apply_fd_laplacian,
    build_operator,
    dense_matrix,
    dense_split,
    operator_for_grid,
)
from fraclap.grid import Field, make_grid, make_l_shape, sample
from fraclap.kernel import build_constants

GRIDS = [
    ("1d", lambda: make_grid(1, 255)),
    ("2d", lambda: make_grid(2, 31)),
    ("3d", lambda: make_grid(3, 9)),
    ("lshape", lambda: make_l_shape(15)),
]


@pytest.mark.parametrize("name,factory", GRIDS)
def test_fft_matches_dense(name, factory, rng):
    g = factory()
    op = operator_for_grid(g, 1.3)
    M = dense_matrix(op)
    for _ in range(5):
        u = rng.standard_normal(g.n_active)
        ref = M @ u
        assert np.linalg.norm(op.matvec(u) - ref) <= 1e-12 * np.linalg.norm(ref)


def test_zero_maps_to_zero():
    op = operator_for_grid(make_grid(2, 15), 1.5)
    assert np.all(op.matvec(np.zeros(op.grid.n_active)) == 0)


def test_symmetry(rng):
    op = operator_for_grid(make_l_shape(31), 1.7)
    for _ in range(5):
        u, v = rng.standard_normal((2, op.grid.n_active))
        a, b = op.matvec(u) @ v, u @ op.matvec(v)
        assert abs(a - b) <= 1e-12 * max(abs(a), 1.0) * 10


@pytest.mark.parametrize("d,m", [(1, 64), (2, 12)])
def test_positive_definite(d, m):
    op = operator_for_grid(make_grid(d, m), 1.9)
    lam = np.linalg.eigvalsh(dense_matrix(op))
    assert lam.min() > 0


def test_dense_matrix_symmetric():
    M = dense_matrix(operator_for_grid(make_grid(2, 8), 0.9))
    np.testing.assert_allclose(M, M.T, rtol=0, atol=1e-14 * np.abs(M).max())


def test_smallest_grid_closed_form():
    # with m = 3 the centre row still sees the whole 3-point stencil
    g = make_grid(1, 3)
    op = operator_for_grid(g, 1.2)
    c = op.consts
    e = np.array([0.0, 1.0, 0.0])
    expected = c.C_ad * g.h * (c.A1 - 2 * (c.A2 + c.A3) / g.h**2)
    assert op.matvec(e)[1] == pytest.approx(expected, rel=1e-13)


def test_masked_equals_full_box(rng):
    full, lsh = make_grid(2, 15), make_l_shape(15)
    op_full, op_l = operator_for_grid(full, 1.4), operator_for_grid(lsh, 1.4)
    u = rng.standard_normal(lsh.n_active)
    np.testing.assert_allclose(op_l.matvec(u), lsh.from_full(op_full.matvec(lsh.to_full(u).ravel()).reshape(15, 15)),
                               rtol=0, atol=1e-12 * np.abs(u).max() * op_l.table.at([0, 0]))


def test_translation_invariance():
    g = make_grid(2, 21)
    op = operator_for_grid(g, 1.1)
    delta = np.zeros(g.shape)
    delta[10, 10] = 1.0
    out = op.matvec(delta.ravel()).reshape(g.shape)
    for o in [(0, 0), (1, 0), (3, 4), (7, 2)]:
        assert out[10 + o[0], 10 + o[1]] == pytest.approx(op.table.at(o), rel=1e-12, abs=1e-12 * op.table.at((0, 0)))


def test_kernel_plus_laplacian_split(rng):
    op = operator_for_grid(make_l_shape(15), 1.6)
    K, _ = dense_split(op)
    u = rng.standard_normal(op.grid.n_active)
    h, d = op.grid.h, op.grid.d
    lap = apply_fd_laplacian(op.grid, op.consts.fd_coefficient, u).values
    kpart = op.matvec(u) / (op.consts.C_ad * h**d) - lap
    np.testing.assert_allclose(kpart, K @ u, rtol=1e-10, atol=1e-10 * np.abs(K @ u).max())


def test_fd_laplacian_constant_interior():
    g = make_grid(2, 11)
    out = apply_fd_laplacian(g, 1.0, np.ones(g.n_active)).full()
    assert np.all(out[1:-1, 1:-1] == 0)


def test_fd_laplacian_sine_mode():
    g = make_grid(1, 511)
    x = g.axis(0)
    u = np.sin(np.pi * x)
    out = apply_fd_laplacian(g, 1.0, u).values
    lam = (2 - 2 * np.cos(np.pi * g.h)) / g.h**2
    np.testing.assert_allclose(out, -lam * u, atol=1e-9)
    assert np.max(np.abs(out + np.pi**2 * u)) < np.pi**4 * g.h**2


def test_fd_laplacian_negative_semidefinite():
    g = make_l_shape(7)
    L = np.column_stack([apply_fd_laplacian(g, 1.0, e).values for e in np.eye(g.n_active)])
    np.testing.assert_allclose(L, L.T)
    assert np.linalg.eigvalsh(L).max() < 0


def test_rebuild_is_deterministic():
    g = make_grid(2, 31)
    c = build_constants(1.5, 2, g.h)
    a, b = build_operator(g, c), build_operator(g, c)
    assert np.array_equal(a.multiplier, b.multiplier)


def test_multiplier_size_bound():
    g = make_grid(3, 9)
    op = operator_for_grid(g, 1.0)
    assert op.size >= 2 * g.m - 1
    assert op.multiplier.size <= 2**3 * g.n_active


def test_build_time_small():
    op = operator_for_grid(make_grid(2, 255), 1.5)
    assert op.build_time < 1.0


def test_grid_mismatch():
    g = make_grid(2, 15)
    op = operator_for_grid(g, 1.0)
    with pytest.raises(DimensionError):
        apply(op, Field(make_grid(2, 7), np.zeros(49)))
    with pytest.raises(ConfigurationError):
        build_operator(g, build_constants(1.0, 2, 0.5))


def test_dense_cap():
    op = operator_for_grid(make_grid(2, 101), 1.0)
    with pytest.raises(SizeError):
        apply_dense(op, np.zeros(op.grid.n_active))


def test_apply_error_1d_smooth():
    case = analytic.get_case("smooth1d", 1.75)
    g = make_grid(1, 511, case.box)
    op = operator_for_grid(g, 1.75)
    u, f = sample(g, case.solution), sample(g, case.rhs)
    e = np.linalg.norm(apply(op, u).values - f.values) / np.linalg.norm(f.values)
    assert 1.0e-5 <= e <= 4.0e-5


def test_second_order_consistency_2d():
    # apply to a smooth compactly supported bump: differences shrink like h^2 (or a bit better)
    outs = []
    for m in (31, 63, 127):
        g = make_grid(2, m)
        op = operator_for_grid(g, 1.0)
        outs.append(Field(g, op.matvec(sample(g, analytic.bump).values)))
    from fraclap.analysis import richardson_rate

    assert richardson_rate(*outs).rate > 1.7


@settings(max_examples=15, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), seed=st.integers(0, 1000))
def test_linearity(a, b, seed):
    op = operator_for_grid(make_grid(2, 9), 1.2)
    r = np.random.default_rng(seed)
    u, v = r.standard_normal((2, op.grid.n_active))
    lhs = op.matvec(a * u + b * v)
    rhs = a * op.matvec(u) + b * op.matvec(v)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * op.table.at((0, 0)))
