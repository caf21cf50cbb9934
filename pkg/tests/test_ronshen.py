import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfline_gabor.framecert import x_grid
from halfline_gabor.grids import jittered_lattice, regular_lattice, semi_irregular
from halfline_gabor.ronshen import (
    ReducedSlice,
    build_slice,
    dominance_report,
    fiber_matrix,
    fiber_offsets,
    reduced_semi_irregular,
    reduced_upper_triangular,
    u_transform,
)
from halfline_gabor.windows import OneSidedExponential, TruncatedLinear

from conftest import builtin_windows


def test_fiber_offsets_examples():
    offs = {m: (n, tau) for m, n, tau in fiber_offsets(0.3, 0.7, 1.0, (-1, 1))}
    assert offs[0][0] == 0 and offs[0][1] == pytest.approx(0.3)
    assert offs[1][0] == 1 and offs[1][1] == pytest.approx(0.6)
    assert offs[-1][0] == -1 and offs[-1][1] == pytest.approx(0.0, abs=1e-15)


def test_fiber_offsets_rejects_sparse_lattice():
    with pytest.raises(ValueError):
        fiber_offsets(0.1, 1.2, 1.0, (0, 3))


@given(x_frac=st.floats(0.0, 0.999), alpha_frac=st.floats(0.1, 1.0), beta=st.floats(0.3, 3.0))
def test_fiber_offsets_tau_range(x_frac, alpha_frac, beta):
    alpha = alpha_frac / beta
    x = x_frac / beta
    for m, n, tau in fiber_offsets(x, alpha, beta, (-20, 20)):
        assert 0.0 <= tau < alpha
        assert tau == pytest.approx(x + m / beta - alpha * n, abs=1e-12)


def test_build_slice_entry_examples(exp_window):
    s = build_slice(exp_window, regular_lattice(1.0, 1.0), 0.0, (2, 2))
    assert s.entry(0, 0) == 1.0
    assert s.entry(1, 0) == 0.0


def test_build_slice_general_phase_example(exp_window):
    vals = fiber_matrix(exp_window, [0.5], 1.0, 0.0, [1], phases=[0.25])
    assert vals[0, 0] == pytest.approx(math.exp(-0.5) * 1j, abs=1e-15)
    grid = semi_irregular(np.arange(-20.0, 20.5, 0.5), 1.0, 0.5, phases=[0.25] * 81)
    s = build_slice(exp_window, grid, 0.0, 4)
    assert s.entry(0.5, 1) == pytest.approx(math.exp(-0.5) * 1j, abs=1e-15)


def test_build_slice_rejects_bad_point(exp_window):
    with pytest.raises(ValueError):
        build_slice(exp_window, regular_lattice(1.0, 1.0), 1.0, 4)


def test_build_slice_keeps_double_rows(exp_window):
    # alpha = 0.5, beta = 1: two rows start inside every column slot
    s = build_slice(exp_window, regular_lattice(0.5, 1.0), 0.3, 8)
    assert s.shape[0] == 2 * s.shape[1]


@pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (0.7, 1.2), (0.5, 1.5)])
def test_build_slice_regular_real_and_supported(linear_window, alpha, beta):
    for x in x_grid(beta, 8):
        s = build_slice(linear_window, regular_lattice(alpha, beta), float(x), 16)
        assert np.isrealobj(s.entries)
        assert np.all((s.tau >= 0) & (s.tau < 1 / beta))
        args = x + s.cols[None, :] / beta - s.rows[:, None]
        outside = (args < 0) | (args > linear_window.support_sup)
        assert np.all(s.entries[outside] == 0.0)


def test_slice_csv(tmp_path, exp_window):
    s = build_slice(exp_window, regular_lattice(1.0, 1.0), 0.5, (1, 1))
    path = tmp_path / "slice.csv"
    s.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,real,imag" and len(lines) == 10


def test_reduced_examples(exp_window, linear_window):
    g = reduced_upper_triangular(exp_window, 1.0, 1.0, 0.5, (-3, 3)).matrix
    assert np.allclose(np.diag(g), math.exp(-0.5), rtol=1e-15)
    assert np.allclose(np.diag(g, 1), math.exp(-1.5), rtol=1e-15)
    g = reduced_upper_triangular(linear_window, 0.5, 2.0, 0.2, (-3, 3)).matrix
    assert np.allclose(np.diag(g), 0.8) and np.allclose(np.diag(g, 1), 0.3)
    assert np.all(np.tril(g, -1) == 0.0)


def test_u_transform_examples(exp_window, linear_window):
    q = exp_window.decay_ratio(1.0)
    d = u_transform(reduced_upper_triangular(exp_window, 1.0, 1.0, 0.5, (-4, 4)), q)
    assert d.form == "D"
    assert np.allclose(np.diag(d.matrix), math.exp(-0.5))
    assert np.max(np.abs(d.matrix - np.diag(np.diag(d.matrix)))) <= 1e-15

    q = linear_window.decay_ratio(0.5)
    assert q == pytest.approx(0.5)
    d = u_transform(reduced_upper_triangular(linear_window, 0.5, 2.0, 0.2, (-4, 4)), q).matrix
    assert np.diag(d) == pytest.approx([0.8] * 9)
    assert np.diag(d, 1) == pytest.approx([-0.1] * 8)
    assert np.diag(d, 2) == pytest.approx([-0.15] * 7)
    assert np.all(np.abs(np.diag(d, 3)) <= 1e-15)
    assert np.abs(d[0, 1:]).sum() == pytest.approx(0.25)


def test_u_transform_guards(exp_window):
    g = reduced_upper_triangular(exp_window, 1.0, 1.0, 0.5, (-2, 2))
    with pytest.raises(ValueError):
        u_transform(g, 1.0)
    with pytest.raises(ValueError):
        u_transform(u_transform(g, 0.5), 0.5)


def test_dominance_report_examples(exp_window, linear_window):
    d = u_transform(reduced_upper_triangular(linear_window, 0.5, 2.0, 0.2, (-4, 4)), 0.5)
    rep = dominance_report(d)
    assert rep.delta_obs == pytest.approx(0.8)
    assert rep.sign_ok and rep.passed
    assert rep.worst_row_slack >= 0.15 - 1e-12

    q = math.exp(-1)
    d = u_transform(reduced_upper_triangular(exp_window, 1.0, 1.0, 0.5, (-4, 4)), q)
    rep = dominance_report(d)
    assert rep.worst_row_slack == pytest.approx(q * rep.delta_obs, rel=1e-12)

    bad = ReducedSlice(np.array([[1.0, 0.2], [0.0, 1.0]]), np.zeros(2), 1.0, 1.0, np.arange(2), q=0.5)
    assert not dominance_report(bad).sign_ok


@pytest.mark.parametrize("w", builtin_windows(), ids=lambda w: w.kind)
@pytest.mark.parametrize("beta", [1.0, 1.25])
@pytest.mark.parametrize("alpha_kind", ["0.3", "0.7", "1/beta"])
def test_dominance_on_builtin_windows(w, beta, alpha_kind):
    alpha = 1 / beta if alpha_kind == "1/beta" else float(alpha_kind)
    q = w.decay_ratio(1 / beta)
    for x in x_grid(beta, 32):
        d = u_transform(reduced_upper_triangular(w, alpha, beta, float(x), (-24, 23)), q)
        rep = dominance_report(d)
        assert rep.sign_ok
        assert rep.worst_row_slack >= -1e-12
        assert rep.passed


@pytest.mark.parametrize("w", builtin_windows(), ids=lambda w: w.kind)
def test_u_transform_equals_explicit_product(w):
    beta, alpha = 1.0, 0.7
    q = w.decay_ratio(1 / beta)
    for x in (0.1, 0.55, 0.9):
        g = reduced_upper_triangular(w, alpha, beta, x, (-10, 10))
        size = g.size
        U = np.eye(size) - q * np.eye(size, k=1)
        explicit = g.matrix @ U
        # exact in every column, the last one included
        assert np.max(np.abs(explicit - u_transform(g, q).matrix)) <= 1e-12


def test_reduced_diagonal_is_window_at_tau(exp_window):
    g = reduced_upper_triangular(exp_window, 0.7, 1.0, 0.4, (-5, 5))
    assert np.allclose(np.diag(g.matrix), exp_window(g.tau), rtol=0, atol=0)


def test_reduced_semi_irregular_matches_lattice(exp_window):
    pts = 0.7 * np.arange(-80, 81)
    grid = semi_irregular(pts, 1.0, 0.7)
    a = reduced_semi_irregular(exp_window, grid, 0.35, 10)
    b = reduced_upper_triangular(exp_window, 0.7, 1.0, 0.35, (int(a.columns[0]), int(a.columns[-1])))
    assert np.allclose(a.matrix, b.matrix, rtol=0, atol=1e-14)


def test_reduced_semi_irregular_jittered_is_triangular(exp_window):
    pts = jittered_lattice(0.9, 0.1, 3, 128)
    grid = semi_irregular(pts, 1.0, 0.9)
    g = reduced_semi_irregular(exp_window, grid, 0.25, 48)
    assert np.all(np.tril(g.matrix, -1) == 0.0)
    assert np.all((g.tau >= 0) & (g.tau < 0.9 + 1e-12))
    with pytest.raises(ValueError):
        reduced_semi_irregular(exp_window, semi_irregular(pts, 1.0, 0.9, phases=np.full(128, 0.25)), 0.25, 48)
