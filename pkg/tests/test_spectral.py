import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfline_gabor.dominance import certificate
from halfline_gabor.ronshen import reduced_upper_triangular, u_transform
from halfline_gabor.spectral import (
    MAX_DIM,
    extreme_singular_values,
    truncation_sweep,
    write_sweep_csv,
)
from halfline_gabor.windows import OneSidedExponential, TruncatedLinear


def test_examples():
    r = extreme_singular_values(np.eye(3))
    assert (r.sigma_min, r.sigma_max) == pytest.approx((1.0, 1.0))
    r = extreme_singular_values(np.diag([1.0, 2.0, 3.0]))
    assert (r.sigma_min, r.sigma_max) == pytest.approx((1.0, 3.0))
    r = extreme_singular_values(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert (r.sigma_min, r.sigma_max) == pytest.approx((1.0, 1.0))


def test_complex_and_wide():
    M = np.array([[1j, 0], [0, 2]])
    r = extreme_singular_values(M)
    assert (r.sigma_min, r.sigma_max) == pytest.approx((1.0, 2.0))
    assert extreme_singular_values(np.ones((2, 5))).sigma_min == 0.0


def test_input_errors():
    with pytest.raises(ValueError):
        extreme_singular_values(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        extreme_singular_values(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        extreme_singular_values(np.zeros((MAX_DIM + 1, MAX_DIM + 1)))


def test_sweep_exponential_diagonal():
    w = OneSidedExponential(1.0)
    q = math.exp(-1)

    def builder(n):
        return u_transform(reduced_upper_triangular(w, 1.0, 1.0, 0.5, (0, n - 1)), q).matrix

    for n, r in truncation_sweep(builder, [4, 8, 16, 32]):
        assert r.sigma_min == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_sweep_linear_above_certificate():
    w = TruncatedLinear(1.0)
    q = w.decay_ratio(0.5)
    cert = certificate(w.left_limit(0.5), w.g0 / q, q)

    def builder(n):
        return u_transform(reduced_upper_triangular(w, 0.5, 2.0, 0.2, (0, n - 1)), q).matrix

    for _, r in truncation_sweep(builder, [2, 4, 8, 16, 32, 64]):
        assert r.sigma_min >= cert.epsilon


def test_sweep_identity_and_csv(tmp_path):
    rows = truncation_sweep(np.eye, [4])
    assert rows[0][0] == 4 and rows[0][1].sigma_min == 1.0 and rows[0][1].sigma_max == 1.0
    path = tmp_path / "sweep.csv"
    write_sweep_csv(rows, path)
    assert path.read_text().splitlines()[0] == "N,sigma_min,sigma_max,residual"
    with pytest.raises(ValueError):
        truncation_sweep(np.eye, [4, 4])


def _random(rng, m, n, cplx):
    M = rng.standard_normal((m, n))
    if cplx:
        M = M + 1j * rng.standard_normal((m, n))
    return M


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 64), cplx=st.booleans())
def test_against_gram_oracle(seed, n, cplx):
    rng = np.random.default_rng(seed)
    M = _random(rng, n, n, cplx)
    r = extreme_singular_values(M)
    ev = np.linalg.eigvalsh(M.conj().T @ M)
    assert r.sigma_max == pytest.approx(math.sqrt(ev[-1]), rel=1e-8)
    # the Gram route squares the condition number; compare on its resolvable scale
    assert r.sigma_min == pytest.approx(math.sqrt(max(ev[0], 0.0)), rel=1e-8, abs=1e-7 * r.sigma_max)
    assert r.sigma_min <= r.sigma_max
    assert r.residual <= 1e-8


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30))
def test_adjoint_and_nesting(seed, n):
    rng = np.random.default_rng(seed)
    M = _random(rng, n + 3, n, True)
    sq = M[:n]
    assert extreme_singular_values(sq).sigma_min == pytest.approx(
        extreme_singular_values(sq.conj().T).sigma_min, rel=1e-9, abs=1e-12)
    base = extreme_singular_values(M)
    more_cols = np.hstack([M, _random(rng, n + 3, 1, True)])
    more_rows = np.vstack([M, _random(rng, 1, n, True)])
    assert extreme_singular_values(more_cols).sigma_min <= base.sigma_min * (1 + 1e-12)
    assert extreme_singular_values(more_rows).sigma_max >= base.sigma_max * (1 - 1e-12)


def test_deterministic():
    M = np.random.default_rng(5).standard_normal((40, 40))
    assert extreme_singular_values(M) == extreme_singular_values(M.copy())
