import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfline_gabor import quadrature as quad
from halfline_gabor.dominance import smallest_singular_value
from halfline_gabor.framecert import (
    Reason,
    Verdict,
    boundary_degeneration_demo,
    certify_lower_frame_bound,
    classify,
    empirical_frame_bounds,
    frame_operator_quadratic_form,
    incompleteness_witness,
    x_grid,
)
from halfline_gabor.grids import jittered_lattice, regular_lattice, semi_irregular
from halfline_gabor.ronshen import reduced_upper_triangular, u_transform
from halfline_gabor.windows import (
    OneSidedExponential,
    Tabulated,
    TruncatedExponential,
    TruncatedLinear,
)

from conftest import builtin_windows


@pytest.mark.parametrize("w,alpha,beta,verdict,reason", [
    (OneSidedExponential(1.0), 1.0, 1.0, Verdict.FRAME, Reason.CRITERION),
    (TruncatedExponential(1.0, 1.0), 1.0, 1.0, Verdict.FRAME, Reason.CRITERION),
    (TruncatedLinear(1.0), 1.0, 0.5, Verdict.NOT_FRAME, Reason.BOUNDARY_RULE),
    (OneSidedExponential(1.0), 1.2, 1.0, Verdict.NOT_FRAME, Reason.PRODUCT_RULE),
    (TruncatedLinear(1.0), 1.2, 0.5, Verdict.NOT_FRAME, Reason.SUPPORT_RULE),
    (TruncatedLinear(1.0), 0.9, 1.0, Verdict.FRAME, Reason.CRITERION),
])
def test_classify(w, alpha, beta, verdict, reason):
    c = classify(w, alpha, beta)
    assert (c.verdict, c.reason) == (verdict, reason)


def test_classify_product_rule_for_any_window():
    for w in builtin_windows():
        assert classify(w, 1.2, 1.0).reason is Reason.PRODUCT_RULE


def test_classify_unsupported_window():
    flat = Tabulated(np.array([0.0, 1.0, 2.0]), np.array([1.0, 1.0, 0.5]))
    assert classify(flat, 0.5, 1.0).verdict is Verdict.UNSUPPORTED


def test_x_grid_half_step():
    xs = x_grid(2.0, 4)
    assert xs.tolist() == pytest.approx([0.0625, 0.1875, 0.3125, 0.4375])
    with pytest.raises(ValueError):
        x_grid(1.0, 0)


def test_certify_exponential_example():
    rep = certify_lower_frame_bound(OneSidedExponential(1.0), regular_lattice(1.0, 1.0))
    assert rep.verdict is Verdict.FRAME and rep.reason is Reason.CERTIFIED
    assert rep.certificate.delta == pytest.approx(math.exp(-1))
    assert rep.certificate.lam == pytest.approx(math.exp(-1))
    assert rep.certificate.C == pytest.approx(math.e)
    assert rep.certified_epsilon > 0 and rep.certified_A > 0
    assert rep.empirical_A >= rep.certified_A
    d = rep.to_dict()
    assert d["verdict"] == "Frame" and d["certificate"]["n0"] == rep.certificate.n0


def test_certify_refuses_boundary_case():
    rep = certify_lower_frame_bound(TruncatedLinear(1.0), regular_lattice(1.0, 1.0))
    assert rep.verdict is Verdict.NOT_FRAME and rep.reason is Reason.BOUNDARY_RULE
    assert rep.certified_epsilon is None and rep.certificate is None


def test_certify_semi_irregular_example():
    grid = semi_irregular(jittered_lattice(0.9, 0.1, 3, 128), 1.0, 0.9)
    rep = certify_lower_frame_bound(OneSidedExponential(1.0), grid, empirical=False)
    assert rep.certified_epsilon > 0
    assert rep.diagnostics["separation_m"] is not None


def test_certify_semi_irregular_preconditions():
    w = OneSidedExponential(1.0)
    with pytest.raises(ValueError, match="gap"):
        certify_lower_frame_bound(w, semi_irregular([0.0, 0.6, 1.2, 1.8], 1.0, 0.5))
    pts = jittered_lattice(0.9, 0.1, 3, 64)
    with pytest.raises(ValueError, match="phases"):
        certify_lower_frame_bound(w, semi_irregular(pts, 1.0, 0.9, phases=np.full(64, 0.25)))


@pytest.mark.parametrize("w,alpha,beta", [
    (OneSidedExponential(1.0), 1.0, 1.0),
    (TruncatedLinear(1.0), 0.7, 1.0),
    (TruncatedExponential(1.0, 1.0), 1.0, 1.0),
    (OneSidedExponential(2.0), 0.4, 2.0),
])
def test_soundness_chain(w, alpha, beta):
    rep = certify_lower_frame_bound(w, regular_lattice(alpha, beta), x_grid_size=16, truncation=24,
                                    empirical=False)
    assert rep.reason is Reason.CERTIFIED
    q = rep.diagnostics["q"]
    for x in x_grid(beta, 16):
        for n in (1, 2, 5, 12, 24):
            d = u_transform(reduced_upper_triangular(w, alpha, beta, float(x), (-n, n)), q)
            assert smallest_singular_value(d.matrix) >= rep.certified_epsilon - 1e-12


@given(alpha=st.floats(0.1, 1.6), beta=st.floats(0.1, 1.6))
def test_certification_attempted_exactly_on_frame_verdicts(alpha, beta):
    w = TruncatedLinear(1.0)
    rep = certify_lower_frame_bound(w, regular_lattice(alpha, beta), x_grid_size=4, truncation=8,
                                    empirical=False)
    assert (rep.verdict is Verdict.FRAME) == classify(w, alpha, beta).is_frame
    if rep.verdict is not Verdict.FRAME:
        assert rep.certificate is None


def test_empirical_bounds_ordering_and_rows():
    emp = empirical_frame_bounds(OneSidedExponential(1.0), regular_lattice(0.7, 1.2), 8, 24)
    assert 0 < emp.A <= emp.B
    assert len(emp.rows()) == 8


def test_empirical_lower_bound_vanishes_beyond_support():
    w = TruncatedLinear(1.0)
    grid = regular_lattice(1.5, 0.5)
    a = [empirical_frame_bounds(w, grid, 16, t).A for t in (4, 16)]
    # a column slot no row reaches: sigma_min is zero up to roundoff
    assert max(a) < 1e-20


def test_quadratic_form_in_gap_is_zero():
    w = TruncatedLinear(1.0)
    f = quad.indicator(1.125, 1.375)
    qf = frame_operator_quadratic_form(w, regular_lattice(1.5, 0.5), f, trunc=16)
    assert qf.direct <= 1e-20 and qf.fiber <= 1e-20


def test_quadratic_form_truncated_exponential():
    w = TruncatedExponential(1.0, 1.0)
    f = quad.gaussian_bump(2.0, 0.4)
    qf = frame_operator_quadratic_form(w, regular_lattice(0.8, 1.0), f)
    assert qf.relative_discrepancy <= 1e-4


def test_incompleteness_examples():
    wit = incompleteness_witness(TruncatedLinear(1.0), 1.5, 0.5)
    assert wit.interval == (1.125, 1.375) and wit.residual <= 1e-12
    assert incompleteness_witness(TruncatedExponential(1.0, 1.0), 2.0, 0.5).residual <= 1e-12
    with pytest.raises(ValueError):
        incompleteness_witness(TruncatedLinear(1.0), 1.0, 0.5)


def test_boundary_demo_scaling():
    r = boundary_degeneration_demo(TruncatedLinear(1.0), 1.0, [0.2, 0.1, 0.05, 0.025])
    assert all(b < a for a, b in zip(r, r[1:]))
    # only the shift at 0 meets [1 - eps, 1], where g(t) = 1 - t: R = eps^2 / 3
    assert r == pytest.approx([e * e / 3 for e in (0.2, 0.1, 0.05, 0.025)], rel=1e-3)


def test_boundary_demo_preconditions():
    with pytest.raises(ValueError):
        boundary_degeneration_demo(TruncatedExponential(1.0, 1.0), 1.0, [0.2, 0.1])
    with pytest.raises(ValueError):
        boundary_degeneration_demo(TruncatedLinear(1.0), 1.0, [0.1, 0.2])
