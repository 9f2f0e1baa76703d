import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadwalks.elliptic import periods_closed_form
from quadwalks.errors import FitUnstable, InfiniteGroup
from quadwalks.group import (
    ALGEBRAIC,
    HOLONOMIC_AT_Z,
    HOLONOMIC_NON_ALGEBRAIC,
    INFINITE,
    NON_HOLONOMIC_AT_Z,
    IrrationalAtTolerance,
    Rational,
    asymptotic_scan,
    chordal,
    convergents,
    fit_moebius,
    group_order_on_curve,
    group_report,
    holonomy_verdict,
    finite_group_ratio,
    orbit_sum,
    ratio_rationality,
    snap,
)
from quadwalks.kernel import GESSEL, KREWERAS, SIMPLE, WORKED_IID, branch_points, kernel_data
from quadwalks.uniformization import Uniformizer


def test_known_group_orders():
    assert group_order_on_curve(kernel_data(SIMPLE, 0.1)) == 4
    assert group_order_on_curve(kernel_data(KREWERAS, 0.1)) == 6
    assert group_order_on_curve(kernel_data(GESSEL, 0.1)) == 8
    assert group_order_on_curve(kernel_data(WORKED_IID, 0.1)) == INFINITE


def test_chordal_metric():
    assert chordal(math.inf, math.inf) == 0
    assert abs(chordal(0, math.inf) - 1) < 1e-15
    assert abs(chordal(1, -1) - 1) < 1e-15


@given(st.integers(1, 200), st.integers(1, 50))
def test_convergents_end_at_the_fraction(p, q):
    c = convergents(p / q)
    assert Fraction(p, q) in c


@given(st.integers(1, 40), st.integers(1, 40))
def test_rationality_finds_small_fractions(p, q):
    r = ratio_rationality(p / q + 1e-12)
    assert isinstance(r, Rational)
    assert r.value == Fraction(p, q)


def test_rationality_rejects_irrationals():
    assert isinstance(ratio_rationality(math.pi), IrrationalAtTolerance)
    assert isinstance(ratio_rationality(math.sqrt(2)), IrrationalAtTolerance)
    K = kernel_data(WORKED_IID, 0.1)
    assert isinstance(ratio_rationality(periods_closed_form(K, branch_points(K))), IrrationalAtTolerance)
    # a looser tolerance or a larger Dmax finds 355/113 for pi
    assert isinstance(ratio_rationality(math.pi, Dmax=120, tol=1e-6), Rational)


def test_finite_group_ratio_table():
    assert finite_group_ratio(4, 0) == 2
    assert finite_group_ratio(6, -1) == 3 and finite_group_ratio(6, 1) == Fraction(3, 2)
    assert finite_group_ratio(8, -1) == 4 and finite_group_ratio(8, 2) == Fraction(4, 3)
    with pytest.raises(ValueError):
        finite_group_ratio(10, 1)


def test_finite_group_ratios_and_orbit_sums(finite_taxa):
    from collections import Counter

    assert Counter(t.order for t in finite_taxa) == {4: 16, 6: 5, 8: 2}
    for t in finite_taxa:
        rep = group_report(t.S, 0.5 / t.S.size)
        assert abs(rep.ratio - float(finite_group_ratio(t.order, rep.covariance))) < 1e-9
        assert rep.orbit_sum_zero == (rep.covariance > 0)
        assert rep.verdict == (ALGEBRAIC if rep.covariance > 0 else HOLONOMIC_NON_ALGEBRAIC)


def _orbit(S, z):
    K = kernel_data(S, z)
    U = Uniformizer(K)
    w = np.array([0.21 + 0.33j, 0.47 + 0.12j]) * U.w2 + 0.3 * U.w1
    return U, K, w


def test_orbit_sum_zero_for_kreweras():
    U, K, w = _orbit(KREWERAS, 0.2)
    assert np.max(np.abs(orbit_sum(U, K, w, 6))) < 1e-9


def test_orbit_sum_nonzero_for_simple_walk_and_shift_invariant():
    U, K, w = _orbit(SIMPLE, 0.15)
    o = orbit_sum(U, K, w, 4)
    assert np.min(np.abs(o)) > 1e-3
    np.testing.assert_allclose(orbit_sum(U, K, w + U.w3, 4), o, rtol=1e-8)


def test_orbit_sum_needs_finite_group():
    U, K, w = _orbit(WORKED_IID, 0.1)
    with pytest.raises(InfiniteGroup):
        orbit_sum(U, K, w, INFINITE)


def test_verdicts():
    assert holonomy_verdict(6, 1, None) == ALGEBRAIC
    assert holonomy_verdict(4, 0, None) == HOLONOMIC_NON_ALGEBRAIC
    assert holonomy_verdict(INFINITE, 0, Rational(7, 2, 0.0)) == HOLONOMIC_AT_Z
    assert holonomy_verdict(INFINITE, 0, IrrationalAtTolerance(3.3)) == NON_HOLONOMIC_AT_Z
    rep = group_report(WORKED_IID, 0.1)
    assert rep.verdict == NON_HOLONOMIC_AT_Z and rep.orbit_sum_zero is None


# --- asymptotic fit --------------------------------------------------------


@given(
    st.floats(1.0, 6.0), st.floats(-5.0, 5.0), st.floats(-5.0, 5.0).filter(lambda d: abs(d) > 0.1)
)
def test_moebius_fit_recovers_parameters(L, beta, delta):
    lz = np.log(np.geomspace(1e-6, 1e-3, 13))
    r = (L * lz + beta) / (lz + delta)
    L_, Lt, res = fit_moebius(lz, r)
    assert abs(L_ - L) < 1e-8 * max(1, abs(L))
    assert abs(Lt - (beta - L * delta)) < 1e-6 * max(1, abs(beta) + abs(L * delta))
    assert res < 1e-9


def test_finite_group_fit_is_constant():
    fit = asymptotic_scan(GESSEL)
    assert abs(fit.L - 4 / 3) < 1e-9
    assert abs(fit.L_tilde) < 1e-6
    assert fit.L_snap == Fraction(4, 3)


def test_worked_model_fit():
    fit = asymptotic_scan(WORKED_IID)
    assert abs(fit.L - 4) < 0.02 * 4
    assert fit.L_snap == 4
    assert fit.snap_residual < 1e-3


def test_snap():
    assert snap(2.9999) == 3
    assert snap(1.33334) == Fraction(4, 3)


def test_fit_unstable_on_noise(rng, monkeypatch):
    from quadwalks import group

    monkeypatch.setattr(group, "ratio_curve", lambda S, zg: 3 + rng.normal(size=len(zg)))
    with pytest.raises(FitUnstable):
        asymptotic_scan(WORKED_IID)
