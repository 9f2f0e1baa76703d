import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadwalks.errors import InvalidStep, OffCurve, OnCut, SingularWalk, WeightOutOfRange
from quadwalks.kernel import (
    GESSEL,
    KREWERAS,
    SIMPLE,
    STEP_ORDER,
    WORKED_IID,
    branch_points,
    branch_X,
    branch_Y,
    classify_subcase,
    covariance,
    exact_discriminants,
    galois_eta,
    galois_xi,
    is_singular,
    kernel_data,
    parse_stepset,
    special_points,
    stepset_from_mask,
)

P = np.polynomial.polynomial

masks = st.integers(min_value=1, max_value=255)


def nonsingular_masks():
    from quadwalks.models import all_models

    return [S.mask for S in all_models() if not is_singular(S)]


NONSINGULAR = nonsingular_masks()


# --- step sets ----------------------------------------------------------


@given(masks)
def test_mask_round_trip(m):
    S = stepset_from_mask(m)
    assert S.mask == m
    assert parse_stepset(str(S)) == S
    assert parse_stepset(m) == S
    assert parse_stepset(hex(m)) == S


@pytest.mark.parametrize("bad", ["0,0", "2,0", "1,-2", "", "junk", "1;2", "a,b", "0x100"])
def test_invalid_steps(bad):
    with pytest.raises(InvalidStep):
        parse_stepset(bad)


def test_transpose_is_involution():
    for m in range(1, 256):
        S = stepset_from_mask(m)
        assert S.transpose().transpose() == S


def test_step_order_covers_neighbours():
    assert len(set(STEP_ORDER)) == 8
    assert (0, 0) not in STEP_ORDER


# --- coefficients -------------------------------------------------------


def test_simple_walk_coefficients():
    z = 0.2
    K = kernel_data(SIMPLE, z)
    np.testing.assert_allclose(K.a, [0, z, 0])
    np.testing.assert_allclose(K.b, [z, -1, z])
    np.testing.assert_allclose(K.c, [0, z, 0])


def test_kreweras_coefficients():
    z = 0.25
    K = kernel_data(KREWERAS, z)
    np.testing.assert_allclose(K.a, [0, 0, z])
    np.testing.assert_allclose(K.b, [z, -1, 0])
    np.testing.assert_allclose(K.c, [0, z, 0])


@pytest.mark.parametrize("z", [0.0, -0.1, 0.25, 1.0])
def test_weight_out_of_range(z):
    with pytest.raises(WeightOutOfRange):
        kernel_data(SIMPLE, z)


def _kernel_fraction(S, z, x, y):
    """xyz [sum x^i y^j - 1/z] evaluated exactly."""
    tot = sum(Fraction(x) ** i * Fraction(y) ** j for i, j in S.steps) - 1 / Fraction(z)
    return Fraction(x) * Fraction(y) * Fraction(z) * tot


def test_discriminant_against_fraction_oracle(rng):
    """Rebuild a, b, c from kernel values at y = 0, 1, -1 and compare d."""
    masks_ = rng.choice(NONSINGULAR, size=20, replace=False)
    z = Fraction(1, 17)
    for m in masks_:
        S = stepset_from_mask(int(m))
        xs = [Fraction(k, 3) for k in range(1, 6)]
        for x in xs:
            # K(x, 0): only the steps with j = -1 survive the factor y
            c = x * z * sum(x**i for i, j in S.steps if j == -1)
            kp = _kernel_fraction(S, z, x, 1)
            km = _kernel_fraction(S, z, x, -1)
            a = (kp + km) / 2 - c
            b = (kp - km) / 2
            d_oracle = b * b - 4 * a * c
            d, _, _, _ = exact_discriminants(S, z)
            d_exact = sum(co * x**k for k, co in enumerate(d))
            assert d_exact == d_oracle
            K = kernel_data(S, float(z))
            assert abs(P.polyval(float(x), K.d) - float(d_oracle)) < 1e-14


# --- branch points ------------------------------------------------------


@given(st.floats(min_value=0.01, max_value=0.24))
def test_simple_walk_branch_point_symmetry(z):
    B = branch_points(kernel_data(SIMPLE, z))
    x1, x2, x3, x4 = B.x
    assert abs(x1 * x4 - 1) < 1e-12
    assert abs(x2 * x3 - 1) < 1e-12


@given(st.sampled_from(NONSINGULAR), st.floats(min_value=0.05, max_value=0.95))
def test_branch_point_ordering(m, frac):
    S = stepset_from_mask(m)
    B = branch_points(kernel_data(S, frac / S.size))
    for r in (B.x, B.y):
        r1, r2, r3, r4 = (v.real if isinstance(v, complex) else v for v in r)
        # |r1| = r2 happens (r1 = -r2) for sets symmetric under i -> -i
        assert abs(r[0]) <= r2 < 1 < r3 <= abs(r[3])
        assert r1 != r2 and r3 != r4


def test_branch_points_match_mpmath(rng):
    for m in rng.choice(NONSINGULAR, size=10, replace=False):
        S = stepset_from_mask(int(m))
        K = kernel_data(S, 0.5 / S.size)
        B = branch_points(K)
        d = np.trim_zeros(K.d, "b")
        ref = sorted((complex(r) for r in mpmath.polyroots(list(d[::-1]), maxsteps=200, extraprec=100)), key=abs)
        got = [complex(v) for v in B.x if not math.isinf(abs(v))]
        assert len(got) == len(ref)
        for g, r in zip(got, ref):
            assert abs(g - r) < 1e-12 * max(1, abs(r))


def test_singular_walks():
    with pytest.raises(SingularWalk):
        branch_points(kernel_data(parse_stepset("1,1;-1,-1"), 0.2))
    assert is_singular(parse_stepset("-1,1;1,1;1,-1"))
    assert not is_singular(SIMPLE)


def test_worked_model_expansions():
    z = 1e-3
    B = branch_points(kernel_data(WORKED_IID, z))
    x1, x2, x3, x4 = B.x
    assert abs(x1 - (z - 2 * z**2 + 3 * z**3)) < 1e-9
    assert abs(x2 - (z + 2 * z**2 + 5 * z**3)) < 1e-9
    # next term is O(z^3) on a value of size 1/z^2
    assert abs(x3 - (1 / (4 * z**2) - 1 - 2 * z)) < 1e-7
    assert math.isinf(x4)


# --- algebraic branches --------------------------------------------------


def test_branch_Y_on_curve_and_vieta(rng):
    for m in rng.choice(NONSINGULAR, size=10, replace=False):
        S = stepset_from_mask(int(m))
        K = kernel_data(S, 0.5 / S.size)
        x = rng.normal(size=20) + 1j * rng.normal(size=20)
        y0, y1 = branch_Y(K, x, 0), branch_Y(K, x, 1)
        assert np.all(np.abs(y0) <= np.abs(y1) + 1e-14)
        a, b, c = (P.polyval(x, p) for p in (K.a, K.b, K.c))
        np.testing.assert_allclose(y0 + y1, -b / a, rtol=1e-10)
        np.testing.assert_allclose(y0 * y1, c / a, rtol=1e-10)
        scale = 1 + np.abs(x) ** 2 * np.abs(y1) ** 2
        assert np.all(np.abs(K.K(x, y0)) < 1e-12 * scale)
        y = rng.normal(size=5) + 1j
        assert np.all(np.abs(K.K(branch_X(K, y, 0), y)) < 1e-12 * (1 + np.abs(y) ** 2 * 100))


def test_unit_circle_separates_branches():
    theta = np.linspace(0.1, 2 * np.pi - 0.1, 50)
    x = np.exp(1j * theta)
    for m in NONSINGULAR[:10]:
        S = stepset_from_mask(m)
        K = kernel_data(S, 0.5 / S.size)
        assert np.all(np.abs(branch_Y(K, x, 0)) < 1)
        assert np.all(np.abs(branch_Y(K, x, 1)) > 1)


def test_on_cut_raises():
    K = kernel_data(SIMPLE, 0.2)
    B = branch_points(K)
    x = 0.5 * (B.x[0] + B.x[1])
    with pytest.raises(OnCut):
        branch_Y(K, x, 0, B)


def test_galois_involutions(rng):
    K = kernel_data(GESSEL, 0.2)
    for x in rng.normal(size=5) + 1j * rng.normal(size=5):
        y = complex(branch_Y(K, x, 0))
        x1, y1 = galois_xi(K, x, y)
        assert x1 == x and abs(K.K(x1, y1)) < 1e-10 * (1 + abs(y1) ** 2)
        x2, y2 = galois_xi(K, x1, y1)
        assert abs(y2 - y) < 1e-10 * (1 + abs(y))
        x3, y3 = galois_eta(K, x, y)
        x4, _ = galois_eta(K, x3, y3)
        assert abs(x4 - x) < 1e-10 * (1 + abs(x))
    with pytest.raises(OffCurve):
        galois_xi(K, 0.3, 0.3)


def test_xi_fixes_branch_point():
    K = kernel_data(GESSEL, 0.2)
    x2 = branch_points(K).x[1]
    y = complex(branch_Y(K, x2, 0))
    _, y1 = galois_xi(K, x2, y)
    assert abs(y1 - y) < 1e-6


# --- covariance, special points and subcases -----------------------------


def test_covariance_values():
    assert covariance(SIMPLE).full == 0
    assert covariance(KREWERAS).full == 1
    assert covariance(GESSEL).full == 2


def test_special_points_worked_model():
    sp = special_points(kernel_data(WORKED_IID, 0.1))
    # as y -> inf the x-roots of z x^2 - y x + z y (1 + y) tend to inf and -1
    assert math.isinf(abs(sp.x_star)) and math.isinf(abs(sp.y_star))
    assert abs(sp.x_starstar + 1) < 1e-14
    assert math.isinf(abs(sp.y_circ)) and math.isinf(abs(sp.y_bullet))


def test_special_points_ib_pair():
    S = parse_stepset("-1,0;-1,1;0,-1;1,1")
    K = kernel_data(S, 0.4 / S.size)
    assert classify_subcase(K, branch_points(K)).tag == "I.B"
    p = special_points(K)
    # y_circ and y_bullet are finite for this model
    assert np.isfinite(p.y_circ) and np.isfinite(p.y_bullet)


def test_subcase_tags():
    K = kernel_data(WORKED_IID, 0.1)
    assert classify_subcase(K, branch_points(K)).tag == "II.D"
    S = parse_stepset("-1,-1;-1,0;-1,1;0,-1;1,-1;1,1")
    K = kernel_data(S, 0.4 / S.size)
    assert classify_subcase(K, branch_points(K)).tag == "I.A"


def test_subcase_counts(infinite_models):
    from collections import Counter

    c = Counter()
    for S in infinite_models:
        K = kernel_data(S, 0.4 / S.size)
        c[classify_subcase(K, branch_points(K)).tag] += 1
    assert c == {"II.D": 9, "II.B": 10, "I.A": 10, "I.B": 6, "II.C": 5, "II.A": 5, "I.C": 5, "III": 1}
