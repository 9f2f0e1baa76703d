import math

import numpy as np
import pytest

from quadwalks.errors import DegenerateMap
from quadwalks.kernel import WORKED_IID, _re, branch_points, kernel_data, parse_stepset
from quadwalks.uniformization import Uniformizer, build_uniformizer, point

P = np.polynomial.polynomial

MODELS = [
    "-1,0;-1,1;0,1;1,-1",
    "-1,0;-1,1;1,-1;1,1",
    "-1,0;-1,1;0,-1;1,1",
    "-1,1;0,-1;0,1;1,0;1,1",
    "-1,0;0,1;1,-1;1,1",
    "-1,-1;-1,0;0,1;1,0",
    "-1,0;0,-1;0,1;1,1",
    "-1,-1;-1,0;0,-1;1,1",
    "1,0;-1,0;0,1;0,-1",
    "1,1;-1,0;0,-1",
]


@pytest.fixture(scope="module", params=MODELS)
def U(request):
    S = parse_stepset(request.param)
    return Uniformizer(kernel_data(S, 0.5 / S.size))


def _close_or_inf(v, ref, tol):
    if math.isinf(_re(ref)):
        return abs(v) > 1e8
    return abs(v - ref) <= tol * max(1.0, abs(ref))


def _cell_grid(U, n=20):
    s = (np.arange(n) + 0.5) / n
    S, T = np.meshgrid(s, s)
    return (S * U.w1 + T * U.w2).ravel()


def test_anchor_points(U):
    for name, w in U.anchors.items():
        ref = U.B.x[int(name[1]) - 1] if name[0] == "x" else U.B.y[int(name[1]) - 1]
        v = U.x(w) if name[0] == "x" else U.y(w)
        assert _close_or_inf(complex(v), ref, 1e-8), (name, v, ref)


def test_curve_residual(U):
    assert U.residual(_cell_grid(U)).max() < 1e-8


def test_periodicity(U):
    w = _cell_grid(U, 8)
    for per in (U.w1, U.w2):
        np.testing.assert_allclose(U.x(w + per), U.x(w), rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(U.y(w + per), U.y(w), rtol=1e-9, atol=1e-9)


def test_lifted_automorphisms(U):
    K = U.K
    w = _cell_grid(U, 10)
    x, y = U.x(w), U.y(w)
    xi, eta = U.hat_xi(w), U.hat_eta(w)
    np.testing.assert_allclose(U.x(xi), x, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(U.y(eta), y, rtol=1e-9, atol=1e-9)
    # the other root of the quadratic is given by the product formulas
    lhs = U.y(xi) * y
    rhs = P.polyval(x, K.c) / P.polyval(x, K.a)
    assert np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))) < 1e-8
    lhs = U.x(eta) * x
    rhs = P.polyval(y, K.ct) / P.polyval(y, K.at)
    assert np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))) < 1e-8


def test_composition_is_translation(U):
    w = _cell_grid(U, 6)
    np.testing.assert_allclose(U.hat_eta(U.hat_xi(w)), w + U.w3, atol=1e-12)
    np.testing.assert_allclose(U.x(U.shift_eta_xi(w)), U.x(U.hat_eta(U.hat_xi(w))), rtol=1e-9)


def test_imaginary_axis_maps_to_reals(U):
    s = (np.arange(1, 20)) / 20
    x = U.x(s * U.w1)
    assert np.max(np.abs(x.imag) / (1 + np.abs(x))) < 1e-9


def test_affine_case_sends_origin_to_infinity():
    U = build_uniformizer(kernel_data(WORKED_IID, 0.1))
    assert math.isinf(U.B.x[3])
    x, _ = point(U, 0.0)
    assert math.isinf(abs(x))
    assert abs(U.x(1e-6 * U.w2)) > 1e8


def test_reduce_lands_in_cell():
    U = build_uniformizer(kernel_data(WORKED_IID, 0.1))
    w = np.array([3.7 * U.w2 - 2.2 * U.w1, -0.4 * U.w2 + 5.1 * U.w1])
    r = U.reduce(w)
    s, t = U.W.coords(r)
    assert np.all((s >= 0) & (s < 1) & (t >= 0) & (t < 1))
    np.testing.assert_allclose(U.x(r), U.x(w), rtol=1e-8)


def test_degenerate_map_is_rejected():
    from quadwalks.uniformization import _InverseG

    with pytest.raises(DegenerateMap):
        _InverseG.build(np.array([1.0, 0.0, 1.0]), math.inf)
