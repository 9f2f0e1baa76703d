"""Parametrization of the kernel curve by the complex plane.

The curve {K(x, y) = 0} has genus one.  With the lattice spanned by
omega1 and omega2,

    x(w) = gx^{-1}(p(w)),    y(w) = gy^{-1}(p(w - omega3/2)),

where p is the Weierstrass function and gx, gy are the Moebius (or affine,
when the fourth branch point is infinite) maps built from the
discriminants at their fourth roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import Periods, Weierstrass, periods_closed_form
from .errors import DegenerateMap
from .kernel import BranchPoints, KernelData, _re, _trim, branch_points

P = np.polynomial.polynomial

INF_THRESHOLD = 1e8  # |coordinate| above this is reported as infinite


@dataclass(frozen=True)
class _InverseG:
    """Inverse of ``g(t) = d''(r)/6 + d'(r)/(t - r)`` or of the affine case."""

    r: float  # fourth branch point, possibly inf
    c0: float  # d''(r)/6, or d''(0)/6 in the affine case
    c1: float  # d'(r), or d'''(0)/6 in the affine case

    @classmethod
    def build(cls, d: np.ndarray, r4) -> "_InverseG":
        d = _trim(d)
        r = _re(r4)
        if math.isinf(r):
            d2 = P.polyval(0.0, P.polyder(d, 2))
            d3 = P.polyval(0.0, P.polyder(d, 3))
            if d3 == 0:
                raise DegenerateMap("d'''(0) = 0 with an infinite branch point")
            return cls(r, d2 / 6, d3 / 6)
        d1 = P.polyval(r, P.polyder(d, 1))
        d2 = P.polyval(r, P.polyder(d, 2))
        if d1 == 0:
            raise DegenerateMap("d'(x4) = 0")
        return cls(r, d2 / 6, d1)

    def __call__(self, pv):
        pv = np.asarray(pv, dtype=complex)
        with np.errstate(all="ignore"):
            if math.isinf(self.r):
                out = (pv - self.c0) / self.c1
            else:
                out = self.r + self.c1 / (pv - self.c0)
                out = np.where(np.isinf(pv), complex(self.r), out)
        out = np.where(np.isfinite(out), out, complex(np.inf))
        return out[()] if out.ndim == 0 else out

    def forward(self, t):
        """g itself; maps the coordinate to a value of p."""
        t = np.asarray(t, dtype=complex)
        with np.errstate(all="ignore"):
            if math.isinf(self.r):
                out = self.c0 + self.c1 * t
            else:
                out = self.c0 + self.c1 / (t - self.r)
        return out[()] if out.ndim == 0 else out


class Uniformizer:
    """Covering map of the kernel curve.

    Parameters
    ----------
    K : KernelData
    B : BranchPoints, optional
    periods : Periods, optional
        Defaults to :func:`periods_closed_form`.

    Attributes
    ----------
    w1, w2, w3 : complex, float, float
        The three periods.
    anchors : dict
        ``"x1".."x4"`` and ``"y1".."y4"`` mapped to their lattice points.
    """

    def __init__(self, K: KernelData, B: BranchPoints | None = None, periods: Periods | None = None):
        self.K = K
        self.B = B if B is not None else branch_points(K)
        self.periods = periods if periods is not None else periods_closed_form(K, self.B)
        self.w1 = complex(self.periods.omega1)
        self.w2 = float(self.periods.omega2)
        self.w3 = float(self.periods.omega3)
        self.W = Weierstrass(self.w1, self.w2)
        self.gx = _InverseG.build(K.d, self.B.x[3])
        self.gy = _InverseG.build(K.dt, self.B.y[3])
        ax = {"x4": 0j, "x3": self.w1 / 2, "x1": self.w2 / 2 + 0j, "x2": (self.w1 + self.w2) / 2}
        ay = {"y" + k[1]: v + self.w3 / 2 for k, v in ax.items()}
        self.anchors = {**ax, **ay}

    # raw coordinates (large finite values allowed)
    def x(self, w):
        return self.gx(self.W.p_(w))

    def y(self, w):
        return self.gy(self.W.p_(np.asarray(w) - self.w3 / 2))

    def point(self, w):
        """``(x(w), y(w))`` with values beyond 1e8 in modulus reported as inf."""
        x, y = self.x(w), self.y(w)
        return _tag_inf(x), _tag_inf(y)

    def reduce(self, w):
        """Representative in ``omega1 [0, 1) + omega2 [0, 1)``."""
        s, t = self.W.coords(w)
        w = np.asarray(w, dtype=complex)
        out = w - np.floor(s) * self.w1 - np.floor(t) * self.w2
        return out[()] if out.ndim == 0 else out

    def hat_xi(self, w):
        return -np.asarray(w) + 2 * self.anchors["x2"]

    def hat_eta(self, w):
        return -np.asarray(w) + 2 * self.anchors["y2"]

    def shift_eta_xi(self, w):
        return np.asarray(w) + self.w3

    def residual(self, w):
        """``|K(x(w), y(w))|`` scaled by the size of the monomials involved."""
        x, y = self.x(w), self.y(w)
        return np.abs(self.K.K(x, y)) / (1 + np.abs(x) ** 2) / (1 + np.abs(y) ** 2)


def _tag_inf(v):
    v = np.asarray(v, dtype=complex)
    out = np.where(np.abs(v) > INF_THRESHOLD, complex(np.inf), v)
    return out[()] if out.ndim == 0 else out


def build_uniformizer(K: KernelData, B: BranchPoints | None = None, P_: Periods | None = None) -> Uniformizer:
    """Construct the covering map; see :class:`Uniformizer`."""
    return Uniformizer(K, B, P_)


def point(U: Uniformizer, w):
    return U.point(w)


def hat_xi(U: Uniformizer, w):
    """Lift of xi: ``w -> -w + 2 w_x2``."""
    return U.hat_xi(w)


def hat_eta(U: Uniformizer, w):
    """Lift of eta: ``w -> -w + 2 w_y2``."""
    return U.hat_eta(w)


def shift_eta_xi(U: Uniformizer, w):
    """``hat_eta o hat_xi``, the translation by omega3."""
    return U.shift_eta_xi(w)
