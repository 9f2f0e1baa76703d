"""Group of the walk, rationality of omega2/omega3 and holonomy labels."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .elliptic import periods_closed_form
from .errors import FitUnstable, InfiniteGroup, SeedDegenerate
from .kernel import KernelData, StepSet, branch_points, branch_Y, covariance, kernel_data, parse_stepset

P = np.polynomial.polynomial

INFINITE = "Infinite"
DMAX = 50
RATIO_TOL = 1e-7
SEEDS = (0.31 + 0.17j, -0.23 + 0.41j, 0.52 - 0.29j)

ALGEBRAIC = "Algebraic"
HOLONOMIC_NON_ALGEBRAIC = "HolonomicNonAlgebraic"
HOLONOMIC_AT_Z = "HolonomicAtThisZ"
NON_HOLONOMIC_AT_Z = "NonHolonomicAtThisZ"


# ---------------------------------------------------------------------------
# group order


def chordal(a: complex, b: complex) -> float:
    """Chordal distance on the Riemann sphere (inf allowed)."""
    ia, ib = math.isinf(abs(a)), math.isinf(abs(b))
    if ia and ib:
        return 0.0
    if ia:
        return 1.0 / math.sqrt(1.0 + abs(b) ** 2)
    if ib:
        return 1.0 / math.sqrt(1.0 + abs(a) ** 2)
    return abs(a - b) / math.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2))


def _ratio(num: complex, den: complex) -> complex:
    if den == 0:
        return complex(math.inf) if num != 0 else complex(math.nan)
    if math.isinf(abs(den)):
        return 0j
    return num / den


def _xi(K: KernelData, x, y):
    if math.isinf(abs(x)):
        return x, y
    return x, _ratio(P.polyval(x, K.c), P.polyval(x, K.a) * y)


def _eta(K: KernelData, x, y):
    if math.isinf(abs(y)):
        return x, y
    return _ratio(P.polyval(y, K.ct), P.polyval(y, K.at) * x), y


def _order_from_seed(K, x0, y0, tol, max_order):
    x, y = x0, y0
    for k in range(1, max_order // 2 + 1):
        x, y = _xi(K, x, y)
        x, y = _eta(K, x, y)
        if any(map(lambda v: math.isnan(abs(v)), (x, y))):
            return None
        if chordal(x, x0) < tol and chordal(y, y0) < tol:
            return 2 * k
    return INFINITE


def group_order_on_curve(K: KernelData, tol: float = 1e-8, max_order: int = 100, seeds=SEEDS):
    """Order of the group generated by xi and eta, restricted to the curve.

    Iterates ``eta o xi`` from generic seeds and returns ``2k`` for the
    first k bringing the seed back within ``tol`` in the chordal metric, or
    :data:`INFINITE` if none does up to ``max_order``.  The majority over
    the seeds is returned.

    Raises
    ------
    SeedDegenerate
        If every seed runs into an undefined map value.
    """
    found = []
    for x0 in seeds:
        y0 = complex(branch_Y(K, x0, 0))
        r = _order_from_seed(K, complex(x0), y0, tol, max_order)
        if r is not None:
            found.append(r)
    if not found:
        raise SeedDegenerate("all seeds hit a pole of xi or eta")
    return Counter(found).most_common(1)[0][0]


# ---------------------------------------------------------------------------
# rationality


@dataclass(frozen=True)
class Rational:
    p: int
    q: int
    residual: float
    Dmax: int = DMAX
    tol: float = RATIO_TOL

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class IrrationalAtTolerance:
    ratio: float
    Dmax: int = DMAX
    tol: float = RATIO_TOL

    def __str__(self):
        return "IrrationalAtTolerance"


def convergents(x: float, n: int = 40):
    """Continued-fraction convergents of x as Fractions."""
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    t = x
    for _ in range(n):
        a = math.floor(t)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
        frac = t - a
        if frac < 1e-15:
            break
        t = 1.0 / frac
    return out


def ratio_rationality(ratio, Dmax: int = DMAX, tol: float = RATIO_TOL):
    """Return :class:`Rational` if a convergent with ``q <= Dmax`` lies within tol.

    ``ratio`` may be a float or a :class:`~quadwalks.elliptic.Periods`.
    A negative answer only means no such fraction exists at this tolerance.
    """
    r = float(getattr(ratio, "ratio", ratio))
    for c in convergents(r):
        if c.denominator > Dmax:
            break
        if abs(r - c) <= tol:
            return Rational(c.numerator, c.denominator, abs(r - float(c)), Dmax, tol)
    return IrrationalAtTolerance(r, Dmax, tol)


def finite_group_ratio(order: int, cov: int) -> Fraction:
    """omega2/omega3 for a finite group of the given order and covariance sign."""
    if order == 4:
        return Fraction(2)
    if order == 6:
        return Fraction(3) if cov < 0 else Fraction(3, 2)
    if order == 8:
        return Fraction(4) if cov < 0 else Fraction(4, 3)
    raise ValueError(f"no tabulated ratio for order {order}")


# ---------------------------------------------------------------------------
# orbit sum and verdict


def orbit_sum(U, K: KernelData, w, order: int):
    """Alternating sum of ``x y`` over the dihedral orbit of w.

    With ``omega2/omega3 = k/l`` and ``2k`` the group order, the orbit is
    ``{w + m omega3, hat_xi(w) + m omega3 : 0 <= m < k}``.
    """
    if order == INFINITE:
        raise InfiniteGroup("orbit sum needs a finite group")
    k = order // 2
    w = np.asarray(w, dtype=complex)
    v = U.hat_xi(w)
    total = 0
    for m in range(k):
        a = w + m * U.w3
        b = v + m * U.w3
        total = total + U.x(a) * U.y(a) - U.x(b) * U.y(b)
    return total


def holonomy_verdict(order, cov: int, rationality) -> str:
    """Classification label from group order, covariance and rationality."""
    if order != INFINITE:
        return ALGEBRAIC if cov > 0 else HOLONOMIC_NON_ALGEBRAIC
    if isinstance(rationality, Rational):
        return HOLONOMIC_AT_Z
    return NON_HOLONOMIC_AT_Z


@dataclass(frozen=True)
class GroupReport:
    order: object
    ratio: float
    rationality: object
    covariance: int
    orbit_sum_zero: object
    verdict: str


def group_report(S, z: float, Dmax: int = DMAX, tol: float = RATIO_TOL, max_order: int = 100) -> GroupReport:
    """Group order, period ratio, rationality and verdict at weight z."""
    S = parse_stepset(S)
    K = kernel_data(S, z)
    B = branch_points(K)
    order = group_order_on_curve(K, max_order=max_order)
    ratio = periods_closed_form(K, B).ratio
    rat = ratio_rationality(ratio, Dmax, tol)
    cov = covariance(S).full
    zero = None
    if order != INFINITE:
        from .uniformization import Uniformizer

        U = Uniformizer(K, B)
        pts = np.array([0.13 + 0.21j, 0.37 + 0.11j, 0.61 + 0.43j]) * np.array([U.w2, U.w2, U.w2]) + 0.3 * U.w1
        zero = bool(np.max(np.abs(orbit_sum(U, K, pts, order))) < 1e-8)
    return GroupReport(order, ratio, rat, cov, zero, holonomy_verdict(order, cov, rat))


# ---------------------------------------------------------------------------
# z -> 0 asymptotics


@dataclass(frozen=True)
class AsymptoticFit:
    """``ratio(z) ~ L + L_tilde / ln z`` near z = 0.

    Attributes
    ----------
    L, L_tilde : float
        Fitted constants.
    residual : float
        Largest deviation of the fitted curve over the grid.
    L_snap : Fraction
        Nearest fraction to L with denominator at most ``qmax``.
    snap_residual : float
        ``|L - L_snap|``.
    z_grid, ratios : tuple
    """

    L: float
    L_tilde: float
    residual: float
    L_snap: Fraction
    snap_residual: float
    z_grid: tuple = field(repr=False)
    ratios: tuple = field(repr=False)


def ratio_curve(S, z_grid) -> np.ndarray:
    """omega2/omega3 over a grid of weights (closed-form route)."""
    S = parse_stepset(S)
    out = []
    for z in z_grid:
        K = kernel_data(S, z)
        out.append(periods_closed_form(K, branch_points(K)).ratio)
    return np.array(out)


def fit_moebius(lz: np.ndarray, r: np.ndarray):
    """Fit ``r = (L l + beta) / (l + delta)`` with ``l = ln z``.

    Both periods behave like ``-(p/2) ln z + const`` as z -> 0, so the ratio
    is a Moebius function of ln z up to terms vanishing with z.  The model
    is linear after multiplying out: ``r l = L l + beta - delta r``.
    Returns ``(L, L_tilde, residual)`` with ``L_tilde = beta - L delta``,
    the coefficient of ``1/ln z`` in the expansion.
    """
    A = np.column_stack([lz, np.ones_like(lz), -r])
    (L, beta, delta), *_ = np.linalg.lstsq(A, r * lz, rcond=None)
    model = (L * lz + beta) / (lz + delta)
    return float(L), float(beta - L * delta), float(np.max(np.abs(model - r)))


def snap(L: float, qmax: int = 12) -> Fraction:
    return Fraction(L).limit_denominator(qmax)


def asymptotic_scan(S, z_grid=None, zmin: float = 1e-6, zmax: float = 1e-3, npts: int = 13, qmax: int = 12) -> AsymptoticFit:
    """Fit the small-z behaviour of omega2/omega3 on a geometric grid.

    Raises
    ------
    FitUnstable
        If the fit residual exceeds ten times ``max (1/ln z)^2`` over the grid.
    """
    if z_grid is None:
        z_grid = np.geomspace(zmin, zmax, npts)
    z_grid = np.asarray(z_grid, dtype=float)
    r = ratio_curve(S, z_grid)
    lz = np.log(z_grid)
    L, Lt, res = fit_moebius(lz, r)
    scale = float(np.max(1 / lz**2))
    if not np.isfinite(res) or res > 10 * scale:
        raise FitUnstable(f"fit residual {res:.3g} above 10 x {scale:.3g}")
    Ls = snap(L, qmax)
    return AsymptoticFit(L, Lt, res, Ls, abs(L - float(Ls)), tuple(z_grid), tuple(r))
