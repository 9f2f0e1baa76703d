"""Meromorphic continuation of the section generating functions.

On the covering plane the functions

    r_x(w) = K(x(w), 0) Q(x(w), 0),    r_y(w) = K(0, y(w)) Q(0, y(w))

are first known on the strips where |x(w)| < 1 (resp. |y(w)| < 1) from the
power series, and are related there by

    r_x + r_y = K(0, 0) Q(0, 0) + x y.

Both are omega1-periodic.  Translating by omega3 changes r_x by

    g(w) = r_x(w + omega3) - r_x(w) = y(hat_xi w) [x(w + omega3) - x(w)],

so a telescoping sum of g carries a seed value to any point.  Branches of
Q(x, 0) are read off half-cells of the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counting import DEFAULT_N, CountTable, count_walks, eval_section, tail_bound
from .errors import (
    KernelZero,
    NearPole,
    NoPreimageInCell,
    OutsideSeedDomain,
    RationalRatio,
    SignatureMismatch,
)
from .kernel import KernelData, SpecialPoints, _re, classify_subcase, special_points
from .uniformization import Uniformizer

POLE_THRESHOLD = 1e6
PROBE_EPS = (1e-7, 1e-9)  # offsets for the pole growth test
MAX_SHIFTS = 400


@dataclass
class ContinuedValue:
    """A continued value with a rough error estimate.

    ``near_pole`` is set when one of the telescoped increments exceeded the
    pole threshold; the value is then reported but not trustworthy as a
    regular value.
    """

    value: complex
    error: float
    shifts: int
    near_pole: bool = False


class Continuation:
    """Lifted sections r_x, r_y of one model at one weight.

    Parameters
    ----------
    K : KernelData
    N : int
        Length of the series seeds.
    U : Uniformizer, optional
    table : CountTable, optional
    """

    def __init__(self, K: KernelData, N: int = DEFAULT_N, U: Uniformizer | None = None, table: CountTable | None = None):
        self.K = K
        self.U = U if U is not None else Uniformizer(K)
        self.table = table if table is not None and table.N >= N else count_walks(K.S, N)
        self.N = N
        self.Ax = self.table.section_x(N)
        self.Ay = self.table.section_y(N)
        q00 = sum(self.table.q(0, 0, n) * K.z**n for n in range(N + 1))
        self.C = K.K00 * q00
        self.tail = tail_bound(K.S, K.z, N)
        self.w1, self.w2, self.w3 = self.U.w1, self.U.w2, self.U.w3
        self._t3 = 0.5 * self.w3 / self.w2  # real offset of the y-strip in units of w2

    # ------------------------------------------------------------------
    # seeds

    def _t(self, w):
        return np.real(w) / self.w2

    def in_delta_x(self, w):
        t = self._t(w)
        return (t > 0) & (t < 1) & (np.abs(self.U.x(w)) < 1)

    def in_delta_y(self, w):
        t = self._t(w) - self._t3
        return (t > 0) & (t < 1) & (np.abs(self.U.y(w)) < 1)

    def _seed_x(self, x):
        return self.K.Kx0(x) * eval_section(self.Ax, x, self.K.z)

    def _seed_y(self, y):
        return self.K.K0y(y) * eval_section(self.Ay, y, self.K.z)

    def seed_rx(self, w):
        """r_x on the seed region; nan where w lies in neither strip."""
        w = np.asarray(w, dtype=complex)
        x, y = self.U.x(w), self.U.y(w)
        t = self._t(w)
        inx = (t > 0) & (t < 1) & (np.abs(x) < 1)
        iny = (t - self._t3 > 0) & (t - self._t3 < 1) & (np.abs(y) < 1)
        out = np.full(w.shape, complex(np.nan))
        xs = np.where(inx, x, 0)
        ys = np.where(iny & ~inx, y, 0)
        with np.errstate(all="ignore"):
            out = np.where(inx, self._seed_x(xs), out)
            out = np.where(iny & ~inx, self.C + x * y - self._seed_y(ys), out)
        return out

    def seed_ry(self, w):
        """r_y on the seed region; nan elsewhere."""
        w = np.asarray(w, dtype=complex)
        rx = self.seed_rx(w)
        return self.C + self.U.x(w) * self.U.y(w) - rx

    # ------------------------------------------------------------------
    # continuation

    def g(self, w):
        """``r_x(w + omega3) - r_x(w)``."""
        w = np.asarray(w, dtype=complex)
        return self.U.y(self.U.hat_xi(w)) * (self.U.x(w + self.w3) - self.U.x(w))

    def f_y(self, w):
        """``r_y(w + omega3) - r_y(w) = x(w) [y(hat_xi w) - y(w)]``."""
        w = np.asarray(w, dtype=complex)
        return self.U.x(w) * (self.U.y(self.U.hat_xi(w)) - self.U.y(w))

    def _reduce_w1(self, w):
        s, _ = self.U.W.coords(w)
        return np.asarray(w, dtype=complex) - np.floor(s) * self.w1

    def _shift_order(self):
        yield 0
        for n in range(1, MAX_SHIFTS + 1):
            yield n
            yield -n

    def rx_array(self, w, threshold: float = math.inf):
        """Vectorised r_x with error estimates and near-pole flags.

        Returns ``(value, error, shifts, near_pole)`` arrays.
        """
        w = self._reduce_w1(np.atleast_1d(np.asarray(w, dtype=complex)))
        val = np.full(w.shape, complex(np.nan))
        err = np.full(w.shape, np.inf)
        shifts = np.zeros(w.shape, dtype=int)
        near = np.zeros(w.shape, dtype=bool)
        todo = np.ones(w.shape, dtype=bool)
        for n in self._shift_order():
            if not todo.any():
                break
            idx = np.nonzero(todo)[0]
            beta = w[idx] - n * self.w3
            base = self.seed_rx(beta)
            ok = np.isfinite(base)
            if not ok.any():
                continue
            idx, beta, base = idx[ok], beta[ok], base[ok]
            if n > 0:
                terms = self.g(beta[:, None] + np.arange(n)[None, :] * self.w3)
                inc = terms.sum(axis=1)
            elif n < 0:
                terms = self.g(beta[:, None] - np.arange(1, -n + 1)[None, :] * self.w3)
                inc = -terms.sum(axis=1)
            else:
                terms = np.zeros((len(idx), 0))
                inc = 0
            mag = np.abs(terms).max(axis=1) if terms.shape[1] else np.zeros(len(idx))
            val[idx] = base + inc
            scale = np.abs(base) + (np.abs(terms).sum(axis=1) if terms.shape[1] else 0)
            err[idx] = self.tail * (1 + np.abs(base)) + 1e-14 * scale * (1 + abs(n))
            shifts[idx] = n
            near[idx] = ~np.isfinite(mag) | (mag > threshold)
            todo[idx] = False
        if todo.any():
            raise OutsideSeedDomain(f"{int(todo.sum())} points not reached within {MAX_SHIFTS} shifts")
        return val, err, shifts, near

    def ry_array(self, w, threshold: float = math.inf):
        v, e, s, n = self.rx_array(w, threshold)
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        return self.C + self.U.x(w) * self.U.y(w) - v, e, s, n

    def rx(self, w, strict: bool = True) -> ContinuedValue:
        """r_x at a single point.

        Raises
        ------
        NearPole
            If ``strict`` and an increment exceeded the pole threshold.
        """
        v, e, s, n = self.rx_array([w], POLE_THRESHOLD)
        if strict and n[0]:
            raise NearPole("increment above threshold during continuation", omega=complex(w))
        return ContinuedValue(complex(v[0]), float(e[0]), int(s[0]), bool(n[0]))

    def ry(self, w, strict: bool = True) -> ContinuedValue:
        cv = self.rx(w, strict)
        x, y = self.U.x(w), self.U.y(w)
        return ContinuedValue(complex(self.C + x * y - cv.value), cv.error, cv.shifts, cv.near_pole)

    def residual(self, w):
        """``|r_x + r_y - K(0,0)Q(0,0) - x y|`` computed from independent routes.

        r_x is continued through x-side increments; r_y is continued through
        its own telescoping sum of ``f_y`` from a seed found independently.
        """
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        rx = self.rx_array(w)[0]
        ry = self.ry_independent(w)
        return np.abs(rx + ry - self.C - self.U.x(w) * self.U.y(w))

    def ry_independent(self, w):
        """r_y continued with f_y increments from its own seed."""
        w = self._reduce_w1(np.atleast_1d(np.asarray(w, dtype=complex)))
        out = np.full(w.shape, complex(np.nan))
        todo = np.ones(w.shape, dtype=bool)
        for n in self._shift_order():
            if not todo.any():
                break
            idx = np.nonzero(todo)[0]
            beta = w[idx] - n * self.w3
            base = self.seed_ry(beta)
            ok = np.isfinite(base)
            if not ok.any():
                continue
            idx, beta, base = idx[ok], beta[ok], base[ok]
            if n > 0:
                inc = self.f_y(beta[:, None] + np.arange(n)[None, :] * self.w3).sum(axis=1)
            elif n < 0:
                inc = -self.f_y(beta[:, None] - np.arange(1, -n + 1)[None, :] * self.w3).sum(axis=1)
            else:
                inc = 0
            out[idx] = base + inc
            todo[idx] = False
        if todo.any():
            raise OutsideSeedDomain("point not reached")
        return out

    # ------------------------------------------------------------------
    # branches

    def preimage_x(self, x, k: int, l: int = 0):
        """The w in ``omega1 [l, l+1) + omega2 [k/2, (k+1)/2)`` with x(w) = x."""
        return self._preimage(x, k, l, self.U.gx, 0.0, self.U.x)

    def preimage_y(self, y, k: int, l: int = 0):
        """The w in ``omega3/2 + omega1 [l, l+1) + omega2 ]k/2, (k+1)/2]`` with y(w) = y."""
        return self._preimage(y, k, l, self.U.gy, 0.5 * self.w3, self.U.y)

    def _preimage(self, c, k, l, gmap, offset, coord):
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        u = np.atleast_1d(self.U.W.inverse(gmap.forward(c)))
        best = np.full(c.shape, complex(np.nan))
        for cand in (u, -u):
            s, t = self.U.W.coords(cand)
            s = s - np.floor(s) + l
            tt = t - np.floor(t)
            want = 0 if k % 2 == 0 else 1
            inhalf = (tt >= 0.5) == bool(want)
            t_new = tt + (k - (k % 2)) / 2
            w = s * self.w1 + t_new * self.w2 + offset
            best = np.where(inhalf & np.isnan(best), w, best)
        # grid fallback for anything left (t exactly on the half boundary)
        bad = ~np.isfinite(best) | (np.abs(coord(best) - c) > 1e-6 * (1 + np.abs(c)))
        for i in np.nonzero(bad)[0]:
            best[i] = self._grid_preimage(c[i], k, l, coord, offset)
        return best

    def _grid_preimage(self, c, k, l, coord, offset):
        s = (np.arange(8) + 0.5) / 8 + l
        t = k / 2 + (np.arange(8) + 0.5) / 16
        S_, T_ = np.meshgrid(s, t)
        grid = (S_ * self.w1 + T_ * self.w2 + offset).ravel()
        w = grid[np.argmin(np.abs(coord(grid) - c))]
        for _ in range(30):
            h = 1e-7 * abs(self.w2)
            f = coord(w) - c
            df = (coord(w + h) - coord(w - h)) / (2 * h)
            if df == 0 or not np.isfinite(df):
                break
            w = w - f / df
            if abs(f) < 1e-14 * (1 + abs(c)):
                break
        if abs(coord(w) - c) > 1e-8 * (1 + abs(c)):
            raise NoPreimageInCell(f"no preimage of {c} in cell k={k}")
        return w

    def branch_x(self, x, k: int = 1, l: int = 0):
        """k-th branch of Q(x, 0) at x (array)."""
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        kx = self.K.Kx0(x)
        if np.any(np.abs(kx) < 1e-14):
            raise KernelZero("K(x, 0) vanishes at the requested point")
        w = self.preimage_x(x, k, l)
        return self.rx_array(w)[0] / kx

    def branch_y(self, y, k: int = 1, l: int = 0):
        """k-th branch of Q(0, y) at y (array)."""
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        ky = self.K.K0y(y)
        if np.any(np.abs(ky) < 1e-14):
            raise KernelZero("K(0, y) vanishes at the requested point")
        w = self.preimage_y(y, k, l)
        return self.ry_array(w)[0] / ky


def seed_sections(K: KernelData, N: int = DEFAULT_N, U: Uniformizer | None = None, table=None) -> Continuation:
    """Seeded lifted sections; see :class:`Continuation`."""
    return Continuation(K, N, U, table)


def continue_section(L: Continuation, w, which: str = "x") -> ContinuedValue:
    """r_x (``which="x"``) or r_y at w."""
    return L.rx(w) if which == "x" else L.ry(w)


def branch_eval(L: Continuation, k: int, coordinate, which: str = "x"):
    """k-th branch of Q(x, 0) or Q(0, y) at the given coordinate."""
    if k < 1:
        raise ValueError("branch index k must be >= 1")
    f = L.branch_x if which == "x" else L.branch_y
    return f(coordinate, k)


# ---------------------------------------------------------------------------
# special points


@dataclass(frozen=True)
class LiftedPoint:
    label: str
    omega: complex
    x: complex
    y: complex


def _reduce_pi_y(U: Uniformizer, w):
    """Representative in ``omega3/2 + omega1 [0, 1) + omega2 [0, 1)``."""
    w = complex(w) - 0.5 * U.w3
    s, t = U.W.coords(w)
    s, t = float(s), float(t)
    # snap values within rounding of an edge onto the lower edge
    s = s - math.floor(s + 1e-9)
    t = t - math.floor(t + 1e-9)
    return s * U.w1 + t * U.w2 + 0.5 * U.w3


def _close(a, b, tol=1e-6) -> bool:
    a, b = complex(a), complex(b)
    if math.isinf(abs(a)) or math.isinf(abs(b)):
        return min(abs(a), abs(b)) > 1 / tol
    return abs(a - b) <= tol * (1 + abs(b))


def _pole_points(U: Uniformizer, gmap, offset):
    """The two lattice-reduced points where the coordinate is infinite."""
    if math.isinf(gmap.r):
        return [offset, offset]
    u = complex(U.W.inverse(gmap.c0))
    return [offset + u, offset - u]


def lift_special_points(U: Uniformizer, P_: SpecialPoints | None = None) -> dict:
    """Lattice coordinates of a1..a4, b1, b2 in the y-cell.

    a1, a2 are the points with y = inf and x equal to x_star, x_starstar;
    a3 = a1 - omega3 and a4 = a2 - omega3; b1, b2 have x = inf and y equal
    to y_circ, y_bullet.

    Raises
    ------
    SignatureMismatch
        If a located point does not carry the expected coordinates.
    """
    P_ = P_ or special_points(U.K)
    out = {}
    a = [_reduce_pi_y(U, w) for w in _pole_points(U, U.gy, 0.5 * U.w3)]
    xa = [complex(U.x(w)) for w in a]
    if not _close(xa[0], P_.x_star) and _close(xa[1], P_.x_star):
        a = a[::-1]
        xa = xa[::-1]
    for lab, w, xv in (("a1", a[0], P_.x_star), ("a2", a[1], P_.x_starstar)):
        if not _close(U.x(w), xv, 1e-5):
            raise SignatureMismatch(f"{lab}: x = {complex(U.x(w))} but expected {xv}")
        out[lab] = w
    out["a3"] = _reduce_pi_y(U, out["a1"] - U.w3)
    out["a4"] = _reduce_pi_y(U, out["a2"] - U.w3)
    for lab, src, yv in (("a3", "a1", P_.y_starstar), ("a4", "a2", P_.y_star)):
        if not _close(U.y(out[lab]), yv, 1e-5) and not _close(U.y(out[lab]), P_.y_star if yv is P_.y_starstar else P_.y_starstar, 1e-5):
            raise SignatureMismatch(f"{lab}: y = {complex(U.y(out[lab]))}")
    b = [_reduce_pi_y(U, w) for w in _pole_points(U, U.gx, 0.0)]
    yb = [complex(U.y(w)) for w in b]
    if not _close(yb[0], P_.y_circ) and _close(yb[1], P_.y_circ):
        b = b[::-1]
    for lab, w, yv in (("b1", b[0], P_.y_circ), ("b2", b[1], P_.y_bullet)):
        if not _close(U.y(w), yv, 1e-5):
            raise SignatureMismatch(f"{lab}: y = {complex(U.y(w))} but expected {yv}")
        out[lab] = w
    return out


# ---------------------------------------------------------------------------
# pole curves


def real_cycle_distance(v, r1: float, r4: float):
    """Distance from v to the real cycle through r4 and r1.

    That cycle is ``[r4, r1]`` when ``r4 < 0`` and ``R minus ]r1, r4[``
    (through infinity) otherwise.
    """
    v = np.asarray(v, dtype=complex)
    re, im = v.real, np.abs(v.imag)
    if math.isinf(r4):
        gap = np.maximum(re - r1, 0)
    elif r4 < 0:
        gap = np.maximum(np.maximum(r4 - re, re - r1), 0)
    else:
        gap = np.maximum(np.minimum(re - r1, r4 - re), 0)
    out = im + gap
    return np.where(np.isinf(np.abs(v)), 0.0, out)


def level_curve_distance(coord, h: complex, period: float, v, offset: float = 0.0, n: int = 400):
    """Distance from v to ``{coord(s + i h) : s real}``, via grid then Gauss-Newton.

    Points with ``|v| > 1`` are compared in the chart ``1/coord`` so that
    the distance stays meaningful near infinity.
    """
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    s = offset + period * np.arange(n) / n
    out = np.empty(v.shape)
    for i, p in enumerate(v):
        if abs(p) > 1:
            f = lambda t: 1 / coord(t + 1j * h)
            p = 1 / p
        else:
            f = lambda t: coord(t + 1j * h)
        with np.errstate(all="ignore"):
            j = int(np.nanargmin(np.abs(f(s) - p)))
        t = s[j]
        hstep = 1e-7 * period
        for _ in range(20):
            c = f(t)
            dc = (f(t + hstep) - f(t - hstep)) / (2 * hstep)
            den = (np.conj(dc) * dc).real
            if den == 0 or not np.isfinite(den):
                break
            dt = ((np.conj(dc) * (c - p)).real) / den
            t -= dt
            if abs(dt) < 1e-15 * period:
                break
        out[i] = abs(f(t) - p)
    return out


@dataclass
class PoleCurveSample:
    source: str
    omega0: complex
    n: np.ndarray
    omega: np.ndarray
    x: np.ndarray
    y: np.ndarray
    verified: np.ndarray
    magnitude: np.ndarray
    distance_x: np.ndarray = field(default=None)
    curve_x: str = ""

    @property
    def fraction_verified(self) -> float:
        return float(np.mean(self.verified))

    def csv_rows(self):
        for i in range(len(self.n)):
            yield (
                int(self.n[i]), self.omega[i].real, self.omega[i].imag, self.x[i].real, self.x[i].imag,
                self.y[i].real, self.y[i].imag, int(self.verified[i]), self.curve_x,
            )


def _telescoped_ry(L: Continuation, w0: complex, n_max: int):
    """r_y(w0 + n omega3) for n = 1..n_max by prefix sums of f_y."""
    base = L.ry_array([w0])[0][0]
    steps = L.f_y(w0 + np.arange(n_max) * L.w3)
    return base + np.cumsum(steps)


def sample_pole_curve(
    L: Continuation, w0: complex, n_max: int = 200, source: str = "", ratio_check: bool = True,
    threshold: float = POLE_THRESHOLD,
) -> PoleCurveSample:
    """Follow the orbit ``w0 + n omega3`` and test each point for a pole.

    A point is a verified pole when ``|r_y|`` exceeds the threshold at a
    small offset from the orbit point and keeps growing as the offset
    shrinks (a regular value would stay put).

    Raises
    ------
    RationalRatio
        If omega2/omega3 is rational at the tolerance of the group module.
    """
    if ratio_check:
        from .group import Rational, ratio_rationality

        if isinstance(ratio_rationality(L.w2 / L.w3), Rational):
            raise RationalRatio("pole sampling needs an irrational period ratio")
    mags = []
    direction = np.exp(0.3j)
    for eps in PROBE_EPS:
        mags.append(np.abs(_telescoped_ry(L, w0 + eps * direction, n_max)))
    m1, m2 = mags
    verified = (m2 > threshold) & (m2 > 10 * m1)
    n = np.arange(1, n_max + 1)
    w = np.array([_reduce_pi_y(L.U, w0 + k * L.w3) for k in n])
    return PoleCurveSample(source, complex(w0), n, w, L.U.x(w), L.U.y(w), verified, m2)


POLE_CURVE_TOL = 1e-6
VERIFY_MIN = 0.9


@dataclass
class PoleCurveReport:
    """Pole samples matched against the curves predicted by the subcase.

    Attributes
    ----------
    subcase : str
    samples : list of PoleCurveSample
        One per predicted x-curve, with ``distance_x`` and ``curve_x`` set.
    fraction : float
        Share of all sampled points that are verified poles lying within
        ``tol`` of their predicted curve.
    """

    subcase: str
    samples: list
    fraction: float
    tol: float = POLE_CURVE_TOL


def _level_of(U: Uniformizer, w) -> float:
    s, _ = U.W.coords(w)
    s = float(s)
    return s - math.floor(s + 1e-9)


def _curve_distance(U: Uniformizer, kind: str, sample: PoleCurveSample, w0) -> np.ndarray:
    B = U.B
    if kind == "real":
        return real_cycle_distance(sample.x, _re(B.x[0]), _re(B.x[3]))
    h = (_level_of(U, w0) * U.w1).imag
    return level_curve_distance(U.x, h, U.w2, sample.x)


def pole_curve_suite(
    L: Continuation, n_max: int = 200, tol: float = POLE_CURVE_TOL, threshold: float = POLE_THRESHOLD
) -> PoleCurveReport:
    """Sample the pole orbits feeding each predicted curve of Q(x, 0).

    Sources: a3 (else a4) for the level curve of the a-points, b1 (else
    b2) for that of the b-points, and for a real curve the first special
    point on the real cycle (level 0) whose orbit verifies.  The points
    a1, a2 themselves are not used: there r_y is already infinite and the
    increments cancel the pole.

    Raises
    ------
    RationalRatio
        If omega2/omega3 is rational (the orbits are then finite).
    """
    U = L.U
    sc = classify_subcase(L.K, U.B)
    pts = lift_special_points(U)
    samples = []
    cache = {}

    def sample(lab):
        if lab not in cache:
            cache[lab] = sample_pole_curve(L, pts[lab], n_max, lab, threshold=threshold)
        return cache[lab]

    for kind, which in sc.curves_x:
        if kind == "level":
            labs = ("a3", "a4") if which == "a" else ("b1", "b2")
        else:
            labs = tuple(k for k in ("a3", "a4", "b1", "b2", "a2") if abs(_level_of(U, pts[k]) - 0.5) > 0.5 - 1e-6)
        chosen = None
        for lab in labs:
            smp = sample(lab)
            if smp.fraction_verified >= VERIFY_MIN:
                chosen = smp
                break
        if chosen is None and labs:
            chosen = sample(labs[0])
        if chosen is None:
            continue
        smp = PoleCurveSample(**{**chosen.__dict__})
        smp.distance_x = _curve_distance(U, kind, smp, pts[smp.source])
        smp.curve_x = f"{kind}-{which}"
        samples.append(smp)
    ok = [np.asarray(m.verified, bool) & (np.asarray(m.distance_x) <= tol) for m in samples]
    frac = float(np.mean(np.concatenate(ok))) if ok else 0.0
    return PoleCurveReport(sc.tag, samples, frac, tol)


POLE_CSV_HEADER = ("source", "n", "re_omega", "im_omega", "re_x", "im_x", "re_y", "im_y", "verified", "curve_x", "distance_x")


def pole_samples_csv(report: PoleCurveReport) -> str:
    """CSV of every sampled orbit point in a :class:`PoleCurveReport`."""
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POLE_CSV_HEADER)
    for smp in report.samples:
        for row, d in zip(smp.csv_rows(), smp.distance_x):
            w.writerow((smp.source, *(f"{v:.15g}" if isinstance(v, float) else v for v in row), f"{float(d):.15g}"))
    return buf.getvalue()


def first_branch_singularity_check(
    L: Continuation, n: int = 200, radius: float = 2.0, cut_margin: float = 1e-3, threshold: float = POLE_THRESHOLD
) -> dict:
    """Scan the first branch of Q(x, 0) over a grid of ``|x| <= radius``.

    Points within ``cut_margin`` of the cut [x3, x4] are skipped.  Reports
    the largest magnitude found and where.
    """
    B = L.U.B
    x3, x4 = _re(B.x[2]), _re(B.x[3])
    g = np.linspace(-radius, radius, n)
    X, Y = np.meshgrid(g, g)
    pts = (X + 1j * Y).ravel()
    pts = pts[np.abs(pts) <= radius]
    d = real_cycle_distance_cut(pts, x3, x4)
    pts = pts[d > cut_margin]
    pts = pts[np.abs(L.K.Kx0(pts)) > 1e-8]
    vals = L.branch_x(pts, 1)
    mag = np.abs(vals)
    i = int(np.nanargmax(mag))
    return {
        "points": int(len(pts)),
        "max_abs": float(mag[i]),
        "argmax": complex(pts[i]),
        "finite": bool(np.all(np.isfinite(vals))),
        "off_cut_pole": bool(mag[i] > threshold),
    }


def real_cycle_distance_cut(v, x3: float, x4: float):
    """Distance from v to the cut [x3, x4] (through infinity when x4 < 0)."""
    v = np.asarray(v, dtype=complex)
    re, im = v.real, np.abs(v.imag)
    if math.isinf(x4):
        gap = np.maximum(x3 - re, 0)
    elif x4 > 0:
        gap = np.maximum(np.maximum(x3 - re, re - x4), 0)
    else:
        gap = np.maximum(np.minimum(x3 - re, re - x4) * (re < x3) * (re > x4), 0)
    return im + gap


def second_branch_poles(L: Continuation, grid: int = 40, k: int = 2) -> list:
    """Verified poles of r_x over the half-cell of branch k.

    Local maxima of ``|r_x|`` on a grid are refined by Newton on ``1/r_x``
    and accepted when the refined point is a pole (``|r_x| > threshold``
    and growing towards it).  Coincident refinements are merged.
    The cell is ``s in [0, 1)``, ``t in [k/2, (k+1)/2)`` in the basis
    ``w = s omega1 + t omega2``.
    """
    # nodes sit just off the lines s = j/grid so that poles on the real
    # cycle s = 0 are close to a node without hitting it
    s = (np.arange(grid) + 0.01) / grid
    # one padding row on each side turns poles on the edges t = k/2 and
    # t = (k+1)/2 into interior maxima; the range filter below drops strays
    t = k / 2 + (np.arange(-1, grid + 1) + 0.5) / (2 * grid)
    S_, T_ = np.meshgrid(s, t)
    W = S_ * L.w1 + T_ * L.w2
    R = np.abs(L.rx_array(W.ravel())[0]).reshape(W.shape)
    poles = []
    for i in range(len(t)):
        for j in range(grid):
            v = R[i, j]
            # s is periodic, so the neighbourhood wraps in j
            nb = R[max(i - 1, 0): i + 2][:, [(j - 1) % grid, j, (j + 1) % grid]]
            if v < np.nanmax(nb) or v < 2 * np.nanmedian(R):
                continue
            w = _refine_pole(L, W[i, j])
            if w is None:
                continue
            s_, t_ = (float(c) for c in L.U.W.coords(w))
            if not k / 2 - 1e-6 <= t_ < (k + 1) / 2 - 1e-6:
                continue
            s_ = s_ - math.floor(s_ + 1e-6)
            w = complex(s_ * L.w1 + t_ * L.w2)
            if all(abs(w - p) > 1e-5 * abs(L.w2) for p in poles):
                poles.append(w)
    return poles


def second_branch_pole_count(L: Continuation, grid: int = 40, k: int = 2) -> int:
    """Number of distinct poles found by :func:`second_branch_poles`."""
    return len(second_branch_poles(L, grid, k))


def _refine_pole(L: Continuation, w, iters: int = 60):
    """Newton on ``1/r_x`` with the step scaled by the estimated pole order.

    Near a pole of order m, ``q = g/g'`` with ``g = 1/r_x`` behaves like
    ``(w - w*)/m``, so ``dq/dw`` estimates ``1/m``.  Derivatives are
    central differences with a step kept well below ``|q|``.
    """
    w = complex(w)
    scale = abs(L.w2)
    dist = 1e-3 * scale

    def q_at(pts, h):
        pts = np.asarray(pts, dtype=complex)
        r = L.rx_array(np.concatenate([pts, pts + h, pts - h]))[0].reshape(3, -1)
        with np.errstate(all="ignore"):
            g = 1 / r
            return g[0] / ((g[1] - g[2]) / (2 * h))

    for _ in range(iters):
        h = max(1e-3 * dist, 1e-12 * scale)
        for _retry in range(4):
            q0, q1 = q_at([w, w + h], h)
            # q0 ~ distance / order; the difference step must stay well below it
            if not np.isfinite(q0) or h <= 1e-2 * abs(q0) or h <= 1e-12 * scale:
                break
            h = max(1e-3 * abs(q0), 1e-12 * scale)
        if not (np.isfinite(q0) and np.isfinite(q1)):
            # landed on the pole itself (or blew up); let the probe decide
            break
        dq = (q1 - q0) / h
        m = min(max(round(abs(1 / dq)) if dq != 0 else 1, 1), 6)
        step = m * q0
        w -= step
        dist = max(abs(step), 1e-12 * scale)
        if abs(step) < 1e-12 * scale:
            break
    probes = np.abs(L.rx_array([w + 1e-7, w + 1e-9])[0])
    if probes[1] > POLE_THRESHOLD and probes[1] > 10 * probes[0]:
        return w
    return None
