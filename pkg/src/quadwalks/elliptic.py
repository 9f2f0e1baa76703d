"""Elliptic integrals, the three periods and the Weierstrass function.

Complete integrals use the arithmetic-geometric mean, incomplete ones the
Carlson symmetric form R_F.  The periods are computed twice: by tanh-sinh
quadrature of ``dx / sqrt(d(x))`` between branch points, and through the
reduction to Legendre form.  The Weierstrass function is evaluated from
theta-function quotients with the nome taken from the period ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentOutOfRange,
    LatticePole,
    ModulusOutOfRange,
    QuadratureFailure,
)
from .kernel import BranchPoints, KernelData, _re, _trim

P = np.polynomial.polynomial

ABEL_SWITCH = 1e-10  # use the log expansion of K when 1 - k is below this


# ---------------------------------------------------------------------------
# quadrature


def tanh_sinh(f, a: float, b: float, h: float = 1.0 / 64, tmax: float = 6.5) -> float:
    """Tanh-sinh quadrature of f over [a, b].

    ``f(x, da, db)`` receives the nodes together with their exact distances
    ``da = x - a`` and ``db = b - x`` so that endpoint singularities can be
    evaluated without cancellation.
    """
    half = 0.5 * (b - a)
    t = np.arange(-int(tmax / h), int(tmax / h) + 1) * h
    s = 0.5 * np.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        opu = 2.0 / (1.0 + np.exp(-2.0 * s))
        omu = 2.0 / (1.0 + np.exp(2.0 * s))
        w = 0.5 * np.pi * np.cosh(t) / np.cosh(s) ** 2
    da, db = half * opu, half * omu
    keep = (da > 0) & (db > 0) & (w > 0)
    x = a + da[keep]
    vals = f(x, da[keep], db[keep])
    return float(half * h * np.sum(w[keep] * vals))


def _integrate_checked(f, a, b):
    """Tanh-sinh at two step sizes over geometric sub-intervals of [a, b].

    Wide intervals with both ends of the same sign are split at
    geometrically spaced points, one per two decades, so the endpoint
    clustering of the rule resolves both scales.
    """
    cuts = [a, b]
    if a * b > 0 and max(abs(a), abs(b)) / min(abs(a), abs(b)) > 100:
        m = int(math.ceil(abs(math.log10(abs(b / a))) / 2))
        cuts = [a * (b / a) ** (j / m) for j in range(m + 1)]
        cuts[0], cuts[-1] = a, b
    total = [0.0, 0.0]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        off_a, off_b = lo - a, b - hi

        def g(x, da, db, off_a=off_a, off_b=off_b):
            return f(x, da + off_a, db + off_b)

        for i, h in enumerate((1.0 / 32, 1.0 / 64)):
            total[i] += tanh_sinh(g, lo, hi, h=h)
    v1, v2 = total
    if not np.isfinite(v2) or abs(v2 - v1) > 1e-8 * max(abs(v2), 1e-300):
        raise QuadratureFailure(f"tanh-sinh did not settle on [{a}, {b}]: {v1!r} vs {v2!r}")
    return v2


# ---------------------------------------------------------------------------
# elliptic integrals


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(100):
        if abs(a - b) <= 1e-16 * abs(a):
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def carlson_rf(x, y, z, tol: float = 1e-4):
    """Carlson's symmetric integral R_F(x, y, z).

    Real non-negative or complex arguments, scalar or array.  Duplication
    until the relative spread falls below ``tol``, then the fifth-order
    series, which leaves a relative error of order ``tol**6``.
    """
    cplx = any(np.iscomplexobj(v) for v in (x, y, z))
    dt = complex if cplx else float
    x, y, z = (np.array(v, dtype=dt) for v in (x, y, z))
    for _ in range(100):
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        A = (x + y + z) / 3.0
        dx, dy, dz = 1 - x / A, 1 - y / A, 1 - z / A
        if np.max(np.maximum(np.maximum(abs(dx), abs(dy)), abs(dz))) < tol:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    out = (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44) / np.sqrt(A)
    return out[()] if out.ndim == 0 else out


def _kprime(k: float, kp: float | None) -> float:
    return math.sqrt((1 - k) * (1 + k)) if kp is None else kp


def _check_modulus(k, kp):
    # k may round to 1.0 in double precision while kp > 0 still carries it
    if not (0.0 <= k < 1.0 or (k == 1.0 and kp is not None and kp > 0)):
        raise ModulusOutOfRange(f"k={k!r} outside [0, 1)")


def abel_K(one_minus_k: float) -> float:
    """``K(k) = A(k) + ln(1-k) B(k)`` truncated at first order in k - 1."""
    km1 = -one_minus_k
    A = 1.5 * math.log(2) + 0.25 * km1 * (1 - 3 * math.log(2))
    B = -0.5 + 0.25 * km1
    return A + math.log(one_minus_k) * B


def ellip_K(k: float, kp: float | None = None) -> float:
    """Complete integral of the first kind.

    Parameters
    ----------
    k : float
        Modulus in [0, 1).
    kp : float, optional
        Complementary modulus ``sqrt(1 - k^2)`` if known more accurately
        than it can be recomputed from k.
    """
    _check_modulus(k, kp)
    kp = _kprime(k, kp)
    one_minus_k = kp * kp / (1 + k)
    if one_minus_k < ABEL_SWITCH:
        return abel_K(one_minus_k)
    return math.pi / (2 * agm(1.0, kp))


def ellip_F(w: float, k: float, kp: float | None = None, one_minus_w2: float | None = None) -> float:
    """Incomplete integral ``F(w, k) = int_0^w dt / sqrt((1-t^2)(1-k^2 t^2))``.

    ``kp`` and ``one_minus_w2`` may be supplied to avoid cancellation when
    k and w are close to 1.  For w = 1 this returns :func:`ellip_K`.
    """
    if not 0.0 <= w <= 1.0:
        raise ArgumentOutOfRange(f"w={w!r} outside [0, 1]")
    _check_modulus(k, kp)
    if w == 1.0 and one_minus_w2 in (None, 0.0):
        return ellip_K(k, kp)
    kp = _kprime(k, kp)
    c = (1 - w) * (1 + w) if one_minus_w2 is None else one_minus_w2
    return float(w * carlson_rf(c, kp * kp + k * k * c, 1.0))


# ---------------------------------------------------------------------------
# periods


def x_at_y1(K: KernelData, B: BranchPoints) -> float:
    """The double root X(y1) = -bt(y1) / (2 at(y1)); ``-inf`` if at(y1) = 0."""
    y1 = _re(B.y[0])
    at = P.polyval(y1, K.at)
    bt = P.polyval(y1, K.bt)
    if abs(at) <= 1e-300 or (y1 == 0.0 and K.at[0] == 0.0):
        return -math.inf
    return float(-bt / (2 * at))


@dataclass(frozen=True)
class Periods:
    """Periods of the kernel curve.

    Attributes
    ----------
    omega1 : complex
        Purely imaginary period.
    omega2, omega3 : float
        Real period and the shift of the composed Galois map.
    k, kp, w, one_minus_w2, M, Omega2, Omega3 : float
        Ingredients of the closed form, or nan for the quadrature route.
    X_y1 : float
        Lower limit of the third-period integral.
    """

    omega1: complex
    omega2: float
    omega3: float
    k: float = math.nan
    kp: float = math.nan
    w: float = math.nan
    one_minus_w2: float = math.nan
    M: float = math.nan
    Omega2: float = math.nan
    Omega3: float = math.nan
    X_y1: float = math.nan

    @property
    def ratio(self) -> float:
        return self.omega2 / self.omega3


def _abs_d_factory(K: KernelData, B: BranchPoints, left_root, right_root):
    """sqrt|d(x)| as a product of per-root square roots, endpoint distances exact.

    Taking the root factor by factor avoids underflow of the full product
    at tanh-sinh nodes that crowd the endpoints.
    """
    d = _trim(K.d)
    lead = abs(d[-1])
    roots = [_re(r) for r in B.x if not math.isinf(_re(r))]

    def absd(x, da, db):
        out = np.full_like(x, math.sqrt(lead))
        for r in roots:
            if left_root is not None and r == left_root:
                out = out * np.sqrt(da)
            elif right_root is not None and r == right_root:
                out = out * np.sqrt(db)
            else:
                out = out * np.sqrt(np.abs(x - r))
        return out

    return absd


def periods_quadrature(K: KernelData, B: BranchPoints) -> Periods:
    """Periods by direct quadrature of ``dx / sqrt(d(x))``.

    ``omega1 = i int_{x1}^{x2} dx / sqrt(-d)``,
    ``omega2 = int_{x2}^{x3} dx / sqrt(d)`` and
    ``omega3 = int_{X(y1)}^{x1} dx / sqrt(d)``.
    """
    x1, x2, x3, _ = (_re(v) for v in B.x)
    f12 = _abs_d_factory(K, B, x1, x2)
    f23 = _abs_d_factory(K, B, x2, x3)
    w1 = _integrate_checked(lambda x, da, db: 1.0 / f12(x, da, db), x1, x2)
    w2 = _integrate_checked(lambda x, da, db: 1.0 / f23(x, da, db), x2, x3)
    X = x_at_y1(K, B)
    if math.isinf(X):
        # x = x1 - (1 - u)/u maps (0, 1] onto (-inf, x1]
        d = _trim(K.d)
        lead = abs(d[-1])
        roots = [_re(r) for r in B.x if not math.isinf(_re(r))]

        def g(u, du, dv):
            # u^2 sqrt|d(x)| with each factor u |x - r| = |u (x1 - r) - dv|
            prod = np.full_like(u, math.sqrt(lead))
            for r in roots:
                prod = prod * np.sqrt(dv if r == x1 else np.abs(u * (x1 - r) - dv))
            return u ** (0.5 * len(roots) - 2) / prod

        w3 = _integrate_checked(g, 0.0, 1.0)
    elif X >= x1:
        w3 = 0.0
    else:
        f3 = _abs_d_factory(K, B, None, x1)
        w3 = _integrate_checked(lambda x, da, db: 1.0 / f3(x, da, db), X, x1)
    return Periods(1j * w1, w2, w3, X_y1=X)


def periods_closed_form(K: KernelData, B: BranchPoints) -> Periods:
    """Periods through the Legendre reduction ``omega = M * F(w, k)``.

    The complementary quantities ``k'^2`` and ``1 - w^2`` are formed from
    products of root differences rather than by subtraction from 1, which
    keeps the route accurate as z -> 0 where k and w tend to 1.
    """
    x1, x2, x3, x4 = (_re(v) for v in B.x)
    X = x_at_y1(K, B)
    S, z = K.S, K.z
    if math.isinf(x4):
        k2 = (x3 - x2) / (x3 - x1)
        kp2 = (x2 - x1) / (x3 - x1)
        if math.isinf(X):
            w2, omw2 = 1.0, 0.0
        else:
            w2 = (x1 - X) / (x2 - X)
            omw2 = (x2 - x1) / (x2 - X)
        lin = 2 * z * S.has(1, 0) + 4 * z * z * (S.has(1, 1) * S.has(0, -1) + S.has(1, -1) * S.has(0, 1))
        M = 2.0 / math.sqrt(lin * (x3 - x1))
    else:
        den = (x4 - x2) * (x3 - x1)
        k2 = (x4 - x1) * (x3 - x2) / den
        kp2 = (x2 - x1) * (x4 - x3) / den
        if math.isinf(X):
            w2 = (x4 - x2) / (x4 - x1)
            omw2 = (x2 - x1) / (x4 - x1)
        else:
            w2 = (x4 - x2) * (x1 - X) / ((x4 - x1) * (x2 - X))
            omw2 = (x2 - x1) * (x4 - X) / ((x4 - x1) * (x2 - X))
        D = S.has(1, 0) - 4 * S.has(1, 1) * S.has(1, -1)
        M = 2.0 / (z * math.sqrt(D * den))
    k, kp, w = math.sqrt(k2), math.sqrt(kp2), math.sqrt(w2)
    Om2 = ellip_K(k, kp)
    Om3 = ellip_F(w, k, kp, omw2)
    Om1 = ellip_K(kp, k)
    return Periods(1j * M * Om1, M * Om2, M * Om3, k, kp, w, omw2, M, Om2, Om3, X)


# ---------------------------------------------------------------------------
# Weierstrass function


class Weierstrass:
    """Weierstrass function of the lattice spanned by w1 and w2.

    The shorter of the two generators is used as base period ``p`` and the
    other one defines ``tau`` with positive imaginary part; the nome
    ``q = exp(i pi tau)`` then has modulus at most ``exp(-pi sqrt(3)/2)``.
    """

    NTERMS = 12

    def __init__(self, w1: complex, w2: complex):
        w1, w2 = complex(w1), complex(w2)
        if abs((w1 / w2).imag) < 1e-14:
            raise ValueError("periods are linearly dependent over R")
        self.w1, self.w2 = w1, w2
        p, o = (w1, w2) if abs(w1) <= abs(w2) else (w2, w1)
        tau = o / p
        if tau.imag < 0:
            tau = -tau
        # lattice-reduce tau into the standard strip
        tau -= round(tau.real)
        self.p, self.tau = p, tau
        self.q = np.exp(1j * np.pi * tau)
        self.q4 = np.exp(1j * np.pi * tau / 4)
        n = np.arange(self.NTERMS)
        self._n = n
        self._qodd = self.q4 * self.q ** (n * n + n)  # q^((n+1/2)^2)
        self._qeven = self.q ** ((n + 1) ** 2)
        self._sgn = (-1.0) ** n
        t2, t3, t4 = (complex(v) for v in (self._th2(0), self._th3(0), self._th4(0)))
        self.t2, self.t3, self.t4 = t2, t3, t4
        s = (np.pi / p) ** 2 / 3
        self.e1 = s * (t3**4 + t4**4)
        self.e2 = s * (t2**4 - t4**4)
        self.e3 = -s * (t2**4 + t3**4)
        self.g2 = 2 * (self.e1**2 + self.e2**2 + self.e3**2)
        self.g3 = 4 * self.e1 * self.e2 * self.e3

    # theta series in v; arrays of any shape
    def _th1(self, v):
        v = np.asarray(v, dtype=complex)[..., None]
        return 2 * np.sum(self._sgn * self._qodd * np.sin((2 * self._n + 1) * v), axis=-1)

    def _th2(self, v):
        v = np.asarray(v, dtype=complex)[..., None]
        return 2 * np.sum(self._qodd * np.cos((2 * self._n + 1) * v), axis=-1)

    def _th3(self, v):
        v = np.asarray(v, dtype=complex)[..., None]
        return 1 + 2 * np.sum(self._qeven * np.cos(2 * (self._n + 1) * v), axis=-1)

    def _th4(self, v):
        v = np.asarray(v, dtype=complex)[..., None]
        return 1 + 2 * np.sum(-self._sgn * self._qeven * np.cos(2 * (self._n + 1) * v), axis=-1)

    def reduce(self, u):
        """Representative of u modulo the lattice, centred on the origin."""
        u = np.asarray(u, dtype=complex)
        # coordinates in the basis (p, p tau)
        beta = (u / self.p).imag / self.tau.imag
        alpha = (u / self.p).real - beta * self.tau.real
        return u - np.round(alpha) * self.p - np.round(beta) * self.p * self.tau

    def coords(self, u):
        """Real coordinates (s, t) with ``u = s w1 + t w2``."""
        u = np.asarray(u, dtype=complex)
        det = (self.w1.conjugate() * self.w2).imag
        s = (u.conjugate() * self.w2).imag / det
        t = (self.w1.conjugate() * u).imag / det
        return s, t

    def _pieces(self, u):
        v = np.pi * self.reduce(u) / self.p
        return v, self._th1(v)

    def p_(self, u):
        """Value of the Weierstrass function; inf at lattice points."""
        v, th1 = self._pieces(u)
        c = self.t2 * self.t3 * self._th4(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (np.pi / self.p) ** 2 * ((c / th1) ** 2 - (self.t2**4 + self.t3**4) / 3)
        val = np.where(th1 == 0, complex(np.inf), val)
        return val[()] if val.ndim == 0 else val

    def dp(self, u):
        """Derivative of the Weierstrass function."""
        v, th1 = self._pieces(u)
        c = (self.t2 * self.t3 * self.t4) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            val = -2 * (np.pi / self.p) ** 3 * c * self._th2(v) * self._th3(v) * self._th4(v) / th1**3
        val = np.where(th1 == 0, complex(np.inf), val)
        return val[()] if val.ndim == 0 else val

    def inverse(self, P_val, newton: int = 4):
        """One solution u of ``p(u) = P_val``; the other is -u mod the lattice.

        Seeds from ``R_F(P - e1, P - e2, P - e3)`` and polishes by Newton.
        """
        Pv = np.asarray(P_val, dtype=complex)
        finite = np.isfinite(Pv)
        Ps = np.where(finite, Pv, 0)
        u = carlson_rf(Ps - self.e1, Ps - self.e2, Ps - self.e3)
        u = np.asarray(u, dtype=complex)
        for _ in range(newton):
            with np.errstate(all="ignore"):
                step = (self.p_(u) - Ps) / self.dp(u)
            step = np.where(np.isfinite(step), step, 0)
            u = u - step
        u = np.where(finite, u, 0)
        return u[()] if u.ndim == 0 else u


def weierstrass_p(u, w1, w2, tol: float = 1e-12):
    """Weierstrass function with periods w1, w2.

    Raises
    ------
    LatticePole
        If u lies within ``tol * |w|`` of a lattice point.
    """
    W = Weierstrass(w1, w2)
    _check_pole(W, u, tol)
    return W.p_(u)


def weierstrass_p_prime(u, w1, w2, tol: float = 1e-12):
    """Derivative of :func:`weierstrass_p`."""
    W = Weierstrass(w1, w2)
    _check_pole(W, u, tol)
    return W.dp(u)


def _check_pole(W, u, tol):
    if np.any(np.abs(W.reduce(u)) <= tol * abs(W.p)):
        raise LatticePole("argument on the period lattice")


def weierstrass_p_lattice_sum(u, w1, w2, N: int = 60) -> complex:
    """Defining double series truncated to |l1|, |l2| <= N (slow; for checks)."""
    l1, l2 = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1))
    lat = (l1 * w1 + l2 * w2).ravel()
    lat = lat[lat != 0]
    return complex(1 / u**2 + np.sum(1 / (u - lat) ** 2 - 1 / lat**2))
