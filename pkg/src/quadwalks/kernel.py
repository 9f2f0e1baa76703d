"""Step sets, kernel polynomials, branch points and the algebraic branches.

A model is a step set S drawn from the eight neighbours of the origin.  The
kernel ``K(x, y) = xyz [sum_{(i,j) in S} x^i y^j - 1/z]`` is stored in the
two quadratic forms

    K = a(x) y^2 + b(x) y + c(x) = at(y) x^2 + bt(y) x + ct(y),

with every coefficient polynomial kept as a numpy array, lowest degree
first.  The discriminants ``d = b^2 - 4ac`` and ``dt = bt^2 - 4 at ct`` have
degree 3 or 4; their roots are the branch points x1..x4 and y1..y4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import (
    InvalidStep,
    NotApplicable,
    OffCurve,
    OnCut,
    SingularWalk,
    WeightOutOfRange,
)

P = np.polynomial.polynomial

# bit order of the 8-bit mask encoding
STEP_ORDER = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

INF = math.inf
_ROOT_DPS = 50


# ---------------------------------------------------------------------------
# step sets


@dataclass(frozen=True)
class StepSet:
    """A set of unit steps in the quarter plane.

    Parameters
    ----------
    steps : frozenset of (int, int)
        Members of ``{-1, 0, 1}^2`` minus the origin.
    """

    steps: frozenset

    def __post_init__(self):
        if not self.steps:
            raise InvalidStep("empty step set")
        for st in self.steps:
            i, j = st
            if (i, j) == (0, 0):
                raise InvalidStep("(0,0) is not a step")
            if i not in (-1, 0, 1) or j not in (-1, 0, 1):
                raise InvalidStep(f"step {st} out of range")

    @property
    def size(self) -> int:
        return len(self.steps)

    def has(self, i: int, j: int) -> float:
        """Indicator 1_(i,j) as a float."""
        return 1.0 if (i, j) in self.steps else 0.0

    @property
    def mask(self) -> int:
        return sum(1 << k for k, st in enumerate(STEP_ORDER) if st in self.steps)

    def transpose(self) -> "StepSet":
        """Mirror image in the diagonal, swapping the roles of x and y."""
        return StepSet(frozenset((j, i) for i, j in self.steps))

    def sorted_steps(self) -> list:
        return [st for st in STEP_ORDER if st in self.steps]

    def __str__(self) -> str:
        return ";".join(f"{i},{j}" for i, j in self.sorted_steps())


def stepset_from_mask(mask: int) -> StepSet:
    if not 0 < mask < 256:
        raise InvalidStep(f"mask {mask} outside 1..255")
    return StepSet(frozenset(st for k, st in enumerate(STEP_ORDER) if mask >> k & 1))


def parse_stepset(text) -> StepSet:
    """Parse a step descriptor.

    Accepts a ``;``-separated list of ``di,dj`` pairs (``"1,0;-1,0"``), an
    integer 8-bit mask, or a string holding such a mask in decimal, hex
    (``0x``) or binary (``0b``).

    Raises
    ------
    InvalidStep
        On the origin, offsets outside ``{-1,0,1}``, empty input or junk.
    """
    if isinstance(text, StepSet):
        return text
    if isinstance(text, (int, np.integer)):
        return stepset_from_mask(int(text))
    s = str(text).strip()
    if not s:
        raise InvalidStep("empty step descriptor")
    if "," not in s:
        try:
            return stepset_from_mask(int(s, 0))
        except ValueError:
            raise InvalidStep(f"cannot parse step descriptor {text!r}") from None
    steps = set()
    for part in s.replace(" ", "").split(";"):
        if not part:
            continue
        bits = part.strip("()").split(",")
        if len(bits) != 2:
            raise InvalidStep(f"bad step {part!r}")
        try:
            i, j = int(bits[0]), int(bits[1])
        except ValueError:
            raise InvalidStep(f"bad step {part!r}") from None
        if (i, j) == (0, 0):
            raise InvalidStep("(0,0) is not a step")
        if i not in (-1, 0, 1) or j not in (-1, 0, 1):
            raise InvalidStep(f"step {(i, j)} out of range")
        steps.add((i, j))
    return StepSet(frozenset(steps))


SIMPLE = parse_stepset("1,0;-1,0;0,1;0,-1")
KREWERAS = parse_stepset("1,1;-1,0;0,-1")
GESSEL = parse_stepset("1,0;-1,0;1,1;-1,-1")
WORKED_IID = parse_stepset("-1,0;-1,1;0,1;1,-1")


class Covariance(tuple):
    """Pair ``(full, sum_ij)``: the covariance and the bare sum of i*j."""

    __slots__ = ()

    def __new__(cls, full, sum_ij):
        return super().__new__(cls, (full, sum_ij))

    @property
    def full(self) -> int:
        return self[0]

    @property
    def sum_ij(self) -> int:
        return self[1]


def covariance(S: StepSet) -> Covariance:
    """Covariance ``sum ij - (sum i)(sum j)`` of a step set.

    The bare ``sum ij`` is returned alongside; it coincides with the full
    value whenever one coordinate of the drift vanishes.
    """
    si = sum(i for i, _ in S.steps)
    sj = sum(j for _, j in S.steps)
    sij = sum(i * j for i, j in S.steps)
    return Covariance(sij - si * sj, sij)


# ---------------------------------------------------------------------------
# kernel coefficients


def _coeff_lists(S: StepSet, z, one=None):
    one = one or S.has
    a = [z * one(-1, 1), z * one(0, 1), z * one(1, 1)]
    b = [z * one(-1, 0), -1 + 0 * z, z * one(1, 0)]
    c = [z * one(-1, -1), z * one(0, -1), z * one(1, -1)]
    at = [z * one(1, -1), z * one(1, 0), z * one(1, 1)]
    bt = [z * one(0, -1), -1 + 0 * z, z * one(0, 1)]
    ct = [z * one(-1, -1), z * one(-1, 0), z * one(-1, 1)]
    return a, b, c, at, bt, ct


def _trim(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    n = len(p)
    while n > 1 and p[n - 1] == 0.0:
        n -= 1
    return p[:n]


@dataclass(frozen=True)
class KernelData:
    """Kernel coefficient polynomials at a fixed weight z.

    Attributes
    ----------
    S : StepSet
    z : float
    a, b, c : ndarray
        Coefficients in x of ``K = a(x) y^2 + b(x) y + c(x)``.
    at, bt, ct : ndarray
        Coefficients in y of ``K = at(y) x^2 + bt(y) x + ct(y)``.
    d, dt : ndarray
        Discriminants ``b^2 - 4ac`` and ``bt^2 - 4 at ct``.
    """

    S: StepSet
    z: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    at: np.ndarray = field(repr=False)
    bt: np.ndarray = field(repr=False)
    ct: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    dt: np.ndarray = field(repr=False)

    @property
    def K00(self) -> float:
        """K(0, 0) = z 1_(-1,-1)."""
        return self.c[0]

    def transpose(self) -> "KernelData":
        return kernel_data(self.S.transpose(), self.z)

    def K(self, x, y):
        """Kernel value ``a(x) y^2 + b(x) y + c(x)``."""
        return (P.polyval(x, self.a) * y + P.polyval(x, self.b)) * y + P.polyval(x, self.c)

    def Kx0(self, x):
        """K(x, 0) = c(x)."""
        return P.polyval(x, self.c)

    def K0y(self, y):
        """K(0, y) = ct(y)."""
        return P.polyval(y, self.ct)


def kernel_data(S: StepSet, z: float) -> KernelData:
    """Coefficient polynomials and discriminants of the kernel.

    Raises
    ------
    WeightOutOfRange
        Unless ``0 < z < 1/|S|``.
    """
    S = parse_stepset(S)
    z = float(z)
    if not (0.0 < z < 1.0 / S.size):
        raise WeightOutOfRange(f"z={z!r} outside (0, 1/{S.size})")
    a, b, c, at, bt, ct = (np.array(v, dtype=float) for v in _coeff_lists(S, z))
    d = P.polysub(P.polymul(b, b), 4.0 * P.polymul(a, c))
    dt = P.polysub(P.polymul(bt, bt), 4.0 * P.polymul(at, ct))
    d = np.concatenate([d, np.zeros(5 - len(d))])
    dt = np.concatenate([dt, np.zeros(5 - len(dt))])
    return KernelData(S, z, a, b, c, at, bt, ct, d, dt)


def exact_discriminants(S: StepSet, z: Fraction):
    """Discriminant coefficients in exact rational arithmetic.

    Returns
    -------
    (d, dt, (a, b, c), (at, bt, ct)) with lists of Fractions, lowest degree first.
    """
    z = Fraction(z)
    # integer indicators keep every coefficient an exact Fraction
    a, b, c, at, bt, ct = _coeff_lists(S, z, lambda i, j: int((i, j) in S.steps))
    a, b, c, at, bt, ct = ([Fraction(v) for v in p] for p in (a, b, c, at, bt, ct))

    def mul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, u in enumerate(p):
            for j, v in enumerate(q):
                out[i + j] += u * v
        return out

    d = [u - 4 * v for u, v in zip(mul(b, b), mul(a, c))]
    dt = [u - 4 * v for u, v in zip(mul(bt, bt), mul(at, ct))]
    return d, dt, (a, b, c), (at, bt, ct)


# ---------------------------------------------------------------------------
# roots


def poly_roots(p, exact=None) -> np.ndarray:
    """Roots of a real polynomial (lowest degree first).

    Companion-matrix eigenvalues in double precision, then Newton polish in
    50-digit arithmetic.  Falls back to ``mpmath.polyroots`` when polishing
    collapses two roots onto each other.  ``exact`` may carry the same
    coefficients as Fractions; polishing then uses them, which matters when
    two roots nearly coincide and double-precision coefficients no longer
    determine them.
    """
    p = _trim(p)
    if len(p) < 2:
        return np.array([], dtype=complex)
    r0 = P.polyroots(p)
    with mpmath.workdps(_ROOT_DPS):
        if exact is None:
            cs = [mpmath.mpf(float(v)) for v in p[::-1]]
        else:
            ex = [Fraction(v) for v in exact[: len(p)]]
            cs = [mpmath.mpf(v.numerator) / v.denominator for v in ex[::-1]]
        dcs = [cs[k] * (len(cs) - 1 - k) for k in range(len(cs) - 1)]
        tol = mpmath.mpf(10) ** (-_ROOT_DPS + 5)
        out = []
        for x0 in r0:
            x = mpmath.mpf(x0.real) if abs(x0.imag) <= 1e-9 * max(1.0, abs(x0)) else mpmath.mpc(x0)
            for _ in range(60):
                f = mpmath.polyval(cs, x)
                df = mpmath.polyval(dcs, x)
                if df == 0:
                    break
                dx = f / df
                x -= dx
                if abs(dx) <= tol * max(abs(x), tol):
                    break
            out.append(complex(x))
        out = np.array(out)
        if len(out) > 1:
            gaps = np.abs(out[:, None] - out[None, :])
            gaps[np.eye(len(out), dtype=bool)] = np.inf
            if np.min(gaps) <= 1e-13 * max(1.0, np.max(np.abs(out))):
                out = np.array([complex(v) for v in mpmath.polyroots(cs, maxsteps=200, extraprec=200)])
    return out


def _realify(r: complex) -> complex | float:
    if abs(r.imag) <= 1e-12 * max(1.0, abs(r)):
        return float(r.real)
    return complex(r)


@dataclass(frozen=True)
class BranchPoints:
    """Ordered branch points; ``inf`` stands for a root at infinity."""

    x: tuple
    y: tuple

    @property
    def x4_inf(self) -> bool:
        return math.isinf(_re(self.x[3]))

    @property
    def y4_inf(self) -> bool:
        return math.isinf(_re(self.y[3]))

    @staticmethod
    def tag(v) -> str:
        if isinstance(v, float) and math.isinf(v):
            return "infinite"
        return "real" if isinstance(v, float) else "complex"


def _re(v) -> float:
    return v.real if isinstance(v, complex) else float(v)


def _ordered_roots(p, exact=None):
    """Roots of a discriminant in the order |r1| < r2 < 1 < r3 < |r4|.

    Returns None if this ordering cannot be established.
    """
    p = _trim(p)
    deg = len(p) - 1
    if deg not in (3, 4):
        return None
    r = sorted(poly_roots(p, exact), key=abs)
    r = [_realify(v) for v in r]
    if deg == 3:
        r.append(INF)
    r1, r2, r3, r4 = r
    # equal moduli (r1 = -r2 or r4 = -r3): the positive root is r2 and r3
    if isinstance(r1, float) and r1 > 0 and abs(abs(r1) - abs(r2)) <= 1e-12 * abs(r1):
        r1, r2 = r2, r1
    if isinstance(r3, float) and r3 < 0 and not math.isinf(abs(r4)) and abs(abs(r3) - abs(r4)) <= 1e-12 * abs(r3):
        r3, r4 = r4, r3
    r = [r1, r2, r3, r4]
    if not all(isinstance(v, float) for v in (r2, r3)):
        return None
    tol = 1e-12
    scale = lambda u, v: tol * max(abs(u), abs(v), 1e-300)
    if not (r2 > 0 and r3 > 0):
        return None
    # |r1| = r2 with r1 = -r2 occurs for the diagonal-step model; only a
    # genuine double root is rejected
    if abs(r1 - r2) <= scale(r1, r2) or abs(r1) > r2 + scale(r1, r2):
        return None
    if not (r2 < 1.0 - tol and r3 > 1.0 + tol):
        return None
    if not math.isinf(r4) and (abs(r4 - r3) <= scale(r3, r4) or abs(r4) < r3 - scale(r3, r4)):
        return None
    return tuple(r)


def branch_points(K: KernelData) -> BranchPoints:
    """Branch points with ``|x1| < x2 < 1 < x3 < |x4|`` and likewise for y.

    Raises
    ------
    SingularWalk
        If either ordering fails (double roots, too few roots).
    """
    d, dt, _, _ = exact_discriminants(K.S, Fraction(K.z))
    bx = _ordered_roots(K.d, d)
    by = _ordered_roots(K.dt, dt)
    if bx is None or by is None:
        raise SingularWalk(f"branch-point ordering fails for S={K.S} at z={K.z}")
    return BranchPoints(bx, by)


def is_singular(S: StepSet, z_probe: float | None = None) -> bool:
    """Operational singularity test.

    The model is singular when the branch-point ordering fails at
    ``z_probe`` (default ``1/(2|S|)``) and again at ``z_probe/2``.
    """
    S = parse_stepset(S)
    z = z_probe if z_probe is not None else 0.5 / S.size
    fails = 0
    for zz in (z, z / 2):
        try:
            branch_points(kernel_data(S, zz))
        except SingularWalk:
            fails += 1
    return fails == 2


# ---------------------------------------------------------------------------
# branches and Galois maps


def _quadratic_pair(A, B, C):
    """Both roots of ``A t^2 + B t + C``, sorted by modulus.

    Works on arrays.  Where ``A == 0`` the pair is (finite root, inf).
    """
    A, B, C = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (A, B, C)))
    disc = np.sqrt(B * B - 4 * A * C)
    # avoid cancellation: q = -(B + sign * sqrt) / 2 with sign matching B
    sgn = np.where((B.conj() * disc).real >= 0, 1.0, -1.0)
    q = -0.5 * (B + sgn * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(A != 0, q / A, np.where(B != 0, -C / B, np.nan))
        r2 = np.where(q != 0, C / q, np.where(A != 0, -B / A, complex(np.inf)))
        r2 = np.where(A == 0, complex(np.inf), r2)
    swap = np.abs(r1) > np.abs(r2)
    lo = np.where(swap, r2, r1)
    hi = np.where(swap, r1, r2)
    return lo, hi


def _on_cut(t, r, tol):
    """True where t lies within tol of the cuts [r1, r2] or [r3, r4]."""
    t = np.asarray(t, dtype=complex)
    r1, r2, r3, r4 = (_re(v) for v in r)
    near_real = np.abs(t.imag) <= tol
    re = t.real
    inner = near_real & (re >= min(r1, r2) - tol) & (re <= max(r1, r2) + tol)
    if math.isinf(r4):
        outer = near_real & (re >= r3 - tol)
    elif r4 > 0:
        outer = near_real & (re >= r3 - tol) & (re <= r4 + tol)
    else:  # the cut passes through infinity
        outer = near_real & ((re >= r3 - tol) | (re <= r4 + tol))
    return inner | outer


def branch_Y(K: KernelData, x, sheet: int, B: BranchPoints | None = None, tol: float = 1e-12):
    """Branch ``Y_sheet(x)`` of the algebraic function Y with |Y0| <= |Y1|.

    Raises
    ------
    OnCut
        If ``B`` is given and some x lies within ``tol`` of a cut.
    """
    if B is not None and np.any(_on_cut(x, B.x, tol)):
        raise OnCut("x lies on a cut of Y")
    lo, hi = _quadratic_pair(P.polyval(x, K.a), P.polyval(x, K.b), P.polyval(x, K.c))
    out = lo if sheet == 0 else hi
    return out[()] if np.ndim(out) == 0 else out


def branch_X(K: KernelData, y, sheet: int, B: BranchPoints | None = None, tol: float = 1e-12):
    """Branch ``X_sheet(y)`` with |X0| <= |X1|; see :func:`branch_Y`."""
    if B is not None and np.any(_on_cut(y, B.y, tol)):
        raise OnCut("y lies on a cut of X")
    lo, hi = _quadratic_pair(P.polyval(y, K.at), P.polyval(y, K.bt), P.polyval(y, K.ct))
    out = lo if sheet == 0 else hi
    return out[()] if np.ndim(out) == 0 else out


def _check_on_curve(K, x, y, tol):
    if np.isinf(x) or np.isinf(y):
        return
    scale = 1.0 + abs(x) ** 2 * abs(y) ** 2
    if abs(K.K(x, y)) > tol * scale:
        raise OffCurve(f"({x}, {y}) is not on the kernel curve")


def galois_xi(K: KernelData, x, y, tol: float = 1e-8):
    """``xi(x, y) = (x, c(x) / (a(x) y))``; inf on a vanishing denominator."""
    _check_on_curve(K, x, y, tol)
    num = P.polyval(x, K.c)
    den = P.polyval(x, K.a) * y
    return x, (complex(np.inf) if den == 0 else num / den)


def galois_eta(K: KernelData, x, y, tol: float = 1e-8):
    """``eta(x, y) = (ct(y) / (at(y) x), y)``."""
    _check_on_curve(K, x, y, tol)
    num = P.polyval(y, K.ct)
    den = P.polyval(y, K.at) * x
    return (complex(np.inf) if den == 0 else num / den), y


# ---------------------------------------------------------------------------
# special points


def _limits_at_infinity(p2, p1, p0):
    """Limits as t -> inf of the two roots of p2(t) u^2 + p1(t) u + p0(t)."""
    m = max(len(_trim(p)) - 1 if np.any(p) else -1 for p in (p2, p1, p0))
    A, B, C = (p[m] if m < len(p) else 0.0 for p in (p2, p1, p0))
    if A == 0 and B == 0:
        return complex(np.inf), complex(np.inf)
    lo, hi = _quadratic_pair(A, B, C)
    return complex(lo), complex(hi)


def _finite(v):
    return v if np.isfinite(v) else INF


@dataclass(frozen=True)
class SpecialPoints:
    """Limits defining the points a1..a4, b1, b2.

    ``x_star`` and ``x_starstar`` are the two limits of the roots in x as
    y -> inf, ``y_star``/``y_starstar`` the other y-values on the curve above
    them, and ``y_circ``/``y_bullet`` the two limits of the roots in y as
    x -> inf.  Within each pair an infinite limit comes first, otherwise
    the smaller modulus.  Infinite entries are ``math.inf``.
    """

    x_star: complex
    x_starstar: complex
    y_star: complex
    y_starstar: complex
    y_circ: complex
    y_bullet: complex


def special_points(K: KernelData) -> SpecialPoints:
    """Closed-form limits from the leading coefficients of the kernel.

    The point (x, inf) lies on the curve iff x is a root of the leading
    y-coefficient; its partner y-value on the same x is then the other root
    of ``K(x, .)``, i.e. ``-c(x)/b(x)`` or its limit.
    """
    # an infinite limit is labelled first; finite ones follow by modulus
    order = lambda v: (bool(np.isfinite(v)), abs(v) if np.isfinite(v) else 0.0)
    xs = sorted(_limits_at_infinity(K.at, K.bt, K.ct), key=order)
    ys = sorted(_limits_at_infinity(K.a, K.b, K.c), key=order)
    partner = []
    for x in xs:
        if not np.isfinite(x):
            # (inf, inf) is on the curve; the partner is the other y over x = inf
            partner.append(ys[1] if not np.isfinite(ys[0]) else INF)
            continue
        bx = P.polyval(x, K.b)
        cx = P.polyval(x, K.c)
        partner.append(_finite(-cx / bx) if bx != 0 else INF)
    return SpecialPoints(
        _finite(xs[0]), _finite(xs[1]), partner[0], partner[1], _finite(ys[0]), _finite(ys[1])
    )


# ---------------------------------------------------------------------------
# subcases


@dataclass(frozen=True)
class Subcase:
    """Subcase tag and the curves on which branch poles accumulate.

    ``curves_x`` holds descriptors for x -> Q(x,0): ``("level", "a")`` or
    ``("level", "b")`` for the closed curve ``I_x`` through the a- or
    b-points, and ``("real", "outer")`` / ``("real", "inner")`` for the real
    intervals ``R \\ ]x1, x4[`` and ``]x4, x1[``.
    """

    tag: str
    curves_x: tuple
    curves_y: tuple


_PREDICTIONS = {
    "I.A": ((("level", "a"), ("level", "b")), (("level", "a"), ("level", "b"))),
    "I.B": ((("level", "a"), ("real", "outer")), (("level", "a"), ("real", "inner"))),
    "I.C": ((("level", "a"), ("real", "outer")), (("level", "a"), ("real", "inner"))),
    "II.A": ((("level", "b"), ("real", "inner")), (("level", "b"), ("real", "outer"))),
}
_REAL_ONLY = ((("real", "outer"),), (("real", "outer"),))


def remark24_sign(S: StepSet, axis: str = "x") -> int:
    """Sign of ``1_(1,0) - 4 1_(1,1) 1_(1,-1)`` (x) or its transpose (y).

    +1, -1, 0 mean the fourth branch point is positive, negative, infinite.
    """
    if axis == "y":
        S = S.transpose()
    D = S.has(1, 0) - 4 * S.has(1, 1) * S.has(1, -1)
    return int(np.sign(D))


def _Y_at_x4_infinite(K: KernelData) -> bool:
    """True when Y(x4) = inf, given x4 = inf (the double root of K(inf, .))."""
    # near x = inf the y-roots behave like the roots of the leading x-coefficients
    lo, hi = _limits_at_infinity(K.a, K.b, K.c)
    return not (np.isfinite(lo) and np.isfinite(hi))


def classify_subcase(K: KernelData, B: BranchPoints, P_: SpecialPoints | None = None) -> Subcase:
    """Subcase from the sign/finiteness of x4, y4 and the special points.

    Raises
    ------
    NotApplicable
        For models of finite group; call only on infinite-group models.
    """
    from .group import group_order_on_curve  # local import: group depends on kernel

    if group_order_on_curve(K) != "Infinite":
        raise NotApplicable("subcases are defined for infinite-group models only")
    P_ = P_ or special_points(K)
    x4, y4 = _re(B.x[3]), _re(B.y[3])
    sx = remark24_sign(K.S, "x")
    if (sx == 0) != math.isinf(x4) or (sx != 0 and not math.isinf(x4) and np.sign(x4) != sx):
        raise SingularWalk("sign of x4 disagrees with the leading-coefficient test")
    if math.isinf(y4):
        tag = "III"
    elif y4 < 0:
        tag = "I.A" if x4 < 0 else ("I.B" if math.isinf(x4) else "I.C")
    elif x4 < 0:
        tag = "II.A"
    elif math.isinf(x4):
        tag = "II.D" if _Y_at_x4_infinite(K) else "II.C"
    else:
        n_inf = sum(not np.isfinite(v) for v in (P_.y_circ, P_.y_bullet))
        tag = "II.B" if n_inf == 1 else "II.C"
    cx, cy = _PREDICTIONS.get(tag, _REAL_ONLY)
    return Subcase(tag, cx, cy)
