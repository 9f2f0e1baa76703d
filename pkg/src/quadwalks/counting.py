"""Exact enumeration of quadrant walks and truncated generating functions."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NotOnCurve, OutsideCertifiedRegion
from .kernel import KernelData, StepSet, kernel_data

DEFAULT_N = 60


@dataclass(frozen=True)
class CountTable:
    """Exact counts ``q(i, j; n)`` for ``0 <= n <= N``.

    ``layers[n]`` is a dict ``{(i, j): count}`` holding the non-zero
    entries; the integers are Python ints and never overflow.
    """

    S: StepSet
    N: int
    layers: tuple

    def q(self, i: int, j: int, n: int) -> int:
        if n < 0 or n > self.N:
            raise IndexError(f"n={n} outside [0, {self.N}]")
        return self.layers[n].get((i, j), 0)

    def total(self, n: int) -> int:
        return sum(self.layers[n].values())

    def section_x(self, N: int | None = None) -> np.ndarray:
        """Float coefficients ``A[n, i] = q(i, 0; n)`` of Q(x, 0; z)."""
        return self._section(0, N)

    def section_y(self, N: int | None = None) -> np.ndarray:
        """Float coefficients ``A[n, j] = q(0, j; n)`` of Q(0, y; z)."""
        return self._section(1, N)

    def _section(self, axis: int, N):
        N = self.N if N is None else N
        A = np.zeros((N + 1, N + 1))
        for n in range(N + 1):
            for (i, j), c in self.layers[n].items():
                if (j if axis == 0 else i) == 0:
                    A[n, i if axis == 0 else j] = float(c)
        return A


def count_walks(S: StepSet, N: int) -> CountTable:
    """Dynamic programme for ``q(i, j; n)`` over walks confined to the quadrant."""
    if N < 0:
        raise ValueError("N must be non-negative")
    steps = S.sorted_steps()
    layer = {(0, 0): 1}
    layers = [layer]
    for _ in range(N):
        nxt: dict = {}
        for (i, j), c in layer.items():
            for di, dj in steps:
                u, v = i + di, j + dj
                if u >= 0 and v >= 0:
                    nxt[(u, v)] = nxt.get((u, v), 0) + c
        layer = nxt
        layers.append(layer)
    return CountTable(S, N, tuple(layers))


def brute_force_counts(S: StepSet, n: int) -> dict:
    """``{(i, j): q(i, j; n)}`` by enumerating all ``|S|^n`` step sequences."""
    out: dict = {}
    for seq in itertools.product(S.sorted_steps(), repeat=n):
        i = j = 0
        for di, dj in seq:
            i, j = i + di, j + dj
            if i < 0 or j < 0:
                break
        else:
            out[(i, j)] = out.get((i, j), 0) + 1
    return out


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series value with a bound on the discarded tail."""

    value: complex
    truncation_bound: float


def tail_bound(S: StepSet, z: float, N: int) -> float:
    """``sum_{n > N} (|S| z)^n``, valid for |x|, |y| <= 1."""
    r = S.size * z
    return r ** (N + 1) / (1 - r)


def _check_region(S, x, y, z):
    if not 0 < z < 1 / S.size:
        raise OutsideCertifiedRegion(f"z={z} outside (0, 1/{S.size})")
    if abs(x) > 1 or abs(y) > 1:
        raise OutsideCertifiedRegion(f"|x|={abs(x):.3g}, |y|={abs(y):.3g}; need both <= 1")


def eval_Q(table: CountTable, x: complex, y: complex, z: float) -> SeriesValue:
    """``sum q(i, j; n) x^i y^j z^n`` truncated at the table length."""
    _check_region(table.S, x, y, z)
    total = 0j
    for n, layer in enumerate(table.layers):
        s = sum(c * x**i * y**j for (i, j), c in layer.items())
        total += s * z**n
    return SeriesValue(complex(total), tail_bound(table.S, z, table.N))


def eval_section(A: np.ndarray, t, z: float) -> np.ndarray:
    """Evaluate ``sum_n z^n sum_i A[n, i] t^i`` for an array of t."""
    t = np.asarray(t, dtype=complex)
    N = A.shape[0] - 1
    # coefficients of t^i, accumulated over n
    coef = (A * (z ** np.arange(N + 1))[:, None]).sum(axis=0)
    out = np.polynomial.polynomial.polyval(t, coef)
    return out


def functional_eq_residual(S: StepSet, z: float, x: complex, y: complex, table: CountTable, tol: float = 1e-8) -> float:
    """``|K(x,0)Q(x,0) + K(0,y)Q(0,y) - K(0,0)Q(0,0) - xy|`` at a curve point.

    Raises
    ------
    NotOnCurve
        If ``|K(x, y)|`` exceeds ``tol``.
    """
    K = kernel_data(S, z)
    if abs(K.K(x, y)) > tol:
        raise NotOnCurve(f"|K(x, y)| = {abs(K.K(x, y)):.3g}")
    _check_region(S, x, y, z)
    qx = eval_Q(table, x, 0, z).value
    qy = eval_Q(table, 0, y, z).value
    q0 = eval_Q(table, 0, 0, z).value
    return float(abs(K.Kx0(x) * qx + K.K0y(y) * qy - K.K00 * q0 - x * y))


def residual_bound(K: KernelData, x, y, N: int) -> float:
    """Tail contribution to :func:`functional_eq_residual` at (x, y)."""
    tb = tail_bound(K.S, K.z, N)
    return tb * (abs(K.Kx0(x)) + abs(K.K0y(y)) + abs(K.K00))


def counts_csv(table: CountTable) -> str:
    """CSV with columns n, i, j, count (decimal strings)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "i", "j", "count"])
    for n, layer in enumerate(table.layers):
        for (i, j) in sorted(layer):
            w.writerow([n, i, j, str(layer[(i, j)])])
    return buf.getvalue()
