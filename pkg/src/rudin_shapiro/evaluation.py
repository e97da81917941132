"""Evaluation of ±1 polynomials on the unit circle.

Three evaluators with different cost/accuracy trade-offs:

* :func:`eval_unit_circle` -- whole equispaced grid by one zero-padded FFT.
* :func:`eval_point` -- compensated (double-double) Horner at arbitrary
  angles; the reference used wherever a sign near a level is in doubt.
* :func:`rs_eval` -- ``(P_k, Q_k)`` at arbitrary angles through the doubling
  recursion, ``O(k)`` per angle; used to bisect many brackets at once.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import mpmath
import numba
import numpy as np
import scipy.fft

from .core import CapacityError, SignSequence

MAX_GRID = 1 << 25


def _coeffs(poly) -> np.ndarray:
    if isinstance(poly, SignSequence):
        return poly.coeffs
    return np.asarray(poly)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class CircleGrid:
    """Samples at ``t_i = 2*pi*i/N``, ``i = 0 .. N-1``."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    def shifted(self, steps: int) -> "CircleGrid":
        """Grid of ``t -> f(t + 2*pi*steps/N)``."""
        return CircleGrid(np.roll(self.values, -steps))

    def __len__(self):
        return self.size


@dataclass(frozen=True, eq=False)
class Autocorrelation:
    """Aperiodic autocorrelations ``c[m] = sum_j a_j a_{j+m}``."""

    c: np.ndarray

    @property
    def n(self) -> int:
        return self.c.size

    def tolist(self) -> list[int]:
        return [int(x) for x in self.c]


def eval_unit_circle(poly, N: int, workers: int | None = None) -> CircleGrid:
    """Values ``sum_j a_j exp(i t_m j)`` on an ``N``-point grid."""
    a = _coeffs(poly)
    if not _is_power_of_two(N):
        raise ValueError(f"grid size must be a power of two, got {N}")
    if N < a.size:
        raise ValueError(f"grid size {N} is smaller than polynomial length {a.size}")
    if N > MAX_GRID:
        raise CapacityError(f"grid size {N} exceeds MAX_GRID={MAX_GRID}")
    # norm="forward" leaves the inverse transform unscaled
    values = scipy.fft.ifft(a.astype(np.float64), n=N, norm="forward", workers=workers)
    return CircleGrid(values)


def modulus_squared(grid: CircleGrid) -> CircleGrid:
    v = grid.values
    if not np.iscomplexobj(v):
        return CircleGrid(v * v)
    return CircleGrid(v.real * v.real + v.imag * v.imag)


def rs_eval(k: int, t) -> tuple[np.ndarray, np.ndarray]:
    """``(P_k(e^{it}), Q_k(e^{it}))`` through the doubling recursion."""
    t = np.asarray(t, dtype=np.float64)
    p = np.ones(t.shape, dtype=np.complex128)
    q = np.ones(t.shape, dtype=np.complex128)
    for m in range(k):
        # 2**m * t is exact; libm reduces the large argument accurately
        arg = np.ldexp(t, m)
        w = np.cos(arg) + 1j * np.sin(arg)
        wq = w * q
        p, q = p + wq, p - wq
    return p, q


# -- compensated Horner ----------------------------------------------------

@numba.njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@numba.njit(cache=True, inline="always")
def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


@numba.njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@numba.njit(cache=True, inline="always")
def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    hi = s + e
    return hi, e - (hi - s)


@numba.njit(cache=True, inline="always")
def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    hi = p + e
    return hi, e - (hi - p)


@numba.njit(cache=True)
def _horner_dd(coeffs, zr_hi, zr_lo, zi_hi, zi_lo, out):
    for m in range(zr_hi.size):
        xh, xl, yh, yl = 0.0, 0.0, 0.0, 0.0
        for j in range(coeffs.size - 1, -1, -1):
            # (x + iy)(zr + i zi) + a_j
            a1, a2 = _dd_mul(xh, xl, zr_hi[m], zr_lo[m])
            b1, b2 = _dd_mul(yh, yl, zi_hi[m], zi_lo[m])
            c1, c2 = _dd_mul(xh, xl, zi_hi[m], zi_lo[m])
            d1, d2 = _dd_mul(yh, yl, zr_hi[m], zr_lo[m])
            rh, rl = _dd_add(a1, a2, -b1, -b2)
            xh, xl = _dd_add(rh, rl, float(coeffs[j]), 0.0)
            yh, yl = _dd_add(c1, c2, d1, d2)
        out[m, 0] = xh
        out[m, 1] = xl
        out[m, 2] = yh
        out[m, 3] = yl


def _dd(x) -> tuple[float, float]:
    hi = float(x)
    return hi, float(x - hi)


def _unit_points_dd(turns_or_angles, as_turns: bool):
    with mpmath.workdps(40):
        parts = []
        for t in turns_or_angles:
            if as_turns:
                z = mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)
            else:
                z = mpmath.expj(mpmath.mpf(float(t)))
            parts.append(_dd(z.real) + _dd(z.imag))
    arr = np.array(parts, dtype=np.float64).reshape(-1, 4)
    return arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(), arr[:, 3].copy()


def _horner(poly, points) -> np.ndarray:
    a = np.ascontiguousarray(_coeffs(poly), dtype=np.float64)
    out = np.empty((points[0].size, 4))
    _horner_dd(a, *points, out)
    return (out[:, 0] + out[:, 1]) + 1j * (out[:, 2] + out[:, 3])


def eval_point(poly, t):
    """Polynomial value at ``e^{it}`` by double-double Horner.

    ``e^{it}`` is formed to 40 digits from the exact binary value of ``t``.
    Accepts a scalar or an array of angles; returns the same shape.
    """
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    values = _horner(poly, _unit_points_dd(ts.ravel(), as_turns=False)).reshape(ts.shape)
    return complex(values[0]) if scalar else values


def eval_root_of_unity(poly, j: int, m: int) -> complex:
    """Value at ``exp(2*pi*i*j/m)``, with the point taken from the exact fraction."""
    from fractions import Fraction

    return complex(_horner(poly, _unit_points_dd([Fraction(j, m)], as_turns=True))[0])


# -- autocorrelation -------------------------------------------------------

DIRECT_AUTOCORRELATION_MAX = 1 << 12


def autocorrelation(poly) -> Autocorrelation:
    """Exact integer aperiodic autocorrelation.

    Short inputs use direct summation; longer ones go through an FFT whose
    output is rounded and accepted only if every rounding residual is
    below 0.5.
    """
    a = np.asarray(_coeffs(poly), dtype=np.int64)
    n = a.size
    if n <= DIRECT_AUTOCORRELATION_MAX:
        return Autocorrelation(np.correlate(a, a, mode="full")[n - 1:].copy())
    size = scipy.fft.next_fast_len(2 * n, real=True)
    spectrum = scipy.fft.rfft(a.astype(np.float64), size)
    raw = scipy.fft.irfft(spectrum.real ** 2 + spectrum.imag ** 2, size)[:n]
    c = np.rint(raw)
    if np.max(np.abs(raw - c)) >= 0.5:
        return Autocorrelation(np.correlate(a, a, mode="full")[n - 1:].copy())
    return Autocorrelation(c.astype(np.int64))


def modulus_squared_from_autocorrelation(ac: Autocorrelation, t) -> np.ndarray:
    """``c_0 + 2 sum_{m>=1} c_m cos(m t)`` at arbitrary angles."""
    t = np.asarray(t, dtype=np.float64)
    m = np.arange(1, ac.n)
    return ac.c[0] + 2 * np.cos(np.multiply.outer(t, m)) @ ac.c[1:].astype(np.float64)


def grid_from_autocorrelation(ac: Autocorrelation, N: int) -> CircleGrid:
    """``R`` on an ``N``-grid from autocorrelations (needs ``N >= n``)."""
    spectrum = np.zeros(N)
    spectrum[:ac.n] = ac.c
    spectrum[0] = ac.c[0] / 2
    return CircleGrid(2 * scipy.fft.ifft(spectrum, norm="forward").real)


# -- export ----------------------------------------------------------------

def write_grid_binary(grid: CircleGrid, path) -> None:
    """Little-endian float64; complex grids are interleaved ``re, im``."""
    v = grid.values
    if np.iscomplexobj(v):
        v = np.column_stack([v.real, v.imag]).ravel()
    np.asarray(v, dtype="<f8").tofile(path)


def read_grid_binary(path, complex_values: bool = False) -> CircleGrid:
    v = np.fromfile(path, dtype="<f8")
    if complex_values:
        v = v[0::2] + 1j * v[1::2]
    return CircleGrid(v)


def write_grid_csv(grid: CircleGrid, path) -> None:
    """Header ``t,value`` (``t,re,im`` for complex grids)."""
    t = grid.angles()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if grid.is_complex:
            w.writerow(["t", "re", "im"])
            for ti, v in zip(t, grid.values):
                w.writerow([repr(float(ti)), repr(float(v.real)), repr(float(v.imag))])
        else:
            w.writerow(["t", "value"])
            for ti, v in zip(t, grid.values):
                w.writerow([repr(float(ti)), repr(float(v))])


def write_autocorrelation_csv(ac: Autocorrelation, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "c_m"])
        for m, c in enumerate(ac.c):
            w.writerow([m, int(c)])


def read_autocorrelation_csv(path) -> Autocorrelation:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return Autocorrelation(np.array([int(r["c_m"]) for r in rows], dtype=np.int64))
