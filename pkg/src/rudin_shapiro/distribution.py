"""Value distribution, L_q moments and Mahler measure on the unit circle."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import SignSequence, build_rs_pair
from .evaluation import MAX_GRID, eval_unit_circle, modulus_squared


class RootFindingError(RuntimeError):
    """Polynomial roots could not be computed to the required residual."""


def _sequence(k_or_seq, which: str = "p") -> SignSequence:
    if isinstance(k_or_seq, SignSequence):
        return k_or_seq
    pair = build_rs_pair(int(k_or_seq))
    return pair.p if which == "p" else pair.q


def _default_grid(n: int) -> int:
    return 16 * n


# -- one-dimensional: R_k / (2n) against the uniform law --------------------

@dataclass(frozen=True, eq=False)
class Histogram1D:
    edges: np.ndarray
    mass: np.ndarray
    ks_statistic: float
    mean: float
    grid_size: int

    @property
    def reference(self) -> np.ndarray:
        return np.diff(self.edges)

    def interval_mass(self, alpha: float, beta: float) -> float:
        """Mass of bins lying inside ``[alpha, beta]`` (bin-aligned intervals)."""
        lo, hi = self.edges[:-1], self.edges[1:]
        inside = (lo >= alpha - 1e-12) & (hi <= beta + 1e-12)
        return float(self.mass[inside].sum())


def ks_uniform(x) -> float:
    """One-sample Kolmogorov-Smirnov distance from the uniform law on [0, 1]."""
    x = np.sort(np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0))
    m = x.size
    i = np.arange(1, m + 1)
    return float(min(1.0, max(np.max(i / m - x), np.max(x - (i - 1) / m))))


def normalized_modulus(k_or_seq, N: int | None = None, which: str = "p", workers=None) -> np.ndarray:
    """``R_k(t_i) / (2n)`` on the grid."""
    seq = _sequence(k_or_seq, which)
    N = _default_grid(seq.n) if N is None else N
    return modulus_squared(eval_unit_circle(seq, N, workers)).values / (2 * seq.n)


def value_distribution(k_or_seq, N: int | None = None, bins: int = 64, which: str = "p",
                       workers=None) -> Histogram1D:
    seq = _sequence(k_or_seq, which)
    N = _default_grid(seq.n) if N is None else N
    if N < 4 * seq.n:
        raise ValueError("grid size must be at least 4n")
    x = np.clip(normalized_modulus(seq, N, workers=workers), 0.0, 1.0)
    counts, edges = np.histogram(x, bins=bins, range=(0.0, 1.0))
    return Histogram1D(edges, counts / x.size, ks_uniform(x), float(x.mean()), N)


def level_set_measure(values, alpha: float, beta: float) -> float:
    """Lebesgue measure of ``{t : alpha <= value(t) <= beta}`` from grid samples."""
    values = np.asarray(values)
    return 2 * math.pi * np.count_nonzero((values >= alpha) & (values <= beta)) / values.size


# -- two-dimensional: P_k / sqrt(2n) against density 2 on the disk ----------

def _quadrant_area(a, b):
    """Area of ``{0 <= X <= a, 0 <= Y <= b, X^2 + Y^2 <= 1}`` for ``a, b >= 0``."""
    a = np.minimum(a, 1.0)
    b = np.minimum(b, 1.0)
    c = np.sqrt(np.maximum(1.0 - b * b, 0.0))

    def primitive(x):
        return 0.5 * (x * np.sqrt(np.maximum(1.0 - x * x, 0.0)) + np.arcsin(x))

    outside = a * a + b * b > 1.0
    return np.where(outside, b * c + primitive(a) - primitive(np.minimum(c, a)), a * b)


def _signed_corner_area(x, y):
    return np.sign(x) * np.sign(y) * _quadrant_area(np.abs(x), np.abs(y))


def disk_cell_areas(edges) -> np.ndarray:
    """Exact areas of ``cell ∩ D`` for the square cells of ``edges x edges``."""
    x0, y0 = np.meshgrid(edges[:-1], edges[:-1], indexing="ij")
    x1, y1 = np.meshgrid(edges[1:], edges[1:], indexing="ij")
    return (_signed_corner_area(x1, y1) - _signed_corner_area(x0, y1)
            - _signed_corner_area(x1, y0) + _signed_corner_area(x0, y0))


@dataclass(frozen=True, eq=False)
class Histogram2D:
    """Cell masses of ``P(e^{it}) / sqrt(2n)`` over ``[-1, 1]^2``.

    ``mass[i, j]`` counts real part in x-bin ``i`` and imaginary part in
    y-bin ``j``; ``reference`` is the limit mass ``2 area(cell ∩ D) / (2 pi)``.
    """

    edges: np.ndarray
    mass: np.ndarray
    reference: np.ndarray
    grid_size: int

    @property
    def max_cell_error(self) -> float:
        return float(np.max(np.abs(self.mass - self.reference)))

    def annulus_mass(self, values, alpha: float, beta: float) -> float:
        w2 = np.abs(values) ** 2
        return float(np.count_nonzero((w2 >= alpha) & (w2 <= beta)) / w2.size)


def normalized_values(k_or_seq, N: int | None = None, which: str = "p", workers=None) -> np.ndarray:
    seq = _sequence(k_or_seq, which)
    N = _default_grid(seq.n) if N is None else N
    return eval_unit_circle(seq, N, workers).values / math.sqrt(2 * seq.n)


def planar_distribution(k_or_seq, N: int | None = None, G: int = 16, which: str = "p",
                        workers=None) -> Histogram2D:
    seq = _sequence(k_or_seq, which)
    N = _default_grid(seq.n) if N is None else N
    if N < 4 * seq.n:
        raise ValueError("grid size must be at least 4n")
    if G < 8:
        raise ValueError("need at least 8 cells per axis")
    w = normalized_values(seq, N, workers=workers)
    edges = np.linspace(-1.0, 1.0, G + 1)
    counts, _, _ = np.histogram2d(np.clip(w.real, -1, 1), np.clip(w.imag, -1, 1), bins=[edges, edges])
    return Histogram2D(edges, counts / w.size, disk_cell_areas(edges) / math.pi, N)


# -- moments ------------------------------------------------------------------

@dataclass(frozen=True)
class MomentReport:
    q: float
    estimate: float
    grid_size: int
    exact: bool
    predicted: float
    converged: bool = True

    @property
    def ratio(self) -> float:
        return self.estimate / self.predicted


def saffari_prediction(n: int, q: float) -> float:
    """Limit size of ``M_q(P_k)``: ``sqrt(2n) / (q/2 + 1)**(1/q)``."""
    return math.sqrt(2 * n) / (q / 2 + 1) ** (1 / q)


def power_mean(r_values, q: float) -> float:
    """``M_q`` from samples of ``|f|^2``; ``q = 0`` gives the geometric mean."""
    r = np.asarray(r_values, dtype=np.float64)
    if q == 0:
        return float(np.exp(0.5 * np.mean(np.log(r))))
    return float(np.mean(r ** (q / 2)) ** (1 / q))


def _is_even_integer(q: float) -> bool:
    return float(q).is_integer() and int(q) % 2 == 0


def moment(k_or_seq, q: float, N: int | None = None, which: str = "p", *, rtol: float = 1e-9,
           max_grid: int = 1 << 23, workers=None) -> MomentReport:
    """Rectangle-rule ``M_q``.

    For even integer ``q = 2p`` the rule is exact once ``N > p (n - 1)``, and
    ``N`` is raised to that size if needed; otherwise ``N`` is doubled until
    two estimates agree to ``rtol``.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    seq = _sequence(k_or_seq, which)
    n = seq.n
    N = _default_grid(n) if N is None else N

    def estimate(size):
        return power_mean(modulus_squared(eval_unit_circle(seq, size, workers)).values, q)

    if _is_even_integer(q):
        p = int(q) // 2
        while N <= p * (n - 1):
            N *= 2
        return MomentReport(q, estimate(N), N, True, saffari_prediction(n, q))

    current = estimate(N)
    converged = False
    while 2 * N <= max_grid:
        nxt = estimate(2 * N)
        N *= 2
        converged = abs(nxt - current) <= rtol * abs(nxt)
        current = nxt
        if converged:
            break
    return MomentReport(q, current, N, False, saffari_prediction(n, q), converged)


# -- Mahler measure -------------------------------------------------------------

def deflate_unit_roots(coeffs) -> tuple[np.ndarray, list[complex]]:
    """Strip exact roots at 1, -1 and the pair ±i from an integer polynomial.

    Those factors are monic with Mahler measure 1, so removing them leaves
    ``M_0`` unchanged while taking the log singularities off the circle.
    """
    a = [int(c) for c in coeffs]
    removed: list[complex] = []
    while len(a) > 1:
        s = np.zeros(4, dtype=object)
        for j, c in enumerate(a):
            s[j % 4] += c
        if sum(s) == 0:
            divisor, roots = [-1, 1], [1]
        elif s[0] - s[1] + s[2] - s[3] == 0:
            divisor, roots = [1, 1], [-1]
        elif s[0] - s[2] == 0 and s[1] - s[3] == 0:
            divisor, roots = [1, 0, 1], [1j, -1j]
        else:
            break
        a = _synthetic_divide(a, divisor)
        removed.extend(roots)
    return np.array(a, dtype=np.float64), removed


def _synthetic_divide(a: list[int], divisor: list[int]) -> list[int]:
    # long division from the top degree; divisor is monic
    rem = list(a)
    d = len(divisor) - 1
    quotient = [0] * (len(a) - d)
    for i in range(len(a) - 1, d - 1, -1):
        c = rem[i]
        quotient[i - d] = c
        for m in range(d + 1):
            rem[i - d + m] -= c * divisor[m]
    if any(rem[:d]):
        raise ArithmeticError("not divisible")
    return quotient


@dataclass(frozen=True)
class MahlerReport:
    estimate: float
    grid_size: int
    clip: float
    grid_sensitivity: float
    clip_sensitivity: float
    deflated_roots: tuple = ()

    @property
    def flagged(self) -> bool:
        return max(self.grid_sensitivity, self.clip_sensitivity) > 1e-6


def _log_mean(coeffs, N: int, clip: float, workers=None) -> float:
    values = np.abs(eval_unit_circle(coeffs, N, workers).values)
    with np.errstate(divide="ignore"):
        logs = np.log(values)
    return float(np.mean(np.maximum(logs, -clip)))


def mahler_measure(k_or_coeffs, N: int | None = None, clip: float = 40.0, *, adaptive: bool = True,
                   tol: float = 1e-12, max_grid: int = 1 << 23, which: str = "p",
                   workers=None) -> MahlerReport:
    """``exp`` of the rectangle-rule mean of ``max(log|f|, -clip)``.

    Integer polynomials first lose their exact roots at ±1 and ±i. With
    ``adaptive`` the grid is doubled until the estimate moves by less than
    ``tol`` (relative) or ``max_grid`` is reached. The reported
    sensitivities compare against doubling the grid and the clip.
    """
    if isinstance(k_or_coeffs, (int, np.integer)):
        k_or_coeffs = _sequence(k_or_coeffs, which)
    coeffs = k_or_coeffs.coeffs if isinstance(k_or_coeffs, SignSequence) else np.asarray(k_or_coeffs)
    n = coeffs.size
    N = _default_grid(n) if N is None else N
    if N < 4 * n and n > 1:
        raise ValueError("grid size must be at least 4n")
    if clip <= 0:
        raise ValueError("clip must be positive")
    removed: list[complex] = []
    if np.all(np.asarray(coeffs) == np.round(coeffs)):
        coeffs, removed = deflate_unit_roots(coeffs)
    coeffs = np.asarray(coeffs, dtype=np.float64)

    current = _log_mean(coeffs, N, clip, workers)
    doubled = _log_mean(coeffs, 2 * N, clip, workers) if 2 * N <= MAX_GRID else current
    while adaptive and abs(math.expm1(doubled - current)) > tol and 4 * N <= max_grid:
        N *= 2
        current, doubled = doubled, _log_mean(coeffs, 2 * N, clip, workers)
    clipped = _log_mean(coeffs, N, 2 * clip, workers)
    return MahlerReport(
        estimate=math.exp(current),
        grid_size=N,
        clip=clip,
        grid_sensitivity=abs(math.expm1(doubled - current)),
        clip_sensitivity=abs(math.expm1(clipped - current)),
        deflated_roots=tuple(removed),
    )


def _root_residuals(desc, roots) -> np.ndarray:
    # roots outside the disk are measured on the reversed polynomial at 1/z,
    # i.e. |f(z)| / |z|**deg, so large |z|**deg does not swamp the test
    outside = np.abs(roots) > 1
    res = np.abs(np.polyval(desc, np.where(outside, 0, roots)))
    res[outside] = np.abs(np.polyval(desc[::-1], 1 / roots[outside]))
    return res


def mahler_via_roots(coeffs, cap: int = 8, polish: int = 3) -> float:
    """``|leading| * prod max(1, |z_j|)`` over companion-matrix roots.

    Roots are Newton-polished and must satisfy ``|f(z_j)| < 1e-8 sqrt(n)``,
    with ``f`` replaced by its reversal at ``1/z_j`` when ``|z_j| > 1``.
    """
    a = np.asarray(coeffs.coeffs if isinstance(coeffs, SignSequence) else coeffs, dtype=np.float64)
    n = a.size
    if n > 1 << cap:
        raise ValueError(f"polynomial length {n} exceeds 2**{cap}")
    nz = np.flatnonzero(a)
    if nz.size == 0:
        raise ValueError("zero polynomial")
    a = a[nz[0]:nz[-1] + 1]
    lead = abs(a[-1])
    if a.size == 1:
        return float(lead)
    desc = a[::-1]
    roots = np.roots(desc).astype(np.complex128)
    deriv = np.polyder(desc)
    for _ in range(polish):
        fp = np.polyval(deriv, roots)
        ok = fp != 0
        step = np.zeros_like(roots)
        step[ok] = np.polyval(desc, roots[ok]) / fp[ok]
        better = _root_residuals(desc, roots - step) < _root_residuals(desc, roots)
        roots = np.where(better, roots - step, roots)
    residual = np.max(_root_residuals(desc, roots))
    if not np.isfinite(residual) or residual >= 1e-8 * math.sqrt(n):
        raise RootFindingError(f"root residual {residual:.3g} too large")
    return float(lead * np.prod(np.maximum(1.0, np.abs(roots))))


# -- export -------------------------------------------------------------------

def histogram1d_csv(h: Histogram1D) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lo", "hi", "mass", "reference"])
    for lo, hi, m, r in zip(h.edges[:-1], h.edges[1:], h.mass, h.reference):
        w.writerow([repr(float(lo)), repr(float(hi)), repr(float(m)), repr(float(r))])
    return buf.getvalue()


def histogram2d_csv(h: Histogram2D) -> str:
    e = h.edges
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x_lo", "x_hi", "y_lo", "y_hi", "mass", "reference"])
    for i in range(e.size - 1):
        for j in range(e.size - 1):
            w.writerow([repr(float(e[i])), repr(float(e[i + 1])), repr(float(e[j])),
                        repr(float(e[j + 1])), repr(float(h.mass[i, j])),
                        repr(float(h.reference[i, j]))])
    return buf.getvalue()


def write_histogram1d_csv(h: Histogram1D, path) -> None:
    Path(path).write_text(histogram1d_csv(h))


def write_histogram2d_csv(h: Histogram2D, path) -> None:
    Path(path).write_text(histogram2d_csv(h))
