"""Certified lower bounds on the number of solutions of ``R_k(t) = level``.

A solution is counted only when it is certified, in one of two ways:

* a strict sign change of ``R - level`` between two consecutive samples
  whose distance from the level exceeds the ambiguity band; or
* an exact zero found by integer arithmetic at a quarter turn
  (``t`` in {0, pi/2, pi, 3pi/2}) where ``P(t)`` is a Gaussian integer.

Open sign-change brackets are pairwise disjoint, and an exact zero is
added only when it lies outside every bracket, so the count is a count of
distinct zeros. Samples inside the band are never trusted; the result is
always a lower bound.

Positions on the circle are integer *keys*: grid sample ``i`` has key
``i * SUBDIVISIONS`` and the points used to subdivide an ambiguous cell
take the keys in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import build_rs_pair, exact_values_at_quarter_turns
from .evaluation import (
    CircleGrid,
    eval_point,
    eval_root_of_unity,
    eval_unit_circle,
    modulus_squared,
    rs_eval,
)

SUBDIVISIONS = 16
AMBIGUITY_REL = 1e-7
EVAL_REL = 1e-6
# relative size below which a double-double boundary value is not trusted
BOUNDARY_REL = 1e-12
DEFAULT_OVERSAMPLE = 16
ESCALATED_OVERSAMPLE = 64


class DomainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CrossingReport:
    """Certified crossings of one level, stored column-wise.

    ``lo_keys``/``hi_keys`` are the bracketing sample keys (``hi_key`` may
    exceed one full turn for the bracket that wraps through ``t = 0``).
    Exact zeros have ``lo_key == hi_key`` and ``exact`` set.
    """

    level: float
    certified_count: int
    grid_size: int
    ambiguous_cells: int
    angles: np.ndarray
    residuals: np.ndarray
    lo_keys: np.ndarray
    hi_keys: np.ndarray
    exact: np.ndarray
    lo_signs: np.ndarray
    refined: bool = False
    subdivisions: int = SUBDIVISIONS

    @property
    def cells(self) -> np.ndarray:
        return (self.lo_keys // self.subdivisions) % self.grid_size

    @property
    def key_angle(self) -> float:
        return 2 * math.pi / (self.grid_size * self.subdivisions)

    @property
    def crossings(self) -> list[tuple[int, float, float]]:
        """``(cell, angle, residual)`` per certified crossing, by angle."""
        return list(zip(self.cells.tolist(), self.angles.tolist(), self.residuals.tolist()))

    def brackets(self) -> np.ndarray:
        return np.column_stack([self.lo_keys, self.hi_keys]) * self.key_angle


def rs_modulus_evaluator(k: int, which: str = "p"):
    """``t -> R_k(t)`` through the doubling recursion."""
    def evaluate(t):
        p, q = rs_eval(k, t)
        v = p if which == "p" else q
        return v.real ** 2 + v.imag ** 2
    return evaluate


def horner_modulus_evaluator(poly):
    """``t -> |f(e^{it})|^2`` with the double-double Horner oracle."""
    def evaluate(t):
        v = np.asarray(eval_point(poly, np.asarray(t, dtype=np.float64)))
        return v.real ** 2 + v.imag ** 2
    return evaluate


def count_level_crossings(samples: CircleGrid, level, refine: bool = False, *,
                          evaluator=None, exact_zeros=(), tau_amb: float | None = None,
                          xtol: float = 1e-13) -> CrossingReport:
    """Count certified solutions of ``R(t) = level`` from circular samples.

    Parameters
    ----------
    samples : CircleGrid
        Real samples of ``R`` at ``t_i = 2 pi i / N``; ``sample[N]`` is
        taken to be ``sample[0]``.
    level : float or Fraction
    refine : bool
        Bisect each certified bracket with ``evaluator`` down to ``xtol``
        (never coarser than ``2 pi / (64 N)``).
    evaluator : callable, optional
        Vectorized ``t -> R(t)``. Needed for refinement and to subdivide
        cells whose two endpoints both fall inside the ambiguity band;
        without it such cells stay unresolved.
    exact_zeros : iterable of int
        Grid indices where ``R == level`` was established exactly.
    tau_amb : float, optional
        Ambiguity band half-width; defaults to ``1e-7 * mean(samples)``
        (the mean of ``R_k`` over any grid of size ``>= n`` is ``n``).
    """
    values = np.asarray(samples.values, dtype=np.float64)
    N = values.size
    if N == 0:
        raise ValueError("no samples")
    S = SUBDIVISIONS
    total = N * S
    unit = 2 * math.pi / total
    level_f = float(level)
    if tau_amb is None:
        scale = float(np.mean(np.abs(values))) or abs(level_f) or 1.0
        tau_amb = AMBIGUITY_REL * scale

    d = values - level_f
    certain = np.abs(d) >= tau_amb
    keys = np.arange(N, dtype=np.int64) * S
    ambiguous = np.flatnonzero(~certain & ~np.roll(certain, -1))
    unresolved = ambiguous.size
    point_keys = keys[certain]
    point_d = d[certain]

    if ambiguous.size and evaluator is not None:
        sub_keys = (ambiguous[:, None] * S + np.arange(1, S)).ravel()
        sub_d = np.asarray(evaluator(sub_keys * unit), dtype=np.float64) - level_f
        sub_certain = np.abs(sub_d) >= tau_amb
        chain = np.zeros((ambiguous.size, S + 1), dtype=bool)
        chain[:, 1:S] = sub_certain.reshape(-1, S - 1)
        unresolved = int(np.count_nonzero(np.any(~chain[:, :-1] & ~chain[:, 1:], axis=1)))
        point_keys = np.concatenate([point_keys, sub_keys[sub_certain]])
        point_d = np.concatenate([point_d, sub_d[sub_certain]])
        order = np.argsort(point_keys, kind="stable")
        point_keys, point_d = point_keys[order], point_d[order]

    signs = np.sign(point_d)
    if signs.size >= 2:
        change = np.flatnonzero(signs != np.roll(signs, -1))
    else:
        change = np.empty(0, dtype=np.int64)
    lo_keys = point_keys[change]
    nxt = (change + 1) % max(point_keys.size, 1)
    hi_keys = point_keys[nxt] + np.where(nxt <= change, total, 0)
    lo_sign = signs[change]

    exact_keys = np.array(sorted({int(i) % N for i in exact_zeros}), dtype=np.int64) * S
    if exact_keys.size and lo_keys.size:
        inside = np.zeros(exact_keys.size, dtype=bool)
        for shift in (0, total):
            e = exact_keys + shift
            pos = np.searchsorted(lo_keys, e, side="left") - 1
            ok = pos >= 0
            inside[ok] |= (e[ok] > lo_keys[pos[ok]]) & (e[ok] < hi_keys[pos[ok]])
        exact_keys = exact_keys[~inside]

    if refine:
        if evaluator is None:
            raise ValueError("refinement needs an evaluator")
        xtol = min(xtol, 2 * math.pi / (64 * N))
        angles = _bisect(evaluator, level_f, lo_keys * unit, hi_keys * unit, lo_sign, xtol)
        residuals = np.asarray(evaluator(angles), dtype=np.float64) - level_f \
            if angles.size else np.empty(0)
    else:
        # linear interpolation between the bracketing samples
        lo_d = point_d[change]
        hi_d = point_d[nxt]
        frac = lo_d / (lo_d - hi_d) if change.size else np.empty(0)
        angles = np.mod((lo_keys + frac * (hi_keys - lo_keys)) * unit, 2 * math.pi)
        residuals = np.full(angles.size, np.nan)

    all_angles = np.concatenate([angles, exact_keys * unit])
    order = np.argsort(all_angles, kind="stable")
    return CrossingReport(
        level=level_f,
        certified_count=int(lo_keys.size + exact_keys.size),
        grid_size=N,
        ambiguous_cells=int(unresolved),
        angles=all_angles[order],
        residuals=np.concatenate([residuals, np.zeros(exact_keys.size)])[order],
        lo_keys=np.concatenate([lo_keys, exact_keys])[order],
        hi_keys=np.concatenate([hi_keys, exact_keys])[order],
        exact=np.concatenate([np.zeros(lo_keys.size, bool), np.ones(exact_keys.size, bool)])[order],
        lo_signs=np.concatenate([lo_sign, np.zeros(exact_keys.size)]).astype(np.int8)[order],
        refined=bool(refine),
    )


def _bisect(evaluator, level, lo, hi, lo_sign, xtol):
    lo = lo.astype(np.float64).copy()
    hi = hi.astype(np.float64).copy()
    active = np.ones(lo.size, dtype=bool)
    while True:
        active &= (hi - lo) > xtol
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        mid = 0.5 * (lo[idx] + hi[idx])
        # midpoint no longer splits the bracket in floating point
        stuck = (mid <= lo[idx]) | (mid >= hi[idx])
        s = np.sign(np.asarray(evaluator(mid), dtype=np.float64) - level)
        hit = (s == 0) | stuck
        same = (s == lo_sign[idx]) & ~hit
        lo[idx[same]] = mid[same]
        hi[idx[~same & ~hit]] = mid[~same & ~hit]
        lo[idx[hit]] = hi[idx[hit]] = mid[hit]
    return np.mod(0.5 * (lo + hi), 2 * math.pi)


# -- Theorem-level verifiers -------------------------------------------------

def _theorem_22_bound(n: int, eta: Fraction, epsilon: Fraction) -> int:
    return max(0, math.ceil((Fraction(1, 2) - abs(eta) - epsilon) * n / 2))


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, or decimal string/float."""
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True, eq=False)
class LevelAnalysis:
    """Crossings of one level by ``R_k`` plus their n-interval credits."""

    k: int
    which: str
    level: Fraction
    oversample: int
    report: CrossingReport
    hit_intervals: frozenset = field(default_factory=frozenset)

    @property
    def n(self) -> int:
        return 1 << self.k


def analyze_level(k: int, level, oversample: int = DEFAULT_OVERSAMPLE, *, which: str = "p",
                  refine: bool = False, workers=None) -> LevelAnalysis:
    """Crossings of ``R_k`` at ``level`` on a grid of ``oversample * n`` points.

    Each crossing also credits the closed intervals ``[t_j, t_{j+1}]``,
    ``t_j = 2 pi j / n``, that provably contain it.
    """
    if oversample < 1 or oversample & (oversample - 1):
        raise ValueError("oversample must be a power of two")
    pair = build_rs_pair(k)
    seq = pair.p if which == "p" else pair.q
    n = pair.n
    N = oversample * n
    level = as_fraction(level)
    samples = modulus_squared(eval_unit_circle(seq, N, workers))

    quarter = exact_values_at_quarter_turns(seq.coeffs)
    exact_r = {m: re * re + im * im for m, (re, im) in quarter.items()}
    exact_zeros = [m * N // 4 for m, r in exact_r.items() if r == level and N % 4 == 0]

    report = count_level_crossings(samples, level, refine, evaluator=rs_modulus_evaluator(k, which),
                                   exact_zeros=exact_zeros, tau_amb=AMBIGUITY_REL * n)

    def boundary_sign(j: int):
        j %= n
        if (4 * j) % n == 0:
            diff = exact_r[(4 * j) // n] - level
            return (diff > 0) - (diff < 0)
        v = eval_root_of_unity(seq, j, n)
        diff = abs(v) ** 2 - float(level)
        if abs(diff) < BOUNDARY_REL * n:
            return None
        return 1 if diff > 0 else -1

    hits = _credit_intervals(report, n, oversample, boundary_sign)
    return LevelAnalysis(k, which, level, oversample, report, frozenset(hits))


def _credit_intervals(report: CrossingReport, n: int, oversample: int, boundary_sign) -> set:
    S = report.subdivisions
    per_interval = oversample * S
    lo, hi, exact = report.lo_keys, report.hi_keys, report.exact
    hits: set[int] = set()

    e = lo[exact]
    on_boundary = e % per_interval == 0
    hits.update(((e // per_interval) % n).tolist())
    hits.update((((e[on_boundary] // per_interval) - 1) % n).tolist())

    sc = ~exact
    lo, hi, lo_signs = lo[sc], hi[sc], report.lo_signs[sc]
    first = lo // per_interval
    inner = (hi - 1) // per_interval - first
    hits.update((first[inner == 0] % n).tolist())

    straddling = np.flatnonzero(inner > 0)
    if straddling.size:
        for b in straddling:
            lo_key, hi_key = int(lo[b]), int(hi[b])
            s_lo = int(lo_signs[b])
            points = [(lo_key, s_lo)]
            for m in range(int(first[b]) + 1, int(first[b]) + 1 + int(inner[b])):
                points.append((m * per_interval, boundary_sign(m)))
            points.append((hi_key, -s_lo))
            for key, s in points[1:-1]:
                if s == 0:
                    j = key // per_interval
                    hits.update({j % n, (j - 1) % n})
            for (ka, sa), (kb, sb) in zip(points, points[1:]):
                if sa in (1, -1) and sb in (1, -1) and sa != sb:
                    hits.add((ka // per_interval) % n)
    return hits


@dataclass(frozen=True, eq=False)
class Theorem21Report:
    k: int
    zero_count: int
    bound_zeros: int
    interval_hits: int
    bound_intervals: int
    analysis: LevelAnalysis

    @property
    def passed(self) -> tuple[bool, bool]:
        return (self.zero_count >= self.bound_zeros, self.interval_hits >= self.bound_intervals)

    @property
    def n(self) -> int:
        return 1 << self.k


def verify_theorem_2_1(k: int, oversample: int = DEFAULT_OVERSAMPLE, *, which: str = "p",
                       refine: bool = False, workers=None) -> Theorem21Report:
    """Certified crossings of level ``n``, against ``n/4 + 1`` zeros and
    ``n/2 + 2`` hit intervals ``[t_j, t_{j+1}]``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n = 1 << k
    a = analyze_level(k, n, oversample, which=which, refine=refine, workers=workers)
    return Theorem21Report(k, a.report.certified_count, n // 4 + 1,
                           len(a.hit_intervals), n // 2 + 2, a)


@dataclass(frozen=True, eq=False)
class Theorem22Report:
    k: int
    eta: Fraction
    epsilon: Fraction
    zero_count: int
    bound: int
    oversample: int
    analysis: LevelAnalysis

    @property
    def passed(self) -> bool:
        return self.zero_count >= self.bound


def theorem_2_2_bound(k: int, eta, epsilon) -> int:
    """``ceil((1/2 - |eta| - epsilon) n / 2)`` in exact arithmetic.

    At ``eta == 0`` the ``n/4 + 1`` zeros of the level-``n`` case apply.
    """
    n = 1 << k
    eta, epsilon = as_fraction(eta), as_fraction(epsilon)
    bound = _theorem_22_bound(n, eta, epsilon)
    if eta == 0 and k >= 2:
        bound = max(bound, n // 4 + 1)
    return bound


def verify_theorem_2_2(k: int, eta, epsilon, oversample: int = DEFAULT_OVERSAMPLE, *,
                       escalate_to: int = ESCALATED_OVERSAMPLE, which: str = "p",
                       refine: bool = False, workers=None) -> Theorem22Report:
    """Certified crossings of level ``(1 + eta) n`` against the bound.

    A failing count is retried with the grid doubled up to
    ``escalate_to * n`` points before the failure is reported.
    """
    eta, epsilon = as_fraction(eta), as_fraction(epsilon)
    if abs(eta) >= Fraction(1, 2):
        raise DomainError(f"|eta| must be below 1/2, got {eta}")
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    n = 1 << k
    bound = theorem_2_2_bound(k, eta, epsilon)
    level = (1 + eta) * n
    factor = oversample
    while True:
        a = analyze_level(k, level, factor, which=which, refine=refine, workers=workers)
        count = a.report.certified_count
        if count >= bound or factor >= escalate_to:
            return Theorem22Report(k, eta, epsilon, count, bound, factor, a)
        factor *= 2


@dataclass(frozen=True, eq=False)
class SignArgumentReport:
    """The tuple ``A_j = R_{k-2}(t_j) - n/4``, ``j = 0..n`` (``A_n = A_0``),
    its sign changes, and the qualifying pairs ``A_j A_{j+1} >= 0``."""

    k: int
    values: np.ndarray
    sign_changes: int
    qualifying: np.ndarray
    uncovered: np.ndarray

    @property
    def n(self) -> int:
        return 1 << self.k

    @property
    def bound_sign_changes(self) -> int:
        return self.n // 2 - 2

    @property
    def bound_qualifying(self) -> int:
        return self.n // 2 + 2

    @property
    def qualifying_pairs(self) -> int:
        return int(self.qualifying.size)

    @property
    def passed(self) -> tuple[bool, bool, bool]:
        return (self.sign_changes <= self.bound_sign_changes,
                self.qualifying_pairs >= self.bound_qualifying,
                self.uncovered.size == 0)


def sign_argument_values(k: int, workers=None) -> np.ndarray:
    """``A_j`` for ``j = 0 .. n`` with exact values at quarter turns."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n = 1 << k
    low = build_rs_pair(k - 2).p
    r = modulus_squared(eval_unit_circle(low, n, workers)).values
    a = r - n / 4
    close = np.flatnonzero(np.abs(a) < AMBIGUITY_REL * n)
    for j in close:
        a[j] = abs(eval_root_of_unity(low, int(j), n)) ** 2 - n / 4
    quarter = exact_values_at_quarter_turns(low.coeffs)
    for m, (re, im) in quarter.items():
        a[m * n // 4] = (re * re + im * im) - n // 4
    return np.append(a, a[0])


def verify_sign_change_argument(k: int, oversample: int = DEFAULT_OVERSAMPLE,
                                workers=None) -> SignArgumentReport:
    """Re-run the counting step behind the level-``n`` bound.

    ``R_{k-2} - n/4`` has degree ``n/4 - 1``, so at most ``n/2 - 2`` strict
    sign changes; every other adjacent pair has ``A_j A_{j+1} >= 0`` and,
    by the root-of-unity identities, its interval must contain a crossing
    of ``R_k`` at level ``n``.
    """
    a = sign_argument_values(k, workers)
    prod = a[:-1] * a[1:]
    qualifying = np.flatnonzero(prod >= 0)
    sign_changes = int(np.count_nonzero(prod < 0))
    hits = verify_theorem_2_1(k, oversample, workers=workers).analysis.hit_intervals
    uncovered = np.array([j for j in qualifying.tolist() if j not in hits], dtype=np.int64)
    return SignArgumentReport(k, a, sign_changes, qualifying, uncovered)
