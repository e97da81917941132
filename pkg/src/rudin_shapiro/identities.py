"""Grid checks of the exact identities satisfied by ``P_k`` and ``Q_k``.

Every check returns a maximum deviation; callers compare it with their
own tolerance.
"""

from __future__ import annotations

import numpy as np

from .core import build_rs_pair
from .evaluation import eval_unit_circle, modulus_squared


def default_grid(k: int, oversample: int = 16) -> int:
    return oversample << k


def check_eq_1_1(k: int, N: int | None = None, workers=None) -> float:
    """max | |P_k|^2 + |Q_k|^2 - 2n | over the grid."""
    pair = build_rs_pair(k)
    N = default_grid(k) if N is None else N
    rp = modulus_squared(eval_unit_circle(pair.p, N, workers)).values
    rq = modulus_squared(eval_unit_circle(pair.q, N, workers)).values
    return float(np.max(np.abs(rp + rq - 2 * pair.n)))


def check_eq_1_2(k: int, N: int | None = None, workers=None) -> float:
    """max | |Q_k(-z)| - |P_k(z)| | over the grid.

    ``-z`` at grid angle ``t_i`` is grid angle ``t_{i + N/2}``.
    """
    pair = build_rs_pair(k)
    N = default_grid(k) if N is None else N
    if N % 2:
        raise ValueError("grid size must be even")
    p = np.abs(eval_unit_circle(pair.p, N, workers).values)
    q = np.abs(eval_unit_circle(pair.q, N, workers).shifted(N // 2).values)
    return float(np.max(np.abs(q - p)))


def check_antisymmetry(k: int, N: int | None = None, which: str = "p", workers=None) -> float:
    """max | (R_k(t) - n) + (R_k(t + pi) - n) | over the grid."""
    pair = build_rs_pair(k)
    N = default_grid(k) if N is None else N
    if N % 2 or N < pair.n:
        raise ValueError("grid size must be even and at least n")
    seq = pair.p if which == "p" else pair.q
    r = modulus_squared(eval_unit_circle(seq, N, workers))
    n = pair.n
    return float(np.max(np.abs((r.values - n) + (r.shifted(N // 2).values - n))))


def lemma_3_1_residuals(k: int, workers=None) -> np.ndarray:
    """Residuals of the n-th root of unity identities linking ``P_k`` to level ``k-2``.

    For ``z_j = exp(2 pi i j / n)``::

        P_k(z_j) = 2 P_{k-2}(z_j)                         (j even)
        P_k(z_j) = (-1)**((j-1)/2) * 2i * Q_{k-2}(z_j)    (j odd)
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    n = 1 << k
    top = build_rs_pair(k)
    low = build_rs_pair(k - 2)
    pk = eval_unit_circle(top.p, n, workers).values
    pl = eval_unit_circle(low.p, n, workers).values
    ql = eval_unit_circle(low.q, n, workers).values
    j = np.arange(n)
    odd_sign = np.where(((j - 1) // 2) % 2 == 0, 1.0, -1.0)
    expected = np.where(j % 2 == 0, 2 * pl, odd_sign * 2j * ql)
    return np.abs(pk - expected)


def check_lemma_3_1(k: int, workers=None) -> float:
    return float(np.max(lemma_3_1_residuals(k, workers)))
