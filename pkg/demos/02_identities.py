"""The identities that pin the modulus down.

With R_k(t) = |P_k(e^{it})|^2 these all hold exactly:

    |P_k|^2 + |Q_k|^2 = 2n
    |Q_k(-z)| = |P_k(z)|
    R_k(t) - n = n - R_k(t + pi)

and at the n-th roots of unity P_k reduces to the level k-2 pair. We check
them on FFT grids of 16n points.
"""

import math

from rudin_shapiro.identities import (
    check_antisymmetry,
    check_eq_1_1,
    check_eq_1_2,
    check_lemma_3_1,
)

print(f"{'k':>3} {'energy':>10} {'reflection':>11} {'antisym':>10} {'roots':>10}   (all divided by n, roots by sqrt n)")
for k in range(2, 17, 2):
    n = 1 << k
    print(f"{k:>3} {check_eq_1_1(k) / n:10.1e} {check_eq_1_2(k) / n:11.1e} "
          f"{check_antisymmetry(k) / n:10.1e} {check_lemma_3_1(k) / math.sqrt(n):10.1e}")
