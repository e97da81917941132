"""Norms: L_q moments and the Mahler measure.

The L_2 norm is exactly sqrt(n). Higher moments approach
sqrt(2n) / (q/2 + 1)^(1/q), the value a uniform point on a disk would give.
The Mahler measure (q -> 0) tends to sqrt(2n/e). It is computed twice for
small k: by quadrature and from the polynomial roots.
"""

import math

from rudin_shapiro import build_rs_pair
from rudin_shapiro.distribution import mahler_measure, mahler_via_roots, moment

k = 14
for q in (1, 2, 3, 4, 6, 8):
    r = moment(k, q)
    print(f"q={q}: M_q = {r.estimate:10.4f}  predicted {r.predicted:10.4f}  ratio {r.ratio:.6f}")

print()
for k in (4, 6, 8):
    p = build_rs_pair(k).p
    print(f"k={k}: quadrature {mahler_measure(p).estimate:.12f}  roots {mahler_via_roots(p):.12f}")

for k in (12, 16):
    m = mahler_measure(k).estimate
    print(f"k={k}: M_0 = {m:.4f}, sqrt(n) = {math.sqrt(1 << k):.1f}, ratio to sqrt(2n/e) = "
          f"{m / math.sqrt(2 * (1 << k) / math.e):.5f}")
