"""Counting solutions of R_k(t) = (1 + eta) n.

Every counted solution is certified, either by a strict sign change between
two samples well clear of the level or, at quarter turns, by exact integer
arithmetic. At k=2 we have R_2(t) - 4 = 8 sin^2(t) cos(t). The zeros at
pi/2 and 3pi/2 are sign changes, but the zeros at 0 and pi only touch the
level. Those two are picked up by the exact route.
"""

import numpy as np

from rudin_shapiro.crossings import (
    theorem_2_2_bound,
    verify_sign_change_argument,
    verify_theorem_2_1,
    verify_theorem_2_2,
)

r = verify_theorem_2_1(2, refine=True)
print("k=2 zeros of R - n:", np.round(r.analysis.report.angles / np.pi, 12), "x pi")
print("exact (tangential):", r.analysis.report.exact.tolist())

print(f"\n{'k':>3} {'zeros':>8} {'>= n/4+1':>9} {'intervals':>10} {'>= n/2+2':>9}")
for k in range(4, 17, 2):
    r = verify_theorem_2_1(k)
    print(f"{k:>3} {r.zero_count:>8} {r.bound_zeros:>9} {r.interval_hits:>10} {r.bound_intervals:>9}")

print("\nother levels at k=14, epsilon=0.05:")
for eta in (-0.4, -0.1, 0.1, 0.4):
    r = verify_theorem_2_2(14, eta, 0.05)
    print(f"  eta={eta:+.2f}: {r.zero_count} solutions, bound {theorem_2_2_bound(14, eta, 0.05)}")

s = verify_sign_change_argument(12)
print(f"\nsign changes of R_(k-2) - n/4 at k=12: {s.sign_changes} (at most {s.bound_sign_changes}); "
      f"qualifying intervals {s.qualifying_pairs}, all containing a crossing: {s.uncovered.size == 0}")
