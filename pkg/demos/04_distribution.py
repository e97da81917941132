"""How the values spread out.

R_k / (2n) becomes uniformly distributed on [0, 1], and P_k / sqrt(2n)
becomes uniform on the unit disk. The Kolmogorov-Smirnov distance and the
worst histogram cell show how fast this happens.
"""

import numpy as np

from rudin_shapiro.distribution import planar_distribution, value_distribution

for k in (8, 10, 12, 14, 16):
    h = value_distribution(k, bins=10)
    print(f"k={k:>2}  KS={h.ks_statistic:.5f}  bins:", np.array2string(h.mass * 10, precision=2))

h2 = planar_distribution(14, G=16)
print("\nk=14 disk histogram, mass / reference for the central row:")
mid = h2.mass.shape[0] // 2
print(np.array2string(h2.mass[mid] / h2.reference[mid], precision=3))
print("worst cell error:", f"{h2.max_cell_error:.2e}")
