"""Building the sign sequences.

The pair (P_k, Q_k) starts from P_0 = Q_0 = 1 and doubles in length at
each step. Every coefficient is +1 or -1, and the j-th coefficient of P_k
can also be read off directly from the binary digits of j: it is -1 when
j has an odd number of adjacent "11" pairs.
"""

import numpy as np

from rudin_shapiro.core import build_rs_pair, grs_coefficients, pack_signs, reciprocal_sign


def show(seq):
    return "".join("+" if c > 0 else "-" for c in seq.coeffs)


for k in range(5):
    pair = build_rs_pair(k)
    print(f"k={k}  P={show(pair.p):<16}  Q={show(pair.q)}")

pair = build_rs_pair(16)
print("\nclosed form agrees with the recursion at k=16:",
      np.array_equal(pair.p.coeffs, grs_coefficients(pair.n)))
print("sum of squared coefficients:", int(np.sum(pair.p.coeffs.astype(np.int64) ** 2)), "= n")

# Q_k(-z) is +/- the reversal of P_k; the sign depends on the parity of k
print("\nsign s in Q_k(-z) = s z^(n-1) P_k(1/z):",
      {k: reciprocal_sign(build_rs_pair(k)) for k in range(1, 9)})

print("\nP_3 packed as a little-endian bitset:", pack_signs(build_rs_pair(3).p).hex())
