"""Rudin-Shapiro coefficient sequences.

Coefficients are kept as ``int8`` arrays of exact signs; conversion to
floating point happens only in :mod:`rudin_shapiro.evaluation`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

# bytes per coefficient for one int8 sequence; build_rs_pair holds two
MEMORY_BUDGET = 1 << 30


class CapacityError(MemoryError):
    """Requested size exceeds the configured memory budget."""


@dataclass(frozen=True)
class SignSequence:
    """Coefficients ``a_0 .. a_{n-1}`` in {-1, +1} with ``n = 2**level``."""

    coeffs: np.ndarray
    level: int

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.int8)
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if coeffs.ndim != 1 or coeffs.size != 1 << self.level:
            raise ValueError(
                f"expected {1 << self.level} coefficients, got {coeffs.size}")
        if not np.all(np.abs(coeffs) == 1):
            raise ValueError("coefficients must be exactly -1 or +1")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n(self) -> int:
        return self.coeffs.size

    def __len__(self):
        return self.coeffs.size

    def __eq__(self, other):
        if not isinstance(other, SignSequence):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.level, self.coeffs.tobytes()))

    def tolist(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    @classmethod
    def from_list(cls, values) -> "SignSequence":
        values = np.asarray(values, dtype=np.int8)
        level = int(values.size).bit_length() - 1
        if values.size == 0 or 1 << level != values.size:
            raise ValueError("length must be a power of two")
        return cls(values, level)


@dataclass(frozen=True, eq=False)
class RSPair:
    p: SignSequence
    q: SignSequence
    level: int

    @property
    def n(self) -> int:
        return 1 << self.level

    def __iter__(self):
        return iter((self.p, self.q))


def build_rs_pair(k: int, memory_budget: int | None = None) -> RSPair:
    """Build ``(P_k, Q_k)`` by bottom-up doubling from ``P_0 = Q_0 = 1``.

    Each step appends: ``P <- P | Q`` and ``Q <- P | -Q``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    budget = MEMORY_BUDGET if memory_budget is None else memory_budget
    if 2 * (1 << k) > budget:
        raise CapacityError(f"2**{k} coefficients exceed the memory budget of {budget} bytes")
    n = 1 << k
    p = np.empty(n, dtype=np.int8)
    q = np.empty(n, dtype=np.int8)
    p[0] = q[0] = 1
    m = 1
    while m < n:
        p[m:2 * m] = q[:m]
        q[m:2 * m] = -q[:m]
        q[:m] = p[:m]
        m *= 2
    return RSPair(SignSequence(p, k), SignSequence(q, k), k)


def grs_coefficient(j: int) -> int:
    """Sign of the j-th Golay-Rudin-Shapiro coefficient.

    ``(-1)**c`` where ``c`` counts (possibly overlapping) occurrences of
    ``11`` in the binary expansion of ``j``.
    """
    if j < 0:
        raise ValueError("index must be nonnegative")
    return -1 if bin(j & (j >> 1)).count("1") % 2 else 1


def grs_coefficients(n: int) -> np.ndarray:
    """Vectorized :func:`grs_coefficient` for ``j = 0 .. n-1``."""
    j = np.arange(n, dtype=np.uint64)
    pairs = j & (j >> np.uint64(1))
    parity = np.zeros(n, dtype=np.uint8)
    while np.any(pairs):
        parity ^= (pairs & np.uint64(1)).astype(np.uint8)
        pairs >>= np.uint64(1)
    return (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def coefficient_energy(seq: SignSequence) -> int:
    """Exact sum of squared coefficients (equals ``n`` for any sign sequence)."""
    return int(np.dot(seq.coeffs.astype(np.int64), seq.coeffs.astype(np.int64)))


def reciprocal_sign(pair: RSPair) -> int | None:
    """Return ``s`` with ``Q_k(-z) == s * z**(n-1) * P_k(1/z)`` coefficientwise.

    ``None`` when no single sign works. Only the modulus form of this
    relation is relied upon elsewhere.
    """
    n = pair.n
    alternating = np.where(np.arange(n) % 2 == 0, 1, -1).astype(np.int8)
    lhs = pair.q.coeffs * alternating
    rhs = pair.p.coeffs[::-1]
    if np.array_equal(lhs, rhs):
        return 1
    if np.array_equal(lhs, -rhs):
        return -1
    return None


def exact_values_at_quarter_turns(coeffs) -> dict[int, tuple[int, int]]:
    """Exact ``P(i**m)`` for ``m = 0..3`` as Gaussian integers ``(re, im)``."""
    a = np.asarray(coeffs, dtype=np.int64)
    residue = np.arange(a.size) % 4
    s = [int(a[residue == r].sum()) for r in range(4)]
    # i**j cycles 1, i, -1, -i
    return {
        0: (s[0] + s[1] + s[2] + s[3], 0),
        1: (s[0] - s[2], s[1] - s[3]),
        2: (s[0] - s[1] + s[2] - s[3], 0),
        3: (s[0] - s[2], -(s[1] - s[3])),
    }


# -- coefficient export ----------------------------------------------------

def write_signs_text(seq: SignSequence, path) -> None:
    """One coefficient per line, written as ``+1`` or ``-1``."""
    lines = ["+1" if c > 0 else "-1" for c in seq.coeffs]
    Path(path).write_text("\n".join(lines) + "\n")


def read_signs_text(path) -> SignSequence:
    values = []
    for line in Path(path).read_text().split():
        line = line.replace("−", "-")
        if line not in ("+1", "-1", "1"):
            raise ValueError(f"bad coefficient {line!r}")
        values.append(int(line))
    return SignSequence.from_list(values)


def pack_signs(seq: SignSequence) -> bytes:
    """Bitset with bit 1 for +1 and bit 0 for -1, little-endian within bytes."""
    return np.packbits(seq.coeffs > 0, bitorder="little").tobytes()


def unpack_signs(data: bytes, level: int) -> SignSequence:
    n = 1 << level
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bits.size < n:
        raise ValueError(f"need {n} bits, got {bits.size}")
    return SignSequence(np.where(bits[:n] == 1, 1, -1).astype(np.int8), level)


def write_signs_packed(seq: SignSequence, path) -> None:
    Path(path).write_bytes(pack_signs(seq))


def read_signs_packed(path, level: int) -> SignSequence:
    return unpack_signs(Path(path).read_bytes(), level)
