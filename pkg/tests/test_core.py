import numpy as np
import pytest
from hypothesis import given, strategies as st

from rudin_shapiro.core import (
    CapacityError,
    SignSequence,
    build_rs_pair,
    coefficient_energy,
    exact_values_at_quarter_turns,
    grs_coefficient,
    grs_coefficients,
    pack_signs,
    read_signs_packed,
    read_signs_text,
    reciprocal_sign,
    unpack_signs,
    write_signs_packed,
    write_signs_text,
)


def test_base_case():
    pair = build_rs_pair(0)
    assert pair.p.tolist() == [1]
    assert pair.q.tolist() == [1]


def test_one_step():
    pair = build_rs_pair(1)
    assert pair.p.tolist() == [1, 1]
    assert pair.q.tolist() == [1, -1]


def test_level_three_unrolled_by_hand():
    # P2 = [1,1,1,-1], Q2 = [1,1,-1,1]; P3 = P2 | Q2
    assert build_rs_pair(3).p.tolist() == [1, 1, 1, -1, 1, 1, -1, 1]


@pytest.mark.parametrize("k", range(1, 15))
def test_halves(k):
    pair = build_rs_pair(k)
    h = pair.n // 2
    assert np.array_equal(pair.p.coeffs[:h], pair.q.coeffs[:h])
    assert np.array_equal(pair.p.coeffs[h:], -pair.q.coeffs[h:])
    assert pair.p.level == pair.q.level == k


@pytest.mark.parametrize("k", [0, 1, 5, 12, 18])
def test_energy_is_n(k):
    pair = build_rs_pair(k)
    assert coefficient_energy(pair.p) == coefficient_energy(pair.q) == 1 << k


def test_closed_form_coefficient_examples():
    assert grs_coefficient(0) == 1
    assert grs_coefficient(3) == -1
    assert grs_coefficient(3) == build_rs_pair(2).p.coeffs[3]


@pytest.mark.parametrize("k", range(0, 17))
def test_closed_form_matches_recursion(k):
    assert np.array_equal(grs_coefficients(1 << k), build_rs_pair(k).p.coeffs)


@given(st.integers(min_value=0, max_value=(1 << 16) - 1))
def test_closed_form_scalar_matches_recursion(j):
    assert grs_coefficient(j) == build_rs_pair(16).p.coeffs[j]


def test_negative_inputs():
    with pytest.raises(ValueError):
        build_rs_pair(-1)
    with pytest.raises(ValueError):
        grs_coefficient(-1)


def test_capacity():
    with pytest.raises(CapacityError):
        build_rs_pair(40)
    with pytest.raises(CapacityError):
        build_rs_pair(12, memory_budget=1024)


def test_sign_sequence_validation():
    with pytest.raises(ValueError):
        SignSequence([1, 0], 1)
    with pytest.raises(ValueError):
        SignSequence([1, 1, 1], 1)
    with pytest.raises(ValueError):
        SignSequence.from_list([1, 1, 1])
    seq = SignSequence.from_list([1, -1, -1, 1])
    assert seq.level == 2 and seq.n == 4


def test_immutable():
    seq = build_rs_pair(3).p
    with pytest.raises(ValueError):
        seq.coeffs[0] = -1


def test_reciprocal_sign_by_hand_at_level_two():
    # Q2(-z) = 1 - z - z^2 - z^3, z^3 P2(1/z) = -1 + z + z^2 + z^3
    assert reciprocal_sign(build_rs_pair(2)) == -1


@pytest.mark.parametrize("k", range(0, 14))
def test_reciprocal_sign_recorded(k):
    expected = 1 if k < 2 or k % 2 else -1
    assert reciprocal_sign(build_rs_pair(k)) == expected


def test_exact_quarter_turn_values():
    # P2 = 1 + z + z^2 - z^3
    v = exact_values_at_quarter_turns([1, 1, 1, -1])
    assert v[0] == (2, 0)
    assert v[1] == (0, 2)          # 1 + i - 1 + i
    assert v[2] == (2, 0)          # 1 - 1 + 1 + 1
    assert v[3] == (0, -2)


@given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=64))
def test_exact_quarter_turns_match_direct_sum(coeffs):
    v = exact_values_at_quarter_turns(coeffs)
    for m in range(4):
        z = [1, 1j, -1, -1j][m]
        direct = sum(c * z ** j for j, c in enumerate(coeffs))
        assert complex(*v[m]) == direct


def test_text_roundtrip(tmp_path):
    seq = build_rs_pair(5).q
    path = tmp_path / "q5.txt"
    write_signs_text(seq, path)
    lines = path.read_text().split()
    assert set(lines) <= {"+1", "-1"} and len(lines) == 32
    assert read_signs_text(path) == seq


def test_text_reader_accepts_unicode_minus(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("+1\n−1\n".replace("−", "−"))
    assert read_signs_text(path).tolist() == [1, -1]


def test_packed_bit_order():
    assert pack_signs(build_rs_pair(1).p) == bytes([0b11])
    # +1, -1: bit 0 set, bit 1 clear
    assert pack_signs(build_rs_pair(1).q) == bytes([0b01])
    # P3 = + + + - + + - +  -> bits 0,1,2,4,5,7
    assert pack_signs(build_rs_pair(3).p) == bytes([0b10110111])


def test_packed_roundtrip(tmp_path):
    seq = build_rs_pair(11).p
    path = tmp_path / "p11.bin"
    write_signs_packed(seq, path)
    assert path.stat().st_size == 256
    assert read_signs_packed(path, 11) == seq
    with pytest.raises(ValueError):
        unpack_signs(b"\x00", 4)
