import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from rudin_shapiro.core import build_rs_pair
from rudin_shapiro.distribution import (
    RootFindingError,
    deflate_unit_roots,
    disk_cell_areas,
    histogram1d_csv,
    histogram2d_csv,
    ks_uniform,
    level_set_measure,
    mahler_measure,
    mahler_via_roots,
    moment,
    normalized_modulus,
    normalized_values,
    planar_distribution,
    power_mean,
    saffari_prediction,
    value_distribution,
    write_histogram1d_csv,
)
from rudin_shapiro.evaluation import autocorrelation, eval_unit_circle, modulus_squared


def subsampled_disk_area(x0, x1, y0, y1, m=32):
    # midpoint subsampling oracle, m x m points per cell
    xs = x0 + (np.arange(m) + 0.5) * (x1 - x0) / m
    ys = y0 + (np.arange(m) + 0.5) * (y1 - y0) / m
    X, Y = np.meshgrid(xs, ys)
    return np.count_nonzero(X * X + Y * Y <= 1) / (m * m) * (x1 - x0) * (y1 - y0)


# -- one-dimensional ---------------------------------------------------------

@pytest.mark.parametrize("k", [6, 10])
def test_histogram_mass_and_mean(k):
    h = value_distribution(k)
    assert abs(h.mass.sum() - 1) < 1e-12
    # mean of R_k over a grid of size >= n is exactly n, so the normalized mean is 1/2
    assert abs(h.mean - 0.5) < 1e-12
    assert np.allclose(h.reference, 1 / 64)
    assert h.grid_size == 16 << k


def test_histogram_grid_check():
    with pytest.raises(ValueError):
        value_distribution(6, N=128)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=200))
@settings(max_examples=50)
def test_ks_matches_scipy(x):
    assert abs(ks_uniform(x) - stats.kstest(x, "uniform").statistic) < 1e-12


def test_ks_on_rs_values():
    x = normalized_modulus(12)
    assert abs(ks_uniform(x) - stats.kstest(x, "uniform").statistic) < 1e-12


def test_interval_mass_and_level_set():
    h = value_distribution(10, bins=8)
    x = normalized_modulus(10)
    assert abs(h.interval_mass(0.25, 0.5) - np.mean((x >= 0.25) & (x < 0.5))) < 1e-12
    assert abs(level_set_measure(x, 0, 1) - 2 * math.pi) < 1e-12


def test_histogram1d_csv(tmp_path):
    h = value_distribution(6, bins=4)
    text = histogram1d_csv(h)
    lines = text.splitlines()
    assert lines[0] == "lo,hi,mass,reference" and len(lines) == 5
    write_histogram1d_csv(h, tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text() == text


# -- two-dimensional ---------------------------------------------------------

def test_disk_cell_areas_sum_to_pi():
    for G in (8, 16, 30):
        assert abs(disk_cell_areas(np.linspace(-1, 1, G + 1)).sum() - math.pi) < 1e-12


def test_disk_cell_areas_against_subsampling():
    e = np.linspace(-1, 1, 9)
    exact = disk_cell_areas(e)
    for i in range(8):
        for j in range(8):
            approx = subsampled_disk_area(e[i], e[i + 1], e[j], e[j + 1])
            assert abs(exact[i, j] - approx) < 2e-3


def test_disk_cell_areas_symmetric():
    a = disk_cell_areas(np.linspace(-1, 1, 17))
    assert np.allclose(a, a.T) and np.allclose(a, a[::-1]) and np.allclose(a, a[:, ::-1])


def test_planar_conjugate_symmetry():
    # real coefficients: P(e^{-it}) is the conjugate of P(e^{it})
    h = planar_distribution(10)
    w = normalized_values(10)
    on_axis = np.count_nonzero(np.abs(w.imag) < 1e-12) / w.size
    diff = np.abs(h.mass - h.mass[:, ::-1])
    assert np.max(diff) <= on_axis + 1e-12
    assert abs(h.mass.sum() - 1) < 1e-12
    assert abs(h.reference.sum() - 1) < 1e-12


def test_planar_annulus_matches_1d():
    k = 10
    h = planar_distribution(k)
    w = normalized_values(k)
    x = normalized_modulus(k)
    assert h.annulus_mass(w, 0.2, 0.7) == pytest.approx(np.mean((x >= 0.2) & (x <= 0.7)), abs=1e-12)


def test_planar_validation():
    with pytest.raises(ValueError):
        planar_distribution(6, G=4)
    with pytest.raises(ValueError):
        planar_distribution(6, N=64)


def test_histogram2d_csv():
    h = planar_distribution(6, G=8)
    lines = histogram2d_csv(h).splitlines()
    assert lines[0] == "x_lo,x_hi,y_lo,y_hi,mass,reference" and len(lines) == 65


# -- moments -----------------------------------------------------------------

@pytest.mark.parametrize("k", [0, 4, 9, 14])
def test_l2_norm_is_sqrt_n(k):
    r = moment(k, 2)
    assert r.exact
    assert abs(r.estimate - math.sqrt(1 << k)) < 1e-12 * math.sqrt(1 << k)


@pytest.mark.parametrize("k", [1, 3, 6, 10, 13])
def test_fourth_moment_exact(k):
    n = 1 << k
    c = np.array(autocorrelation(build_rs_pair(k).p).tolist(), dtype=np.int64)
    m44 = n * n + 2 * int(np.sum(c[1:] ** 2))
    # classical closed form for the Rudin-Shapiro L4 norm
    assert m44 == (4 ** (k + 1) - (-2) ** k) // 3
    assert abs(moment(k, 4).estimate ** 4 - m44) < 1e-9 * m44


def test_even_moment_raises_grid():
    r = moment(6, 8, N=64)
    assert r.grid_size > 4 * 63


def test_power_mean_monotone_in_q():
    r = modulus_squared(eval_unit_circle(build_rs_pair(10).p, 1 << 14)).values
    means = [power_mean(r, q) for q in (0, 0.5, 1, 2, 4, 8)]
    assert means == sorted(means)


def test_p_and_q_moments_agree():
    for q in (1, 4, 6):
        assert moment(10, q).estimate == pytest.approx(moment(10, q, which="q").estimate, rel=1e-9)


def test_odd_moment_converges():
    r = moment(8, 3)
    assert r.converged and not r.exact


def test_moment_validation():
    with pytest.raises(ValueError):
        moment(4, 0)


def test_saffari_prediction():
    assert saffari_prediction(8, 2) == pytest.approx(math.sqrt(8))
    assert saffari_prediction(8, 4) == pytest.approx(4 / 3 ** 0.25)


# -- Mahler measure ----------------------------------------------------------

def test_mahler_trivial_cases():
    assert mahler_measure([1.0]).estimate == pytest.approx(1.0)
    assert mahler_measure([-2.0, 1.0], N=64).estimate == pytest.approx(2.0, rel=1e-12)
    assert mahler_measure([-0.5, 1.0], N=64).estimate == pytest.approx(1.0, rel=1e-12)
    assert mahler_measure([6.0, -5.0, 1.0], N=64).estimate == pytest.approx(6.0, rel=1e-12)


def test_mahler_via_roots_trivial_cases():
    assert mahler_via_roots([3]) == 3
    assert mahler_via_roots([-2, 1]) == pytest.approx(2.0)
    assert mahler_via_roots([-0.5, 1]) == pytest.approx(1.0)
    assert mahler_via_roots([6, -5, 1]) == pytest.approx(6.0)


def test_deflation():
    # (z - 1)(z + 1)(z^2 + 1)(z - 2) = (z^4 - 1)(z - 2)
    coeffs = [2, -1, 0, 0, -2, 1]
    rest, removed = deflate_unit_roots(coeffs)
    assert rest.tolist() == [-2, 1]
    assert sorted(removed, key=lambda z: (z.real, z.imag)) == [-1, -1j, 1j, 1]


def test_odd_level_deflates_minus_one():
    rest, removed = deflate_unit_roots(build_rs_pair(5).p.coeffs)
    assert -1 in removed


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("which", ["p", "q"])
def test_mahler_cross_validation(k, which):
    pair = build_rs_pair(k)
    seq = pair.p if which == "p" else pair.q
    quad = mahler_measure(seq).estimate
    roots = mahler_via_roots(seq)
    assert abs(quad - roots) < 1e-6 * roots


def test_mahler_below_l2():
    for k in range(1, 13):
        assert mahler_measure(k).estimate < math.sqrt(1 << k)


def test_mahler_root_cap():
    with pytest.raises(ValueError):
        mahler_via_roots(build_rs_pair(9).p)


def test_mahler_root_failure_is_reported():
    # a huge cluster of repeated roots defeats the residual test
    coeffs = np.poly(np.full(40, 0.999))[::-1]
    with pytest.raises(RootFindingError):
        mahler_via_roots(coeffs * 1e12)


def test_mahler_validation():
    with pytest.raises(ValueError):
        mahler_measure(6, N=64)
    with pytest.raises(ValueError):
        mahler_measure(4, clip=0)
