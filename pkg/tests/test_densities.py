import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from gue_singular import densities as dn
from gue_singular import specfun
from gue_singular.ensembles import EnsembleSpec
from gue_singular.errors import DomainError

GUE2 = EnsembleSpec("GUE", 2)


def hermite_grid(points, dim):
    """Tensor Gauss-Hermite rule for weight exp(-x**2/2); exact for polynomial times that weight."""
    x, w = np.polynomial.hermite_e.hermegauss(points)
    for combo in itertools.product(range(points), repeat=dim):
        idx = list(combo)
        yield x[idx], float(np.prod(w[idx]))


def integrate_against_gauss(log_density, dim, points=30):
    """Integral over R^dim of exp(log_density) using weight-divided Gauss-Hermite nodes."""
    total = 0.0
    for x, w in hermite_grid(points, dim):
        ld = log_density(x)
        if ld == -math.inf:
            continue
        total += w * math.exp(ld + 0.5 * float(np.sum(x * x)))
    return total


# --- joint densities --------------------------------------------------------


def test_gue_pair_density_examples():
    assert dn.joint_log_density(GUE2, [1.0, 1.0]) == -math.inf
    for x, y in [(0.3, -1.2), (2.0, 0.5), (-0.7, 1.9)]:
        want = (x - y) ** 2 * math.exp(-(x * x + y * y) / 2) / (4 * math.pi)
        assert math.exp(dn.joint_log_density(GUE2, [x, y])) == pytest.approx(want, rel=1e-13)


def test_antigue_n3_density_is_chi3():
    spec = EnsembleSpec("AntiGUE", 3)
    for t in (0.2, 1.0, 2.5):
        assert math.exp(dn.joint_log_density(spec, [t])) == pytest.approx(specfun.chi_pdf(3, t), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gue_density_normalized(n):
    assert integrate_against_gauss(dn.log_density_gue, n, 12) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6, 7])
def test_antigue_density_normalized(N):
    n = N // 2
    # density is even in every coordinate, so integrate over R^n and divide by 2^n
    total = integrate_against_gauss(lambda t: dn.log_density_antigue(np.abs(t), N), n, 16)
    assert total / 2**n == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n,a", [(1, 0.5), (2, 0.5), (2, -0.5), (3, 0.5), (3, -0.5)])
def test_lue_singular_value_density_normalized(n, a):
    spec = EnsembleSpec("LUE", n, a)
    # in singular values the density is an even polynomial times exp(-x**2/2)
    total = integrate_against_gauss(lambda u: dn.joint_log_density(spec, np.abs(u), "singular_values"), n, 16)
    assert total / 2**n == pytest.approx(1.0, abs=1e-8)


def test_lue_eigenvalue_density_normalized_n2():
    spec = EnsembleSpec("LUE", 2, 1.5)
    val, _ = integrate.dblquad(lambda y, x: math.exp(dn.joint_log_density(spec, [x, y])), 0, 80, 0, 80, epsabs=1e-11)
    assert val == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("n", [1, 2])
def test_goe_density_normalized(n):
    if n == 1:
        val, _ = integrate.quad(lambda x: math.exp(dn.log_density_goe([x])), -40, 40)
    else:
        # ordered region x < x + v, doubled
        val, _ = integrate.dblquad(lambda v, u: 2 * math.exp(dn.log_density_goe([u, u + v])), -30, 30, 0, 40, epsabs=1e-11)
    assert val == pytest.approx(1.0, abs=1e-5)


def test_gue_singular_density_normalized():
    spec = EnsembleSpec("GUE", 2)
    # integrating over R^2 counts each sign pattern; divide by 2^2
    total = integrate_against_gauss(lambda x: dn.joint_log_density(spec, np.abs(x), "singular_values"), 2, 12)
    assert total / 4 == pytest.approx(1.0, abs=1e-10)


def test_density_domain_errors():
    with pytest.raises(DomainError):
        dn.joint_log_density(GUE2, [1.0])
    with pytest.raises(DomainError):
        dn.joint_log_density(EnsembleSpec("LUE", 1, 0.5), [-1.0])
    with pytest.raises(DomainError):
        dn.joint_log_density(EnsembleSpec("Ginibre", 2), [1.0, 2.0])


# --- signed measures --------------------------------------------------------


def test_signed_measure_examples():
    assert dn.signed_measure_mu(GUE2, [1.0, 1.0]) == 0.0
    assert dn.signed_measure_mu(GUE2, [0.0, 1.0]) == pytest.approx(math.exp(-0.5) / (2 * math.pi), rel=1e-14)
    for x, y in [(0.4, -1.1), (1.5, 2.2)]:
        want = (y * y - x * y) * math.exp(-(x * x + y * y) / 2) / (2 * math.pi)
        assert dn.signed_measure_mu(GUE2, [x, y]) == pytest.approx(want, rel=1e-13)


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_signed_measure_symmetrizes_to_density(a, b):
    sym = 0.5 * dn.signed_measure_mu(GUE2, [a, b]) + 0.5 * dn.signed_measure_mu(GUE2, [b, a])
    assert sym == pytest.approx(math.exp(dn.joint_log_density(GUE2, [a, b])), rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("spec", [EnsembleSpec("GUE", 3), EnsembleSpec("AntiGUE", 6), EnsembleSpec("AntiGUE", 7)])
def test_signed_measure_symmetrizes_in_general(spec):
    rng = np.random.default_rng(3)
    size = spec.spectrum_size()
    for _ in range(5):
        p = np.abs(rng.standard_normal(size)) + 0.1
        avg = np.mean([dn.signed_measure_mu(spec, p[list(perm)]) for perm in itertools.permutations(range(size))])
        assert avg == pytest.approx(math.exp(dn.joint_log_density(spec, p)), rel=1e-10)


# --- kernels ----------------------------------------------------------------


def test_kernel_examples():
    h = dn.WeightSpec("hermite")
    for x in (-1.0, 0.0, 2.0):
        assert dn.correlation_kernel(h, 1, x, x) == pytest.approx(math.exp(-x * x / 2) / math.sqrt(2 * math.pi))
        assert dn.correlation_kernel(h, 5, x, x) == pytest.approx(dn.gue_one_point(5, x))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("weight", [dn.WeightSpec("hermite"), dn.WeightSpec("laguerre", 0.5), dn.WeightSpec("laguerre", 2.0)])
def test_kernel_reproducing_property(n, weight):
    if weight.kind == "hermite":
        nodes, wts = dn.quad_nodes(-30, 30, 16, 64)
        pts = (-1.3, 0.4, 2.0)
    else:
        # t = u**2 removes the t**a endpoint behaviour
        u, wu = dn.quad_nodes(0, math.sqrt(150), 16, 64)
        nodes, wts = u * u, 2 * u * wu
        pts = (0.3, 1.7, 6.0)
    for x in pts:
        for y in pts:
            lhs = np.sum(wts * dn.correlation_kernel(weight, n, x, nodes) * dn.correlation_kernel(weight, n, nodes, y))
            assert lhs == pytest.approx(dn.correlation_kernel(weight, n, x, y), abs=1e-6)


@settings(max_examples=30)
@given(st.lists(st.floats(-4, 4), min_size=2, max_size=2))
def test_n_point_determinant_is_n_factorial_times_density(pts):
    det = dn.correlation_function(dn.WeightSpec("hermite"), 2, pts)
    assert det == pytest.approx(2 * math.exp(dn.joint_log_density(GUE2, pts)), abs=1e-8)


def test_n_point_determinant_laguerre():
    spec = EnsembleSpec("LUE", 3, 0.5)
    for pts in ([0.5, 2.0, 7.0], [1.1, 3.3, 0.2]):
        det = dn.correlation_function(dn.WeightSpec("laguerre", 0.5), 3, pts)
        assert det == pytest.approx(6 * math.exp(dn.joint_log_density(spec, pts)), rel=1e-9)


# --- level densities --------------------------------------------------------


def test_gue_level_density_examples():
    x = np.linspace(-5, 5, 101)
    assert np.allclose(dn.level_density_gue(1, x), np.exp(-x * x / 2) / math.sqrt(2 * math.pi), atol=1e-15)
    assert dn.quad(lambda t: dn.level_density_gue(7, t), -20, 20, 16) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n", [1, 2, 5, 12, 40])
def test_christoffel_darboux_agrees(n):
    x = np.linspace(-2 * math.sqrt(n) - 4, 2 * math.sqrt(n) + 4, 801)
    assert np.allclose(dn.gue_one_point(n, x), dn.gue_one_point_cd(n, x), atol=1e-9, rtol=0)


@given(st.integers(1, 30), st.floats(0, 12))
def test_gue_level_density_even(n, x):
    assert dn.level_density_gue(n, x) == pytest.approx(dn.level_density_gue(n, -x), rel=1e-12, abs=1e-300)


def test_gue_one_point_is_direct_hermite_sum():
    x = np.linspace(-4, 4, 33)
    n = 6
    direct = sum(specfun.hermite_eval(k, x) ** 2 / math.factorial(k) for k in range(n))
    direct = direct * np.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    assert np.allclose(dn.gue_one_point(n, x), direct, rtol=1e-12)


def test_lue_half_first_term():
    y = np.linspace(0.0, 10.0, 51)
    want = np.sqrt(y) * np.exp(-y / 2) / math.sqrt(2 * math.pi)
    assert np.allclose(dn.level_density_lue_half(1, "+", y), want, atol=1e-15)


def lue_half_sum(n, sign, y):
    """The finite sums with coefficients 4^k k!^2/(2k)! and 4^k k!^2/(2k+1)!, as independent oracle."""
    a = -0.5 if sign == "-" else 0.5
    total = 0.0
    for k in range(n):
        coeff = 4**k * math.factorial(k) ** 2 / math.factorial(2 * k + (1 if a > 0 else 0))
        total += coeff * specfun.laguerre_eval(k, a, y / 2) ** 2
    return total * y**a * math.exp(-y / 2) / math.sqrt(2 * math.pi)


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("n", [1, 3, 6])
def test_lue_half_matches_coefficient_sums(n, sign):
    for y in (0.05, 0.7, 3.0, 11.0):
        assert dn.level_density_lue_half(n, sign, y) == pytest.approx(lue_half_sum(n, sign, y), rel=1e-11)


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("n", range(1, 7))
def test_lue_half_integrates_to_n(n, sign):
    total = 2 * dn.quad(lambda x: dn.lue_half_x_density(n, sign, x), 0, 40, 16)
    assert total == pytest.approx(n, abs=1e-7)
    pdf_total = dn.quad(lambda x: dn.lue_half_singular_value_pdf(n, sign, x), 0, 40, 16)
    assert pdf_total == pytest.approx(1.0, abs=1e-9)


def test_lue_half_behaviour_at_origin():
    small = np.array([1e-8, 1e-6, 1e-4])
    plus = dn.level_density_lue_half(3, "+", small)
    assert np.allclose(plus / np.sqrt(small), plus[0] / math.sqrt(small[0]), rtol=1e-3)
    minus = dn.level_density_lue_half(3, "-", small)
    assert np.allclose(minus * np.sqrt(small), minus[0] * math.sqrt(small[0]), rtol=1e-3)
    assert dn.lue_half_x_density(3, "+", 0.0) == 0.0
    assert dn.lue_half_x_density(3, "-", 0.0) > 0.0
    with pytest.raises(DomainError):
        dn.level_density_lue_half(3, "-", 0.0)


@pytest.mark.parametrize("n", [1, 7, 8])
def test_semicircle_identity_examples(n):
    grid = np.arange(1, 601) * 0.01
    tol = 1e-12 if n == 1 else 1e-9
    assert dn.semicircle_identity_residual(n, grid) <= tol


def test_semicircle_identity_up_to_30():
    for n in range(1, 31):
        grid = np.linspace(0, 2 * math.sqrt(n), 2001)[1:]
        assert dn.semicircle_identity_residual(n, grid) <= 1e-9


def test_semicircle_identity_rejects_nonpositive_grid():
    with pytest.raises(DomainError):
        dn.semicircle_identity_residual(3, [0.0, 1.0])


def test_ginibre_density_examples():
    x = np.linspace(0, 8, 161)
    assert np.allclose(dn.ginibre_magnitude_density(1, x), x * np.exp(-x * x / 2), atol=1e-15)
    for n in (1, 4, 9):
        assert dn.quad(lambda t: dn.ginibre_magnitude_density(n, t), 0, 20, 16) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_ginibre_density_is_chi_mixture(n):
    x = np.linspace(0, 9, 181)
    mix = np.mean([specfun.chi_pdf(2 * i, x) for i in range(1, n + 1)], axis=0)
    assert np.allclose(dn.ginibre_magnitude_density(n, x), mix, atol=1e-10, rtol=0)


@pytest.mark.parametrize(
    "spec",
    [EnsembleSpec("GUE", 1), EnsembleSpec("GUE", 9), EnsembleSpec("LUE", 4, -0.5), EnsembleSpec("LUE", 3, 2.0), EnsembleSpec("Ginibre", 5)],
)
@pytest.mark.parametrize("norm", ["1", "n"])
def test_level_density_total_matches_mode(spec, norm):
    want = 1.0 if norm == "1" else float(spec.order)
    assert dn.LevelDensity(spec, norm).total() == pytest.approx(want, abs=1e-6 * want)


def test_level_density_rejects_unsupported():
    with pytest.raises(DomainError):
        dn.LevelDensity(EnsembleSpec("GOE", 2))
    with pytest.raises(DomainError):
        dn.LevelDensity(EnsembleSpec("GUE", 2), "2")
