import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from gue_singular import ensembles as ens
from gue_singular import specfun
from gue_singular.errors import DomainError
from gue_singular.linalg import bidiagonal_singular_values_batch
from gue_singular.mcharness import ks_one_sample, ks_two_sample, moment_ci


def rng(seed=0, stream=0):
    return ens.make_rng(seed, stream)


# --- RNG and variates -------------------------------------------------------


def test_same_seed_and_stream_reproduce():
    assert np.array_equal(rng(5, 1).standard_normal(8), rng(5, 1).standard_normal(8))
    assert not np.array_equal(rng(5, 1).standard_normal(8), rng(5, 2).standard_normal(8))


def test_derive_seed_is_deterministic_and_path_sensitive():
    assert ens.derive_seed(1, 2, 3) == ens.derive_seed(1, 2, 3)
    assert ens.derive_seed(1, 2, 3) != ens.derive_seed(1, 3, 2)


@pytest.mark.parametrize("shape", [0.25, 0.5, 1.0, 3.5])
def test_standard_gamma_matches_scipy_law(shape):
    x = ens.standard_gamma(rng(11), shape, 50_000)
    assert ks_one_sample(x, stats.gamma(shape).cdf).passed


@pytest.mark.parametrize("dof", [1, 2, 3, 7])
def test_sample_chi_law(dof):
    x = ens.sample_chi(rng(12, dof), dof, 50_000)
    assert ks_one_sample(x, lambda z: specfun.chi_cdf(dof, z)).passed


def test_gamma_rejects_nonpositive_shape():
    with pytest.raises(DomainError):
        ens.standard_gamma(rng(), 0.0, 3)


# --- descriptors ------------------------------------------------------------


def test_ensemble_spec_laguerre_parameter_rules():
    assert ens.EnsembleSpec("LUE", 3, 0.5).laguerre_a == 0.5
    with pytest.raises(DomainError):
        ens.EnsembleSpec("LUE", 3)
    with pytest.raises(DomainError):
        ens.EnsembleSpec("GUE", 3, 0.5)
    with pytest.raises(DomainError):
        ens.EnsembleSpec("GUE", 0)
    with pytest.raises(DomainError):
        ens.EnsembleSpec("GSE", 2)


def test_family_parse_aliases():
    assert ens.Family.parse("antigue") is ens.Family.ANTIGUE
    assert ens.Family.parse("gue-direct") is ens.Family.GUE_SINGULAR_DIRECT
    assert ens.Family.parse("ginibre") is ens.Family.GINIBRE


def test_spectrum_sorts_and_checks_sign():
    s = ens.Spectrum((3.0, 1.0, 2.0), "singular_values", ens.EnsembleSpec("GUE", 3))
    assert s.values == (1.0, 2.0, 3.0)
    with pytest.raises(DomainError):
        ens.Spectrum((-1.0,), "singular_values", ens.EnsembleSpec("GUE", 1))


def test_chi_model_validation():
    with pytest.raises(DomainError):
        ens.BidiagonalChiModel((1.0, 0.0), (1.0,), 2, 2)


# --- models -----------------------------------------------------------------


def test_lue_model_examples():
    m = ens.lue_bidiagonal_model(1, 0.3)
    assert m.diag_dof == pytest.approx((2.6,)) and m.off_dof == ()
    m = ens.lue_bidiagonal_model(3, 0.5)
    assert m.diag_dof == (7, 5, 3) and m.off_dof == (4, 2) and not m.upper
    m = ens.lue_bidiagonal_model(4, -0.5)
    assert m.diag_dof == (7, 5, 3, 1) and m.off_dof == (6, 4, 2)
    with pytest.raises(DomainError):
        ens.lue_bidiagonal_model(3, -1.0)


def test_antigue_model_examples():
    m2 = ens.antigue_model(2)
    assert m2.diag_dof == (1,) and m2.off_dof == () and (m2.rows, m2.cols) == (1, 1)
    m7 = ens.antigue_model(7)
    assert (m7.rows, m7.cols) == (3, 4)
    assert m7.diag_dof == (6, 4, 2) and m7.off_dof == (5, 3, 1)
    m3 = ens.antigue_model(3)
    assert (m3.rows, m3.cols) == (1, 2) and m3.diag_dof == (2,) and m3.off_dof == (1,)
    assert ens.antigue_model(1) is ens.EMPTY_MODEL
    with pytest.raises(DomainError):
        ens.antigue_model(0)


def test_antigue_n3_singular_value_is_chi3():
    sv = ens.antigue_model(3).singular_values(rng(21), 50_000)[:, 0]
    assert ks_one_sample(sv, lambda z: specfun.chi_cdf(3, z)).passed


@pytest.mark.parametrize("n", range(1, 7))
def test_even_antigue_is_transposed_lue_minus_half(n):
    a = ens.antigue_model(2 * n)
    lue = ens.lue_bidiagonal_model(n, -0.5).transpose()
    assert a.diag_dof == lue.diag_dof and a.off_dof == lue.off_dof
    assert (a.rows, a.cols, a.upper) == (lue.rows, lue.cols, lue.upper)


def test_odd_antigue_plus_model_examples():
    assert ens.antigue_odd_to_plus_laguerre(3).diag_dof == (3,)
    b7 = ens.antigue_odd_to_plus_laguerre(7)
    lue = ens.lue_bidiagonal_model(3, 0.5).transpose()
    assert b7.diag_dof == lue.diag_dof and b7.off_dof == lue.off_dof and b7.upper
    with pytest.raises(DomainError):
        ens.antigue_odd_to_plus_laguerre(6)


def test_odd_antigue_models_share_singular_value_law():
    a = ens.antigue_model(7).singular_values(rng(31, 0), 100_000)
    b = ens.antigue_odd_to_plus_laguerre(7).singular_values(rng(31, 1), 100_000)
    assert ks_two_sample(a.ravel(), b.ravel()).passed


def test_direct_model_examples():
    b1, b2 = ens.gue_singular_direct_model(1)
    assert b1.diag_dof == (1,) and b2 is ens.EMPTY_MODEL
    b1, b2 = ens.gue_singular_direct_model(2)
    assert b1.diag_dof == (1,) and b2.diag_dof == (3,)
    b1, b2 = ens.gue_singular_direct_model(7)
    assert b1.diag_dof == (7, 5, 3, 1) and b2.diag_dof == (7, 5, 3)


@given(st.integers(1, 40))
def test_direct_model_diagonal_dof_multiset(n):
    b1, b2 = ens.gue_singular_direct_model(n)
    got = sorted(b1.diag_dof + b2.diag_dof)
    assert got == sorted(2 * (i // 2) + 1 for i in range(1, n + 1))


@given(st.integers(1, 30))
def test_direct_model_dof_formulas(n):
    n1, n2 = 2 * math.ceil(n / 2) - 1, 2 * (n // 2) + 1
    b1, b2 = ens.gue_singular_direct_model(n)
    assert b1.diag_dof == tuple(range(n1, 0, -2))
    assert b1.off_dof == tuple(range(n1 - 1, 1, -2))
    if n >= 2:
        assert b2.diag_dof == tuple(range(n2, 2, -2))
        assert b2.off_dof == tuple(range(n2 - 3, 1, -2))


# --- chi rotation -----------------------------------------------------------


def test_chi_rotation_examples():
    assert ens.chi_rotation_step(1.0, 1.0, 0.0) == (1.0, 0.0, 1.0)
    assert ens.chi_rotation_step(5.0, 3.0, 4.0) == pytest.approx((3.0, 4.0, 5.0))
    with pytest.raises(DomainError):
        ens.chi_rotation_step(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ens.chi_rotation_step(1.0, -1.0, 1.0)


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
def test_chi_rotation_block_is_orthogonal_transform(w, x, y):
    p00, p01, p10, p11 = ens.chi_rotation_block(w, x, y)
    assert p11 == 0.0
    block = np.array([[w, 0.0], [x, y]])
    out = np.array([[p00, p01], [p10, p11]])
    assert np.allclose(np.linalg.svd(block, compute_uv=False), np.linalg.svd(out, compute_uv=False), rtol=1e-12)


@pytest.mark.parametrize("r,s", [(1, 2), (3, 4)])
def test_chi_rotation_marginals_and_independence(r, s):
    g = rng(41, r)
    t = 50_000
    w, x, y = ens.sample_chi(g, r + s, t), ens.sample_chi(g, r, t), ens.sample_chi(g, s, t)
    tt, uu, vv = ens.chi_rotation_step(w, x, y)
    for vals, k in ((tt, r), (uu, s), (vv, r + s)):
        assert ks_one_sample(vals, lambda z: specfun.chi_cdf(k, z)).passed
    # independence screen: sample correlations of squares vanish
    for a, b in ((tt, uu), (tt, vv), (uu, vv)):
        assert abs(np.corrcoef(a**2, b**2)[0, 1]) < 4 / math.sqrt(t)


@pytest.mark.parametrize("N", [3, 5, 7, 9])
def test_rotation_maps_odd_staircase_onto_square_model(N):
    model = ens.antigue_model(N)
    diag, sup = model.sample(rng(51, N), 20_000)
    d2, s2 = ens.rotate_odd_antigue_to_laguerre(diag, sup)
    assert np.allclose(model.singular_values(rng(51, N), 20_000), bidiagonal_singular_values_batch(d2, s2), rtol=1e-10)
    target = ens.antigue_odd_to_plus_laguerre(N)
    # Bonferroni over the entries of this model
    level = 0.01 / (len(target.diag_dof) + len(target.off_dof))
    for j, k in enumerate(target.diag_dof):
        assert ks_one_sample(d2[:, j], lambda z: specfun.chi_cdf(k, z), level).passed
    for j, k in enumerate(target.off_dof):
        assert ks_one_sample(s2[:, j], lambda z: specfun.chi_cdf(k, z), level).passed


# --- dense samplers ---------------------------------------------------------


def test_gue_entry_normalization():
    m = ens.gue_matrices(3, rng(61), 200_000)
    assert np.allclose(m, np.conj(np.swapaxes(m, -1, -2)))
    assert np.var(m[:, 0, 0].real) == pytest.approx(1.0, abs=0.02)
    assert np.var(m[:, 0, 1].real) == pytest.approx(0.5, abs=0.01)
    assert np.var(m[:, 0, 1].imag) == pytest.approx(0.5, abs=0.01)


def test_gue_n1_is_standard_normal():
    x = ens.sample_gue_dense(1, rng(62), 50_000)[:, 0]
    assert ks_one_sample(x, stats.norm.cdf).passed


def test_gue_n2_mean_determinant():
    ci = moment_ci(np.real(np.linalg.det(ens.gue_matrices(2, rng(63), 1_000_000))), 1)
    assert ci.contains(-1.0)


def test_gue_trace_has_variance_n():
    ev = ens.sample_gue_dense(7, rng(64), 200_000)
    tr = ev.sum(axis=1)
    assert moment_ci(tr, 1).contains(0.0)
    assert moment_ci(tr, 2).contains(7.0)


def test_goe_examples():
    x = ens.sample_goe_dense(1, rng(71), 500_000)[:, 0]
    assert moment_ci(x, 2).contains(2.0)
    dets = np.linalg.det(ens.goe_matrices(2, rng(72), 1_000_000))
    assert moment_ci(dets, 1).contains(-1.0)


def test_ginibre_magnitudes():
    x = ens.sample_ginibre_magnitudes(1, rng(81), 50_000)[:, 0]
    assert ks_one_sample(x, lambda z: specfun.chi_cdf(2, z)).passed
    pairs = ens.sample_ginibre_magnitudes(2, rng(82), 500_000)
    assert moment_ci(np.prod(pairs, axis=1), 2).contains(8.0)
    assert np.all(np.diff(pairs, axis=1) >= 0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
def test_dense_and_direct_gue_singular_values_agree(n):
    t = 100_000
    dense = np.abs(ens.sample_gue_dense(n, rng(91, n), t)).ravel()
    direct = ens.sample_gue_direct(n, rng(92, n), t).ravel()
    assert ks_two_sample(dense, direct).passed


# --- dispatch ---------------------------------------------------------------


def test_sample_spectrum_examples():
    s = ens.sample_spectrum(ens.EnsembleSpec("GUE", 2), 7, "singular_values")
    ev = ens.sample_spectrum(ens.EnsembleSpec("GUE", 2), 7, "eigenvalues")
    assert s.values == tuple(sorted(abs(v) for v in ev.values))
    lue = ens.sample_spectrum(ens.EnsembleSpec("LUE", 3, 0.5), 7)
    assert len(lue) == 3 and min(lue.values) >= 0
    a2 = ens.sample_spectrum(ens.EnsembleSpec("AntiGUE", 2), 7)
    assert len(a2) == 1
    a1 = ens.sample_spectrum(ens.EnsembleSpec("AntiGUE", 1), 7)
    assert len(a1) == 0


@pytest.mark.parametrize("N", [3, 4, 5])
def test_antigue_eigenvalues_come_in_pairs(N):
    ev = ens.sample_spectra(ens.EnsembleSpec("AntiGUE", N), rng(101), 10, "eigenvalues")
    assert ev.shape == (10, N)
    assert np.allclose(ev, -ev[:, ::-1])


@pytest.mark.parametrize(
    "spec",
    [
        ens.EnsembleSpec("GUE", 4),
        ens.EnsembleSpec("GOE", 3),
        ens.EnsembleSpec("LUE", 3, -0.5),
        ens.EnsembleSpec("AntiGUE", 6),
        ens.EnsembleSpec("Ginibre", 4),
        ens.EnsembleSpec("GUESingularDirect", 5),
    ],
)
def test_sample_spectra_shape_and_order(spec):
    out = ens.sample_spectra(spec, rng(102), 50)
    assert out.shape == (50, spec.spectrum_size())
    assert np.all(out >= 0) and np.all(np.diff(out, axis=1) >= 0)


def test_eigenvalue_kind_rejected_where_undefined():
    with pytest.raises(DomainError):
        ens.sample_spectra(ens.EnsembleSpec("Ginibre", 2), rng(), 1, "eigenvalues")
    with pytest.raises(DomainError):
        ens.sample_spectra(ens.EnsembleSpec("GUESingularDirect", 2), rng(), 1, "eigenvalues")


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**63))
def test_direct_sampler_reproducible(n, seed):
    a = ens.sample_gue_direct(n, rng(seed), 5)
    b = ens.sample_gue_direct(n, rng(seed), 5)
    assert np.array_equal(a, b)
