import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg as sla
from scipy.special import gamma

from gue_singular import linalg
from gue_singular.ensembles import antigue_model, make_rng
from gue_singular.errors import StructuralError


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def test_eigenvalues_small_cases():
    assert np.allclose(linalg.hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    assert np.allclose(linalg.hermitian_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1, 1])


def test_eigenvalue_trace_identity():
    m = random_hermitian(6, 1)
    assert np.sum(linalg.hermitian_eigenvalues(m)) == pytest.approx(np.trace(m).real, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_eigenvalues_match_lapack(n, seed):
    m = random_hermitian(n, seed)
    assert np.allclose(linalg.hermitian_eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-10 * max(1, np.abs(m).max()))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_eigenvector_residuals(n, seed):
    m = random_hermitian(n, seed)
    lam = linalg.hermitian_eigenvalues(m)
    norm = np.linalg.norm(m, 2)
    for val in lam:
        # smallest singular value of (M - lam I) measures the residual of the best eigenvector
        sv = np.linalg.svd(m - val * np.eye(n), compute_uv=False)
        assert sv[-1] <= 1e-10 * max(norm, 1)


def test_block_diagonal_merges_spectra():
    a, b = random_hermitian(3, 4), random_hermitian(4, 5)
    block = sla.block_diag(a, b)
    merged = np.sort(np.concatenate([linalg.hermitian_eigenvalues(a), linalg.hermitian_eigenvalues(b)]))
    assert np.allclose(linalg.hermitian_eigenvalues(block), merged, atol=1e-10)


def test_non_hermitian_rejected():
    with pytest.raises(StructuralError):
        linalg.hermitian_eigenvalues(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(StructuralError):
        linalg.hermitian_eigenvalues(np.ones((2, 3)))


def test_tridiagonal_with_zero_diagonal():
    e = [1.0, 2.0, 3.0]
    t = np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(linalg.tridiagonal_eigenvalues(np.zeros(4), e), np.linalg.eigvalsh(t))


def test_bidiagonal_examples():
    b = linalg.BidiagonalReal([2.0, 5.0, 1.0], [0.0, 0.0], 3, 3)
    assert np.allclose(linalg.bidiagonal_singular_values(b), [1, 2, 5])
    row = linalg.BidiagonalReal([3.0], [4.0], 1, 2, upper=True)
    assert np.allclose(linalg.bidiagonal_singular_values(row), [5.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.sampled_from(["square-upper", "square-lower", "wide", "tall"]), st.integers(0, 2**32 - 1))
def test_bidiagonal_singular_values_match_svd(m, shape, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(0.01, 3, m)
    if shape.startswith("square"):
        b = linalg.BidiagonalReal(d, rng.uniform(0.01, 3, m - 1), m, m, shape == "square-upper")
    elif shape == "wide":
        b = linalg.BidiagonalReal(d, rng.uniform(0.01, 3, m), m, m + 1, True)
    else:
        b = linalg.BidiagonalReal(d, rng.uniform(0.01, 3, m), m + 1, m, False)
    dense = b.dense()
    ref = np.sort(np.linalg.svd(dense, compute_uv=False))
    got = linalg.bidiagonal_singular_values(b)
    assert np.allclose(got, ref, atol=1e-12 * max(1, ref[-1]))
    assert np.sum(got**2) == pytest.approx(np.sum(dense**2), rel=1e-10)
    batch = linalg.bidiagonal_singular_values_batch(np.array([b.diag]), np.array([b.off]).reshape(1, -1))
    assert np.allclose(batch[0], ref, atol=1e-12 * max(1, ref[-1]))


def test_bidiagonal_shape_validation():
    with pytest.raises(StructuralError):
        linalg.BidiagonalReal([1.0], [1.0], 1, 2, upper=False)
    with pytest.raises(StructuralError):
        linalg.BidiagonalReal([1.0, 2.0], [1.0, 2.0], 2, 2)
    with pytest.raises(StructuralError):
        linalg.BidiagonalReal([1.0], [], 1, 3)


def test_transpose_roundtrip():
    b = linalg.BidiagonalReal([1.0, 2.0], [3.0, 4.0], 2, 3, True)
    assert np.array_equal(b.transpose().dense(), b.dense().T)


@pytest.mark.parametrize("N", range(2, 9))
def test_antigue_model_matches_skew_embedding(N):
    b = antigue_model(N).realize(make_rng(N))
    dense = b.dense()
    k = np.zeros((N, N))
    # interleave rows and columns of the staircase into a skew-symmetric tridiagonal matrix
    seq = []
    for i in range(len(b.diag)):
        seq.append(b.diag[i])
        if i < len(b.off):
            seq.append(b.off[i])
    for i, v in enumerate(seq):
        k[i, i + 1] = v
        k[i + 1, i] = -v
    ev = linalg.hermitian_eigenvalues(1j * k)
    sv = np.sort(np.linalg.svd(dense, compute_uv=False))
    positive = np.sort(ev[ev > 1e-9])
    assert np.allclose(positive, sv, atol=1e-9)
    assert np.allclose(np.sort(-ev[ev < -1e-9]), sv, atol=1e-9)


def test_logdet_examples():
    assert linalg.logdet_lu(np.eye(3)) == linalg.LogDet(0.0, 1)
    assert linalg.logdet_lu(np.array([[0.0, 1.0], [1.0, 0.0]])) == linalg.LogDet(0.0, -1)
    h = np.array([[gamma(1.5), gamma(2.5)], [gamma(2.5), gamma(3.5)]])
    closed = math.log(math.factorial(0) * gamma(1.5) * math.factorial(1) * gamma(2.5))
    assert linalg.logdet_lu(h).log_abs == pytest.approx(closed, rel=1e-13)


def test_logdet_singular_matrix():
    res = linalg.logdet_lu(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert res.sign == 0 and res.value == 0.0


@settings(max_examples=30)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=7, unique=True))
def test_vandermonde_sign(nodes):
    x = np.array(nodes)
    if np.min(np.abs(np.subtract.outer(x, x))[np.triu_indices(len(x), 1)]) < 1e-3:
        return
    v = np.vander(x, increasing=True)
    pairs = [x[j] - x[i] for i in range(len(x)) for j in range(i + 1, len(x))]
    expected = int(np.prod(np.sign(pairs)))
    res = linalg.logdet_lu(v)
    assert res.sign == expected
    assert res.log_abs == pytest.approx(math.fsum(math.log(abs(p)) for p in pairs), abs=1e-8)
