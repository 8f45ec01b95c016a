"""Small dense kernels: Hermitian and tridiagonal eigenvalues, bidiagonal singular values, LU log-determinants.

The single-matrix routines (Householder reduction, implicit Wilkinson-shift QR,
Golub-Kahan embedding) are written out here. The ``*_batch`` variants push many
small matrices through LAPACK at once; Monte Carlo loops use those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError

_EPS = np.finfo(float).eps
_BATCH_ROWS = 1 << 16


@dataclass(frozen=True)
class LogDet:
    """``sign * exp(log_abs)``; ``sign == 0`` marks an exactly singular matrix."""

    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        return 0.0 if self.sign == 0 else self.sign * math.exp(self.log_abs)


@dataclass(frozen=True)
class BidiagonalReal:
    """Real bidiagonal matrix with ``|rows - cols| <= 1``.

    ``diag`` holds entries ``(i, i)``. ``off`` holds ``(i, i+1)`` when ``upper`` and
    ``(i+1, i)`` otherwise. A ``m x (m+1)`` matrix must be upper and a
    ``(m+1) x m`` matrix lower, so that every row/column band is staircase-shaped.
    """

    diag: tuple
    off: tuple
    rows: int
    cols: int
    upper: bool = True

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(float(v) for v in self.diag))
        object.__setattr__(self, "off", tuple(float(v) for v in self.off))
        r, c = self.rows, self.cols
        if r < 0 or c < 0 or abs(r - c) > 1:
            raise StructuralError(f"bidiagonal shape {r}x{c} needs |rows-cols| <= 1")
        m = min(r, c)
        if len(self.diag) != m:
            raise StructuralError(f"expected {m} diagonal entries, got {len(self.diag)}")
        want_off = max(m - 1, 0) if r == c else m
        if len(self.off) != want_off:
            raise StructuralError(f"expected {want_off} off-diagonal entries, got {len(self.off)}")
        if c == r + 1 and not self.upper:
            raise StructuralError("a wide bidiagonal matrix must be upper")
        if r == c + 1 and self.upper:
            raise StructuralError("a tall bidiagonal matrix must be lower")

    def dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        for i, v in enumerate(self.diag):
            out[i, i] = v
        for i, v in enumerate(self.off):
            if self.upper:
                out[i, i + 1] = v
            else:
                out[i + 1, i] = v
        return out

    def transpose(self) -> "BidiagonalReal":
        return BidiagonalReal(self.diag, self.off, self.cols, self.rows, not self.upper)


# ---------------------------------------------------------------------------
# eigenvalues


def _check_hermitian(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if not np.allclose(m, m.conj().T, rtol=0.0, atol=64 * _EPS * scale):
        raise StructuralError("matrix is not Hermitian")
    if np.iscomplexobj(m) and np.any(np.abs(np.diag(m).imag) > 64 * _EPS * scale):
        raise StructuralError("Hermitian matrix has non-real diagonal")
    return m


def householder_tridiagonal(m) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a Hermitian matrix to a real symmetric tridiagonal one with the same spectrum.

    Returns ``(d, e)``: diagonal and nonnegative off-diagonal. The complex phases of
    the reduced off-diagonal are removed by a diagonal unitary similarity, which
    leaves only their moduli.
    """
    a = np.array(_check_hermitian(m), dtype=complex)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1 :, k].copy()
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * norm
        v /= np.linalg.norm(v)
        a[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ a[k + 1 :, :])
        a[:, k + 1 :] -= 2.0 * np.outer(a[:, k + 1 :] @ v, v.conj())
    return np.real(np.diag(a)).copy(), np.abs(np.diag(a, -1))


def tridiagonal_eigenvalues(d, e) -> np.ndarray:
    """Eigenvalues of the symmetric tridiagonal matrix with diagonal ``d`` and off-diagonal ``e``.

    Implicit QR sweeps with Wilkinson shifts; an off-diagonal entry is dropped once
    it is below machine epsilon relative to its diagonal neighbours (or to the
    matrix scale, for blocks whose diagonal converges to zero).
    """
    d = [float(v) for v in d]
    e = [float(v) for v in e]
    n = len(d)
    if len(e) != max(n - 1, 0):
        raise StructuralError("off-diagonal length must be len(d) - 1")
    if n == 0:
        return np.empty(0)
    scale = max([abs(v) for v in d] + [abs(v) for v in e] + [0.0])
    floor = _EPS * scale
    q = n - 1
    sweeps = 0
    while q > 0:
        for i in range(q):
            if abs(e[i]) <= _EPS * (abs(d[i]) + abs(d[i + 1])) or abs(e[i]) <= floor:
                e[i] = 0.0
        while q > 0 and e[q - 1] == 0.0:
            q -= 1
        if q == 0:
            break
        p = q - 1
        while p > 0 and e[p - 1] != 0.0:
            p -= 1
        sweeps += 1
        if sweeps > 60 * n:
            raise ArithmeticError("tridiagonal QR failed to converge")
        # Wilkinson shift from the trailing 2x2 block
        half = 0.5 * (d[q - 1] - d[q])
        b2 = e[q - 1] * e[q - 1]
        denom = half + math.copysign(math.hypot(half, e[q - 1]), half if half != 0 else 1.0)
        mu = d[q] - b2 / denom
        x, z = d[p] - mu, e[p]
        for k in range(p, q):
            r = math.hypot(x, z)
            c, s = (1.0, 0.0) if r == 0.0 else (x / r, -z / r)
            if k > p:
                e[k - 1] = r
            a, b, cc = d[k], e[k], d[k + 1]
            d[k] = c * c * a - 2 * c * s * b + s * s * cc
            d[k + 1] = s * s * a + 2 * c * s * b + c * c * cc
            e[k] = c * s * (a - cc) + (c * c - s * s) * b
            if k + 1 < q:
                bulge = -s * e[k + 1]
                e[k + 1] *= c
                x, z = e[k], bulge
    return np.sort(np.array(d))


def hermitian_eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending."""
    d, e = householder_tridiagonal(m)
    return tridiagonal_eigenvalues(d, e)


def hermitian_eigenvalues_batch(ms) -> np.ndarray:
    """Ascending eigenvalues of a stack ``(..., n, n)`` of Hermitian matrices (LAPACK)."""
    return np.linalg.eigvalsh(ms)


# ---------------------------------------------------------------------------
# singular values


def _golub_kahan_offdiag(diag, off):
    """Interleave ``diag`` and ``off`` into the off-diagonal of the zero-diagonal embedding."""
    m = len(diag)
    seq = []
    for i in range(m):
        seq.append(diag[i])
        if i < len(off):
            seq.append(off[i])
    return seq


def bidiagonal_singular_values(b: BidiagonalReal) -> np.ndarray:
    """Singular values of a bidiagonal matrix, ascending, without forming ``B^T B``.

    A perfect-shuffle permutation of ``[[0, B], [B^T, 0]]`` is symmetric tridiagonal
    with zero diagonal; its eigenvalues are ``+-sigma_i`` plus a zero when the
    shape is rectangular.
    """
    m = len(b.diag)
    if m == 0:
        return np.empty(0)
    seq = _golub_kahan_offdiag(b.diag, b.off)
    ev = tridiagonal_eigenvalues(np.zeros(len(seq) + 1), seq)
    return np.sort(np.abs(ev[-m:]))


def bidiagonal_singular_values_batch(diag, off) -> np.ndarray:
    """Batched singular values: ``diag`` is ``(T, m)``, ``off`` is ``(T, m-1)`` or ``(T, m)``.

    Square versus rectangular shape is inferred from the width of ``off``. Result
    rows are ascending.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    t, m = diag.shape
    if m == 0:
        return np.empty((t, 0))
    if off.shape[1] not in (m - 1, m):
        raise StructuralError("off-diagonal width must be m-1 (square) or m (rectangular)")
    if m == 1 and off.shape[1] == 0:
        return np.abs(diag)
    width = m + off.shape[1]
    seq = np.empty((t, width))
    seq[:, 0::2] = diag
    seq[:, 1::2] = off
    size = width + 1
    out = np.empty((t, m))
    idx = np.arange(width)
    for start in range(0, t, _BATCH_ROWS):
        stop = min(start + _BATCH_ROWS, t)
        emb = np.zeros((stop - start, size, size))
        emb[:, idx, idx + 1] = seq[start:stop]
        emb[:, idx + 1, idx] = seq[start:stop]
        ev = np.linalg.eigvalsh(emb)
        out[start:stop] = np.abs(ev[:, -m:])
    out.sort(axis=1)
    return out


# ---------------------------------------------------------------------------
# determinants


def logdet_lu(h) -> LogDet:
    """``log|det|`` and sign of a square real matrix by partially pivoted LU.

    Pivot logarithms are accumulated with ``math.fsum`` so the sum is exactly
    rounded regardless of their spread in magnitude.
    """
    a = np.array(h, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    sign = 1
    logs = []
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        piv = a[p, k]
        if piv == 0.0:
            return LogDet(-math.inf, 0)
        if p != k:
            a[[k, p]] = a[[p, k]]
            sign = -sign
        if piv < 0:
            sign = -sign
        logs.append(math.log(abs(piv)))
        a[k + 1 :, k] /= piv
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return LogDet(math.fsum(logs), sign)
