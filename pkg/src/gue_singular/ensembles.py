"""Samplers for the matrix ensembles and their bidiagonal chi models.

Normalizations:

* GUE: ``(G + G^H)/2`` with real and imaginary parts of ``G`` standard normal, so
  diagonal entries are N(0, 1) and off-diagonal real/imaginary parts N(0, 1/2).
* GOE: ``(G + G^T)/sqrt(2)``, diagonal N(0, 2), off-diagonal N(0, 1).
* Anti-GUE: ``i K`` with ``K`` real skew-symmetric, standard normal above the diagonal.
* Ginibre: real and imaginary parts standard normal, eigenvalue weight
  ``exp(-|z|**2/2)``; magnitudes are drawn from the independent chi law.

Every sampler takes an explicit ``numpy.random.Generator``; see :func:`make_rng`.
Batched samplers return ``(trials, m)`` arrays with ascending rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError
from .linalg import BidiagonalReal, bidiagonal_singular_values_batch

_CHUNK = 1 << 14


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``.

    Two different streams of the same seed are statistically independent and can
    be consumed concurrently; one generator must not be shared between threads.
    """
    mask = (1 << 64) - 1
    return np.random.Generator(np.random.Philox(key=[seed & mask, stream & mask]))


# ---------------------------------------------------------------------------
# gamma / chi variates


def standard_gamma(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    """Gamma(shape, 1) variates by Marsaglia-Tsang squeeze/rejection.

    Shapes below 1 are boosted: ``G(a) = G(a+1) * U**(1/a)``.
    """
    if not shape > 0:
        raise DomainError(f"gamma shape must be > 0, got {shape}")
    if shape < 1:
        boosted = standard_gamma(rng, shape + 1.0, size)
        return boosted * rng.random(size) ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    todo = np.arange(size)
    while todo.size:
        x = rng.standard_normal(todo.size)
        v = (1.0 + c * x) ** 3
        u = rng.random(todo.size)
        ok = v > 0
        vv = np.where(ok, v, 1.0)
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        full = np.log(u) < 0.5 * x2 + d * (1.0 - vv + np.log(vv))
        ok &= squeeze | full
        out[todo[ok]] = d * v[ok]
        todo = todo[~ok]
    return out


def sample_chi(rng: np.random.Generator, dof: float, size: int) -> np.ndarray:
    """chi_dof variates as ``sqrt(2 * Gamma(dof/2))``."""
    return np.sqrt(2.0 * standard_gamma(rng, 0.5 * dof, size))


# ---------------------------------------------------------------------------
# descriptors


class Family(str, Enum):
    GUE = "GUE"
    GOE = "GOE"
    LUE = "LUE"
    ANTIGUE = "AntiGUE"
    GINIBRE = "Ginibre"
    GUE_SINGULAR_DIRECT = "GUESingularDirect"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, cls):
            return name
        key = str(name).replace("-", "").replace("_", "").lower()
        for fam in cls:
            if fam.value.lower() == key:
                return fam
        aliases = {"antigue": cls.ANTIGUE, "guedirect": cls.GUE_SINGULAR_DIRECT, "direct": cls.GUE_SINGULAR_DIRECT}
        if key in aliases:
            return aliases[key]
        raise DomainError(f"unknown ensemble family {name!r}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble, at which order (``N`` for anti-GUE), and the LUE parameter."""

    family: Family
    order: int
    laguerre_a: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if int(self.order) != self.order or self.order < 1:
            raise DomainError(f"order must be a positive integer, got {self.order}")
        if self.family is Family.LUE:
            if self.laguerre_a is None or not self.laguerre_a > -1:
                raise DomainError(f"LUE needs laguerre_a > -1, got {self.laguerre_a}")
        elif self.laguerre_a is not None:
            raise DomainError("laguerre_a applies to the LUE only")

    def spectrum_size(self, kind: str = "singular_values") -> int:
        if self.family is Family.ANTIGUE:
            return self.order // 2 if kind == "singular_values" else self.order
        return self.order


@dataclass(frozen=True)
class Spectrum:
    """Sorted spectral points of one sampled matrix."""

    values: tuple
    kind: str
    source: EnsembleSpec
    seed: int | None = None

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.values))
        object.__setattr__(self, "values", vals)
        if self.kind not in ("eigenvalues", "singular_values"):
            raise DomainError(f"unknown spectrum kind {self.kind!r}")
        if self.kind == "singular_values" and any(v < 0 for v in vals):
            raise DomainError("singular values must be nonnegative")

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


@dataclass(frozen=True)
class BidiagonalChiModel:
    """Bidiagonal matrix with independent chi entries of the listed degrees of freedom."""

    diag_dof: tuple
    off_dof: tuple
    rows: int
    cols: int
    upper: bool = True
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "diag_dof", tuple(self.diag_dof))
        object.__setattr__(self, "off_dof", tuple(self.off_dof))
        if any(not k > 0 for k in self.diag_dof + self.off_dof):
            raise DomainError("all chi degrees of freedom must be > 0")
        if self.rows or self.cols:
            # reuse the structural validation of the realized matrix
            BidiagonalReal([1.0] * len(self.diag_dof), [1.0] * len(self.off_dof), self.rows, self.cols, self.upper)

    @property
    def size(self) -> int:
        return len(self.diag_dof)

    def transpose(self) -> "BidiagonalChiModel":
        return BidiagonalChiModel(self.diag_dof, self.off_dof, self.cols, self.rows, not self.upper, self.label)

    def sample(self, rng: np.random.Generator, trials: int) -> tuple[np.ndarray, np.ndarray]:
        """Entries ``(diag, off)`` of ``trials`` independent realizations."""
        diag = np.empty((trials, len(self.diag_dof)))
        off = np.empty((trials, len(self.off_dof)))
        for j, k in enumerate(self.diag_dof):
            diag[:, j] = sample_chi(rng, k, trials)
        for j, k in enumerate(self.off_dof):
            off[:, j] = sample_chi(rng, k, trials)
        return diag, off

    def realize(self, rng: np.random.Generator) -> BidiagonalReal:
        diag, off = self.sample(rng, 1)
        return BidiagonalReal(diag[0], off[0], self.rows, self.cols, self.upper)

    def singular_values(self, rng: np.random.Generator, trials: int) -> np.ndarray:
        if self.size == 0:
            return np.empty((trials, 0))
        diag, off = self.sample(rng, trials)
        return bidiagonal_singular_values_batch(diag, off)


EMPTY_MODEL = BidiagonalChiModel((), (), 0, 0, True, "empty")


# ---------------------------------------------------------------------------
# chi models


def lue_bidiagonal_model(n: int, a: float) -> BidiagonalChiModel:
    """Lower bidiagonal model of LUE_n^(a): diagonal chi_{2(n+a)}, ..., chi_{2(a+1)};
    subdiagonal chi_{2(n-1)}, ..., chi_2."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not a > -1:
        raise DomainError(f"Laguerre parameter must be > -1, got {a}")
    diag = tuple(2 * (n + a - i) for i in range(n))
    sub = tuple(2 * (n - 1 - i) for i in range(n - 1))
    return BidiagonalChiModel(diag, sub, n, n, upper=False, label=f"LUE_{n}^({a:g})")


def antigue_model(N: int) -> BidiagonalChiModel:
    """Staircase model whose singular values are the distinct nonzero anti-GUE_N singular values.

    Row ``i`` holds ``(chi_{N-1-2i}, chi_{N-2-2i})`` in columns ``i, i+1``: a square
    ``N/2`` matrix ending in a lone ``chi_1`` for even ``N``, a ``(N-1)/2 x (N+1)/2``
    rectangle for odd ``N``. ``N = 1`` gives the empty model.
    """
    if N < 1:
        raise DomainError(f"anti-GUE order must be >= 1, got {N}")
    n = N // 2
    if n == 0:
        return EMPTY_MODEL
    diag = tuple(N - 1 - 2 * i for i in range(n))
    sup = tuple(k for k in (N - 2 - 2 * i for i in range(n)) if k > 0)
    cols = n if N % 2 == 0 else n + 1
    return BidiagonalChiModel(diag, sup, n, cols, upper=True, label=f"antiGUE_{N}")


def antigue_odd_to_plus_laguerre(N: int) -> BidiagonalChiModel:
    """Square upper model with diagonal chi_N, chi_{N-2}, ..., chi_3 and superdiagonal
    chi_{N-3}, ..., chi_2; same singular-value law as :func:`antigue_model` for odd N."""
    if N % 2 == 0 or N < 3:
        raise DomainError(f"needs odd N >= 3, got {N}")
    n = N // 2
    diag = tuple(N - 2 * i for i in range(n))
    sup = tuple(N - 3 - 2 * i for i in range(n - 1))
    return BidiagonalChiModel(diag, sup, n, n, upper=True, label=f"B_{N}")


def gue_singular_direct_model(n: int) -> tuple[BidiagonalChiModel, BidiagonalChiModel]:
    """The two lower bidiagonal blocks whose joint singular values are those of GUE_n.

    Block one is LUE_{ceil(n/2)}^(-1/2) (even-order anti-GUE part), block two is
    LUE_{floor(n/2)}^(+1/2) (odd-order part, empty for ``n = 1``).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    first = lue_bidiagonal_model((n + 1) // 2, -0.5)
    second = lue_bidiagonal_model(n // 2, 0.5) if n >= 2 else EMPTY_MODEL
    return first, second


def chi_rotation_block(w, x, y):
    """Product ``[[w, 0], [x, y]] @ Q`` with the reflection ``Q = [[x, y], [y, -x]] / hypot(x, y)``.

    Returns the four entries ``(p00, p01, p10, p11)``; ``p11 = (x*y - y*x)/v`` is
    exactly zero in floating point.
    """
    w, x, y = (np.asarray(v, dtype=float) for v in (w, x, y))
    if np.any(w <= 0) or np.any(x < 0) or np.any(y < 0) or np.any(x + y <= 0):
        raise DomainError("chi rotation needs positive entries")
    v = np.hypot(x, y)
    return w * x / v, w * y / v, (x * x + y * y) / v, (x * y - y * x) / v


def chi_rotation_step(w, x, y):
    """Rotate ``[[w, 0], [x, y]]`` into ``[[t, u], [v, 0]]``.

    Returns ``(t, u, v) = (w x/r, w y/r, r)`` with ``r = hypot(x, y)``. With
    ``w ~ chi_{r+s}``, ``x ~ chi_r``, ``y ~ chi_s`` independent, the outputs are
    independent ``chi_r``, ``chi_s``, ``chi_{r+s}``.
    """
    t, u, _, _ = chi_rotation_block(w, x, y)
    v = np.hypot(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.ndim(t) == 0:
        return float(t), float(u), float(v)
    return t, u, v


def rotate_odd_antigue_to_laguerre(diag, sup):
    """Map sampled ``A_N`` (odd N) entries onto ``B_N`` entries by column rotations.

    ``diag``/``sup`` are ``(T, n)`` arrays of the ``n x (n+1)`` staircase. Working
    upward, each step applies :func:`chi_rotation_step` to rows ``(i-1, i)`` and
    columns ``(i, n)``, pushing a chi_1 carry into the last column; a final plain
    rotation folds the carry into the corner. Singular values are preserved.
    Returns the square upper bidiagonal ``(diag, sup)`` with ``n`` and ``n-1`` columns.
    """
    d = np.array(diag, dtype=float, copy=True)
    s = np.array(sup, dtype=float, copy=True)
    n = d.shape[1]
    carry = s[:, n - 1].copy()
    for i in range(n - 1, 0, -1):
        t, u, v = chi_rotation_step(s[:, i - 1], d[:, i], carry)
        s[:, i - 1], carry, d[:, i] = t, u, v
    d[:, 0] = np.hypot(d[:, 0], carry)
    return d, s[:, : n - 1]


# ---------------------------------------------------------------------------
# dense samplers


def gue_matrices(n: int, rng: np.random.Generator, trials: int) -> np.ndarray:
    g = rng.standard_normal((trials, n, n)) + 1j * rng.standard_normal((trials, n, n))
    return 0.5 * (g + np.conj(np.swapaxes(g, -1, -2)))


def goe_matrices(n: int, rng: np.random.Generator, trials: int) -> np.ndarray:
    g = rng.standard_normal((trials, n, n))
    return (g + np.swapaxes(g, -1, -2)) / math.sqrt(2.0)


def ginibre_matrices(n: int, rng: np.random.Generator, trials: int) -> np.ndarray:
    return rng.standard_normal((trials, n, n)) + 1j * rng.standard_normal((trials, n, n))


def _dense_eigs(make, n, rng, trials):
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    out = np.empty((trials, n))
    for start in range(0, trials, _CHUNK):
        stop = min(start + _CHUNK, trials)
        out[start:stop] = np.linalg.eigvalsh(make(n, rng, stop - start))
    return out


def sample_gue_dense(n: int, rng: np.random.Generator, trials: int = 1) -> np.ndarray:
    """Eigenvalues of ``trials`` dense GUE_n matrices, ``(trials, n)`` ascending."""
    return _dense_eigs(gue_matrices, n, rng, trials)


def sample_goe_dense(n: int, rng: np.random.Generator, trials: int = 1) -> np.ndarray:
    """Eigenvalues of ``trials`` dense GOE_n matrices, ``(trials, n)`` ascending."""
    return _dense_eigs(goe_matrices, n, rng, trials)


def sample_ginibre_magnitudes(n: int, rng: np.random.Generator, trials: int = 1) -> np.ndarray:
    """Eigenvalue magnitudes of complex Ginibre_n: independent chi_2, chi_4, ..., chi_2n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    out = np.empty((trials, n))
    for i in range(n):
        out[:, i] = sample_chi(rng, 2 * (i + 1), trials)
    out.sort(axis=1)
    return out


def sample_gue_direct(n: int, rng: np.random.Generator, trials: int = 1) -> np.ndarray:
    """GUE_n singular values from the direct-sum chi model, ``(trials, n)`` ascending."""
    first, second = gue_singular_direct_model(n)
    out = np.concatenate([first.singular_values(rng, trials), second.singular_values(rng, trials)], axis=1)
    out.sort(axis=1)
    return out


def sample_spectra(spec: EnsembleSpec, rng: np.random.Generator, trials: int, kind: str = "singular_values") -> np.ndarray:
    """Batched dispatch over every family; returns ``(trials, spectrum_size)``."""
    if kind not in ("eigenvalues", "singular_values"):
        raise DomainError(f"unknown spectrum kind {kind!r}")
    fam, n = spec.family, spec.order
    if fam in (Family.GUE, Family.GOE):
        eig = (sample_gue_dense if fam is Family.GUE else sample_goe_dense)(n, rng, trials)
        if kind == "eigenvalues":
            return eig
        sv = np.abs(eig)
        sv.sort(axis=1)
        return sv
    if fam is Family.GINIBRE:
        if kind == "eigenvalues":
            raise DomainError("Ginibre eigenvalues are complex; request singular-values (magnitudes)")
        return sample_ginibre_magnitudes(n, rng, trials)
    if fam is Family.GUE_SINGULAR_DIRECT:
        if kind == "eigenvalues":
            raise DomainError("the direct-sum model yields singular values only")
        return sample_gue_direct(n, rng, trials)
    if fam is Family.LUE:
        sv = lue_bidiagonal_model(n, spec.laguerre_a).singular_values(rng, trials)
        return sv if kind == "singular_values" else sv**2
    # anti-GUE
    sv = antigue_model(n).singular_values(rng, trials)
    if kind == "singular_values":
        return sv
    parts = [-sv[:, ::-1], sv] + ([np.zeros((trials, 1))] if n % 2 else [])
    out = np.concatenate(parts, axis=1)
    out.sort(axis=1)
    return out


def sample_spectrum(spec: EnsembleSpec, seed: int, kind: str = "singular_values", stream: int = 0) -> Spectrum:
    """One spectrum drawn from the ``(seed, stream)`` generator."""
    values = sample_spectra(spec, make_rng(seed, stream), 1, kind)[0]
    return Spectrum(tuple(values), kind, spec, seed)


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit seed for an independent sub-experiment labelled by ``path``."""
    return int(np.random.SeedSequence([seed & ((1 << 64) - 1), *path]).generate_state(1, np.uint64)[0])
