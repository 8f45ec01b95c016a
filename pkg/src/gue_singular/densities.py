"""Joint densities, signed desymmetrized measures, correlation kernels and level densities.

Conventions. Joint densities are symmetric functions on R^n (or (0, inf)^n) that
integrate to one over the full, unordered domain. One-point functions
(``*_one_point``) integrate to the number of points; ``level_density_*`` divide
by it.

* GUE eigenvalues: weight ``exp(-x**2/2)``, squared Vandermonde.
* GOE eigenvalues: weight ``exp(-x**2/4)``, absolute Vandermonde.
* LUE eigenvalues with parameter ``a``: weight ``y**a exp(-y/2)``.
* anti-GUE of order ``N = 2n + r``: its ``n`` distinct singular values have weight
  ``theta**(2r) exp(-theta**2/2)`` and a squared Vandermonde in ``theta**2``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, Family
from .errors import DomainError
from .specfun import hermite_functions, laguerre_functions, regularized_upper_gamma_int

_LOG_2PI = math.log(2 * math.pi)
_SIGN_SUM_CAP = 20


# ---------------------------------------------------------------------------
# quadrature


@functools.lru_cache(maxsize=None)
def _legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def quad(f, lo: float, hi: float, panels: int = 8, order: int = 64) -> float:
    """Composite Gauss-Legendre rule with equal panels; ``f`` must accept arrays."""
    nodes, weights = _legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return float(np.dot(w, f(x)))


def quad_nodes(lo: float, hi: float, panels: int = 8, order: int = 64):
    """Nodes and weights of :func:`quad`, for tensor-product rules."""
    nodes, weights = _legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * nodes[None, :]).ravel(), (half[:, None] * weights[None, :]).ravel()


# ---------------------------------------------------------------------------
# normalization constants


@functools.lru_cache(maxsize=None)
def log_norm_gue(n: int) -> float:
    """``log Z`` with ``Z = (2 pi)**(n/2) prod_{j=1..n} j!``."""
    return 0.5 * n * _LOG_2PI + sum(math.lgamma(j + 1) for j in range(1, n + 1))


@functools.lru_cache(maxsize=None)
def log_norm_goe(n: int) -> float:
    """``log Z`` for weight ``exp(-x**2/4)`` and ``|Vandermonde|`` (Selberg, rescaled by sqrt 2)."""
    out = 0.5 * n * _LOG_2PI + (0.5 * n + 0.25 * n * (n - 1)) * math.log(2)
    return out + sum(math.lgamma(1 + 0.5 * j) - math.lgamma(1.5) for j in range(1, n + 1))


@functools.lru_cache(maxsize=None)
def log_norm_lue(n: int, a: float) -> float:
    """``log Z`` with ``Z = 2**(n(n+a)) prod_{j<n} Gamma(a+1+j) (j+1)!``."""
    out = n * (n + a) * math.log(2)
    return out + sum(math.lgamma(a + 1 + j) + math.lgamma(j + 2) for j in range(n))


def log_norm_antigue(N: int) -> float:
    """``log Z`` of the anti-GUE singular-value density; ``2**-n`` times the LUE constant at ``a = r - 1/2``."""
    n, r = divmod(N, 2)
    if n == 0:
        return 0.0
    return log_norm_lue(n, r - 0.5) - n * math.log(2)


# ---------------------------------------------------------------------------
# joint densities


def _log_vandermonde(v: np.ndarray, power: float) -> float:
    """``power * sum_{i<j} log|v_i - v_j|``; ``-inf`` on a tie."""
    n = len(v)
    if n < 2:
        return 0.0
    diff = np.abs(v[:, None] - v[None, :])[np.triu_indices(n, 1)]
    if np.any(diff == 0):
        return -math.inf
    return power * math.fsum(np.log(diff))


def _points(points, size: int, nonneg: bool) -> np.ndarray:
    x = np.asarray(points, dtype=float).ravel()
    if len(x) != size:
        raise DomainError(f"expected {size} points, got {len(x)}")
    if nonneg and np.any(x < 0):
        raise DomainError("points must be nonnegative for this ensemble")
    return x


def log_density_gue(x) -> float:
    x = np.asarray(x, dtype=float)
    return _log_vandermonde(x, 2.0) - 0.5 * math.fsum(x * x) - log_norm_gue(len(x))


def log_density_goe(x) -> float:
    x = np.asarray(x, dtype=float)
    return _log_vandermonde(x, 1.0) - 0.25 * math.fsum(x * x) - log_norm_goe(len(x))


def log_density_lue(y, a: float) -> float:
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n == 0:
        return 0.0
    if np.any(y == 0) and a != 0:
        return math.inf if a < 0 else -math.inf
    with np.errstate(divide="ignore"):
        logs = a * np.log(y)
    return _log_vandermonde(y, 2.0) + math.fsum(logs) - 0.5 * math.fsum(y) - log_norm_lue(n, a)


def log_density_antigue(theta, N: int) -> float:
    """Symmetric density of the ``N // 2`` distinct anti-GUE_N singular values."""
    t = np.asarray(theta, dtype=float)
    n, r = divmod(N, 2)
    if len(t) != n:
        raise DomainError(f"anti-GUE_{N} has {n} distinct singular values, got {len(t)}")
    if n == 0:
        return 0.0
    if r and np.any(t == 0):
        return -math.inf
    with np.errstate(divide="ignore"):
        logs = 2 * r * np.log(t) if r else np.zeros(n)
    return _log_vandermonde(t * t, 2.0) + math.fsum(logs) - 0.5 * math.fsum(t * t) - log_norm_antigue(N)


def log_density_gue_singular(x) -> float:
    """GUE singular-value density: the eigenvalue density summed over all sign patterns."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n > _SIGN_SUM_CAP:
        raise DomainError(f"sign-pattern sum is capped at n = {_SIGN_SUM_CAP}")
    terms = [log_density_gue(x * np.array(signs)) for signs in itertools.product((1.0, -1.0), repeat=n)]
    top = max(terms)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def joint_log_density(spec: EnsembleSpec, points, kind: str | None = None) -> float:
    """Log of the symmetric joint density of one spectrum of ``spec``.

    ``kind`` defaults to eigenvalues for GUE, GOE and LUE and to singular values for
    anti-GUE and the direct-sum model. LUE singular values carry the Jacobian
    ``prod 2 x_i``; GUE singular values sum over the ``2**n`` sign patterns.
    """
    fam, n = spec.family, spec.order
    if kind is None:
        kind = "singular_values" if fam in (Family.ANTIGUE, Family.GUE_SINGULAR_DIRECT) else "eigenvalues"
    if fam is Family.GINIBRE:
        raise DomainError("Ginibre magnitudes: use ginibre_magnitude_density")
    if fam is Family.ANTIGUE:
        if kind != "singular_values":
            raise DomainError("anti-GUE densities are over distinct singular values")
        return log_density_antigue(_points(points, n // 2, True), n)
    if fam is Family.LUE:
        x = _points(points, n, True)
        if kind == "eigenvalues":
            return log_density_lue(x, spec.laguerre_a)
        if np.any(x == 0):
            return log_density_lue(x * x, spec.laguerre_a)
        return log_density_lue(x * x, spec.laguerre_a) + math.fsum(np.log(2 * x))
    if kind == "eigenvalues":
        if fam is Family.GUE_SINGULAR_DIRECT:
            raise DomainError("the direct-sum model has singular values only")
        x = _points(points, n, False)
        return log_density_gue(x) if fam is Family.GUE else log_density_goe(x)
    if fam is Family.GOE:
        raise DomainError("GOE singular-value density is not provided")
    return log_density_gue_singular(_points(points, n, True))


def signed_measure_mu(spec: EnsembleSpec, points) -> float:
    """Desymmetrized signed density whose average over permutations is the joint density.

    GUE: ``n! c prod_i x_i**(i-1) prod_{i<j} (x_j - x_i) exp(-sum x**2/2)``, i.e.
    ``n! c det(x_i**(i+j-2))`` times the weight. Anti-GUE: the same with every
    ``x`` replaced by ``theta**2`` and the extra weight ``theta**(2r)``.
    """
    fam, N = spec.family, spec.order
    if fam is Family.GUE:
        v = _points(points, N, False)
        extra = np.zeros(N)
        log_c = -log_norm_gue(N)
        quad_exp = 0.5 * math.fsum(v * v)
    elif fam is Family.ANTIGUE:
        n, r = divmod(N, 2)
        t = _points(points, n, True)
        if n == 0:
            return 1.0
        v = t * t
        with np.errstate(divide="ignore"):
            extra = 2 * r * np.log(t) if r else np.zeros(n)
        log_c = -log_norm_antigue(N)
        quad_exp = 0.5 * math.fsum(v)
    else:
        raise DomainError("signed measures are defined for GUE and anti-GUE")
    n = len(v)
    sign = 1.0
    logs = [math.lgamma(n + 1) + log_c, -quad_exp, math.fsum(extra)]
    for i in range(n):
        if i:
            if v[i] == 0:
                return 0.0
            sign *= math.copysign(1.0, v[i]) ** i
            logs.append(i * math.log(abs(v[i])))
        for j in range(i + 1, n):
            d = v[j] - v[i]
            if d == 0:
                return 0.0
            sign *= math.copysign(1.0, d)
            logs.append(math.log(abs(d)))
    return sign * math.exp(math.fsum(logs))


# ---------------------------------------------------------------------------
# kernels and level densities


@dataclass(frozen=True)
class WeightSpec:
    """Hermite weight ``exp(-x**2/2)`` or Laguerre weight ``y**a exp(-y/2)``."""

    kind: str
    parameter: float | None = None

    def __post_init__(self):
        if self.kind not in ("hermite", "laguerre"):
            raise DomainError(f"unknown weight {self.kind!r}")
        if self.kind == "laguerre" and (self.parameter is None or not self.parameter > -1):
            raise DomainError(f"Laguerre parameter must be > -1, got {self.parameter}")


def correlation_kernel(weight: WeightSpec, n: int, x, y):
    """Christoffel-Darboux projection kernel ``sqrt(w(x) w(y)) sum_{j<n} p_j(x) p_j(y)``.

    The determinant ``det K(x_i, x_j)`` over ``m`` points is the ``m``-point
    correlation function; at ``m = n`` it is ``n!`` times the joint density.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if weight.kind == "hermite":
        out = np.sum(hermite_functions(n, x) * hermite_functions(n, y), axis=0)
    else:
        a = weight.parameter
        if np.any(x < 0) or np.any(y < 0):
            raise DomainError("Laguerre kernel is defined for nonnegative arguments")
        with np.errstate(divide="ignore", invalid="ignore"):
            pref = 0.5 * (0.25 * x * y) ** (0.5 * a)
        out = pref * np.sum(laguerre_functions(n, a, 0.5 * x) * laguerre_functions(n, a, 0.5 * y), axis=0)
    return out if out.ndim else float(out)


def correlation_function(weight: WeightSpec, n: int, points) -> float:
    """``m``-point correlation ``det(K(x_i, x_j))`` for ``m = len(points) <= n``."""
    p = np.asarray(points, dtype=float)
    if len(p) > n:
        raise DomainError("more points than the ensemble size")
    k = correlation_kernel(weight, n, p[:, None], p[None, :])
    return float(np.linalg.det(np.atleast_2d(k)))


def gue_one_point(n: int, x):
    """``sigma_n(x) = sum_{k<n} psi_k(x)**2``; integrates to ``n``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    out = np.sum(hermite_functions(n, x) ** 2, axis=0)
    return out if out.ndim else float(out)


def gue_one_point_cd(n: int, x):
    """Christoffel-Darboux form ``n psi_n**2 - sqrt(n(n+1)) psi_{n-1} psi_{n+1}``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    psi = hermite_functions(n + 2, x)
    out = n * psi[n] ** 2 - math.sqrt(n * (n + 1)) * psi[n - 1] * psi[n + 1]
    return out if out.ndim else float(out)


def level_density_gue(n: int, x):
    """Density of a uniformly chosen GUE_n eigenvalue."""
    return gue_one_point(n, x) / n


def lue_one_point(n: int, a: float, y):
    """LUE eigenvalue one-point function (weight ``y**a exp(-y/2)``); integrates to ``n``."""
    return correlation_kernel(WeightSpec("laguerre", a), n, y, y)


def _half_sign(sign) -> float:
    if sign in ("+", 1, "plus", +0.5):
        return 0.5
    if sign in ("-", -1, "minus", -0.5):
        return -0.5
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def level_density_lue_half(n: int, sign, y):
    """``sigma_n^{L+-}(y)``: LUE one-point function at ``a = +-1/2``, in the eigenvalue variable."""
    a = _half_sign(sign)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or (a < 0 and np.any(y == 0)):
        raise DomainError("argument must be > 0 (minus case) or >= 0 (plus case)")
    return lue_one_point(n, a, y)


def lue_half_x_density(n: int, sign, x):
    """``x sigma_n^{L+-}(x**2)`` evaluated without the ``1/sqrt(y)`` singularity; integrates to ``n/2``."""
    a = _half_sign(sign)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("argument must be >= 0")
    s = np.sum(laguerre_functions(n, a, 0.5 * x * x) ** 2, axis=0)
    out = s / math.sqrt(2) if a < 0 else x * x * s / (2 * math.sqrt(2))
    return out if out.ndim else float(out)


def lue_half_singular_value_pdf(n: int, sign, x):
    """Density ``(2/n) x sigma_n^{L+-}(x**2)`` of a uniformly chosen singular value."""
    return 2.0 * lue_half_x_density(n, sign, x) / n


def semicircle_identity_residual(n: int, grid) -> float:
    """``max |sigma_n^H(x) - x sigma_{ceil(n/2)}^{L-}(x**2) - x sigma_{floor(n/2)}^{L+}(x**2)|`` over ``grid``."""
    x = np.asarray(grid, dtype=float)
    if np.any(x <= 0):
        raise DomainError("grid must be positive")
    rhs = lue_half_x_density((n + 1) // 2, "-", x)
    if n >= 2:
        rhs = rhs + lue_half_x_density(n // 2, "+", x)
    return float(np.max(np.abs(gue_one_point(n, x) - rhs)))


def ginibre_magnitude_density(n: int, x):
    """Density ``(x/n) Gamma(n, x**2/2)/Gamma(n)`` of a uniformly chosen eigenvalue modulus."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("moduli are nonnegative")
    out = x / n * regularized_upper_gamma_int(n, 0.5 * x * x)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class LevelDensity:
    """Callable one-point density of ``ensemble``; ``normalization`` is ``"n"`` or ``"1"``.

    Available for GUE eigenvalues, LUE eigenvalues and Ginibre moduli.
    """

    ensemble: EnsembleSpec
    normalization: str = "1"

    def __post_init__(self):
        if self.normalization not in ("n", "1"):
            raise DomainError("normalization must be 'n' or '1'")
        if self.ensemble.family not in (Family.GUE, Family.LUE, Family.GINIBRE):
            raise DomainError(f"no level density for {self.ensemble.family.value}")

    @property
    def support(self) -> tuple[float, float]:
        n = self.ensemble.order
        if self.ensemble.family is Family.GUE:
            edge = 2 * math.sqrt(n) + 12
            return -edge, edge
        if self.ensemble.family is Family.LUE:
            return 0.0, 8 * n + 4 * max(self.ensemble.laguerre_a, 0) + 80
        return 0.0, 2 * math.sqrt(n) + 12

    def __call__(self, x):
        spec = self.ensemble
        n = spec.order
        if spec.family is Family.GUE:
            out = gue_one_point(n, x)
        elif spec.family is Family.LUE:
            out = lue_one_point(n, spec.laguerre_a, x)
        else:
            out = n * ginibre_magnitude_density(n, x)
        return out if self.normalization == "n" else out / n

    def total(self, panels: int = 16, order: int = 64) -> float:
        """Quadrature of the density over its (truncated) support."""
        lo, hi = self.support
        if self.ensemble.family is Family.LUE:
            # y = u**2 smooths the y**a behaviour at the origin
            return quad(lambda u: 2 * u * self(u * u), 0.0, math.sqrt(hi), panels, order)
        return quad(self, lo, hi, panels, order)
