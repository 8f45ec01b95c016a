"""Special functions and orthogonal polynomials used by the density and extreme-value code.

Hermite polynomials are the probabilists' family ``He_k`` (weight ``exp(-x**2/2)``);
Laguerre polynomials are the generalized ``L_k^{(a)}`` (weight ``x**a exp(-x)``).
Everything here is pure and thread-safe.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special as _sp

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

# B_2, B_4, ..., B_20
_BERNOULLI_EVEN = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330),
)
_SHIFT = 16.0


@dataclass(frozen=True)
class PolyFamily:
    """Either the probabilists' Hermite family or a generalized Laguerre family."""

    kind: str
    parameter: float | None = None

    def __post_init__(self):
        if self.kind not in ("hermite", "laguerre"):
            raise DomainError(f"unknown polynomial family {self.kind!r}")
        if self.kind == "laguerre":
            if self.parameter is None or not self.parameter > -1:
                raise DomainError(f"Laguerre parameter must be > -1, got {self.parameter}")
        elif self.parameter is not None:
            raise DomainError("Hermite family takes no parameter")

    def __call__(self, k, x):
        if self.kind == "hermite":
            return hermite_eval(k, x)
        return laguerre_eval(k, self.parameter, x)


def _check_degree(k):
    if int(k) != k or k < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {k}")
    return int(k)


def _check_laguerre_a(a):
    if not a > -1:
        raise DomainError(f"Laguerre parameter must be > -1, got {a}")


# ---------------------------------------------------------------------------
# Hermite


def hermite_eval(k, x):
    """``He_k(x)`` by the three-term recurrence ``He_{j+1} = x He_j - j He_{j-1}``."""
    k = _check_degree(k)
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if k == 0:
        return prev if prev.ndim else float(prev)
    for j in range(1, k):
        prev, cur = cur, x * cur - j * prev
    return cur if cur.ndim else float(cur)


def hermite_functions(n, x):
    """Orthonormal Hermite functions ``psi_j``, ``j = 0..n-1``, stacked on axis 0.

    ``psi_j(x) = He_j(x) exp(-x**2/4) / sqrt(j! sqrt(2 pi))`` so that
    ``sum_j psi_j(x)**2`` is the GUE one-point function. The rescaled recurrence
    avoids the overflow of ``He_j`` for large degree.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = np.exp(-0.25 * x * x) / (2.0 * math.pi) ** 0.25
    if n >= 1:
        out[1] = x * out[0]
    for j in range(1, n):
        out[j + 1] = (x * out[j] - math.sqrt(j) * out[j - 1]) / math.sqrt(j + 1)
    return out[:n] if n else out[:0]


def hermite_function(k, x):
    """Single orthonormal Hermite function ``psi_k`` (see :func:`hermite_functions`)."""
    k = _check_degree(k)
    return hermite_functions(k + 1, x)[k]


# ---------------------------------------------------------------------------
# Laguerre


def laguerre_eval(k, a, y):
    """Generalized Laguerre polynomial ``L_k^{(a)}(y)`` via its three-term recurrence."""
    k = _check_degree(k)
    _check_laguerre_a(a)
    y = np.asarray(y, dtype=float)
    prev = np.ones_like(y)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + a - y
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + a - y) * cur - (j + a) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def log_binomial(top, bottom):
    """Log of ``binom(top, bottom)`` for real ``top`` through log-gamma, with its sign."""
    sign = 1
    total = 0.0
    for arg, coeff in ((top + 1, 1), (bottom + 1, -1), (top - bottom + 1, -1)):
        if arg <= 0 and float(arg).is_integer():
            if coeff == 1:
                raise DomainError("binomial numerator has a pole")
            return -math.inf, 0
        total += coeff * math.lgamma(arg)
        if arg < 0 and math.floor(arg) % 2 == 1:
            sign = -sign
    return total, sign


def laguerre_explicit(k, a, y):
    """``L_k^{(a)}(y)`` from the explicit sum ``sum_i (-1)^i binom(k+a, k-i) y^i / i!``.

    Slower and less stable than :func:`laguerre_eval` for large ``y``; kept as an
    independent route for cross-checks.
    """
    k = _check_degree(k)
    _check_laguerre_a(a)
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y)
    for i in range(k + 1):
        lb, sb = log_binomial(k + a, k - i)
        coeff = sb * (-1) ** i * math.exp(lb - math.lgamma(i + 1))
        total = total + coeff * y**i
    return total if total.ndim else float(total)


def laguerre_functions(n, a, y):
    """Orthonormal Laguerre polynomials times ``exp(-y/2)``, ``j = 0..n-1`` on axis 0.

    Returns ``L_j^{(a)}(y) sqrt(j!/Gamma(j+a+1)) exp(-y/2)``. The factor ``y**(a/2)``
    that would complete the orthonormal functions is left to the caller so the
    singular behaviour at ``y = 0`` (``a < 0``) can be cancelled analytically.
    """
    _check_laguerre_a(a)
    y = np.asarray(y, dtype=float)
    out = np.empty((n + 1,) + y.shape)
    out[0] = np.exp(-0.5 * y - 0.5 * math.lgamma(a + 1))
    if n >= 1:
        out[1] = (1 + a - y) * out[0] / math.sqrt(1 + a)
    for j in range(1, n):
        out[j + 1] = ((2 * j + 1 + a - y) * out[j] - math.sqrt(j * (j + a)) * out[j - 1]) / math.sqrt(
            (j + 1) * (j + 1 + a)
        )
    return out[:n] if n else out[:0]


def hermite_from_laguerre(n, r, x):
    """``x**r (-2)**n n! L_n^{(r-1/2)}(x**2/2)``, which equals ``He_{2n+r}(x)``."""
    n = _check_degree(n)
    if r not in (0, 1):
        raise DomainError(f"parity r must be 0 or 1, got {r}")
    x = np.asarray(x, dtype=float)
    val = x**r * (-2.0) ** n * math.factorial(n) * laguerre_eval(n, r - 0.5, 0.5 * x * x)
    return val if np.ndim(val) else float(val)


# ---------------------------------------------------------------------------
# Gamma family


def gamma(x):
    return math.gamma(x)


def log_gamma(x):
    return math.lgamma(x)


def erfc(x):
    """Complementary error function (vectorized)."""
    out = _sp.erfc(x)
    return out if np.ndim(out) else float(out)


def double_factorial(n: int) -> int:
    """Exact ``n!!`` with the convention ``(-1)!! = 0!! = 1``."""
    if n < -1:
        raise DomainError(f"double factorial undefined for {n}")
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _half_integer_index(s):
    two_s = 2 * s
    if two_s <= 0 or not float(two_s).is_integer():
        raise DomainError(f"upper incomplete gamma supports s in {{1/2, 1, 3/2, ...}}, got {s}")
    return int(round(two_s))


def upper_incomplete_gamma_ladder(s0, x, count):
    """``Gamma(s0 + j, x)`` for ``j = 0..count-1`` (axis 0), by upward recurrence.

    ``s0`` must be a positive half-integer or integer. The bases are
    ``Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x))`` and ``Gamma(1, x) = exp(-x)``; each
    step adds ``x**t exp(-x)``, so all terms stay positive and the recurrence is
    stable upward.
    """
    two_s = _half_integer_index(s0)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("upper incomplete gamma needs x >= 0")
    ex = np.exp(-x)
    if two_s % 2:
        t, val = 0.5, math.sqrt(math.pi) * _sp.erfc(np.sqrt(x))
    else:
        t, val = 1.0, ex.copy()
    out = np.empty((count,) + x.shape)
    target = two_s / 2
    j = 0
    while True:
        if t >= target:
            out[j] = val
            j += 1
            if j == count:
                break
        val = t * val + x**t * ex
        t += 1.0
    return out


def upper_incomplete_gamma(s, x):
    """``Gamma(s, x) = int_x^inf t**(s-1) exp(-t) dt`` for half-integer or integer ``s``."""
    out = upper_incomplete_gamma_ladder(s, x, 1)[0]
    return out if out.ndim else float(out)


def regularized_upper_gamma_int(n, x):
    """``Gamma(n, x)/Gamma(n)`` for integer ``n >= 1`` as ``exp(-x) sum_{k<n} x**k/k!``."""
    if int(n) != n or n < 1:
        raise DomainError(f"integer order >= 1 required, got {n}")
    x = np.asarray(x, dtype=float)
    term = np.exp(-x)
    total = term.copy()
    for k in range(1, int(n)):
        term = term * x / k
        total = total + term
    return total if total.ndim else float(total)


# ---------------------------------------------------------------------------
# Polygamma


def _elementwise(fn):
    @functools.wraps(fn)
    def wrapper(x):
        if np.ndim(x):
            return np.vectorize(fn, otypes=[float])(x)
        return fn(float(x))

    return wrapper


def _check_positive(x):
    if not x > 0:
        raise DomainError(f"argument must be > 0, got {x}")


@_elementwise
def digamma(x):
    """``psi(x) = d/dx log Gamma(x)`` for ``x > 0``."""
    _check_positive(x)
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        series += float(b) / (2 * k) * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


@_elementwise
def trigamma(x):
    """``psi_1(x)``, derivative of the digamma function, for ``x > 0``."""
    _check_positive(x)
    acc = 0.0
    while x < _SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    series = inv + 0.5 * inv * inv
    p = inv**3
    for b in _BERNOULLI_EVEN:
        series += float(b) * p
        p *= inv * inv
    return acc + series


@_elementwise
def polygamma3(x):
    """``psi_3(x)``, third derivative of the digamma function, for ``x > 0``."""
    _check_positive(x)
    acc = 0.0
    while x < _SHIFT:
        acc += 6.0 / x**4
        x += 1.0
    inv = 1.0 / x
    series = 2.0 * inv**3 + 3.0 * inv**4
    p = inv**5
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        series += float(b) * (2 * k + 1) * (2 * k + 2) * p
        p *= inv * inv
    return acc + series


# ---------------------------------------------------------------------------
# chi distribution


@dataclass(frozen=True)
class ChiLaw:
    """The chi distribution with ``dof`` degrees of freedom."""

    dof: float

    def __post_init__(self):
        if not self.dof > 0:
            raise DomainError(f"chi degrees of freedom must be > 0, got {self.dof}")

    def pdf(self, x):
        return chi_pdf(self.dof, x)

    def logpdf(self, x):
        return chi_logpdf(self.dof, x)

    def cdf(self, x):
        return chi_cdf(self.dof, x)

    def moment(self, m):
        return chi_moment(self.dof, m)


def chi_logpdf(k, x):
    ChiLaw(k)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (k - 1) * np.log(np.where(x > 0, x, 1.0)) - 0.5 * x * x - (0.5 * k - 1) * math.log(2) - math.lgamma(0.5 * k)
    out = np.where(x > 0, out, -np.inf)
    if k == 1:
        out = np.where(x == 0, 0.5 * math.log(2 / math.pi), out)
    elif k < 1:
        out = np.where(x == 0, np.inf, out)
    return out if out.ndim else float(out)


def chi_pdf(k, x):
    """Density ``x**(k-1) exp(-x**2/2) / (2**(k/2-1) Gamma(k/2))``; zero for ``x < 0``."""
    out = np.exp(chi_logpdf(k, x))
    return out if np.ndim(out) else float(out)


def chi_cdf(k, x):
    """Regularized lower incomplete gamma ``P(k/2, x**2/2)``; zero for ``x <= 0``."""
    ChiLaw(k)
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, _sp.gammainc(0.5 * k, 0.5 * np.where(x > 0, x, 0.0) ** 2), 0.0)
    return out if out.ndim else float(out)


def chi_moment(k, m):
    """Raw moment ``E[chi_k**m] = 2**(m/2) Gamma((k+m)/2) / Gamma(k/2)``."""
    ChiLaw(k)
    if m < 0:
        raise DomainError("moment order must be >= 0")
    return math.exp(0.5 * m * math.log(2) + math.lgamma(0.5 * (k + m)) - math.lgamma(0.5 * k))
