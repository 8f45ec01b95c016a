"""Determinant laws for GUE, odd-order GOE and complex Ginibre matrices.

``|det GUE_n|`` is distributed as a product of independent ``chi_{2 floor(i/2) + 1}``,
``i = 1..n``. Every moment below is an exact Python integer with the odd factors
that produce it kept in the order the product formula emits them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ensembles import sample_chi
from .specfun import EULER_GAMMA, digamma, double_factorial, polygamma3, trigamma


def det_dofs(n: int) -> list[int]:
    """Chi degrees of freedom ``2 floor(i/2) + 1``, ``i = 1..n``, of the ``|det|`` factors."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return [2 * (i // 2) + 1 for i in range(1, n + 1)]


@dataclass(frozen=True)
class MomentValue:
    """``E[det M_n**k]`` as an exact integer; ``groups`` hold the odd factors."""

    n: int
    k: int
    value: int
    groups: tuple
    branch: str

    @property
    def factors(self) -> tuple:
        return tuple(f for g in self.groups for f in g)

    @property
    def sign(self) -> int:
        return (self.value > 0) - (self.value < 0)


def _factor_groups(rows: int, half: int) -> tuple:
    """Groups ``j = 1..half`` of the factors ``2 floor(i/2) + 2j - 1`` for ``i = 1..rows``."""
    return tuple(tuple(2 * (i // 2) + 2 * j - 1 for i in range(1, rows + 1)) for j in range(1, half + 1))


def gue_det_moment(n: int, k: int) -> MomentValue:
    """Exact ``E[det(M)**k]`` for ``M`` in GUE_n.

    Even ``k``: ``prod_i prod_{j <= k/2} (2 floor(i/2) + 2j - 1)``. Even ``n`` with odd
    ``k``: the dual product with ``n`` and ``k`` exchanged, times ``(-1)**(nk/2)``.
    Both odd: zero, by the symmetry ``M -> -M``.
    """
    if n < 1 or k < 0 or int(n) != n or int(k) != k:
        raise DomainError(f"need integers n >= 1, k >= 0, got ({n}, {k})")
    if k % 2 == 0:
        groups = _factor_groups(n, k // 2)
        branch = "even-k"
        sign = 1
    elif n % 2 == 0:
        groups = _factor_groups(k, n // 2)
        branch = "even-n"
        sign = -1 if (n * k // 2) % 2 else 1
    else:
        return MomentValue(n, k, 0, (), "odd-odd")
    return MomentValue(n, k, sign * math.prod(f for g in groups for f in g), groups, branch)


def duality_check(n: int, k: int) -> bool:
    """``E[det M_n**k] == (-1)**(nk/2) E[det M_k**n]`` in exact integers."""
    if n % 2 and k % 2:
        raise DomainError("duality needs n or k even")
    if n < 1 or k < 1:
        raise DomainError("duality needs n, k >= 1")
    sign = -1 if (n * k // 2) % 2 else 1
    return gue_det_moment(n, k).value == sign * gue_det_moment(k, n).value


def gue_absdet_sampler(n: int, rng: np.random.Generator, trials: int = 1) -> np.ndarray:
    """``log|det|`` of ``trials`` GUE_n matrices through the independent chi product."""
    out = np.zeros(trials)
    for k in det_dofs(n):
        out += np.log(sample_chi(rng, k, trials))
    return out


# ---------------------------------------------------------------------------
# log-determinant statistics


def log_chi_mean(k: float) -> float:
    """``E[log chi_k] = psi(k/2)/2 + log(2)/2``."""
    return 0.5 * digamma(0.5 * k) + 0.5 * math.log(2)


def log_chi_var(k: float) -> float:
    """``Var[log chi_k] = psi_1(k/2)/4``."""
    return 0.25 * trigamma(0.5 * k)


def log_chi_fourth(k: float) -> float:
    """Fourth central moment ``3 psi_1(k/2)**2/16 + psi_3(k/2)/16`` of ``log chi_k``."""
    return 3.0 / 16.0 * trigamma(0.5 * k) ** 2 + polygamma3(0.5 * k) / 16.0


@dataclass(frozen=True)
class LogDetStats:
    """Mean and variance of ``log|det GUE_n|`` and the normal-limit centering and scale."""

    n: int
    mean: float
    variance: float
    clt_centering: float
    clt_scale: float

    @property
    def centered_mean(self) -> float:
        """``mean - centering``; tends to ``-(log 2 + log pi)/4``."""
        return self.mean - self.clt_centering

    @property
    def excess_variance(self) -> float:
        """``variance - log(n)/2``; tends to ``(gamma + 1 + log 2)/2``."""
        return self.variance - self.clt_scale**2


def logdet_stats(n: int) -> LogDetStats:
    """Closed-form mean and variance of ``log|det GUE_n|``.

    With ``h = ceil(n/2) + 1/2``: mean ``(n/2) psi(h) + (n/2) log 2 - ceil(n/2)``,
    variance ``(n/4) psi_1(h) + psi(h)/2 + gamma/2 + log 2``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    c = (n + 1) // 2
    h = c + 0.5
    mean = 0.5 * n * digamma(h) + 0.5 * n * math.log(2) - c
    var = 0.25 * n * trigamma(h) + 0.5 * digamma(h) + 0.5 * EULER_GAMMA + math.log(2)
    centering = 0.5 * math.lgamma(n + 1) - 0.25 * math.log(n)
    return LogDetStats(n, mean, var, centering, math.sqrt(0.5 * math.log(n)) if n > 1 else 0.0)


def logdet_stats_chi_sum(n: int) -> tuple[float, float]:
    """Mean and variance as sums over the independent chi factors (cross-check of :func:`logdet_stats`)."""
    dofs = det_dofs(n)
    return math.fsum(log_chi_mean(k) for k in dofs), math.fsum(log_chi_var(k) for k in dofs)


def lyapunov_ratio(n: int) -> float:
    """``sum of fourth central moments / variance**2`` over the chi factors; tends to zero."""
    dofs = det_dofs(n)
    var = math.fsum(log_chi_var(k) for k in dofs)
    return math.fsum(log_chi_fourth(k) for k in dofs) / var**2


# ---------------------------------------------------------------------------
# GOE and Ginibre


def goe_odd_det_moment(order: int, u: int) -> int:
    """Exact ``E[det M**(2u)]`` for odd-order GOE (diagonal N(0,2), off-diagonal N(0,1)).

    ``2**u (2u-1)!! prod_{i=1..n} prod_{k=0..2u-1} (2i+1+2k)`` with ``order = 2n+1``.
    """
    if order < 1 or order % 2 == 0:
        raise DomainError(f"order must be odd and >= 1, got {order}")
    if u < 1:
        raise DomainError(f"u must be >= 1, got {u}")
    n = order // 2
    inner = math.prod(2 * i + 1 + 2 * k for i in range(1, n + 1) for k in range(2 * u))
    return 2**u * double_factorial(2 * u - 1) * inner


def goe_odd_det_moment_ratio(order: int, u: int):
    """The same moment from its ratio-of-double-factorials form, as an exact ``Fraction``."""
    from fractions import Fraction

    if order < 1 or order % 2 == 0:
        raise DomainError(f"order must be odd and >= 1, got {order}")
    n = order // 2
    out = Fraction(2**u * double_factorial(2 * u - 1))
    for j in range(1, 2 * u + 1):
        out *= Fraction(double_factorial(2 * n + 2 * j - 1), double_factorial(2 * j - 1))
    return out


def ginibre_absdet_moment(n: int, m: int) -> int:
    """Exact ``E[|det G|**m]`` for even ``m``: ``prod_i 2**(m/2) i (i+1) ... (i+m/2-1)``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if m < 0 or m % 2:
        raise DomainError(f"m must be even and >= 0, got {m}")
    h = m // 2
    return math.prod(2**h * math.prod(range(i, i + h)) for i in range(1, n + 1))
