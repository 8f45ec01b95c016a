"""Smallest singular values, counting functions and condition numbers of GUE matrices.

The survival function of the smallest GUE_n singular value factors into two
Hankel determinants of upper incomplete gamma functions, one per Laguerre part.
Counting probabilities for other ``k`` have no closed form here and are
estimated by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, Family, derive_seed, gue_singular_direct_model
from .errors import CapacityError, DomainError
from .linalg import LogDet, logdet_lu
from .mcharness import Counting, EcdfCollector, ExperimentPlan, run_experiment
from .specfun import upper_incomplete_gamma_ladder

HANKEL_CAP = 40


@dataclass(frozen=True)
class HankelValue:
    """``F(a, n, s)`` with the 2-norm condition number of the equilibrated matrix."""

    a: float
    n: int
    s: float
    logdet: LogDet
    condition: float


def hankel_matrix(a: float, n: int, s: float) -> np.ndarray:
    """``(Gamma(i + j - 1 + a, s))_{i,j=1..n}``."""
    if a not in (-0.5, 0.5):
        raise DomainError(f"a must be -1/2 or +1/2, got {a}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > HANKEL_CAP:
        raise CapacityError(f"Hankel order {n} exceeds the cap {HANKEL_CAP}; these matrices are too ill-conditioned")
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    vals = upper_incomplete_gamma_ladder(1 + a, float(s), 2 * n - 1)
    idx = np.arange(n)
    return vals[idx[:, None] + idx[None, :]]


def hankel_F_detail(a: float, n: int, s: float) -> HankelValue:
    """``F(a, n, s)`` from a diagonally equilibrated LU factorization.

    ``F(0) = 1`` for the empty matrix. The condition estimate flags where double
    precision stops being trustworthy.
    """
    if n == 0:
        return HankelValue(a, 0, s, LogDet(0.0, 1), 1.0)
    h = hankel_matrix(a, n, s)
    d = np.sqrt(np.diag(h))
    if np.any(d == 0):
        return HankelValue(a, n, s, LogDet(-math.inf, 0), math.inf)
    scaled = h / d[:, None] / d[None, :]
    ld = logdet_lu(scaled)
    log_abs = ld.log_abs + 2.0 * math.fsum(np.log(d))
    return HankelValue(a, n, s, LogDet(log_abs, ld.sign), float(np.linalg.cond(scaled)))


def hankel_F(a: float, n: int, s: float) -> LogDet:
    """``log|F(a, n, s)|`` and sign, ``F = det(Gamma(i + j - 1 + a, s))``."""
    return hankel_F_detail(a, n, s).logdet


def hankel_F_at_zero(a: float, n: int) -> float:
    """Closed form ``log F(a, n, 0) = sum_{k<n} log(k!) + log Gamma(k + 1 + a)``."""
    return math.fsum(math.lgamma(k + 1) + math.lgamma(k + 1 + a) for k in range(n))


@dataclass(frozen=True)
class SminResult:
    n: int
    s: float
    survival: float
    factors: tuple  # (minus-part ratio, plus-part ratio)
    conditions: tuple

    @property
    def method(self) -> str:
        return "hankel"


def _ratio(a: float, n: int, t: float) -> tuple[float, float]:
    if n == 0:
        return 1.0, 1.0
    num = hankel_F_detail(a, n, t)
    den = hankel_F_detail(a, n, 0.0)
    if num.logdet.sign == 0:
        return 0.0, num.condition
    ratio = num.logdet.sign * den.logdet.sign * math.exp(num.logdet.log_abs - den.logdet.log_abs)
    return ratio, max(num.condition, den.condition)


def smin_survival_detail(n: int, s: float) -> SminResult:
    """``P(sigma_min >= s)`` with both normalized Hankel factors and their conditioning."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    t = 0.5 * s * s
    minus, c1 = _ratio(-0.5, (n + 1) // 2, t)
    plus, c2 = _ratio(0.5, n // 2, t)
    surv = min(1.0, max(0.0, minus * plus))
    return SminResult(n, float(s), surv, (minus, plus), (c1, c2))


def smin_survival(n: int, s: float) -> float:
    """``P(sigma_min(GUE_n) >= s) = F(-1/2, ceil(n/2), s**2/2) F(1/2, floor(n/2), s**2/2)`` over the same at 0."""
    return smin_survival_detail(n, s).survival


# ---------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class CountingTable:
    """Estimated probabilities that exactly ``k`` singular values lie in ``(lo, hi)``, ``k = 0..size``."""

    spec: EnsembleSpec
    interval: tuple
    counts: tuple
    trials: int

    @property
    def probs(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.trials

    @property
    def stderr(self) -> np.ndarray:
        p = self.probs
        return np.sqrt(p * (1 - p) / self.trials)

    def rows(self) -> list[tuple[int, float, float]]:
        return [(k, float(p), float(e)) for k, (p, e) in enumerate(zip(self.probs, self.stderr))]


def _interval(J) -> tuple[float, float]:
    lo, hi = float(J[0]), float(J[1])
    if not (0 <= lo < hi):
        raise DomainError(f"interval needs 0 <= lo < hi, got ({lo}, {hi})")
    return lo, hi


def counting_mc(spec: EnsembleSpec, J, trials: int, seed: int, streams: int = 1) -> CountingTable:
    """Monte Carlo counting distribution of ``spec`` singular values in the open interval ``J``."""
    lo, hi = _interval(J)
    plan = ExperimentPlan(spec, trials, seed, streams, (Counting(lo, hi),))
    counts = run_experiment(plan)["counting"]
    size = spec.spectrum_size("singular_values")
    full = np.zeros(size + 1, dtype=np.int64)
    full[: len(counts)] = counts[: size + 1]
    return CountingTable(spec, (lo, hi), tuple(int(c) for c in full), trials)


def convolve_counts(a, b) -> np.ndarray:
    """Distribution of the sum of two independent counts."""
    return np.convolve(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def convolution_variance(a: CountingTable, b: CountingTable) -> np.ndarray:
    """Delta-method variance of each entry of the estimated convolution of ``a`` and ``b``."""
    pa, pb = a.probs, b.probs
    conv = convolve_counts(pa, pb)
    out = np.zeros(len(conv))
    for k in range(len(conv)):
        # coefficients multiplying each estimated probability of the other table
        ca = np.array([pb[k - j] if 0 <= k - j < len(pb) else 0.0 for j in range(len(pa))])
        cb = np.array([pa[k - j] if 0 <= k - j < len(pa) else 0.0 for j in range(len(pb))])
        va = (np.dot(pa, ca**2) - np.dot(pa, ca) ** 2) / a.trials
        vb = (np.dot(pb, cb**2) - np.dot(pb, cb) ** 2) / b.trials
        out[k] = max(va, 0.0) + max(vb, 0.0)
    return out


@dataclass(frozen=True)
class ConvolutionReport:
    n: int
    interval: tuple
    gue: CountingTable
    plus: CountingTable | None
    minus: CountingTable
    convolution: np.ndarray
    z: np.ndarray
    smin_exact: float | None
    smin_z: float | None

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z)))

    def passed(self, z_limit: float = 4.0, smin_limit: float = 3.0) -> bool:
        ok = self.max_abs_z <= z_limit
        if self.smin_z is not None:
            ok = ok and abs(self.smin_z) <= smin_limit
        return ok


def convolution_identity_check(n: int, J, trials: int, seed: int) -> ConvolutionReport:
    """Compare GUE_n counting probabilities with the convolution of its two Laguerre parts.

    Three independent experiments (seeds derived from ``seed``): dense GUE_n,
    LUE_{floor(n/2)} at ``a = +1/2`` and LUE_{ceil(n/2)} at ``a = -1/2``. ``z`` holds
    per-``k`` standardized differences. When ``J`` starts at zero the ``k = 0``
    cell of the GUE table is also compared with :func:`smin_survival`.
    """
    lo, hi = _interval(J)
    gue = counting_mc(EnsembleSpec(Family.GUE, n), (lo, hi), trials, derive_seed(seed, 0))
    minus = counting_mc(EnsembleSpec(Family.LUE, (n + 1) // 2, -0.5), (lo, hi), trials, derive_seed(seed, 1))
    if n >= 2:
        plus = counting_mc(EnsembleSpec(Family.LUE, n // 2, 0.5), (lo, hi), trials, derive_seed(seed, 2))
        conv = convolve_counts(plus.probs, minus.probs)
        var_conv = convolution_variance(plus, minus)
    else:
        plus = None
        conv = minus.probs
        var_conv = minus.stderr**2
    # score-test variance: the GUE cell is binomial with the probability predicted under the identity
    var = conv * (1 - conv) / gue.trials + var_conv
    diff = gue.probs - conv
    z = np.where(var > 0, diff / np.sqrt(np.where(var > 0, var, 1.0)), 0.0)
    smin_exact = smin_z = None
    if lo == 0.0:
        smin_exact = smin_survival(n, hi)
        se = math.sqrt(smin_exact * (1 - smin_exact) / gue.trials)
        smin_z = (float(gue.probs[0]) - smin_exact) / se if se > 0 else 0.0
    return ConvolutionReport(n, (lo, hi), gue, plus, minus, conv, z, smin_exact, smin_z)


# ---------------------------------------------------------------------------
# condition numbers


@dataclass(frozen=True)
class ConditionSummary:
    n: int
    trials: int
    median: float
    quantiles: dict
    median_ci: tuple
    mean_log: float


def sample_condition_numbers(n: int, rng: np.random.Generator, trials: int) -> np.ndarray:
    """``sigma_max / sigma_min`` of GUE_n from the direct-sum chi model."""
    first, second = gue_singular_direct_model(n)
    a = first.singular_values(rng, trials)
    b = second.singular_values(rng, trials)
    both = np.concatenate([a, b], axis=1)
    return both.max(axis=1) / both.min(axis=1)


def condition_number_mc(n: int, trials: int, seed: int, levels=(0.1, 0.25, 0.5, 0.75, 0.9)) -> ConditionSummary:
    """Median, quantiles and a distribution-free 95% median interval of the GUE_n condition number."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    col = EcdfCollector(name="kappa")
    plan = ExperimentPlan(lambda rng, t: sample_condition_numbers(n, rng, t)[:, None], trials, seed, collectors=(col,))
    kappa = run_experiment(plan)["kappa"].points
    q = {lv: float(np.quantile(kappa, lv)) for lv in levels}
    half = 1.959963984540054 * math.sqrt(trials) / 2
    lo_i = max(int(math.floor(trials / 2 - half)), 0)
    hi_i = min(int(math.ceil(trials / 2 + half)), trials - 1)
    ci = (float(kappa[lo_i]), float(kappa[hi_i]))
    return ConditionSummary(n, trials, float(np.median(kappa)), q, ci, float(np.mean(np.log(kappa))))
