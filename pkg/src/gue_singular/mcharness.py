"""Reproducible Monte Carlo runs and the statistics used to judge them.

Trials are cut into fixed-size chunks; chunk ``c`` always draws from
``make_rng(seed, c)``. Streams only decide which worker handles which chunk, so
a plan gives the same result for any number of streams. Collector partial
results are keyed by chunk and merged with exact integer sums or ``math.fsum``,
which makes merging associative and commutative.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable

import numpy as np

from .ensembles import EnsembleSpec, make_rng, sample_spectra
from .errors import DomainError

DEFAULT_CHUNK = 4096


def ks_critical_coefficient(level: float) -> float:
    """Asymptotic Kolmogorov quantile ``c(level) = sqrt(-log(level/2)/2)``."""
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    return math.sqrt(-0.5 * math.log(0.5 * level))


def kolmogorov_sf(lam: float) -> float:
    """``P(K > lam)`` for the Kolmogorov limit law, by its alternating series."""
    if lam < 0.2:
        return 1.0
    terms = [(-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam) for k in range(1, 101)]
    return min(1.0, max(0.0, 2.0 * math.fsum(terms)))


# ---------------------------------------------------------------------------
# tests


@dataclass(frozen=True)
class TestReport:
    """One statistic against one threshold; ``passed`` means ``statistic <= threshold``
    unless ``relation`` says otherwise."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    sizes: tuple
    level: float | None = None
    p_value: float | None = None
    relation: str = "<="
    critical: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.statistic:.6g} {self.relation} {self.threshold:.6g}"


def _check_sample(x, label="samples") -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise DomainError(f"{label} must be nonempty")
    if np.any(np.isnan(x)):
        raise DomainError(f"{label} contain NaN")
    return x


def ks_one_sample(samples, cdf: Callable, level: float = 0.01, name: str = "KS one-sample") -> TestReport:
    """Kolmogorov-Smirnov distance to a continuous ``cdf`` with asymptotic critical values."""
    x = np.sort(_check_sample(samples))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    crit = {a: ks_critical_coefficient(a) / math.sqrt(n) for a in (0.01, 0.05)}
    thr = ks_critical_coefficient(level) / math.sqrt(n)
    en = math.sqrt(n)
    p = kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
    return TestReport(name, d, thr, d <= thr, (n,), level, p, "<=", crit)


def ks_two_sample(a, b, level: float = 0.01, name: str = "KS two-sample") -> TestReport:
    """Two-sample Kolmogorov-Smirnov distance with threshold ``c(level) sqrt((n+m)/(n m))``."""
    a = np.sort(_check_sample(a, "first sample"))
    b = np.sort(_check_sample(b, "second sample"))
    n, m = a.size, b.size
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / n
    fb = np.searchsorted(b, pts, side="right") / m
    d = float(np.max(np.abs(fa - fb)))
    scale = math.sqrt((n + m) / (n * m))
    crit = {lv: ks_critical_coefficient(lv) * scale for lv in (0.01, 0.05)}
    thr = ks_critical_coefficient(level) * scale
    en = 1.0 / scale
    p = kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
    return TestReport(name, d, thr, d <= thr, (n, m), level, p, "<=", crit)


def chi2_histogram_test(counts, probs, level: float = 0.01, name: str = "chi-square histogram") -> TestReport:
    """Pearson chi-square of binned counts against cell probabilities (cells with expectation < 5 pooled into the last)."""
    from scipy.stats import chi2

    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if counts.shape != probs.shape:
        raise DomainError("counts and probabilities must align")
    total = counts.sum()
    expected = total * probs / probs.sum()
    keep = expected >= 5
    obs = np.append(counts[keep], counts[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = max(len(obs) - 1, 1)
    thr = float(chi2.ppf(1 - level, dof))
    return TestReport(name, stat, thr, stat <= thr, (int(total),), level, float(chi2.sf(stat, dof)))


def anderson_darling(samples, cdf: Callable, level: float = 0.01, name: str = "Anderson-Darling") -> TestReport:
    """A-squared against a fully specified continuous ``cdf`` (asymptotic critical values)."""
    crit = {0.10: 1.933, 0.05: 2.492, 0.025: 3.070, 0.01: 3.857}
    if level not in crit:
        raise DomainError(f"level must be one of {sorted(crit)}")
    x = np.sort(_check_sample(samples))
    n = x.size
    f = np.clip(np.asarray(cdf(x), dtype=float), 1e-300, 1 - 1e-16)
    i = np.arange(1, n + 1)
    a2 = -n - float(np.sum((2 * i - 1) * (np.log(f) + np.log1p(-f[::-1])))) / n
    return TestReport(name, a2, crit[level], a2 <= crit[level], (n,), level, None, "<=", crit)


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    estimate: float
    lo: float
    hi: float
    stderr: float
    size: int

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def moment_ci(samples, order: int = 1, confidence: float = 0.95) -> MomentEstimate:
    """Mean of ``samples**order`` with a normal-approximation confidence interval.

    The interval assumes the power has finite variance; high powers of heavy-tailed
    quantities (large determinant moments) make it unreliable.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    x = _check_sample(samples) ** order
    n = x.size
    mean = math.fsum(x) / n
    var = math.fsum((x - mean) ** 2) / (n - 1) if n > 1 else 0.0
    se = math.sqrt(var / n)
    z = NormalDist().inv_cdf(0.5 + 0.5 * confidence)
    return MomentEstimate(order, mean, mean - z * se, mean + z * se, se, n)


@dataclass(frozen=True)
class Ecdf:
    """Empirical distribution function of a sorted sample."""

    points: np.ndarray

    def __call__(self, x):
        out = np.searchsorted(self.points, np.asarray(x, dtype=float), side="right") / self.points.size
        return out if np.ndim(out) else float(out)


def ecdf(samples) -> Ecdf:
    return Ecdf(np.sort(_check_sample(samples)))


# ---------------------------------------------------------------------------
# collectors


def _pooled(block: np.ndarray) -> np.ndarray:
    return block.ravel()


@dataclass(frozen=True)
class Histogram:
    bins: int
    lo: float
    hi: float
    transform: Callable = _pooled
    name: str = "histogram"

    def __post_init__(self):
        if self.bins < 1 or not self.hi > self.lo:
            raise DomainError("histogram needs bins >= 1 and hi > lo")

    def partial(self, block):
        x = self.transform(block)
        counts = np.histogram(x, bins=self.bins, range=(self.lo, self.hi))[0].astype(np.int64)
        return {"counts": counts, "under": int(np.sum(x < self.lo)), "over": int(np.sum(x > self.hi))}

    def finish(self, parts: dict):
        counts = sum((p["counts"] for p in parts.values()), np.zeros(self.bins, dtype=np.int64))
        return HistogramResult(
            np.linspace(self.lo, self.hi, self.bins + 1),
            counts,
            sum(p["under"] for p in parts.values()),
            sum(p["over"] for p in parts.values()),
        )


@dataclass(frozen=True)
class HistogramResult:
    edges: np.ndarray
    counts: np.ndarray
    under: int
    over: int

    def density(self) -> np.ndarray:
        total = self.counts.sum() + self.under + self.over
        return self.counts / (total * np.diff(self.edges))


@dataclass(frozen=True)
class Moments:
    max_order: int
    transform: Callable = _pooled
    name: str = "moments"

    def partial(self, block):
        x = self.transform(block)
        return {"n": int(x.size), "sums": [math.fsum(x**k) for k in range(1, 2 * self.max_order + 1)]}

    def finish(self, parts: dict):
        n = sum(p["n"] for p in parts.values())
        sums = [math.fsum(p["sums"][k] for _, p in sorted(parts.items())) for k in range(2 * self.max_order)]
        return MomentsResult(n, tuple(s / n for s in sums))


@dataclass(frozen=True)
class MomentsResult:
    size: int
    raw: tuple  # raw moments of orders 1 .. 2 * max_order

    def estimate(self, order: int, confidence: float = 0.95) -> MomentEstimate:
        if not 1 <= order <= len(self.raw) // 2:
            raise DomainError(f"order must lie in 1..{len(self.raw) // 2}, got {order}")
        mean = self.raw[order - 1]
        var = max(self.raw[2 * order - 1] - mean * mean, 0.0) * self.size / max(self.size - 1, 1)
        se = math.sqrt(var / self.size)
        z = NormalDist().inv_cdf(0.5 + 0.5 * confidence)
        return MomentEstimate(order, mean, mean - z * se, mean + z * se, se, self.size)


@dataclass(frozen=True)
class EcdfCollector:
    transform: Callable = _pooled
    name: str = "ecdf"

    def partial(self, block):
        return self.transform(block).copy()

    def finish(self, parts: dict):
        return ecdf(np.concatenate([parts[k] for k in sorted(parts)]))


@dataclass(frozen=True)
class Counting:
    """Distribution of how many values of a spectrum fall in the open interval ``(lo, hi)``."""

    lo: float
    hi: float
    name: str = "counting"

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise DomainError("counting interval needs 0 <= lo < hi")

    def partial(self, block):
        k = np.sum((block > self.lo) & (block < self.hi), axis=1)
        return np.bincount(k, minlength=block.shape[1] + 1).astype(np.int64)

    def finish(self, parts: dict):
        width = max(len(p) for p in parts.values())
        total = np.zeros(width, dtype=np.int64)
        for p in parts.values():
            total[: len(p)] += p
        return total


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentPlan:
    """What to sample, how many trials, and what to collect.

    ``source`` is an :class:`EnsembleSpec` (sampled as ``kind``) or a callable
    ``(rng, trials) -> (trials, m)`` array.
    """

    source: object
    trials: int
    seed: int
    streams: int = 1
    collectors: tuple = ()
    kind: str = "singular_values"
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.trials < 1 or self.streams < 1 or self.chunk < 1:
            raise DomainError("trials, streams and chunk must be positive")
        names = [c.name for c in self.collectors]
        if len(set(names)) != len(names):
            raise DomainError("collector names must be unique")

    def chunks(self) -> list[tuple[int, int, int]]:
        """``(chunk id, start, stop)`` for every chunk."""
        return [(c, s, min(s + self.chunk, self.trials)) for c, s in enumerate(range(0, self.trials, self.chunk))]

    def assignment(self) -> list[list[int]]:
        """Chunk ids handled by each stream (round robin)."""
        ids = [c for c, _, _ in self.chunks()]
        return [ids[s :: self.streams] for s in range(self.streams)]

    def sampler(self) -> Callable:
        if isinstance(self.source, EnsembleSpec):
            spec, kind = self.source, self.kind
            return lambda rng, t: sample_spectra(spec, rng, t, kind)
        if callable(self.source):
            return self.source
        raise DomainError("source must be an EnsembleSpec or a callable")


@dataclass(frozen=True)
class ExperimentResult:
    plan: ExperimentPlan
    results: dict

    def __getitem__(self, name):
        return self.results[name]


def run_experiment(plan: ExperimentPlan, workers: int | None = None) -> ExperimentResult:
    """Run ``plan``; identical ``(seed, trials, chunk)`` give identical results for any stream count."""
    sample = plan.sampler()
    bounds = {c: (s, e) for c, s, e in plan.chunks()}

    def run_stream(ids):
        out = {}
        for c in ids:
            s, e = bounds[c]
            block = np.asarray(sample(make_rng(plan.seed, c), e - s), dtype=float)
            if block.ndim != 2 or block.shape[0] != e - s:
                raise DomainError(f"sampler returned shape {block.shape}, expected ({e - s}, m)")
            out[c] = {col.name: col.partial(block) for col in plan.collectors}
        return out

    merged: dict = {}
    groups = plan.assignment()
    if (workers or plan.streams) > 1:
        with ThreadPoolExecutor(max_workers=workers or plan.streams) as pool:
            for part in pool.map(run_stream, groups):
                merged.update(part)
    else:
        for ids in groups:
            merged.update(run_stream(ids))
    results = {col.name: col.finish({c: merged[c][col.name] for c in merged}) for col in plan.collectors}
    return ExperimentResult(plan, results)
