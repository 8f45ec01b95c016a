"""Mixing and unmixing GUE singular values.

The singular values of GUE_n are distributed as the union of the distinct singular
values of two independent anti-GUE matrices of orders ``n`` and ``n + 1``. One of
the two orders is odd; its part has ``floor(n/2)`` values and a density carrying
an extra ``x**2`` per point. That part is called the *plus* part here
(LUE with ``a = +1/2`` after squaring); the even-order part with ``ceil(n/2)``
values is the *minus* part (``a = -1/2``).

Given observed singular values, :func:`unmix` draws a split into plus and minus
parts with its exact conditional probability. Index sets are 0-based positions
into the value sequence passed in.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import (
    EnsembleSpec,
    Family,
    Spectrum,
    antigue_model,
    make_rng,
    sample_gue_dense,
)
from .errors import CapacityError, DegenerateInputError, DomainError

UNMIX_CAP = 22
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class PartitionSample:
    """Split of positions ``0..n-1`` into the plus part (size ``n // 2``) and the minus part."""

    n: int
    s_plus: tuple
    s_minus: tuple

    def __post_init__(self):
        plus, minus = tuple(sorted(self.s_plus)), tuple(sorted(self.s_minus))
        object.__setattr__(self, "s_plus", plus)
        object.__setattr__(self, "s_minus", minus)
        if len(plus) != self.n // 2:
            raise DomainError(f"plus part must have {self.n // 2} elements, got {len(plus)}")
        if set(plus) | set(minus) != set(range(self.n)) or len(plus) + len(minus) != self.n:
            raise DomainError("parts must partition 0..n-1")

    @classmethod
    def from_mask(cls, mask) -> "PartitionSample":
        mask = np.asarray(mask, dtype=bool)
        idx = np.arange(len(mask))
        return cls(len(mask), tuple(int(i) for i in idx[mask]), tuple(int(i) for i in idx[~mask]))

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[list(self.s_plus)] = True
        return out

    def split(self, values) -> tuple[np.ndarray, np.ndarray]:
        """``(plus values, minus values)``, each ascending."""
        v = np.asarray(values, dtype=float)
        return np.sort(v[list(self.s_plus)]), np.sort(v[list(self.s_minus)])


@dataclass(frozen=True)
class UnmixWeights:
    """Log-weights of every candidate plus part, listed in ``partitions`` order."""

    partitions: np.ndarray  # (P, n // 2) position indices
    log_weights: np.ndarray

    @property
    def log_total(self) -> float:
        top = float(np.max(self.log_weights))
        return top + math.log(math.fsum(np.exp(self.log_weights - top)))

    @property
    def probabilities(self) -> np.ndarray:
        w = np.exp(self.log_weights - np.max(self.log_weights))
        return w / math.fsum(w)


# ---------------------------------------------------------------------------
# mixing


def mix_batch(n: int, rng: np.random.Generator, trials: int) -> tuple[np.ndarray, np.ndarray]:
    """``trials`` mixed samples: ascending values ``(T, n)`` and plus-part mask ``(T, n)``.

    Anti-GUE_n is sampled first, then anti-GUE_{n+1}.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    first = antigue_model(n).singular_values(rng, trials)
    second = antigue_model(n + 1).singular_values(rng, trials)
    plus_first = n % 2 == 1
    values = np.concatenate([first, second], axis=1)
    mask = np.zeros(values.shape, dtype=bool)
    if plus_first:
        mask[:, : first.shape[1]] = True
    else:
        mask[:, first.shape[1] :] = True
    order = np.argsort(values, axis=1, kind="stable")
    return np.take_along_axis(values, order, 1), np.take_along_axis(mask, order, 1)


def mix_sample(n: int, rng: np.random.Generator) -> tuple[Spectrum, PartitionSample]:
    """One GUE_n singular-value spectrum built from its two anti-GUE factors, with its origin labels."""
    values, mask = mix_batch(n, rng, 1)
    spec = EnsembleSpec(Family.GUE_SINGULAR_DIRECT, n)
    return Spectrum(tuple(values[0]), "singular_values", spec), PartitionSample.from_mask(mask[0])


# ---------------------------------------------------------------------------
# unmixing


@functools.lru_cache(maxsize=None)
def _partitions(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All plus-part index sets of size ``n // 2`` and their ``(P, n)`` 0/1 indicator."""
    listed = list(itertools.combinations(range(n), n // 2))
    combos = np.array(listed, dtype=np.intp).reshape(len(listed), n // 2)
    ind = np.zeros((len(combos), n))
    ind[np.arange(len(combos))[:, None], combos] = 1.0
    combos.setflags(write=False)
    ind.setflags(write=False)
    return combos, ind


def _check_values(values: np.ndarray):
    n = values.shape[-1]
    if n > UNMIX_CAP:
        raise CapacityError(f"unmixing enumerates C(n, n//2) partitions; n is capped at {UNMIX_CAP}, got {n}")
    if n < 1:
        raise DomainError("need at least one value")
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise DegenerateInputError("values must be finite and strictly positive")
    s = np.sort(values, axis=-1)
    if np.any(np.diff(s, axis=-1) == 0):
        raise DegenerateInputError("values must be distinct")


def _log_weights_batch(values: np.ndarray) -> np.ndarray:
    """``(T, P)`` log-weights ``2 sum_S log x - 2 sum_{s in S, t not in S} log|x_s**2 - x_t**2|``."""
    n = values.shape[1]
    _, ind = _partitions(n)
    sq = values * values
    with np.errstate(divide="ignore"):
        logdiff = np.log(np.abs(sq[:, :, None] - sq[:, None, :]))
    idx = np.arange(n)
    logdiff[:, idx, idx] = 0.0
    rows = logdiff.sum(axis=2)
    lin = (2.0 * np.log(values) - 2.0 * rows) @ ind.T
    inner = np.einsum("pi,tij,pj->tp", ind, logdiff, ind, optimize=True)
    return lin + 2.0 * inner


def unmix_weights(values) -> UnmixWeights:
    """Conditional log-weights of every way to choose the plus part from ``values``."""
    v = np.asarray(values, dtype=float).ravel()
    _check_values(v)
    combos, _ = _partitions(len(v))
    return UnmixWeights(combos, _log_weights_batch(v[None, :])[0])


def _draw(log_w: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise cumulative-sum inversion: first index whose running total exceeds ``u * total``."""
    w = np.exp(log_w - log_w.max(axis=1, keepdims=True))
    cum = np.cumsum(w, axis=1)
    pick = np.sum(cum <= u[:, None] * cum[:, -1:], axis=1)
    return np.minimum(pick, w.shape[1] - 1)


def unmix_batch(values, rng: np.random.Generator) -> np.ndarray:
    """Plus-part masks ``(T, n)`` drawn independently for each row of ``values``."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise DomainError("expected a (trials, n) array")
    _check_values(v)
    t, n = v.shape
    combos, _ = _partitions(n)
    step = max(1, _CHUNK_CELLS // max(1, len(combos) * n))
    u = rng.random(t)
    masks = np.zeros((t, n), dtype=bool)
    for start in range(0, t, step):
        stop = min(start + step, t)
        pick = _draw(_log_weights_batch(v[start:stop]), u[start:stop])
        rows = np.arange(start, stop)[:, None]
        masks[rows, combos[pick]] = True
    return masks


def unmix(values, rng: np.random.Generator) -> PartitionSample:
    """Draw a plus/minus split of ``values`` with its conditional probability."""
    v = np.asarray(values, dtype=float).ravel()
    return PartitionSample.from_mask(unmix_batch(v[None, :], rng)[0])


def split_by_mask(values: np.ndarray, masks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows of plus values ``(T, n//2)`` and minus values ``(T, ceil(n/2))``, each ascending."""
    t, n = values.shape
    plus = values[masks].reshape(t, n // 2)
    minus = values[~masks].reshape(t, n - n // 2)
    return plus, minus


def plus_minus_models(n: int):
    """Chi models of the plus part (odd-order anti-GUE) and minus part (even-order anti-GUE)."""
    if n % 2:
        return antigue_model(n), antigue_model(n + 1)
    return antigue_model(n + 1), antigue_model(n)


# ---------------------------------------------------------------------------
# round trip


@dataclass(frozen=True)
class RoundtripReport:
    n: int
    trials: int
    sizes_ok: bool
    label_agreement: float
    plus_test: object
    minus_test: object

    @property
    def passed(self) -> bool:
        parts = [t for t in (self.plus_test, self.minus_test) if t is not None]
        return self.sizes_ok and all(t.passed for t in parts)


def roundtrip_check(n: int, trials: int, seed: int, level: float = 0.01) -> RoundtripReport:
    """Exercise both directions of the decomposition.

    (a) mixed samples are unmixed again; part sizes must be right, and the fraction
    of values returned to their true part is reported. (b) dense GUE singular values
    are unmixed and each pooled part is compared with fresh anti-GUE samples by a
    two-sample KS test. Streams 0..3 of ``seed`` are used.
    """
    from .mcharness import ks_two_sample

    values, truth = mix_batch(n, make_rng(seed, 0), trials)
    masks = unmix_batch(values, make_rng(seed, 1))
    sizes_ok = bool(np.all(masks.sum(axis=1) == n // 2))
    agreement = float(np.mean(masks == truth))

    dense = np.sort(np.abs(sample_gue_dense(n, make_rng(seed, 2), trials)), axis=1)
    plus, minus = split_by_mask(dense, unmix_batch(dense, make_rng(seed, 3)))
    plus_model, minus_model = plus_minus_models(n)
    fresh = make_rng(seed, 4)
    ref_plus = plus_model.singular_values(fresh, trials)
    ref_minus = minus_model.singular_values(fresh, trials)
    plus_test = ks_two_sample(plus.ravel(), ref_plus.ravel(), level, name="plus part") if plus.size else None
    minus_test = ks_two_sample(minus.ravel(), ref_minus.ravel(), level, name="minus part")
    return RoundtripReport(n, trials, sizes_ok, agreement, plus_test, minus_test)
