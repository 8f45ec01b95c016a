"""The acceptance suite: twelve numbered checks with fixed tolerances.

``run_suite("full", seed)`` uses the stated sample sizes; ``"fast"`` runs every
check with smaller KS, counting and survival budgets (exact checks and moment
CIs are unchanged).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import decompose, densities, detlaws, ensembles, extremes, specfun
from .ensembles import derive_seed, make_rng
from .mcharness import ks_one_sample, ks_two_sample, moment_ci


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.title} ({self.seconds:.2f}s)"


_SIZES = {
    "full": {"ks": 100_000, "ci": 1_000_000, "smin": 1_000_000, "count": 100_000},
    # moment CIs stay at full size: they are cheap and a smaller CI is a coarser check
    "fast": {"ks": 20_000, "ci": 1_000_000, "smin": 100_000, "count": 20_000},
}


def _hermite_laguerre(seed, sizes):
    x = np.round(np.arange(-1000, 1001) * 0.01, 10)
    worst = 0.0
    for n in range(11):
        for r in (0, 1):
            lhs = specfun.hermite_from_laguerre(n, r, x)
            rhs = specfun.hermite_eval(2 * n + r, x)
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs)))))
    return worst <= 1e-9, {"max_relative_residual": worst, "tolerance": 1e-9}


def _semicircle(seed, sizes):
    worst = 0.0
    for n in range(1, 31):
        grid = np.linspace(0, 2 * math.sqrt(n), 4001)[1:]
        worst = max(worst, densities.semicircle_identity_residual(n, grid))
    return worst <= 1e-9, {"max_residual": worst, "tolerance": 1e-9}


def _main_decomposition(seed, sizes):
    t = sizes["ks"]
    out = {}
    ok = True
    for n in range(2, 9):
        dense = np.abs(ensembles.sample_gue_dense(n, make_rng(derive_seed(seed, 3, n), 0), t))
        mixed, _ = decompose.mix_batch(n, make_rng(derive_seed(seed, 3, n), 1), t)
        rep = ks_two_sample(dense.ravel(), mixed.ravel(), 0.01)
        out[f"n={n}"] = {"D": rep.statistic, "critical_1pct": rep.threshold}
        ok &= rep.passed
    return ok, out


def _unmix_n7(seed, sizes):
    t = sizes["ks"]
    n = 7
    dense = np.sort(np.abs(ensembles.sample_gue_dense(n, make_rng(derive_seed(seed, 4), 0), t)), axis=1)
    plus, minus = decompose.split_by_mask(dense, decompose.unmix_batch(dense, make_rng(derive_seed(seed, 4), 1)))
    ref_plus = ensembles.lue_bidiagonal_model(3, 0.5).singular_values(make_rng(derive_seed(seed, 4), 2), t)
    ref_minus = ensembles.lue_bidiagonal_model(4, -0.5).singular_values(make_rng(derive_seed(seed, 4), 3), t)
    a = ks_two_sample(plus.ravel(), ref_plus.ravel(), 0.01)
    b = ks_two_sample(minus.ravel(), ref_minus.ravel(), 0.01)
    detail = {
        "plus_vs_LUE3(+1/2)": {"D": a.statistic, "critical_1pct": a.threshold},
        "minus_vs_LUE4(-1/2)": {"D": b.statistic, "critical_1pct": b.threshold},
    }
    return a.passed and b.passed, detail


def _unmix_n2(seed, sizes):
    t = sizes["ks"]
    dense = np.sort(np.abs(ensembles.sample_gue_dense(2, make_rng(derive_seed(seed, 5), 0), t)), axis=1)
    plus, minus = decompose.split_by_mask(dense, decompose.unmix_batch(dense, make_rng(derive_seed(seed, 5), 1)))
    a = ks_one_sample(plus.ravel(), lambda x: specfun.chi_cdf(3, x), 0.01)
    b = ks_one_sample(minus.ravel(), lambda x: specfun.chi_cdf(1, x), 0.01)
    detail = {
        "plus_vs_chi3": {"D": a.statistic, "critical_1pct": a.threshold},
        "minus_vs_chi1": {"D": b.statistic, "critical_1pct": b.threshold},
    }
    return a.passed and b.passed, detail


def _det_moments(seed, sizes):
    m = detlaws.gue_det_moment(6, 4)
    exact_ok = m.value == 52_093_125 and m.groups == ((1, 3, 3, 5, 5, 7), (3, 5, 5, 7, 7, 9))
    mats = ensembles.gue_matrices(2, make_rng(derive_seed(seed, 6), 0), sizes["ci"])
    dets = np.real(np.linalg.det(mats))
    ci = moment_ci(dets, 2)
    dual = all(detlaws.duality_check(n, k) for n in range(1, 9) for k in range(1, 9) if (n * k) % 2 == 0)
    detail = {
        "E[det^4] n=6": str(m.value),
        "groups": [list(g) for g in m.groups],
        "E[det^2] n=2 CI": [ci.lo, ci.hi],
        "duality_all": dual,
    }
    return exact_ok and ci.contains(3.0) and dual, detail


def _logdet_constants(seed, sizes):
    s = detlaws.logdet_stats(10_000)
    dm = abs(s.centered_mean - (-0.459469))
    dv = abs(s.excess_variance - 1.1351814)
    return dm <= 1e-3 and dv <= 1e-3, {"centered_mean": s.centered_mean, "excess_variance": s.excess_variance}


def _smin(seed, sizes):
    grid = np.linspace(0, 5, 501)
    err = max(abs(extremes.smin_survival(1, s) - specfun.erfc(s / math.sqrt(2))) for s in grid)
    ok = err <= 1e-10
    detail = {"n=1 max_abs_error": err}
    t = sizes["smin"]
    worst = 0.0
    for n in range(2, 9):
        x = ensembles.sample_gue_direct(n, make_rng(derive_seed(seed, 8, n), 0), t)[:, 0]
        for s in (0.1, 0.25, 0.5):
            exact = extremes.smin_survival(n, s)
            est = float(np.mean(x >= s))
            se = math.sqrt(exact * (1 - exact) / t)
            z = (est - exact) / se
            worst = max(worst, abs(z))
            detail[f"n={n},s={s}"] = {"hankel": exact, "mc": est, "z": z}
    detail["max_abs_z"] = worst
    return ok and worst <= 3.0, detail


def _counting(seed, sizes):
    rep = extremes.convolution_identity_check(4, (0.0, 1.0), sizes["count"], derive_seed(seed, 9))
    detail = {
        "z": [float(z) for z in rep.z],
        "gue_probs": [float(p) for p in rep.gue.probs],
        "convolution": [float(p) for p in rep.convolution],
        "k0_smin_exact": rep.smin_exact,
        "k0_z": rep.smin_z,
    }
    return rep.passed(4.0, 3.0), detail


def _kostlan(seed, sizes):
    n = 5
    mags = ensembles.sample_ginibre_magnitudes(n, make_rng(derive_seed(seed, 10), 0), sizes["ks"])

    def mixture(x):
        return np.mean([specfun.chi_cdf(2 * i, x) for i in range(1, n + 1)], axis=0)

    rep = ks_one_sample(mags.ravel(), mixture, 0.01)
    g = ensembles.ginibre_matrices(2, make_rng(derive_seed(seed, 10), 1), sizes["ci"])
    ci = moment_ci(np.abs(np.linalg.det(g)), 2)
    exact = detlaws.ginibre_absdet_moment(2, 2)
    detail = {"D": rep.statistic, "critical_1pct": rep.threshold, "E|det|^2 exact": exact, "CI": [ci.lo, ci.hi]}
    return rep.passed and exact == 8 and ci.contains(8.0), detail


def _goe(seed, sizes):
    exact = detlaws.goe_odd_det_moment(3, 1)
    mats = ensembles.goe_matrices(3, make_rng(derive_seed(seed, 11), 0), sizes["ci"])
    ci = moment_ci(np.linalg.det(mats), 2)
    return exact == 30 and ci.contains(30.0), {"exact": exact, "CI": [ci.lo, ci.hi]}


def _chi_rotation(seed, sizes):
    t = sizes["ks"]
    ok = True
    detail = {}
    for r, s in ((1, 2), (3, 4)):
        rng = make_rng(derive_seed(seed, 12, r, s), 0)
        w = ensembles.sample_chi(rng, r + s, t)
        x = ensembles.sample_chi(rng, r, t)
        y = ensembles.sample_chi(rng, s, t)
        tt, uu, vv, annihilated = ensembles.chi_rotation_block(w, x, y)
        reps = [
            ks_one_sample(tt, lambda z: specfun.chi_cdf(r, z)),
            ks_one_sample(uu, lambda z: specfun.chi_cdf(s, z)),
            ks_one_sample(vv, lambda z: specfun.chi_cdf(r + s, z)),
        ]
        zero = bool(np.all(annihilated == 0.0))
        ok &= zero and all(p.passed for p in reps)
        detail[f"(r,s)=({r},{s})"] = {"D": [p.statistic for p in reps], "critical_1pct": reps[0].threshold, "exact_zero": zero}
    return ok, detail


CRITERIA = [
    (1, "Hermite-Laguerre identity", _hermite_laguerre),
    (2, "finite semicircle as two quarter-circle densities", _semicircle),
    (3, "GUE singular values = union of two anti-GUE spectra", _main_decomposition),
    (4, "unmixing at n=7 against LUE parts", _unmix_n7),
    (5, "unmixing at n=2 against chi_3 and chi_1", _unmix_n2),
    (6, "GUE determinant moments and duality", _det_moments),
    (7, "log-determinant limit constants", _logdet_constants),
    (8, "smallest singular value Hankel formula", _smin),
    (9, "counting-function convolution", _counting),
    (10, "Ginibre moduli and |det| moment", _kostlan),
    (11, "odd-order GOE determinant moment", _goe),
    (12, "chi rotation marginals", _chi_rotation),
]


def run_criterion(number: int, seed: int = 20240601, suite: str = "full") -> CriterionResult:
    num, title, fn = CRITERIA[number - 1]
    start = time.perf_counter()
    passed, detail = fn(seed, _SIZES[suite])
    return CriterionResult(num, title, bool(passed), detail, time.perf_counter() - start)


def run_suite(suite: str = "fast", seed: int = 20240601) -> list[CriterionResult]:
    if suite not in _SIZES:
        raise ValueError(f"suite must be one of {sorted(_SIZES)}")
    return [run_criterion(num, seed, suite) for num, _, _ in CRITERIA]
