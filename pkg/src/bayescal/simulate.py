"""Seeded Monte Carlo estimation of all operating characteristics by
forward simulation: draw the true effect from the design prior, draw trial
data from the sampling model, apply the analysis-prior success rule, and
tally the 2x2 decision table. This is the independent oracle for every
closed-form engine.

Randomness comes from numpy's counter-based Philox4x64 bit generator keyed
by (seed, batch-tag): batch b of the main run uses key [seed, b], the
separate pinned-null run for FT1E uses key [seed, 2^63 + b]. Tallies are
sums of per-batch integers, so merging is order-independent and a report
is bit-reproducible for a fixed (spec, n_sims, seed) and numpy version
(distribution algorithms are stable within a numpy release; the generator
stream itself is fixed by the Philox definition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .binary import single_arm_grid, two_arm_grid
from .continuous import sampling_variance
from .design import DesignSpec, NormalPrior, OCResult, ensure_valid
from .engines import compute_oc
from .errors import DomainError
from .tte import flipped_normal_params

__all__ = ["SimReport", "ConvergencePoint", "simulate_oc", "convergence_check"]

_BATCH = 1 << 18
_NULL_TAG = 1 << 63


@dataclass(frozen=True)
class SimReport:
    """Simulation estimates with exact tallies.

    counts carries tp/fp/tn/fn for the design-prior run (summing to n_sims)
    plus ft1e_hits/ft1e_sims for the pinned-null run; every estimate is
    recomputable from the tallies alone. Metrics whose tally denominator is
    zero are reported as NaN and listed in ``undefined``.
    """

    estimates: OCResult
    standard_errors: dict[str, float]
    n_sims: int
    seed: int
    counts: dict[str, int]
    undefined: tuple[str, ...]

    def to_dict(self) -> dict:
        clean_se = {k: (None if math.isnan(v) else v)
                    for k, v in self.standard_errors.items()}
        return {
            "estimates": self.estimates.to_dict(),
            "standard_errors": clean_se,
            "n_sims": self.n_sims,
            "seed": self.seed,
            "counts": dict(self.counts),
            "undefined": list(self.undefined),
        }


@dataclass(frozen=True)
class ConvergencePoint:
    n_sims: int
    max_abs_diff: float
    per_metric: dict[str, float]


def _generator(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed % (1 << 64), tag % (1 << 64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _batches(n: int) -> list[tuple[int, int]]:
    out = []
    start = 0
    index = 0
    while start < n:
        size = min(_BATCH, n - start)
        out.append((index, size))
        start += size
        index += 1
    return out


def _normal_kernels(v2: float, margin: float, analysis: NormalPrior,
                    design: NormalPrior, c: float):
    v = math.sqrt(v2)
    sigma_post2 = 1.0 / (1.0 / (analysis.sd ** 2) + 1.0 / v2)
    sigma_post = math.sqrt(sigma_post2)
    w = sigma_post2 / v2

    def main(gen: np.random.Generator, size: int):
        theta = design.mean + design.sd * gen.standard_normal(size)
        ybar = theta + v * gen.standard_normal(size)
        post = ndtr((w * ybar + (1.0 - w) * analysis.mean - margin) / sigma_post)
        return post > c, theta > margin

    def null(gen: np.random.Generator, size: int):
        ybar = margin + v * gen.standard_normal(size)
        post = ndtr((w * ybar + (1.0 - w) * analysis.mean - margin) / sigma_post)
        return post > c

    return main, null


def _build_kernels(spec: DesignSpec):
    c = spec.threshold
    if spec.endpoint in ("continuous_single", "continuous_two_arm"):
        return _normal_kernels(sampling_variance(spec), spec.rule.margin,
                               spec.analysis_prior, spec.design_prior, c)
    if spec.endpoint == "tte":
        v2, margin, analysis, design = flipped_normal_params(spec)
        return _normal_kernels(v2, margin, analysis, design, c)
    if spec.endpoint == "binary_single":
        grid = single_arm_grid(spec)
        success_by_count = grid.p_a > c
        n = spec.n_t
        margin = spec.rule.margin
        a_d = spec.design_prior.alpha
        b_d = spec.design_prior.beta

        def main(gen: np.random.Generator, size: int):
            theta = gen.beta(a_d, b_d, size)
            x = gen.binomial(n, theta)
            return success_by_count[x], theta > margin

        def null(gen: np.random.Generator, size: int):
            x = gen.binomial(n, margin, size)
            return success_by_count[x]

        return main, null

    grid = two_arm_grid(spec)
    success_by_counts = grid.p_a > c
    n_t, n_c = spec.n_t, spec.n_c
    margin = spec.rule.margin
    lower = spec.benefit == "lower_rate"
    d_t, d_c = spec.design_prior.t, spec.design_prior.c
    theta0 = spec.null_rate

    def main(gen: np.random.Generator, size: int):
        theta_t = gen.beta(d_t.alpha, d_t.beta, size)
        theta_c = gen.beta(d_c.alpha, d_c.beta, size)
        x_t = gen.binomial(n_t, theta_t)
        x_c = gen.binomial(n_c, theta_c)
        effect = (theta_c - theta_t) if lower else (theta_t - theta_c)
        return success_by_counts[x_t, x_c], effect > margin

    def null(gen: np.random.Generator, size: int):
        x_t = gen.binomial(n_t, theta0, size)
        x_c = gen.binomial(n_c, theta0, size)
        return success_by_counts[x_t, x_c]

    return main, null


def _se(p: float, denom: int) -> float:
    if denom <= 0:
        return math.nan
    return math.sqrt(p * (1.0 - p) / denom)


def simulate_oc(spec: DesignSpec, n_sims: int, seed: int = 0) -> SimReport:
    """Estimate all metrics from n_sims forward simulations (deterministic
    for a fixed seed). FT1E comes from a separate run with the effect pinned
    at the margin (continuous/tte), the margin rate (binary single-arm), or
    the point-null rate in both arms (binary two-arm)."""
    ensure_valid(spec)
    if not isinstance(n_sims, int) or isinstance(n_sims, bool) or n_sims < 1:
        raise DomainError("n_sims must be a positive integer")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise DomainError("seed must be an integer")
    main, null = _build_kernels(spec)

    tp = fp = tn = fn = 0
    for index, size in _batches(n_sims):
        success, effective = main(_generator(seed, index), size)
        s_e = int(np.count_nonzero(success & effective))
        s_i = int(np.count_nonzero(success & ~effective))
        f_e = int(np.count_nonzero(~success & effective))
        tp += s_e
        fp += s_i
        fn += f_e
        tn += size - s_e - s_i - f_e

    ft1e_hits = 0
    for index, size in _batches(n_sims):
        success = null(_generator(seed, _NULL_TAG + index), size)
        ft1e_hits += int(np.count_nonzero(success))

    counts = {"tp": tp, "fp": fp, "tn": tn, "fn": fn,
              "ft1e_hits": ft1e_hits, "ft1e_sims": n_sims}
    undefined: list[str] = []

    def ratio(name: str, num: int, denom: int) -> float:
        if denom <= 0:
            undefined.append(name)
            return math.nan
        return num / denom

    bp = (tp + fp) / n_sims
    bcp = ratio("bcp", tp, tp + fn)
    bt1e = ratio("bt1e", fp, fp + tn)
    pid = ratio("pid", fp, tp + fp)
    for_ = ratio("for", fn, fn + tn)
    ft1e = ft1e_hits / n_sims
    gamma1 = (tp + fn) / n_sims

    estimates = OCResult(bp=bp, bcp=bcp, bt1e=bt1e, ft1e=ft1e, pid=pid,
                         for_=for_, gamma1=gamma1)
    ses = {
        "bp": _se(bp, n_sims),
        "bcp": _se(bcp, tp + fn) if tp + fn > 0 else math.nan,
        "bt1e": _se(bt1e, fp + tn) if fp + tn > 0 else math.nan,
        "ft1e": _se(ft1e, n_sims),
        "pid": _se(pid, tp + fp) if tp + fp > 0 else math.nan,
        "for": _se(for_, fn + tn) if fn + tn > 0 else math.nan,
        "gamma1": _se(gamma1, n_sims),
    }
    return SimReport(estimates=estimates, standard_errors=ses, n_sims=n_sims,
                     seed=seed, counts=counts, undefined=tuple(undefined))


def convergence_check(spec: DesignSpec, sims_schedule: list[int],
                      seed: int = 0) -> list[ConvergencePoint]:
    """Per-metric |simulated - closed form| along a simulation-size schedule.

    Report only (no assertions): the deviations should shrink like
    1/sqrt(n) in expectation."""
    ensure_valid(spec)
    exact = compute_oc(spec)
    points = []
    for n_sims in sims_schedule:
        report = simulate_oc(spec, n_sims, seed)
        per_metric: dict[str, float] = {}
        for name in ("bp", "bcp", "bt1e", "ft1e", "pid", "for", "gamma1"):
            a = exact.metric(name)
            b = report.estimates.metric(name)
            if not math.isnan(a) and not math.isnan(b):
                per_metric[name] = abs(a - b)
        points.append(ConvergencePoint(
            n_sims=n_sims,
            max_abs_diff=max(per_metric.values()) if per_metric else math.nan,
            per_metric=per_metric,
        ))
    return points
