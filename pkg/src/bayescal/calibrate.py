"""Threshold calibration, OC curves, design-prior sensitivity tables, and
the final success decision for observed data.

Calibration solves for the smallest threshold c whose target metric is at
or below the requested level (the infimum of the feasible set). Continuous
and tte metrics are smooth and strictly decreasing in c, so bisection
(seeded at the asymptotic threshold 1 - level) applies; binary metrics are
step functions that only move at achievable posterior values, so c* is the
smallest achievable value meeting the target and the report carries the
width of the c-interval over which the metric sits still.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .binary import StepFunctionOC, single_arm_grid, two_arm_grid
from .design import (
    ArmPriors,
    BetaPrior,
    DesignSpec,
    OCResult,
    PriorSpec,
    ensure_valid,
)
from .engines import compute_oc, posterior_probability
from .errors import CalibrationError, DomainError
from .theory import asymptotic_threshold

__all__ = [
    "CalibrationTarget",
    "CalibrationResult",
    "SensitivityRow",
    "DecisionRecord",
    "calibrate_threshold",
    "oc_curve",
    "sensitivity_table",
    "decide",
    "worker_count",
]

TARGET_METRICS = ("ft1e", "pid", "bt1e")

_PRESCAN_GRID = np.linspace(0.01, 0.99, 99)
_PRESCAN_SLACK = 1e-9
_METRIC_TOL = 1e-6
_SEED_RTOL = 1e-6
_C_TOL = 1e-8
_MAX_ITER = 200
_C_FLOOR = 1e-7


def worker_count() -> int:
    """Internal parallelism cap from BAYESCAL_THREADS (0 or unset = auto)."""
    raw = os.environ.get("BAYESCAL_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        return min(8, os.cpu_count() or 1)
    return value


@dataclass(frozen=True)
class CalibrationTarget:
    """Target metric and nominal level (alpha* for ft1e, tau* for pid)."""

    metric: str
    level: float

    def __post_init__(self) -> None:
        if self.metric not in TARGET_METRICS:
            raise DomainError(f"target metric must be one of {', '.join(TARGET_METRICS)}")
        if isinstance(self.level, bool) or not isinstance(self.level, (int, float)) \
                or not 0.0 < self.level < 1.0:
            raise DomainError("target level must lie in (0,1)")


@dataclass(frozen=True)
class CalibrationResult:
    target: CalibrationTarget
    feasible: bool
    c_star: float | None
    achieved: OCResult | None
    iterations: int
    granularity: float
    infimum: float | None = None


@dataclass(frozen=True)
class DecisionRecord:
    posterior_probability: float
    threshold: float
    success: bool


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

def calibrate_threshold(spec: DesignSpec, target: CalibrationTarget) -> CalibrationResult:
    """Smallest c with metric(c) <= level; the provided rule.c is ignored."""
    ensure_valid(spec, require_threshold=False)
    if spec.endpoint in ("binary_single", "binary_two_arm"):
        return _calibrate_discrete(spec, target)
    return _calibrate_smooth(spec, target)


def _metric_fn(spec: DesignSpec, name: str):
    def value(c: float) -> float:
        return compute_oc(spec.with_threshold(c)).metric(name)
    return value


def _calibrate_smooth(spec: DesignSpec, target: CalibrationTarget) -> CalibrationResult:
    metric = _metric_fn(spec, target.metric)
    evals = 0

    def m(c: float) -> float:
        nonlocal evals
        evals += 1
        return metric(c)

    scan = [m(c) for c in _PRESCAN_GRID]
    diffs = np.diff(scan)
    if np.any(diffs > _PRESCAN_SLACK):
        raise CalibrationError(
            f"target metric {target.metric} is not non-increasing in c for "
            "this design; calibration by bisection is unsound here")

    seed = asymptotic_threshold(target.level)
    m_seed = m(seed)
    # relative acceptance: the asymptotic seed is exact for flat-prior ft1e
    # targets, while tiny absolute deviations must not fake convergence when
    # the level itself is tiny
    if abs(m_seed - target.level) <= _SEED_RTOL * target.level:
        return CalibrationResult(target=target, feasible=True, c_star=seed,
                                 achieved=compute_oc(spec.with_threshold(seed)),
                                 iterations=evals, granularity=0.0)

    lo, hi = _C_FLOOR, 1.0 - _C_FLOOR
    m_hi = m(hi)
    if m_hi > target.level:
        return CalibrationResult(target=target, feasible=False, c_star=None,
                                 achieved=None, iterations=evals,
                                 granularity=0.0, infimum=m_hi)
    m_lo = m(lo)
    if m_lo <= target.level:
        # every threshold meets the target; the infimum sits at the lower
        # constraint boundary of the open interval (0,1)
        return CalibrationResult(target=target, feasible=True, c_star=lo,
                                 achieved=compute_oc(spec.with_threshold(lo)),
                                 iterations=evals, granularity=0.0)

    if m_seed > target.level:
        lo = seed
    else:
        hi = seed
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if m(mid) > target.level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _C_TOL:
            break
    c_star = hi  # upper end: guaranteed metric(c_star) <= level
    achieved = compute_oc(spec.with_threshold(c_star))
    if achieved.metric(target.metric) > target.level + _METRIC_TOL:
        raise CalibrationError("bisection failed to settle below the target level")
    return CalibrationResult(target=target, feasible=True, c_star=c_star,
                             achieved=achieved, iterations=evals,
                             granularity=0.0)


def _step_function(spec: DesignSpec) -> StepFunctionOC:
    if spec.endpoint == "binary_single":
        return single_arm_grid(spec).step_function()
    return two_arm_grid(spec).step_function(spec.null_rate)


def _coarse_monotone_check(steps: StepFunctionOC, metric: np.ndarray,
                           name: str) -> None:
    # the spec's precondition is coarse by design: discrete metrics may
    # wiggle at machine scale between adjacent achievable values while the
    # 99-point profile stays non-increasing
    idx = np.searchsorted(steps.values, _PRESCAN_GRID, side="right") - 1
    sampled = metric[idx[idx >= 0]]
    sampled = sampled[~np.isnan(sampled)]
    if sampled.size and np.any(np.diff(sampled) > 1e-6):
        raise CalibrationError(
            f"target metric {name} is not non-increasing in c for this "
            "design; calibration over achievable thresholds is unsound here")


def _calibrate_discrete(spec: DesignSpec, target: CalibrationTarget) -> CalibrationResult:
    steps = _step_function(spec)
    metric = steps.metric(target.metric)
    _coarse_monotone_check(steps, metric, target.metric)

    meets = metric <= target.level  # NaN compares False
    if not np.any(meets):
        finite = metric[~np.isnan(metric)]
        infimum = float(np.min(finite)) if finite.size else math.nan
        return CalibrationResult(target=target, feasible=False, c_star=None,
                                 achieved=None, iterations=int(metric.size),
                                 granularity=0.0, infimum=infimum)

    # smallest achievable threshold from which the target stays met: isolated
    # downward wiggles before the last violation do not count as the crossing
    bad = np.where(metric > target.level)[0]
    start = int(bad[-1]) + 1 if bad.size else 0
    stable = np.where(meets[start:])[0]
    if stable.size == 0:
        finite = metric[~np.isnan(metric)]
        infimum = float(np.min(finite)) if finite.size else math.nan
        return CalibrationResult(target=target, feasible=False, c_star=None,
                                 achieved=None, iterations=int(metric.size),
                                 granularity=0.0, infimum=infimum)
    j = start + int(stable[0])
    values = steps.values
    c_star = float(values[j])
    if j + 1 < values.size:
        granularity = float(values[j + 1] - values[j])
    else:
        granularity = float(1.0 - values[j])
    return CalibrationResult(target=target, feasible=True, c_star=c_star,
                             achieved=steps.oc_row(j),
                             iterations=int(metric.size),
                             granularity=granularity)


# ---------------------------------------------------------------------------
# OC curves
# ---------------------------------------------------------------------------

def oc_curve(spec: DesignSpec, c_grid: Sequence[float]) -> list[tuple[float, OCResult]]:
    """One OCResult per grid threshold; grids must be ascending in (0,1).

    Binary engines reuse their cached outcome grids, so a whole curve costs
    little more than a single evaluation.
    """
    ensure_valid(spec, require_threshold=False)
    grid = [float(c) for c in c_grid]
    if not grid:
        raise DomainError("c grid must be non-empty")
    if any(not 0.0 < c < 1.0 for c in grid):
        raise DomainError("c grid values must lie strictly in (0,1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("c grid must be strictly increasing")

    def at(c: float) -> OCResult:
        return compute_oc(spec.with_threshold(c))

    if len(grid) >= 16 and worker_count() > 1:
        at(grid[0])  # build shared caches once before fanning out
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            results = list(pool.map(at, grid))
    else:
        results = [at(c) for c in grid]
    return list(zip(grid, results))


# ---------------------------------------------------------------------------
# Sensitivity tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SensitivityRow:
    scenario: str
    target: CalibrationTarget
    result: CalibrationResult

    def to_record(self) -> dict:
        achieved = self.result.achieved
        def metric(name: str):
            if achieved is None:
                return None
            value = achieved.metric(name)
            return None if math.isnan(value) else value
        return {
            "scenario": self.scenario,
            "target_metric": self.target.metric,
            "target_level": self.target.level,
            "feasible": self.result.feasible,
            "c_star": self.result.c_star,
            "ft1e": metric("ft1e"),
            "bt1e": metric("bt1e"),
            "for": metric("for"),
            "bcp": metric("bcp"),
            "bp": metric("bp"),
        }


def _apply_scenario(spec: DesignSpec, prior: PriorSpec | ArmPriors) -> DesignSpec:
    if spec.endpoint == "binary_two_arm" and isinstance(prior, BetaPrior):
        # scenario priors replace the treatment arm; the control design
        # prior stays fixed
        return replace(spec, design_prior=ArmPriors(t=prior, c=spec.design_prior.c))
    return replace(spec, design_prior=prior)


def sensitivity_table(spec: DesignSpec, scenarios: Sequence[tuple[str, PriorSpec | ArmPriors]],
                      targets: Sequence[CalibrationTarget]) -> list[SensitivityRow]:
    """Calibrate every (scenario, target) pair; infeasible rows are reported
    in-row and never disturb the others."""
    ensure_valid(spec, require_threshold=False)
    if not scenarios:
        raise DomainError("at least one scenario is required")
    if not targets:
        raise DomainError("at least one calibration target is required")

    jobs = [(name, prior, target) for name, prior in scenarios for target in targets]

    def run(job) -> SensitivityRow:
        name, prior, target = job
        scenario_spec = _apply_scenario(spec, prior)
        ensure_valid(scenario_spec, require_threshold=False)
        return SensitivityRow(scenario=name, target=target,
                              result=calibrate_threshold(scenario_spec, target))

    if len(jobs) >= 4 and worker_count() > 1:
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(job) for job in jobs]
    return rows


SENSITIVITY_CSV_HEADER = "scenario,target_metric,target_level,c_star,ft1e,bt1e,for,bcp,bp"


# ---------------------------------------------------------------------------
# Decisions
# ---------------------------------------------------------------------------

def decide(spec: DesignSpec, observed: dict) -> DecisionRecord:
    """Apply the success rule to observed data: success iff the posterior
    probability strictly exceeds c."""
    ensure_valid(spec)
    prob = posterior_probability(spec, observed)
    return DecisionRecord(posterior_probability=prob, threshold=spec.threshold,
                          success=prob > spec.threshold)
