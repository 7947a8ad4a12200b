"""Exact operating characteristics for binary endpoints.

Single-arm designs reduce to Beta-Binomial sums over the response count
with a critical count x_c; two-arm designs enumerate the full
(n_T+1) x (n_C+1) outcome grid. Posterior probabilities of a risk
difference are evaluated by fixed-order Gauss-Legendre quadrature of the
control-arm beta density against the treatment-arm incomplete-beta tail
(256 nodes by default, with a 512-node refinement diagnostic).

Grid construction is the expensive step and depends on everything except
the threshold c, so grids are cached per (spec minus c) and reused across
whole OC curves and calibration searches.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .design import ArmPriors, BetaPrior, DesignSpec, OCResult, ensure_valid
from .errors import DomainError, PrecisionWarning
from .special import (
    beta_binomial_pmf,
    beta_logpdf,
    beta_ppf,
    binomial_pmf,
    binomial_sf,
    gauss_legendre_unit,
    reg_inc_beta,
)

__all__ = [
    "DEFAULT_QUAD_ORDER",
    "REFINE_QUAD_ORDER",
    "SingleArmGrid",
    "TwoArmGrid",
    "posterior_prob_single",
    "critical_count",
    "single_arm_grid",
    "oc_binary_single",
    "posterior_prob_two_arm",
    "two_arm_grid",
    "oc_binary_two_arm",
]

DEFAULT_QUAD_ORDER = 256
REFINE_QUAD_ORDER = 512
_REFINE_TOL = 1e-7


def _ratio(num: float, den: float) -> float:
    if den <= 0.0:
        return math.nan
    return min(1.0, max(0.0, num / den))


# ---------------------------------------------------------------------------
# Single arm
# ---------------------------------------------------------------------------

def posterior_prob_single(x: int, n: int, analysis_prior: BetaPrior, margin: float) -> float:
    """Pr(theta > margin | x responses of n) under the conjugate beta posterior."""
    if not 0.0 < margin < 1.0:
        raise DomainError("rule.margin: must lie in (0,1) for binary endpoints")
    if not 0 <= x <= n:
        raise DomainError("count x must satisfy 0 <= x <= n")
    a = analysis_prior.alpha
    b = analysis_prior.beta
    return reg_inc_beta(1.0 - margin, b + n - x, a + x)


def _posterior_tail_vector(n: int, prior: BetaPrior, margin: float) -> np.ndarray:
    # Pr(theta > margin | x) = I_{1-margin}(b+n-x, a+x): the reflected form
    # feeds the continued fraction directly, so near-zero tails keep their
    # relative accuracy instead of dying in a 1-minus cancellation
    xs = np.arange(n + 1, dtype=float)
    return reg_inc_beta(1.0 - margin, prior.beta + n - xs, prior.alpha + xs)


def _posterior_lower_vector(n: int, prior: BetaPrior, margin: float) -> np.ndarray:
    xs = np.arange(n + 1, dtype=float)
    return reg_inc_beta(margin, prior.alpha + xs, prior.beta + n - xs)


def critical_count(n: int, analysis_prior: BetaPrior, margin: float, c: float) -> int:
    """Smallest response count whose posterior probability strictly exceeds c;
    n+1 when the rule is unreachable (so success iff X >= x_c)."""
    if not 0.0 <= c <= 1.0:
        raise DomainError("rule.c: threshold must lie in (0,1)")
    tail = _posterior_tail_vector(n, analysis_prior, margin)
    # tail is non-decreasing in x; count of entries <= c is the first index > c
    return int(np.searchsorted(tail, c, side="right"))


@dataclass(frozen=True)
class SingleArmGrid:
    """Threshold-independent tables for one single-arm binary design.

    m_d are predictive masses under the design prior, q_d the design-prior
    posterior probabilities of effectiveness, p_a the analysis-prior
    posterior probabilities driving the decision. Invariants: sum(m_d) = 1,
    sum(m_d * q_d) = gamma1, and both q_d and p_a are non-decreasing in x.
    """

    n: int
    margin: float
    p_a: np.ndarray
    m_d: np.ndarray
    q_d: np.ndarray
    q0_d: np.ndarray
    gamma1: float
    gamma0: float

    def critical_count(self, c: float) -> int:
        return int(np.searchsorted(self.p_a, c, side="right"))

    def oc_at(self, c: float) -> OCResult:
        x_c = self.critical_count(c)
        return _oc_from_tables(
            success_mass=self.m_d[x_c:],
            success_tp=(self.m_d * self.q_d)[x_c:],
            success_fp=(self.m_d * self.q0_d)[x_c:],
            fail_tp=(self.m_d * self.q_d)[:x_c],
            fail_mass=self.m_d[:x_c],
            gamma1=self.gamma1,
            gamma0=self.gamma0,
            ft1e=binomial_sf(x_c, self.n, self.margin),
        )

    def step_function(self) -> "StepFunctionOC":
        null_mass = binomial_pmf(np.arange(self.n + 1), self.n, self.margin)
        return _build_step_function(self.p_a, self.m_d, self.q_d, self.q0_d,
                                    null_mass, self.gamma1, self.gamma0)


def _oc_from_tables(success_mass: np.ndarray, success_tp: np.ndarray,
                    success_fp: np.ndarray, fail_tp: np.ndarray,
                    fail_mass: np.ndarray, gamma1: float, gamma0: float,
                    ft1e: float) -> OCResult:
    # every sum is over a directly computed non-negative array, so small
    # conditional metrics stay relative-accurate (no 1-minus cancellations)
    bp = float(np.sum(success_mass))
    tp = float(np.sum(success_tp))
    fp = float(np.sum(success_fp))
    return OCResult(
        bp=bp,
        bcp=_ratio(tp, gamma1),
        bt1e=_ratio(fp, gamma0),
        ft1e=ft1e,
        pid=_ratio(fp, bp),
        for_=_ratio(float(np.sum(fail_tp)), float(np.sum(fail_mass))),
        gamma1=gamma1,
    )


@lru_cache(maxsize=64)
def _single_grid_cached(n: int, a_a: float, b_a: float, a_d: float, b_d: float,
                        margin: float) -> SingleArmGrid:
    p_a = _posterior_tail_vector(n, BetaPrior(a_a, b_a), margin)
    q_d = _posterior_tail_vector(n, BetaPrior(a_d, b_d), margin)
    q0_d = _posterior_lower_vector(n, BetaPrior(a_d, b_d), margin)
    m_d = beta_binomial_pmf(np.arange(n + 1), n, a_d, b_d)
    gamma1 = reg_inc_beta(1.0 - margin, b_d, a_d)
    gamma0 = reg_inc_beta(margin, a_d, b_d)
    for arr in (p_a, q_d, q0_d, m_d):
        arr.setflags(write=False)
    return SingleArmGrid(n=n, margin=margin, p_a=p_a, m_d=m_d, q_d=q_d,
                         q0_d=q0_d, gamma1=gamma1, gamma0=gamma0)


def single_arm_grid(spec: DesignSpec) -> SingleArmGrid:
    ensure_valid(spec, require_threshold=False)
    return _single_grid_cached(spec.n_t, spec.analysis_prior.alpha,
                               spec.analysis_prior.beta, spec.design_prior.alpha,
                               spec.design_prior.beta, spec.rule.margin)


def oc_binary_single(spec: DesignSpec) -> OCResult:
    ensure_valid(spec)
    return single_arm_grid(spec).oc_at(spec.threshold)


# ---------------------------------------------------------------------------
# Two arm
# ---------------------------------------------------------------------------

def _oriented_tail_matrix(u: np.ndarray, a_t, b_t, margin: float,
                          benefit: str, complement: bool = False) -> np.ndarray:
    """P(oriented effect beyond margin | theta_C = u) per treatment state.

    benefit 'lower_rate': effect = theta_C - theta_T, inner factor
    P(theta_T < u - margin) = I_{u-margin}(a,b); 'higher_rate': effect =
    theta_T - theta_C, inner factor P(theta_T > u + margin), evaluated as
    I_{1-(u+margin)}(b,a) so near-zero tails keep relative accuracy. The
    complement flag swaps the orientation (used for the ineffective side).
    """
    lower_tail = (benefit == "lower_rate") ^ complement
    if benefit == "lower_rate":
        x = np.clip(u - margin, 0.0, 1.0)
    else:
        x = np.clip(u + margin, 0.0, 1.0)
    if lower_tail:
        return reg_inc_beta(x[:, None], a_t[None, :], b_t[None, :])
    return reg_inc_beta(1.0 - x[:, None], b_t[None, :], a_t[None, :])


def _effect_prob_matrix(n_t: int, n_c: int, prior: ArmPriors, margin: float,
                        benefit: str, order: int,
                        complement: bool = False) -> tuple[np.ndarray, float]:
    """Posterior effect probabilities over the whole outcome grid plus the
    matching no-data prevalence, both on the same quadrature nodes so the
    mixture identity sum(m_d * q_d) = gamma1 carries to float precision."""
    rule = gauss_legendre_unit(order)
    u = rule.nodes
    w = rule.weights
    xs_t = np.arange(n_t + 1, dtype=float)
    xs_c = np.arange(n_c + 1, dtype=float)
    a_t = prior.t.alpha + xs_t
    b_t = prior.t.beta + n_t - xs_t
    a_c = prior.c.alpha + xs_c
    b_c = prior.c.beta + n_c - xs_c

    inner = _oriented_tail_matrix(u, a_t, b_t, margin, benefit, complement)
    outer = np.exp(beta_logpdf(u[:, None], a_c[None, :], b_c[None, :]))
    grid = inner.T @ (w[:, None] * outer)                    # (n_t+1, n_c+1)
    np.clip(grid, 0.0, 1.0, out=grid)

    prior_inner = _oriented_tail_matrix(u, np.array([prior.t.alpha]),
                                        np.array([prior.t.beta]), margin,
                                        benefit, complement)[:, 0]
    prior_outer = np.exp(beta_logpdf(u, prior.c.alpha, prior.c.beta))
    prevalence = float(np.dot(w, prior_inner * prior_outer))
    return grid, min(1.0, max(0.0, prevalence))


def _scalar_effect_prob(a_t: float, b_t: float, a_c: float, b_c: float,
                        margin: float, benefit: str, order: int) -> float:
    # map the rule onto the bulk of the outer (control) posterior; the
    # truncated tails carry < 2e-13 of the integral
    lo = beta_ppf(1e-13, a_c, b_c)
    hi = beta_ppf(1.0 - 1e-13, a_c, b_c)
    rule = gauss_legendre_unit(order)
    u, w = rule.mapped(lo, hi)
    if benefit == "lower_rate":
        inner = reg_inc_beta(np.clip(u - margin, 0.0, 1.0), a_t, b_t)
    else:
        inner = 1.0 - reg_inc_beta(np.clip(u + margin, 0.0, 1.0), a_t, b_t)
    dens = np.exp(beta_logpdf(u, a_c, b_c))
    return float(np.dot(w, dens * inner))


def posterior_prob_two_arm(x_t: int, n_t: int, x_c: int, n_c: int,
                           analysis_priors: ArmPriors, margin: float,
                           benefit: str, order: int = DEFAULT_QUAD_ORDER) -> float:
    """Pr(oriented risk difference > margin | data) for a two-arm design.

    Gauss-Legendre quadrature of the control-arm beta posterior against the
    treatment-arm regularized-incomplete-beta tail. A 512-node refinement is
    always compared against the default-order result; disagreement beyond
    1e-7 attaches a PrecisionWarning.
    """
    if benefit not in ("lower_rate", "higher_rate"):
        raise DomainError("benefit: must be one of higher_rate, lower_rate")
    if not 0 <= x_t <= n_t or not 0 <= x_c <= n_c:
        raise DomainError("event counts must satisfy 0 <= x <= n for each arm")
    a_t = analysis_priors.t.alpha + x_t
    b_t = analysis_priors.t.beta + n_t - x_t
    a_c = analysis_priors.c.alpha + x_c
    b_c = analysis_priors.c.beta + n_c - x_c
    value = _scalar_effect_prob(a_t, b_t, a_c, b_c, margin, benefit, order)
    refined = _scalar_effect_prob(a_t, b_t, a_c, b_c, margin, benefit,
                                  max(REFINE_QUAD_ORDER, 2 * order))
    if abs(refined - value) > _REFINE_TOL:
        warnings.warn(
            f"two-arm posterior quadrature at order {order} disagrees with the "
            f"refinement by {abs(refined - value):.3e}",
            PrecisionWarning, stacklevel=2)
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class TwoArmGrid:
    """Threshold-independent tables for a two-arm binary design.

    success at threshold c is the boolean grid p_a > c; m_d is the joint
    Beta-Binomial predictive under the design priors and q_d the design
    posterior probability of the oriented effect per cell. refinement is
    the largest |512-node - default-order| disagreement seen while building
    the posterior grids.
    """

    n_t: int
    n_c: int
    margin: float
    benefit: str
    p_a: np.ndarray
    m_d: np.ndarray
    q_d: np.ndarray
    q0_d: np.ndarray
    gamma1: float
    gamma0: float
    refinement: float

    def success_grid(self, c: float) -> np.ndarray:
        return self.p_a > c

    def oc_at(self, c: float, null_rate: float) -> OCResult:
        success = self.success_grid(c)
        fail = ~success
        null_t = binomial_pmf(np.arange(self.n_t + 1), self.n_t, null_rate)
        null_c = binomial_pmf(np.arange(self.n_c + 1), self.n_c, null_rate)
        ft1e = float(np.sum((null_t[:, None] * null_c[None, :])[success]))
        return _oc_from_tables(
            success_mass=self.m_d[success],
            success_tp=(self.m_d * self.q_d)[success],
            success_fp=(self.m_d * self.q0_d)[success],
            fail_tp=(self.m_d * self.q_d)[fail],
            fail_mass=self.m_d[fail],
            gamma1=self.gamma1,
            gamma0=self.gamma0,
            ft1e=ft1e,
        )

    def step_function(self, null_rate: float) -> "StepFunctionOC":
        null_t = binomial_pmf(np.arange(self.n_t + 1), self.n_t, null_rate)
        null_c = binomial_pmf(np.arange(self.n_c + 1), self.n_c, null_rate)
        null_mass = null_t[:, None] * null_c[None, :]
        return _build_step_function(self.p_a.ravel(), self.m_d.ravel(),
                                    self.q_d.ravel(), self.q0_d.ravel(),
                                    null_mass.ravel(), self.gamma1, self.gamma0)


@lru_cache(maxsize=16)
def _two_arm_tables_cached(n_t: int, n_c: int, a_at: float, b_at: float,
                           a_ac: float, b_ac: float, a_dt: float, b_dt: float,
                           a_dc: float, b_dc: float, margin: float,
                           benefit: str, order: int) -> TwoArmGrid:
    analysis = ArmPriors(BetaPrior(a_at, b_at), BetaPrior(a_ac, b_ac))
    design = ArmPriors(BetaPrior(a_dt, b_dt), BetaPrior(a_dc, b_dc))

    p_a, _ = _effect_prob_matrix(n_t, n_c, analysis, margin, benefit, order)
    q_d, gamma1 = _effect_prob_matrix(n_t, n_c, design, margin, benefit, order)
    q0_d, gamma0 = _effect_prob_matrix(n_t, n_c, design, margin, benefit, order,
                                       complement=True)
    p_ref, _ = _effect_prob_matrix(n_t, n_c, analysis, margin, benefit,
                                   REFINE_QUAD_ORDER)
    q_ref, _ = _effect_prob_matrix(n_t, n_c, design, margin, benefit,
                                   REFINE_QUAD_ORDER)
    q0_ref, _ = _effect_prob_matrix(n_t, n_c, design, margin, benefit,
                                    REFINE_QUAD_ORDER, complement=True)
    refinement = max(float(np.max(np.abs(p_a - p_ref))),
                     float(np.max(np.abs(q_d - q_ref))),
                     float(np.max(np.abs(q0_d - q0_ref))))

    m_t = beta_binomial_pmf(np.arange(n_t + 1), n_t, a_dt, b_dt)
    m_c = beta_binomial_pmf(np.arange(n_c + 1), n_c, a_dc, b_dc)
    m_d = m_t[:, None] * m_c[None, :]

    for arr in (p_a, m_d, q_d, q0_d):
        arr.setflags(write=False)
    return TwoArmGrid(n_t=n_t, n_c=n_c, margin=margin, benefit=benefit,
                      p_a=p_a, m_d=m_d, q_d=q_d, q0_d=q0_d, gamma1=gamma1,
                      gamma0=gamma0, refinement=refinement)


def two_arm_grid(spec: DesignSpec, order: int = DEFAULT_QUAD_ORDER) -> TwoArmGrid:
    ensure_valid(spec, require_threshold=False)
    a = spec.analysis_prior
    d = spec.design_prior
    grid = _two_arm_tables_cached(spec.n_t, spec.n_c, a.t.alpha, a.t.beta,
                                  a.c.alpha, a.c.beta, d.t.alpha, d.t.beta,
                                  d.c.alpha, d.c.beta, spec.rule.margin,
                                  spec.benefit, order)
    # warn on every retrieval, not only at build time, so cached grids keep
    # their precision diagnostics visible to strict callers
    if grid.refinement > _REFINE_TOL:
        warnings.warn(
            f"two-arm posterior grids at order {order} disagree with the "
            f"{REFINE_QUAD_ORDER}-node refinement by {grid.refinement:.3e}",
            PrecisionWarning, stacklevel=2)
    return grid


def oc_binary_two_arm(spec: DesignSpec) -> OCResult:
    ensure_valid(spec)
    return two_arm_grid(spec).oc_at(spec.threshold, spec.null_rate)


# ---------------------------------------------------------------------------
# Step structure over achievable posterior values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepFunctionOC:
    """OC metrics of the rule as a step function of the threshold c.

    Row j holds the metrics of the success set {p_a > values[j]}, which is
    what the rule produces for any c in [values[j], values[j+1]). Row j = -1
    (prepended as column 0 of the arrays with value 0) would be the
    all-success rule; calibration uses the rows directly.
    """

    values: np.ndarray
    bp: np.ndarray
    bcp: np.ndarray
    bt1e: np.ndarray
    ft1e: np.ndarray
    pid: np.ndarray
    for_: np.ndarray
    gamma1: float

    def metric(self, name: str) -> np.ndarray:
        key = "for_" if name == "for" else name
        return getattr(self, key)

    def oc_row(self, j: int) -> OCResult:
        return OCResult(bp=float(self.bp[j]), bcp=float(self.bcp[j]),
                        bt1e=float(self.bt1e[j]), ft1e=float(self.ft1e[j]),
                        pid=float(self.pid[j]), for_=float(self.for_[j]),
                        gamma1=self.gamma1)


def _build_step_function(p_a: np.ndarray, m_d: np.ndarray, q_d: np.ndarray,
                         q0_d: np.ndarray, null_mass: np.ndarray,
                         gamma1: float, gamma0: float) -> StepFunctionOC:
    order = np.argsort(p_a, kind="stable")
    p_sorted = p_a[order]
    md_sorted = m_d[order]
    tp_sorted = md_sorted * q_d[order]
    fp_sorted = md_sorted * q0_d[order]
    null_sorted = null_mass[order]

    # distinct achievable values and the index one past their last occurrence
    values, first_idx = np.unique(p_sorted, return_index=True)
    last_idx = np.append(first_idx[1:], len(p_sorted))

    def suffix(arr):
        return np.concatenate((np.cumsum(arr[::-1])[::-1], [0.0]))[last_idx]

    def prefix(arr):
        return np.concatenate(([0.0], np.cumsum(arr)))[last_idx]

    bp = suffix(md_sorted)
    tp = suffix(tp_sorted)
    fp = suffix(fp_sorted)
    ft1e = suffix(null_sorted)
    fail_tp = prefix(tp_sorted)
    fail_md = prefix(md_sorted)

    with np.errstate(invalid="ignore", divide="ignore"):
        bcp = np.where(gamma1 > 0.0, tp / gamma1, np.nan)
        bt1e = np.where(gamma0 > 0.0, fp / gamma0, np.nan)
        pid = np.where(bp > 0.0, fp / bp, np.nan)
        for_ = np.where(fail_md > 0.0, fail_tp / fail_md, np.nan)
    clip = lambda arr: np.clip(arr, 0.0, 1.0)
    return StepFunctionOC(values=values, bp=bp, bcp=clip(bcp), bt1e=clip(bt1e),
                          ft1e=ft1e, pid=clip(pid), for_=clip(for_),
                          gamma1=gamma1)
