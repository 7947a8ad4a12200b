"""Closed-form operating characteristics for normal-outcome designs.

Under normal-normal conjugacy the success rule reduces to a deterministic
boundary y_c on the sample mean, and jointly with a normal design prior the
pair (theta, ybar) is bivariate normal. All six metrics then follow from
one upper-orthant probability:

    gamma1 = P(U > a)        a = (margin - theta_d) / sigma_d
    BP     = P(V > b)        b = (y_c - theta_d) / sqrt(sigma_d^2 + v^2)
    TPP    = P(U > a, V > b) rho = sigma_d / sqrt(sigma_d^2 + v^2)

    BCP  = TPP / gamma1            BT1E = (BP - TPP) / gamma0
    PID  = (BP - TPP) / BP         FOR  = (gamma1 - TPP) / (1 - BP)
    FT1E = P(V' > (y_c - margin)/v) with theta pinned at the margin

Working with the orthant probability (instead of differences of CDFs near
one) keeps the small error-rate metrics free of cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .design import DesignSpec, NormalPrior, OCResult, ensure_valid
from .errors import DomainError
from .special import bvn_tail, phi_cdf, phi_inv, phi_sf, student_t_cdf

__all__ = [
    "PosteriorNormal",
    "StandardizedBoundaries",
    "posterior_params",
    "posterior_prob_normal",
    "sampling_variance",
    "decision_boundary",
    "standardized_boundaries",
    "oc_normal_params",
    "oc_continuous",
    "jeffreys_t_success",
]


@dataclass(frozen=True)
class PosteriorNormal:
    """Posterior of the effect under a normal analysis prior.

    sigma_post^2 = (1/sigma_a^2 + 1/v^2)^(-1); w = sigma_post^2 / v^2;
    mu_post = w*ybar + (1-w)*theta_a.
    """

    mu_post: float
    sigma_post: float
    w: float


@dataclass(frozen=True)
class StandardizedBoundaries:
    """Standardized margin/decision boundaries of the joint normal model."""

    a: float
    b: float
    rho: float
    y_c: float


def _posterior_scale(v2: float, prior: NormalPrior) -> tuple[float, float]:
    """(sigma_post^2, w) for sampling variance v2 under a normal prior."""
    if not v2 > 0:
        raise DomainError("sampling variance must be positive")
    if not prior.sd > 0:
        raise DomainError("analysis prior sd must be positive")
    sigma_post2 = 1.0 / (1.0 / (prior.sd * prior.sd) + 1.0 / v2)
    w = sigma_post2 / v2
    return sigma_post2, w


def posterior_params(ybar: float, v: float, analysis_prior: NormalPrior) -> PosteriorNormal:
    """Normal-normal conjugate update of the effect given mean estimate ybar
    with sampling sd v."""
    if not v > 0:
        raise DomainError("sampling sd v must be positive")
    sigma_post2, w = _posterior_scale(v * v, analysis_prior)
    mu_post = w * ybar + (1.0 - w) * analysis_prior.mean
    return PosteriorNormal(mu_post=mu_post, sigma_post=math.sqrt(sigma_post2), w=w)


def posterior_prob_normal(ybar: float, v: float, analysis_prior: NormalPrior,
                          margin: float) -> float:
    """Pr(effect > margin | ybar) under the conjugate normal posterior."""
    post = posterior_params(ybar, v, analysis_prior)
    return phi_sf((margin - post.mu_post) / post.sigma_post)


def sampling_variance(spec: DesignSpec) -> float:
    """v^2 of the effect estimator: sigma_T^2/n_T, plus sigma_C^2/n_C two-arm."""
    if spec.endpoint == "continuous_single":
        return spec.sigma_t ** 2 / spec.n_t
    if spec.endpoint == "continuous_two_arm":
        return spec.sigma_t ** 2 / spec.n_t + spec.sigma_c ** 2 / spec.n_c
    raise DomainError(f"not a continuous endpoint: {spec.endpoint}")


def _boundary(v2: float, margin: float, analysis: NormalPrior, c: float) -> tuple[float, float]:
    """(y_c, z_eff) where success <=> ybar > y_c and FT1E = phi_sf(z_eff).

    z_eff = (y_c - margin)/v is assembled from w directly so that a flat
    prior (w = 1) collapses to z_eff = Phi^{-1}(c) without round-trip loss.
    """
    sigma_post2, w = _posterior_scale(v2, analysis)
    z_c = phi_inv(c)
    sigma_post = math.sqrt(sigma_post2)
    y_c = (margin - (1.0 - w) * analysis.mean + z_c * sigma_post) / w
    v = math.sqrt(v2)
    z_eff = (1.0 - w) * (margin - analysis.mean) / (w * v) + z_c / math.sqrt(w)
    return y_c, z_eff


def decision_boundary(spec: DesignSpec) -> float:
    """Sample-mean cutoff y_c: the trial succeeds iff ybar > y_c."""
    ensure_valid(spec)
    if not isinstance(spec.analysis_prior, NormalPrior):
        raise DomainError("decision boundary requires a normal analysis prior")
    y_c, _ = _boundary(sampling_variance(spec), spec.rule.margin,
                       spec.analysis_prior, spec.threshold)
    return y_c


def standardized_boundaries(spec: DesignSpec) -> StandardizedBoundaries:
    ensure_valid(spec)
    return _standardized(sampling_variance(spec), spec.rule.margin,
                         spec.analysis_prior, spec.design_prior, spec.threshold)


def _standardized(v2: float, margin: float, analysis: NormalPrior,
                  design: NormalPrior, c: float) -> StandardizedBoundaries:
    if not design.sd > 0:
        raise DomainError(
            "degenerate design prior (sd <= 0): use the point-mass power "
            "formula 1 - Phi(Phi^{-1}(c) - (theta - margin)/v) instead"
        )
    y_c, _ = _boundary(v2, margin, analysis, c)
    marginal_sd = math.sqrt(design.sd ** 2 + v2)
    return StandardizedBoundaries(
        a=(margin - design.mean) / design.sd,
        b=(y_c - design.mean) / marginal_sd,
        rho=design.sd / marginal_sd,
        y_c=y_c,
    )


def oc_normal_params(v2: float, margin: float, analysis: NormalPrior,
                     design: NormalPrior, c: float) -> OCResult:
    """Core closed forms for an arbitrary sampling variance (direction
    'greater'); the continuous and tte engines both delegate here."""
    if not 0.0 < c < 1.0:
        raise DomainError("rule.c: threshold must lie in (0,1)")
    bounds = _standardized(v2, margin, analysis, design, c)
    _, z_eff = _boundary(v2, margin, analysis, c)

    gamma1 = phi_sf(bounds.a)
    gamma0 = phi_cdf(bounds.a)
    bp = phi_sf(bounds.b)
    tpp = bvn_tail(bounds.a, bounds.b, bounds.rho)

    def ratio(num: float, den: float) -> float:
        # conditional metrics are reported undefined when their conditioning
        # event has no mass; tiny float excursions are clipped into [0,1]
        if den <= 0.0:
            return math.nan
        return min(1.0, max(0.0, num / den))

    bcp = ratio(tpp, gamma1)
    bt1e = ratio(bp - tpp, gamma0)
    pid = ratio(bp - tpp, bp)
    for_ = ratio(gamma1 - tpp, phi_cdf(bounds.b))
    ft1e = phi_sf(z_eff)
    return OCResult(bp=bp, bcp=bcp, bt1e=bt1e, ft1e=ft1e, pid=pid, for_=for_,
                    gamma1=gamma1)


def oc_continuous(spec: DesignSpec) -> OCResult:
    """All six metrics plus gamma1 for a continuous-endpoint design."""
    ensure_valid(spec)
    return oc_normal_params(sampling_variance(spec), spec.rule.margin,
                            spec.analysis_prior, spec.design_prior,
                            spec.threshold)


@dataclass(frozen=True)
class TSuccess:
    posterior_probability: float
    success: bool


def jeffreys_t_success(ybar: float, s: float, n: int, margin: float, c: float) -> TSuccess:
    """Success rule under the Jeffreys prior with unknown variance.

    The posterior probability is F_{t_{n-1}}((ybar - margin)/(s/sqrt(n)));
    declaring success at threshold c is the same decision as the one-sided
    one-sample t-test at significance level 1 - c.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise DomainError("n must be an integer >= 2 (no degrees of freedom otherwise)")
    if not s > 0:
        raise DomainError("sample sd must be positive")
    if not 0.0 < c < 1.0:
        raise DomainError("rule.c: threshold must lie in (0,1)")
    t_stat = (ybar - margin) / (s / math.sqrt(n))
    prob = student_t_cdf(t_stat, n - 1)
    return TSuccess(posterior_probability=prob, success=prob > c)
