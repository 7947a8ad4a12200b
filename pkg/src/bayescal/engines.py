"""Endpoint dispatch: one entry point for metrics and posterior probabilities."""

from __future__ import annotations

import math

from .binary import (
    oc_binary_single,
    oc_binary_two_arm,
    posterior_prob_single,
    posterior_prob_two_arm,
)
from .continuous import (
    oc_continuous,
    posterior_prob_normal,
    sampling_variance,
)
from .design import DesignSpec, OCResult, ensure_valid
from .errors import DomainError
from .tte import oc_tte, schoenfeld_variance

__all__ = ["compute_oc", "posterior_probability"]


def compute_oc(spec: DesignSpec) -> OCResult:
    """All six operating characteristics plus gamma1 for any endpoint."""
    ensure_valid(spec)
    if spec.endpoint in ("continuous_single", "continuous_two_arm"):
        return oc_continuous(spec)
    if spec.endpoint == "binary_single":
        return oc_binary_single(spec)
    if spec.endpoint == "binary_two_arm":
        return oc_binary_two_arm(spec)
    return oc_tte(spec)


def posterior_probability(spec: DesignSpec, observed: dict) -> float:
    """Posterior probability of effectiveness for observed trial data.

    Observed-data summaries by endpoint:
      continuous_*   {"ybar": effect estimate (difference for two-arm)}
      binary_single  {"x": response count}
      binary_two_arm {"x_t": events, "x_c": events}
      tte            {"theta_hat": log hazard-ratio estimate}
    """
    ensure_valid(spec, require_threshold=False)
    margin = spec.rule.margin
    if spec.endpoint in ("continuous_single", "continuous_two_arm"):
        ybar = _pull_number(observed, "ybar")
        return posterior_prob_normal(ybar, math.sqrt(sampling_variance(spec)),
                                     spec.analysis_prior, margin)
    if spec.endpoint == "binary_single":
        x = _pull_count(observed, "x", spec.n_t)
        return posterior_prob_single(x, spec.n_t, spec.analysis_prior, margin)
    if spec.endpoint == "binary_two_arm":
        x_t = _pull_count(observed, "x_t", spec.n_t)
        x_c = _pull_count(observed, "x_c", spec.n_c)
        return posterior_prob_two_arm(x_t, spec.n_t, x_c, spec.n_c,
                                      spec.analysis_prior, margin, spec.benefit)
    theta_hat = _pull_number(observed, "theta_hat")
    # success means Pr(theta < margin); mirror onto the 'greater' machinery
    v = math.sqrt(schoenfeld_variance(spec.events, spec.allocation))
    return posterior_prob_normal(-theta_hat, v, spec.analysis_prior.flipped(),
                                 -margin)


def _pull_number(observed: dict, key: str) -> float:
    if key not in observed:
        raise DomainError(f"observed data missing '{key}'")
    value = observed[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise DomainError(f"observed '{key}' must be a finite number")
    return float(value)


def _pull_count(observed: dict, key: str, n: int) -> int:
    if key not in observed:
        raise DomainError(f"observed data missing '{key}'")
    value = observed[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"observed '{key}' must be an integer count")
    if not 0 <= value <= n:
        raise DomainError(f"observed '{key}' must lie in [0, {n}]")
    return value
