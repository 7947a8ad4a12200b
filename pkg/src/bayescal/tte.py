"""Time-to-event operating characteristics via the large-sample normal
approximation of the log hazard-ratio estimator.

The log-HR estimator is treated as normal with the Schoenfeld design-stage
variance 1/(D r (1-r)). Benefit is a *smaller* log hazard ratio, so the
whole problem is mirrored (theta' = -theta, margin' = -margin, priors
reflected) onto the direction-'greater' normal engine; every metric is then
the mirrored engine's output unchanged.
"""

from __future__ import annotations

from .continuous import oc_normal_params
from .design import DesignSpec, NormalPrior, OCResult, ensure_valid
from .errors import DomainError

__all__ = ["schoenfeld_variance", "flipped_normal_params", "oc_tte"]


def schoenfeld_variance(events: int, allocation: float) -> float:
    """Design-stage variance of the log-HR estimator: 1/(D r (1-r))."""
    if not isinstance(events, int) or isinstance(events, bool) or events < 1:
        raise DomainError("events: must be a positive integer count")
    if not 0.0 < allocation < 1.0:
        raise DomainError("allocation: must lie in (0,1)")
    return 1.0 / (events * allocation * (1.0 - allocation))


def flipped_normal_params(spec: DesignSpec) -> tuple[float, float, NormalPrior, NormalPrior]:
    """(v2, margin, analysis, design) of the sign-flipped 'greater' problem."""
    v2 = schoenfeld_variance(spec.events, spec.allocation)
    return (v2, -spec.rule.margin, spec.analysis_prior.flipped(),
            spec.design_prior.flipped())


def oc_tte(spec: DesignSpec) -> OCResult:
    """Metrics for a time-to-event design (success when Pr(theta < margin)
    exceeds c). Equals the continuous engine applied to the mirrored
    problem, so gamma1 is the prevalence of hazard reductions."""
    ensure_valid(spec)
    v2, margin, analysis, design = flipped_normal_params(spec)
    return oc_normal_params(v2, margin, analysis, design, spec.threshold)
