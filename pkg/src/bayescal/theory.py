"""Closed-form bounds and conditions relating the operating characteristics,
usable standalone and as oracles for the property suites.

Covered results, all elementary functions of already-computed metrics:

  * upper bound on PID from the prior odds ratio R = OE_design/OE_analysis:
    PID(c) <= 1 / (R c/(1-c) + 1), reducing to 1-c when R = 1;
  * the critical threshold below which PID stays under the asymptotic
    Type I error 1-c: c/(1-c) = (BCP/BT1E) (gamma1/gamma0);
  * the envelope -(1-c) <= PID(c) - alpha(c) <= c with its gamma1 -> 0/1
    limits, and a scan of PID - FT1E across prevalences that locates the
    sign changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .continuous import oc_continuous
from .design import DesignSpec, NormalPrior, ensure_valid
from .errors import DomainError
from .special import phi_inv

__all__ = [
    "PriorOddsRatio",
    "pid_upper_bound",
    "pid_below_t1e_threshold",
    "pid_t1e_difference_bounds",
    "asymptotic_threshold",
    "ScanPoint",
    "DifferenceScan",
    "difference_scan",
]


@dataclass(frozen=True)
class PriorOddsRatio:
    """Prior odds of effectiveness under both roles and their ratio R."""

    oe_design: float
    oe_analysis: float

    @property
    def ratio(self) -> float:
        return self.oe_design / self.oe_analysis

    @classmethod
    def from_prevalences(cls, gamma1_design: float, gamma1_analysis: float) -> "PriorOddsRatio":
        for name, g in (("design", gamma1_design), ("analysis", gamma1_analysis)):
            if not 0.0 < g < 1.0:
                raise DomainError(f"{name} prevalence must lie strictly in (0,1)")
        return cls(oe_design=gamma1_design / (1.0 - gamma1_design),
                   oe_analysis=gamma1_analysis / (1.0 - gamma1_analysis))


def pid_upper_bound(ratio: float, c: float) -> float:
    """Largest possible PID at threshold c when the conditional prior shapes
    match and the prior odds ratio is R: 1/(R c/(1-c) + 1)."""
    if not ratio > 0.0:
        raise DomainError("prior odds ratio must be positive")
    if not 0.0 < c < 1.0:
        raise DomainError("threshold must lie in (0,1)")
    return 1.0 / (ratio * c / (1.0 - c) + 1.0)


def pid_below_t1e_threshold(bcp: float, bt1e: float, gamma1: float) -> float:
    """Critical threshold c* with PID < alpha iff c < c* (large-sample).

    Solves c/(1-c) = (bcp/bt1e) * (gamma1/gamma0). A zero Bayesian Type I
    error makes the condition vacuous, so c* = 1.
    """
    if not 0.0 <= bcp <= 1.0:
        raise DomainError("bcp must lie in [0,1]")
    if bt1e < 0.0:
        raise DomainError("bt1e must be non-negative")
    if not 0.0 < gamma1 < 1.0:
        raise DomainError("gamma1 must lie strictly in (0,1)")
    if bt1e == 0.0:
        return 1.0
    odds = (bcp / bt1e) * (gamma1 / (1.0 - gamma1))
    return odds / (1.0 + odds)


def pid_t1e_difference_bounds(c: float) -> tuple[float, float]:
    """Envelope of PID(c) - alpha(c) under alpha(c) ~ 1-c: (-(1-c), c)."""
    if not 0.0 < c < 1.0:
        raise DomainError("threshold must lie in (0,1)")
    return (-(1.0 - c), c)


def asymptotic_threshold(alpha_star: float) -> float:
    """Large-sample calibration seed: control at level alpha* by c = 1 - alpha*."""
    if not 0.0 < alpha_star < 1.0:
        raise DomainError("target level must lie in (0,1)")
    return 1.0 - alpha_star


# ---------------------------------------------------------------------------
# PID - FT1E scan across prevalences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanPoint:
    gamma1: float
    design_mean: float
    pid: float
    ft1e: float
    difference: float


@dataclass(frozen=True)
class DifferenceScan:
    c: float
    sigma_d: float
    points: tuple[ScanPoint, ...]
    crossings: tuple[float, ...]

    @property
    def crossing(self) -> float | None:
        """The sign-change prevalence, or None when the scan never crosses."""
        return self.crossings[0] if self.crossings else None


def _scan_template(template: DesignSpec, c: float, sigma_d: float) -> DesignSpec:
    ensure_valid(template, require_threshold=False)
    if template.endpoint not in ("continuous_single", "continuous_two_arm"):
        raise DomainError("difference scan requires a continuous template")
    if not isinstance(template.analysis_prior, NormalPrior) or \
            not template.analysis_prior.is_noninformative:
        raise DomainError("difference scan requires a flat analysis prior "
                          "(the envelope uses alpha(c) = 1-c exactly)")
    if not sigma_d > 0.0:
        raise DomainError("sigma_d must be positive")
    return template.with_threshold(c)


def _difference_at(template: DesignSpec, sigma_d: float, gamma1: float) -> ScanPoint:
    margin = template.rule.margin
    mean = margin + sigma_d * phi_inv(gamma1)
    spec = replace(template, design_prior=NormalPrior(mean=mean, sd=sigma_d))
    oc = oc_continuous(spec)
    return ScanPoint(gamma1=gamma1, design_mean=mean, pid=oc.pid, ft1e=oc.ft1e,
                     difference=oc.pid - oc.ft1e)


def difference_scan(template: DesignSpec, c: float, sigma_d: float,
                    gamma1_grid: list[float], *, tol: float = 1e-9) -> DifferenceScan:
    """PID - FT1E across design-prior prevalences at a fixed threshold.

    Each grid prevalence pins the design-prior mean through
    gamma1 = Phi((mean - margin)/sigma_d); every sign change of the
    difference between consecutive grid points is located by bisection.
    """
    template = _scan_template(template, c, sigma_d)
    grid = [float(g) for g in gamma1_grid]
    if not grid or any(not 0.0 < g < 1.0 for g in grid):
        raise DomainError("gamma1 grid values must lie strictly in (0,1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("gamma1 grid must be strictly increasing")

    points = [_difference_at(template, sigma_d, g) for g in grid]
    crossings: list[float] = []
    for left, right in zip(points, points[1:]):
        if left.difference == 0.0:
            crossings.append(left.gamma1)
            continue
        if left.difference * right.difference < 0.0:
            lo, hi = left.gamma1, right.gamma1
            f_lo = left.difference
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                f_mid = _difference_at(template, sigma_d, mid).difference
                if f_mid == 0.0:
                    lo = hi = mid
                    break
                if (f_mid > 0.0) == (f_lo > 0.0):
                    lo = mid
                    f_lo = f_mid
                else:
                    hi = mid
            crossings.append(0.5 * (lo + hi))
    if points and points[-1].difference == 0.0:
        crossings.append(points[-1].gamma1)
    return DifferenceScan(c=c, sigma_d=sigma_d, points=tuple(points),
                          crossings=tuple(crossings))
