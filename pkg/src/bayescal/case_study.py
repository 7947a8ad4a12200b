"""CULPRIT-SHOCK retrospective re-design.

The trial randomized culprit-lesion-only PCI (treatment, 172 events of
344) against immediate multivessel PCI (control, 194 of 341) for the
one-year composite of death or renal-replacement therapy. The effect is
the absolute risk reduction theta = theta_C - theta_T (benefit = lower
event rate) with success rule Pr(theta > 0 | data) > c.

Design priors come from registry data updated from Beta(1,1): treatment
Beta(67,59) (historical), with Beta(74,52) (neutral) and Beta(81,45)
(pessimistic) as treatment-arm sensitivity scenarios and the control arm
fixed at Beta(23,16). The module calibrates c for a Frequentist Type I
error target and for PID targets under each scenario, evaluates the
table's metric columns, applies the decision rule to the observed data,
and flags every number against the reference values at the stated
reproduction tolerances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .calibrate import CalibrationResult, CalibrationTarget, calibrate_threshold, decide
from .design import ArmPriors, BetaPrior, DecisionRule, DesignSpec, OCResult
from .engines import compute_oc, posterior_probability

__all__ = ["CaseStudyCheck", "CaseStudyRow", "CaseStudyReport", "run_case_study",
           "culprit_shock_spec", "OBSERVED", "C_TOLERANCE", "METRIC_TOLERANCE",
           "POSTERIOR_TOLERANCE"]

N_T, N_C = 344, 341
OBSERVED = {"x_t": 172, "x_c": 194}
POOLED_NULL = (172 + 194) / (344 + 341)

FLAT = ArmPriors(t=BetaPrior(1.0, 1.0), c=BetaPrior(1.0, 1.0))
CONTROL_DESIGN = BetaPrior(23.0, 16.0)
HISTORICAL_T = BetaPrior(67.0, 59.0)
NEUTRAL_T = BetaPrior(74.0, 52.0)
PESSIMISTIC_T = BetaPrior(81.0, 45.0)
MATCHED = ArmPriors(t=HISTORICAL_T, c=CONTROL_DESIGN)

C_TOLERANCE = 0.01
METRIC_TOLERANCE = 0.015
POSTERIOR_TOLERANCE = 0.001

# reference values for the eight calibrated rows: (label, analysis priors,
# treatment design prior, target, reference c, reference metric columns,
# expected decision at the calibrated threshold)
_ROWS = [
    ("ft1e=0.025 / flat analysis", FLAT, HISTORICAL_T,
     CalibrationTarget("ft1e", 0.025), 0.975,
     {"ft1e": 0.025}, False),
    ("pid=0.025 / matched informative analysis", MATCHED, HISTORICAL_T,
     CalibrationTarget("pid", 0.025), 0.8145,
     {"ft1e": 0.218, "bt1e": 0.061, "for": 0.341, "bcp": 0.832, "bp": 0.633}, True),
    ("pid=0.025 / flat analysis / historical design", FLAT, HISTORICAL_T,
     CalibrationTarget("pid", 0.025), 0.772,
     {"ft1e": 0.221, "bt1e": 0.060, "for": 0.357, "bcp": 0.817, "bp": 0.621}, True),
    ("pid=0.025 / flat analysis / neutral design", FLAT, NEUTRAL_T,
     CalibrationTarget("pid", 0.025), 0.898,
     {"ft1e": 0.102, "bt1e": 0.017, "for": 0.290, "bcp": 0.620, "bp": 0.327}, True),
    ("pid=0.025 / flat analysis / pessimistic design", FLAT, PESSIMISTIC_T,
     CalibrationTarget("pid", 0.025), 0.954,
     {"ft1e": 0.046, "bt1e": 0.004, "for": 0.187, "bcp": 0.410, "bp": 0.117}, True),
    ("pid=0.010 / flat analysis / historical design", FLAT, HISTORICAL_T,
     CalibrationTarget("pid", 0.010), 0.909,
     {"ft1e": 0.095, "bt1e": 0.021, "for": 0.453, "bcp": 0.716, "bp": 0.536}, True),
    ("pid=0.010 / flat analysis / neutral design", FLAT, NEUTRAL_T,
     CalibrationTarget("pid", 0.010), 0.960,
     {"ft1e": 0.040, "bt1e": 0.005, "for": 0.345, "bcp": 0.505, "bp": 0.262}, True),
    ("pid=0.010 / flat analysis / pessimistic design", FLAT, PESSIMISTIC_T,
     CalibrationTarget("pid", 0.010), 0.983,
     {"ft1e": 0.017, "bt1e": 0.001, "for": 0.211, "bcp": 0.309, "bp": 0.087}, False),
]


def culprit_shock_spec(analysis: ArmPriors = FLAT,
                       design_t: BetaPrior = HISTORICAL_T,
                       c: float | None = 0.975) -> DesignSpec:
    return DesignSpec(
        endpoint="binary_two_arm",
        rule=DecisionRule(margin=0.0, c=c, direction="greater"),
        analysis_prior=analysis,
        design_prior=ArmPriors(t=design_t, c=CONTROL_DESIGN),
        n_t=N_T, n_c=N_C, null_rate=POOLED_NULL, benefit="lower_rate",
    )


@dataclass(frozen=True)
class CaseStudyCheck:
    name: str
    value: float
    reference: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.reference) <= self.tolerance


@dataclass(frozen=True)
class CaseStudyRow:
    label: str
    result: CalibrationResult
    at_reference_c: OCResult
    decision_success: bool
    expected_success: bool
    checks: tuple[CaseStudyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks) and \
            self.decision_success == self.expected_success

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "c_star": self.result.c_star,
            "granularity": self.result.granularity,
            "achieved": self.result.achieved.to_dict() if self.result.achieved else None,
            "at_reference_c": self.at_reference_c.to_dict(),
            "decision_success": self.decision_success,
            "expected_success": self.expected_success,
            "checks": [{"name": c.name, "value": c.value, "reference": c.reference,
                        "tolerance": c.tolerance, "passed": c.passed}
                       for c in self.checks],
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CaseStudyReport:
    posterior_flat: CaseStudyCheck
    posterior_matched: CaseStudyCheck
    rows: tuple[CaseStudyRow, ...]
    elapsed_seconds: float

    @property
    def passed(self) -> bool:
        return self.posterior_flat.passed and self.posterior_matched.passed and \
            all(row.passed for row in self.rows)

    def to_dict(self) -> dict:
        def check(c: CaseStudyCheck) -> dict:
            return {"value": c.value, "reference": c.reference,
                    "tolerance": c.tolerance, "passed": c.passed}
        return {
            "posterior_flat": check(self.posterior_flat),
            "posterior_matched": check(self.posterior_matched),
            "rows": [row.to_dict() for row in self.rows],
            "elapsed_seconds": self.elapsed_seconds,
            "passed": self.passed,
        }


def run_case_study() -> CaseStudyReport:
    """Calibrate all eight rows, reproduce the posterior probabilities, and
    apply the decision rule at each calibrated threshold."""
    started = time.perf_counter()

    p_flat = posterior_probability(culprit_shock_spec(FLAT, HISTORICAL_T), OBSERVED)
    p_matched = posterior_probability(culprit_shock_spec(MATCHED, HISTORICAL_T), OBSERVED)
    posterior_flat = CaseStudyCheck("posterior (flat analysis)", p_flat,
                                    0.965, POSTERIOR_TOLERANCE)
    posterior_matched = CaseStudyCheck("posterior (matched analysis)", p_matched,
                                       0.966, POSTERIOR_TOLERANCE)

    rows = []
    for label, analysis, design_t, target, ref_c, ref_metrics, expect_success in _ROWS:
        spec = culprit_shock_spec(analysis, design_t, c=None)
        result = calibrate_threshold(spec, target)
        at_ref = compute_oc(spec.with_threshold(ref_c))
        checks = [CaseStudyCheck("c_star", result.c_star, ref_c, C_TOLERANCE)]
        for name, ref_value in ref_metrics.items():
            checks.append(CaseStudyCheck(f"{name} @ c={ref_c}",
                                         at_ref.metric(name), ref_value,
                                         METRIC_TOLERANCE))
        decision = decide(spec.with_threshold(result.c_star), OBSERVED)
        rows.append(CaseStudyRow(label=label, result=result, at_reference_c=at_ref,
                                 decision_success=decision.success,
                                 expected_success=expect_success,
                                 checks=tuple(checks)))
    elapsed = time.perf_counter() - started
    return CaseStudyReport(posterior_flat=posterior_flat,
                           posterior_matched=posterior_matched,
                           rows=tuple(rows), elapsed_seconds=elapsed)
