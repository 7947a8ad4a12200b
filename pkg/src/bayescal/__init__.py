"""Closed-form operating characteristics and threshold calibration for
posterior-probability success rules in clinical trial designs."""

from .design import (
    ArmPriors,
    BetaPrior,
    DecisionRule,
    DesignSpec,
    NormalPrior,
    OCResult,
    gamma0_of,
    gamma1_of,
    spec_from_dict,
    spec_to_dict,
    validate,
)
from .engines import compute_oc, posterior_probability
from .calibrate import (
    CalibrationResult,
    CalibrationTarget,
    calibrate_threshold,
    decide,
    oc_curve,
    sensitivity_table,
)
from .simulate import SimReport, convergence_check, simulate_oc

__version__ = "0.1.0"

__all__ = [
    "ArmPriors",
    "BetaPrior",
    "CalibrationResult",
    "CalibrationTarget",
    "DecisionRule",
    "DesignSpec",
    "NormalPrior",
    "OCResult",
    "SimReport",
    "calibrate_threshold",
    "compute_oc",
    "convergence_check",
    "decide",
    "gamma0_of",
    "gamma1_of",
    "oc_curve",
    "posterior_probability",
    "sensitivity_table",
    "simulate_oc",
    "spec_from_dict",
    "spec_to_dict",
    "validate",
]
