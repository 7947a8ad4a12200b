"""Shared domain vocabulary: priors, decision rules, design specs, OC results.

A ``DesignSpec`` is one complete trial design. The same JSON document is the
config format for the CLI and the request body for the HTTP service, so
parsing and validation both report *every* violation with a field path
instead of bailing at the first problem.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Union

from .errors import DomainError, SpecValidationError
from .special import phi_cdf, phi_sf, reg_inc_beta

ENDPOINTS = (
    "continuous_single",
    "continuous_two_arm",
    "binary_single",
    "binary_two_arm",
    "tte",
)

BENEFITS = ("higher_rate", "lower_rate")

#: Normal analysis prior is treated as non-informative from this sd upward
#: (variance 1e6 on a unit-variance effect scale).
NONINFORMATIVE_SD = 1e3


# ---------------------------------------------------------------------------
# Priors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalPrior:
    """Normal(mean, sd) prior on an effect scale."""

    mean: float
    sd: float

    kind = "normal"

    @property
    def is_noninformative(self) -> bool:
        return self.sd >= NONINFORMATIVE_SD

    def flipped(self) -> "NormalPrior":
        """Mirror image under the sign flip theta -> -theta."""
        return NormalPrior(mean=-self.mean, sd=self.sd)


@dataclass(frozen=True)
class BetaPrior:
    """Beta(alpha, beta) prior on a rate."""

    alpha: float
    beta: float

    kind = "beta"

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


PriorSpec = Union[NormalPrior, BetaPrior]


@dataclass(frozen=True)
class ArmPriors:
    """Independent per-arm beta priors for two-arm binary designs."""

    t: BetaPrior
    c: BetaPrior


# ---------------------------------------------------------------------------
# Rule and spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecisionRule:
    """Success rule: posterior Pr(effect beyond margin) strictly above c.

    ``direction`` gives the side of the margin that counts as benefit:
    'greater' for effects where larger is better, 'less' for log hazard
    ratios. ``c`` may be None for calibration inputs (the "spec minus c").
    """

    margin: float
    c: float | None
    direction: str = "greater"


@dataclass(frozen=True)
class DesignSpec:
    endpoint: str
    rule: DecisionRule
    analysis_prior: PriorSpec | ArmPriors
    design_prior: PriorSpec | ArmPriors
    n_t: int | None = None
    n_c: int | None = None
    sigma_t: float | None = None
    sigma_c: float | None = None
    events: int | None = None
    allocation: float | None = None
    null_rate: float | None = None
    benefit: str | None = None

    def with_threshold(self, c: float) -> "DesignSpec":
        return replace(self, rule=replace(self.rule, c=c))

    def with_design_prior(self, prior: PriorSpec | ArmPriors) -> "DesignSpec":
        return replace(self, design_prior=prior)

    @property
    def threshold(self) -> float:
        if self.rule.c is None:
            raise DomainError("design has no threshold c set")
        return self.rule.c


# ---------------------------------------------------------------------------
# Prevalence of effectiveness under a prior
# ---------------------------------------------------------------------------

def gamma1_of(prior: PriorSpec, margin: float, direction: str = "greater") -> float:
    """Design-prior prevalence of effective treatments, Pr(effective region).

    Normal prior: 1 - Phi((margin - mean)/sd) for direction 'greater',
    Phi((margin - mean)/sd) for 'less'. Beta prior: 1 - I_margin(alpha, beta)
    (direction 'greater'), requiring the margin to be a rate in [0, 1].
    """
    if direction not in ("greater", "less"):
        raise DomainError(f"direction must be 'greater' or 'less', got {direction!r}")
    if isinstance(prior, NormalPrior):
        if not prior.sd > 0:
            raise DomainError("normal prior sd must be positive")
        z = (margin - prior.mean) / prior.sd
        return phi_sf(z) if direction == "greater" else phi_cdf(z)
    if isinstance(prior, BetaPrior):
        if not 0.0 <= margin <= 1.0:
            raise DomainError("margin must lie in [0,1] for a beta prior")
        if direction == "greater":
            # reflected form keeps tiny prevalences relative-accurate
            return reg_inc_beta(1.0 - margin, prior.beta, prior.alpha)
        return reg_inc_beta(margin, prior.alpha, prior.beta)
    raise DomainError(f"unsupported prior type {type(prior).__name__}")


def gamma0_of(prior: PriorSpec, margin: float, direction: str = "greater") -> float:
    """Prevalence of ineffective treatments, computed as the complement
    expression (not 1 - gamma1) so the pair can be cross-checked."""
    flipped = "less" if direction == "greater" else "greater"
    return gamma1_of(prior, margin, flipped)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_count(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_prior(prior, path: str, expected_kind: str, out: list[str]) -> None:
    if expected_kind == "beta":
        if not isinstance(prior, BetaPrior):
            out.append(f"{path}: prior kind mismatch (expected beta prior)")
            return
        if not (_is_number(prior.alpha) and prior.alpha > 0):
            out.append(f"{path}.alpha: shape must be a positive number")
        if not (_is_number(prior.beta) and prior.beta > 0):
            out.append(f"{path}.beta: shape must be a positive number")
    else:
        if not isinstance(prior, NormalPrior):
            out.append(f"{path}: prior kind mismatch (expected normal prior)")
            return
        if not _is_number(prior.mean):
            out.append(f"{path}.mean: must be a finite number")
        sd = prior.sd
        # sd = inf is the exact non-informative limit; the conjugate formulas
        # handle it without any special case (1/inf^2 = 0)
        if isinstance(sd, bool) or not isinstance(sd, (int, float)) or \
                math.isnan(sd) or not sd > 0:
            out.append(f"{path}.sd: must be a positive number")


def _check_arm_priors(prior, path: str, out: list[str]) -> None:
    if not isinstance(prior, ArmPriors):
        out.append(f"{path}: binary two-arm designs need per-arm beta priors "
                   "({'t': ..., 'c': ...})")
        return
    _check_prior(prior.t, f"{path}.t", "beta", out)
    _check_prior(prior.c, f"{path}.c", "beta", out)


_REQUIRED_FIELDS = {
    "continuous_single": ("n_t", "sigma_t"),
    "continuous_two_arm": ("n_t", "n_c", "sigma_t", "sigma_c"),
    "binary_single": ("n_t",),
    "binary_two_arm": ("n_t", "n_c", "null_rate", "benefit"),
    "tte": ("events", "allocation"),
}

_ALL_OPTIONAL = ("n_t", "n_c", "sigma_t", "sigma_c", "events", "allocation",
                 "null_rate", "benefit")


def validate(spec: DesignSpec, *, require_threshold: bool = True) -> list[str]:
    """Check every invariant; return the full list of violations (empty if valid)."""
    out: list[str] = []
    if spec.endpoint not in ENDPOINTS:
        out.append(f"endpoint: must be one of {', '.join(ENDPOINTS)}")
        return out

    rule = spec.rule
    if require_threshold or rule.c is not None:
        if rule.c is None:
            out.append("rule.c: threshold is required")
        elif not (_is_number(rule.c) and 0.0 < rule.c < 1.0):
            out.append("rule.c: threshold must lie in (0,1)")
    if not _is_number(rule.margin):
        out.append("rule.margin: must be a finite number")
    if rule.direction not in ("greater", "less"):
        out.append("rule.direction: must be 'greater' or 'less'")
    elif spec.endpoint == "tte" and rule.direction != "less":
        out.append("rule.direction: tte endpoints declare benefit as smaller "
                   "log hazard ratio (direction 'less')")
    elif spec.endpoint != "tte" and rule.direction != "greater":
        out.append("rule.direction: direction 'less' is only for endpoints "
                   "where a smaller effect is better (tte)")

    required = _REQUIRED_FIELDS[spec.endpoint]
    for name in _ALL_OPTIONAL:
        value = getattr(spec, name)
        if name in required:
            if value is None:
                out.append(f"{name}: required for endpoint {spec.endpoint}")
        elif value is not None:
            out.append(f"{name}: not applicable to endpoint {spec.endpoint}")

    for name in ("n_t", "n_c"):
        value = getattr(spec, name)
        if name in required and value is not None and not (_is_count(value) and value >= 1):
            out.append(f"{name}: must be a positive integer count")
    for name in ("sigma_t", "sigma_c"):
        value = getattr(spec, name)
        if name in required and value is not None and not (_is_number(value) and value > 0):
            out.append(f"{name}: must be a positive number")
    if spec.endpoint == "tte":
        if spec.events is not None and not (_is_count(spec.events) and spec.events >= 1):
            out.append("events: must be a positive integer count")
        if spec.allocation is not None and not (_is_number(spec.allocation) and 0.0 < spec.allocation < 1.0):
            out.append("allocation: must lie in (0,1)")
    if spec.endpoint == "binary_two_arm":
        if spec.null_rate is not None and not (_is_number(spec.null_rate) and 0.0 < spec.null_rate < 1.0):
            out.append("null_rate: must lie in (0,1)")
        if spec.benefit is not None and spec.benefit not in BENEFITS:
            out.append(f"benefit: must be one of {', '.join(BENEFITS)}")

    if spec.endpoint in ("continuous_single", "continuous_two_arm", "tte"):
        _check_prior(spec.analysis_prior, "analysis_prior", "normal", out)
        _check_prior(spec.design_prior, "design_prior", "normal", out)
    elif spec.endpoint == "binary_single":
        _check_prior(spec.analysis_prior, "analysis_prior", "beta", out)
        _check_prior(spec.design_prior, "design_prior", "beta", out)
        if _is_number(rule.margin) and not 0.0 < rule.margin < 1.0:
            out.append("rule.margin: must lie in (0,1) for binary endpoints")
    else:  # binary_two_arm
        _check_arm_priors(spec.analysis_prior, "analysis_prior", out)
        _check_arm_priors(spec.design_prior, "design_prior", out)
        if _is_number(rule.margin) and not -1.0 < rule.margin < 1.0:
            out.append("rule.margin: risk-difference margin must lie in (-1,1)")
    return out


def ensure_valid(spec: DesignSpec, *, require_threshold: bool = True) -> DesignSpec:
    violations = validate(spec, require_threshold=require_threshold)
    if violations:
        raise SpecValidationError(violations)
    return spec


# ---------------------------------------------------------------------------
# OC result record
# ---------------------------------------------------------------------------

METRIC_NAMES = ("bp", "bcp", "bt1e", "ft1e", "pid", "for_", "gamma1")


@dataclass(frozen=True)
class OCResult:
    """The six operating characteristics plus the prior prevalence gamma1.

    Conditional metrics that are undefined for a degenerate design (e.g.
    BCP when gamma1 = 0) are carried as NaN and serialized as null.
    """

    bp: float
    bcp: float
    bt1e: float
    ft1e: float
    pid: float
    for_: float
    gamma1: float

    def metric(self, name: str) -> float:
        key = "for_" if name == "for" else name
        if key not in METRIC_NAMES:
            raise DomainError(f"unknown metric {name!r}")
        return getattr(self, key)

    def to_dict(self) -> dict:
        def clean(x: float):
            return None if math.isnan(x) else x
        return {
            "bp": clean(self.bp),
            "bcp": clean(self.bcp),
            "bt1e": clean(self.bt1e),
            "ft1e": clean(self.ft1e),
            "pid": clean(self.pid),
            "for": clean(self.for_),
            "gamma1": clean(self.gamma1),
        }


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------

def prior_to_dict(prior: PriorSpec | ArmPriors) -> dict:
    if isinstance(prior, NormalPrior):
        return {"kind": "normal", "mean": prior.mean, "sd": prior.sd}
    if isinstance(prior, BetaPrior):
        return {"kind": "beta", "alpha": prior.alpha, "beta": prior.beta}
    if isinstance(prior, ArmPriors):
        return {"t": prior_to_dict(prior.t), "c": prior_to_dict(prior.c)}
    raise DomainError(f"unsupported prior type {type(prior).__name__}")


def prior_from_dict(doc, path: str, errors: list[str]):
    if not isinstance(doc, dict):
        errors.append(f"{path}: must be an object")
        return None
    if "t" in doc or "c" in doc:
        extra = set(doc) - {"t", "c"}
        if extra:
            errors.append(f"{path}: unknown fields {sorted(extra)}")
        if "t" not in doc or "c" not in doc:
            errors.append(f"{path}: per-arm priors need both 't' and 'c'")
            return None
        t = prior_from_dict(doc["t"], f"{path}.t", errors)
        c = prior_from_dict(doc["c"], f"{path}.c", errors)
        if t is None or c is None:
            return None
        return ArmPriors(t=t, c=c)
    kind = doc.get("kind")
    if kind == "normal":
        extra = set(doc) - {"kind", "mean", "sd"}
        if extra:
            errors.append(f"{path}: unknown fields {sorted(extra)}")
        missing = {"mean", "sd"} - set(doc)
        if missing:
            errors.append(f"{path}: missing fields {sorted(missing)}")
            return None
        if not _is_number(doc["mean"]) or not _is_number(doc["sd"]):
            errors.append(f"{path}: mean and sd must be finite numbers")
            return None
        return NormalPrior(mean=float(doc["mean"]), sd=float(doc["sd"]))
    if kind == "beta":
        extra = set(doc) - {"kind", "alpha", "beta"}
        if extra:
            errors.append(f"{path}: unknown fields {sorted(extra)}")
        missing = {"alpha", "beta"} - set(doc)
        if missing:
            errors.append(f"{path}: missing fields {sorted(missing)}")
            return None
        if not _is_number(doc["alpha"]) or not _is_number(doc["beta"]):
            errors.append(f"{path}: alpha and beta must be finite numbers")
            return None
        return BetaPrior(alpha=float(doc["alpha"]), beta=float(doc["beta"]))
    errors.append(f"{path}.kind: must be 'normal' or 'beta'")
    return None


_SPEC_FIELDS = ("endpoint", "rule", "analysis_prior", "design_prior") + _ALL_OPTIONAL


def spec_to_dict(spec: DesignSpec) -> dict:
    doc: dict = {"endpoint": spec.endpoint}
    for name in _ALL_OPTIONAL:
        value = getattr(spec, name)
        if value is not None:
            doc[name] = value
    doc["analysis_prior"] = prior_to_dict(spec.analysis_prior)
    doc["design_prior"] = prior_to_dict(spec.design_prior)
    rule: dict = {"margin": spec.rule.margin}
    if spec.rule.c is not None:
        rule["c"] = spec.rule.c
    rule["direction"] = spec.rule.direction
    doc["rule"] = rule
    return doc


def spec_from_dict(doc) -> DesignSpec:
    """Parse a DesignSpec JSON document; raises SpecValidationError listing
    every structural problem (field paths included)."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise SpecValidationError(["document: must be a JSON object"])
    extra = set(doc) - set(_SPEC_FIELDS)
    if extra:
        errors.append(f"document: unknown fields {sorted(extra)}")

    endpoint = doc.get("endpoint")
    if endpoint not in ENDPOINTS:
        errors.append(f"endpoint: must be one of {', '.join(ENDPOINTS)}")

    rule_doc = doc.get("rule")
    rule = None
    if not isinstance(rule_doc, dict):
        errors.append("rule: must be an object with margin, c, direction")
    else:
        extra = set(rule_doc) - {"margin", "c", "direction"}
        if extra:
            errors.append(f"rule: unknown fields {sorted(extra)}")
        if "margin" not in rule_doc:
            errors.append("rule.margin: required")
        c = rule_doc.get("c")
        if c is not None and not _is_number(c):
            errors.append("rule.c: threshold must lie in (0,1)")
            c = None
        direction = rule_doc.get("direction", "greater")
        margin = rule_doc.get("margin")
        if margin is not None and not _is_number(margin):
            errors.append("rule.margin: must be a finite number")
            margin = None
        if margin is not None:
            rule = DecisionRule(margin=float(margin),
                                c=None if c is None else float(c),
                                direction=direction)

    analysis = design = None
    if "analysis_prior" not in doc:
        errors.append("analysis_prior: required")
    else:
        analysis = prior_from_dict(doc["analysis_prior"], "analysis_prior", errors)
    if "design_prior" not in doc:
        errors.append("design_prior: required")
    else:
        design = prior_from_dict(doc["design_prior"], "design_prior", errors)

    scalars: dict = {}
    for name in _ALL_OPTIONAL:
        if name not in doc:
            continue
        value = doc[name]
        if name in ("n_t", "n_c", "events"):
            if not _is_count(value):
                errors.append(f"{name}: must be an integer count")
                continue
        elif name == "benefit":
            if value not in BENEFITS:
                errors.append(f"benefit: must be one of {', '.join(BENEFITS)}")
                continue
        elif not _is_number(value):
            errors.append(f"{name}: must be a finite number")
            continue
        scalars[name] = value

    if errors or rule is None or analysis is None or design is None:
        raise SpecValidationError(errors or ["document: malformed design spec"])
    return DesignSpec(endpoint=endpoint, rule=rule, analysis_prior=analysis,
                      design_prior=design, **scalars)


def spec_from_json(text: str) -> DesignSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError([f"document: invalid JSON ({exc.msg})"]) from exc
    return spec_from_dict(doc)


def canonical_json(obj) -> str:
    """Stable JSON rendering: shortest round-tripping floats, two-space
    indent, trailing newline. Parsing and re-rendering is byte-identical."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
