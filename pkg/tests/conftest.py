"""Shared builders and independent oracles for the test suite.

Oracles here deliberately avoid the library's own closed forms: brute-force
quadrature via scipy.integrate, exact enumeration, and root finding on the
public CDFs only.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from bayescal.design import (
    ArmPriors,
    BetaPrior,
    DecisionRule,
    DesignSpec,
    NormalPrior,
)

FLAT_SD = 1e3


# ---------------------------------------------------------------------------
# Spec builders
# ---------------------------------------------------------------------------

def continuous_spec(*, n=74, sigma=1.0, margin=0.0, c=0.975,
                    analysis=NormalPrior(0.0, FLAT_SD),
                    design=NormalPrior(0.0, 0.15)) -> DesignSpec:
    return DesignSpec(endpoint="continuous_single",
                      rule=DecisionRule(margin=margin, c=c, direction="greater"),
                      analysis_prior=analysis, design_prior=design,
                      n_t=n, sigma_t=sigma)


def two_arm_continuous_spec(*, n_t=50, n_c=50, sigma_t=1.0, sigma_c=1.0,
                            margin=0.0, c=0.975,
                            analysis=NormalPrior(0.0, FLAT_SD),
                            design=NormalPrior(0.0, 0.2)) -> DesignSpec:
    return DesignSpec(endpoint="continuous_two_arm",
                      rule=DecisionRule(margin=margin, c=c, direction="greater"),
                      analysis_prior=analysis, design_prior=design,
                      n_t=n_t, n_c=n_c, sigma_t=sigma_t, sigma_c=sigma_c)


def binary_single_spec(*, n=74, margin=0.3, c=0.975,
                       analysis=BetaPrior(1.0, 1.0),
                       design=BetaPrior(6.0, 14.0)) -> DesignSpec:
    return DesignSpec(endpoint="binary_single",
                      rule=DecisionRule(margin=margin, c=c, direction="greater"),
                      analysis_prior=analysis, design_prior=design, n_t=n)


def binary_two_arm_spec(*, n_t=344, n_c=341, margin=0.0, c=0.975,
                        null_rate=366 / 685, benefit="lower_rate",
                        analysis=ArmPriors(BetaPrior(1, 1), BetaPrior(1, 1)),
                        design=ArmPriors(BetaPrior(67, 59), BetaPrior(23, 16))) -> DesignSpec:
    return DesignSpec(endpoint="binary_two_arm",
                      rule=DecisionRule(margin=margin, c=c, direction="greater"),
                      analysis_prior=analysis, design_prior=design,
                      n_t=n_t, n_c=n_c, null_rate=null_rate, benefit=benefit)


def tte_spec(*, events=100, allocation=0.5, margin=0.0, c=0.975,
             analysis=NormalPrior(0.0, FLAT_SD),
             design=NormalPrior(-0.1, 0.25)) -> DesignSpec:
    return DesignSpec(endpoint="tte",
                      rule=DecisionRule(margin=margin, c=c, direction="less"),
                      analysis_prior=analysis, design_prior=design,
                      events=events, allocation=allocation)


# ---------------------------------------------------------------------------
# Fuzzers (seeded; deterministic)
# ---------------------------------------------------------------------------

def fuzz_continuous(rng: np.random.Generator, *, flat_analysis=False,
                    matched=False, n_min=5, n_max=400) -> DesignSpec:
    margin = float(rng.uniform(-0.5, 0.5))
    sigma_d = float(rng.uniform(0.05, 0.6))
    design = NormalPrior(margin + float(rng.uniform(-0.6, 0.6)) * sigma_d * 2,
                         sigma_d)
    if matched:
        analysis = design
    elif flat_analysis:
        analysis = NormalPrior(0.0, FLAT_SD)
    else:
        analysis = NormalPrior(float(rng.uniform(-0.5, 0.5)),
                               float(rng.uniform(0.1, FLAT_SD)))
    return continuous_spec(n=int(rng.integers(n_min, n_max)),
                           sigma=float(rng.uniform(0.4, 2.5)),
                           margin=margin, c=float(rng.uniform(0.5, 0.99)),
                           analysis=analysis, design=design)


def fuzz_binary_single(rng: np.random.Generator, *, matched=False,
                       n_min=10, n_max=150) -> DesignSpec:
    margin = float(rng.uniform(0.1, 0.7))
    design = BetaPrior(float(rng.uniform(0.8, 25.0)), float(rng.uniform(0.8, 25.0)))
    analysis = design if matched else \
        BetaPrior(float(rng.uniform(0.6, 10.0)), float(rng.uniform(0.6, 10.0)))
    return binary_single_spec(n=int(rng.integers(n_min, n_max)), margin=margin,
                              c=float(rng.uniform(0.5, 0.99)),
                              analysis=analysis, design=design)


def fuzz_binary_two_arm(rng: np.random.Generator, *, matched=False,
                        n_min=10, n_max=40) -> DesignSpec:
    # integer pseudo-count shapes make every posterior density a polynomial,
    # which the fixed-order grid quadrature integrates essentially exactly;
    # non-integer shapes are legal but may attach PrecisionWarnings by design
    def shape():
        return float(rng.integers(1, 13))

    design = ArmPriors(BetaPrior(shape(), shape()), BetaPrior(shape(), shape()))
    analysis = design if matched else \
        ArmPriors(BetaPrior(shape(), shape()), BetaPrior(shape(), shape()))
    n_t = int(rng.integers(n_min, n_max))
    n_c = int(rng.integers(n_min, n_max))
    benefit = "lower_rate" if rng.random() < 0.5 else "higher_rate"
    pooled = (n_t * design.t.mean + n_c * design.c.mean) / (n_t + n_c)
    return binary_two_arm_spec(n_t=n_t, n_c=n_c, margin=0.0,
                               c=float(rng.uniform(0.5, 0.99)),
                               null_rate=float(pooled), benefit=benefit,
                               analysis=analysis, design=design)


def fuzz_tte(rng: np.random.Generator, *, flat_analysis=False) -> DesignSpec:
    margin = float(rng.uniform(-0.2, 0.2))
    sigma_d = float(rng.uniform(0.1, 0.5))
    design = NormalPrior(margin + float(rng.uniform(-0.5, 0.5)) * sigma_d, sigma_d)
    analysis = NormalPrior(0.0, FLAT_SD) if flat_analysis else \
        NormalPrior(float(rng.uniform(-0.3, 0.3)), float(rng.uniform(0.1, FLAT_SD)))
    return tte_spec(events=int(rng.integers(20, 500)),
                    allocation=float(rng.uniform(0.2, 0.8)),
                    margin=margin, c=float(rng.uniform(0.5, 0.99)),
                    analysis=analysis, design=design)


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------

def bvn_cdf_quadrature(a: float, b: float, rho: float, *, lim=8.5,
                       eps=1e-11) -> float:
    """Brute-force 2-D adaptive quadrature of the bivariate normal density."""
    if a <= -lim or b <= -lim:
        return 0.0
    det = 1.0 - rho * rho
    norm = 1.0 / (2.0 * math.pi * math.sqrt(det))

    def pdf(y, x):
        q = (x * x - 2.0 * rho * x * y + y * y) / det
        return norm * math.exp(-0.5 * q)

    value, _ = integrate.dblquad(pdf, -lim, min(a, lim), -lim, min(b, lim),
                                 epsabs=eps, epsrel=eps)
    return value


def normal_pdf(x, mean, sd):
    return math.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))


def beta_pdf(u, a, b):
    from scipy.stats import beta as beta_dist
    return beta_dist.pdf(u, a, b)


def exact_prob_first_beats_second(a1: float, b1: float, a2: float, b2: float) -> float:
    """P(X > Y) for independent X~Beta(a1,b1), Y~Beta(a2,b2), integer params.

    Classic closed sum: P(X > Y) = sum_{j=0}^{a1-1} B(a2+j, b1+b2)
    / [(b1+j) B(1+j, b1) B(a2, b2)]. Exact up to float rounding; used as the
    independent oracle for the quadrature route.
    """
    from scipy.special import betaln
    for v in (a1, b1, a2, b2):
        if abs(v - round(v)) > 1e-12:
            raise ValueError("closed-sum oracle needs integer parameters")
    total = 0.0
    for j in range(int(round(a1))):
        total += math.exp(betaln(a2 + j, b1 + b2) - math.log(b1 + j)
                          - betaln(1 + j, b1) - betaln(a2, b2))
    return total


def t_quantile_by_bisection(p: float, nu: float) -> float:
    """Student-t quantile via bisection on the library's own CDF (used to
    check the success rule against the classical test decision)."""
    from bayescal.special import student_t_cdf
    lo, hi = -1e6, 1e6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, nu) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * (1.0 + abs(mid)):
            break
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
