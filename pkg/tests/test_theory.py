"""Bounds, critical thresholds, and the prevalence scan, checked against
the operating-characteristic engines as oracles."""

import math

import numpy as np
import pytest

from bayescal.binary import oc_binary_single, single_arm_grid
from bayescal.continuous import oc_continuous
from bayescal.design import BetaPrior, NormalPrior, gamma1_of
from bayescal.errors import DomainError
from bayescal.theory import (
    DifferenceScan,
    PriorOddsRatio,
    asymptotic_threshold,
    difference_scan,
    pid_below_t1e_threshold,
    pid_t1e_difference_bounds,
    pid_upper_bound,
)

from conftest import (
    binary_single_spec,
    continuous_spec,
    fuzz_binary_single,
    fuzz_continuous,
)


class TestPidUpperBound:
    def test_matched_priors_reduce_to_complement(self):
        assert pid_upper_bound(1.0, 0.975) == pytest.approx(0.025, abs=1e-15)

    def test_direct_substitution(self):
        assert pid_upper_bound(2.0, 0.9) == pytest.approx(1 / 19, abs=1e-15)

    def test_fuzzed_designs_respect_bound(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            spec = fuzz_continuous(rng, matched=True)
            oc = oc_continuous(spec)
            if math.isnan(oc.pid):
                continue
            assert oc.pid <= pid_upper_bound(1.0, spec.threshold) + 1e-9

    def test_monotone_in_ratio_and_threshold(self):
        ratios = np.linspace(0.1, 10, 40)
        vals = [pid_upper_bound(r, 0.9) for r in ratios]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        cs = np.linspace(0.05, 0.99, 40)
        vals = [pid_upper_bound(2.0, c) for c in cs]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_prior_odds_ratio_helper(self):
        por = PriorOddsRatio.from_prevalences(0.7, 0.5)
        assert por.ratio == pytest.approx((0.7 / 0.3) / 1.0, abs=1e-12)


class TestPidBelowT1eThreshold:
    def test_worked_examples(self):
        assert pid_below_t1e_threshold(0.80, 0.02, 0.5) == pytest.approx(0.9756, abs=1e-4)
        assert pid_below_t1e_threshold(0.80, 0.02, 0.7) == pytest.approx(0.9894, abs=1e-4)
        assert pid_below_t1e_threshold(0.80, 0.02, 0.1) == pytest.approx(0.8163, abs=1e-4)

    def test_zero_bt1e_is_vacuous(self):
        assert pid_below_t1e_threshold(0.8, 0.0, 0.5) == 1.0

    def test_large_sample_sign_consistency(self):
        # with a flat analysis prior ft1e = 1-c exactly, so the equivalence
        # "PID < ft1e iff c < c*" is sharp; check the sign match outside a
        # small dead band around c*
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 200:
            spec = fuzz_continuous(rng, flat_analysis=True, n_min=500, n_max=3000)
            oc = oc_continuous(spec)
            if math.isnan(oc.pid) or math.isnan(oc.bcp) or oc.bt1e <= 0:
                continue
            c_star = pid_below_t1e_threshold(oc.bcp, oc.bt1e, oc.gamma1)
            if abs(spec.threshold - c_star) <= 0.002:
                continue
            checked += 1
            assert (oc.pid < oc.ft1e) == (spec.threshold < c_star), \
                (spec.threshold, c_star, oc.pid, oc.ft1e)

    def test_domain(self):
        with pytest.raises(DomainError):
            pid_below_t1e_threshold(0.8, 0.02, 0.0)
        with pytest.raises(DomainError):
            pid_below_t1e_threshold(1.5, 0.02, 0.5)


class TestDifferenceBounds:
    def test_reference_values(self):
        assert pid_t1e_difference_bounds(0.975) == (-0.025000000000000022, 0.975)
        lo, hi = pid_t1e_difference_bounds(0.5)
        assert lo == pytest.approx(-0.5, abs=1e-15)
        assert hi == 0.5

    def test_fuzzed_flat_designs_inside_envelope(self):
        rng = np.random.default_rng(99)
        for _ in range(300):
            spec = fuzz_continuous(rng, flat_analysis=True)
            oc = oc_continuous(spec)
            if math.isnan(oc.pid):
                continue
            lo, hi = pid_t1e_difference_bounds(spec.threshold)
            assert lo - 1e-6 <= oc.pid - oc.ft1e <= hi + 1e-6


class TestAsymptoticThreshold:
    def test_values(self):
        assert asymptotic_threshold(0.025) == 0.975
        assert asymptotic_threshold(0.5) == 0.5
        assert asymptotic_threshold(0.01) == 0.99

    def test_domain(self):
        with pytest.raises(DomainError):
            asymptotic_threshold(0.0)


class TestMetricFormulas:
    def test_pid_prevalence_formula(self):
        # PID = alpha_B gamma0 / (beta_C gamma1 + alpha_B gamma0) recomputed
        # from the result fields must match the engine output
        rng = np.random.default_rng(17)
        for _ in range(200):
            oc = oc_continuous(fuzz_continuous(rng))
            gamma0 = 1.0 - oc.gamma1
            denom = oc.bcp * oc.gamma1 + oc.bt1e * gamma0
            if math.isnan(denom) or denom <= 0:
                continue
            assert oc.pid == pytest.approx(oc.bt1e * gamma0 / denom, abs=1e-9)

    def test_for_conditional_power_formula(self):
        rng = np.random.default_rng(18)
        for _ in range(200):
            oc = oc_continuous(fuzz_continuous(rng))
            gamma0 = 1.0 - oc.gamma1
            denom = oc.gamma1 * (1 - oc.bcp) + gamma0 * (1 - oc.bt1e)
            if math.isnan(denom) or denom <= 0:
                continue
            assert oc.for_ == pytest.approx(
                oc.gamma1 * (1 - oc.bcp) / denom, abs=1e-9)

    def test_theorem_bound_with_reweighted_design_prior(self):
        # matched conditional priors with R != 1: reweight the two pieces of
        # a binary single-arm analysis prior into a mixture design prior and
        # recompute the metrics from the engine's own tables
        rng = np.random.default_rng(3000)
        for _ in range(60):
            spec = fuzz_binary_single(rng, matched=True)
            grid = single_arm_grid(spec)
            if not 0.02 < grid.gamma1 < 0.98:
                continue
            c = spec.threshold
            x_c = grid.critical_count(c)
            w = float(rng.uniform(0.05, 0.95))  # new prevalence of effectiveness
            tp_piece = grid.m_d * grid.q_d / grid.gamma1
            fp_piece = grid.m_d * (1 - grid.q_d) / grid.gamma0
            bp = w * tp_piece[x_c:].sum() + (1 - w) * fp_piece[x_c:].sum()
            fp_mass = (1 - w) * fp_piece[x_c:].sum()
            if bp <= 0:
                continue
            pid = fp_mass / bp
            ratio = (w / (1 - w)) / (grid.gamma1 / grid.gamma0)
            assert pid <= pid_upper_bound(ratio, c) + 1e-9


class TestDifferenceScan:
    def _template(self):
        return continuous_spec(c=None)

    def test_limits(self):
        scan_hi = difference_scan(self._template(), 0.975, 0.15, [0.999999])
        assert scan_hi.points[0].difference == pytest.approx(-0.025, abs=0.002)
        scan_lo = difference_scan(self._template(), 0.975, 0.15, [1e-16])
        assert scan_lo.points[0].difference == pytest.approx(0.975, abs=0.01)

    def test_crossings_monotone_in_c(self):
        grid = list(np.linspace(0.02, 0.98, 49))
        crossings = []
        for c in (0.90, 0.95, 0.975):
            scan = difference_scan(self._template(), c, 0.15, grid)
            assert len(scan.crossings) == 1
            crossings.append(scan.crossing)
        assert crossings[0] < crossings[1] < crossings[2]

    def test_crossing_is_a_sign_change(self):
        scan = difference_scan(self._template(), 0.95, 0.15,
                               list(np.linspace(0.05, 0.95, 19)))
        star = scan.crossing
        left = difference_scan(self._template(), 0.95, 0.15, [star - 1e-4])
        right = difference_scan(self._template(), 0.95, 0.15, [star + 1e-4])
        assert left.points[0].difference > 0 > right.points[0].difference

    def test_no_crossing_reported_as_absent(self):
        scan = difference_scan(self._template(), 0.975, 0.15, [0.9, 0.95, 0.99])
        assert scan.crossings == ()
        assert scan.crossing is None

    def test_requires_flat_analysis_prior(self):
        bad = continuous_spec(c=None, analysis=NormalPrior(0.0, 0.5))
        with pytest.raises(DomainError):
            difference_scan(bad, 0.95, 0.15, [0.3, 0.6])

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            difference_scan(self._template(), 0.95, 0.15, [0.6, 0.3])
        with pytest.raises(DomainError):
            difference_scan(self._template(), 0.95, 0.15, [])
