#   Copyright Peznauts <kevin@cloudnull.com>. All Rights Reserved.
#
#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

import math

import numpy as np

from noma_rep import bounds
from noma_rep import ConditionViolatedError
from noma_rep import DomainError
from noma_rep import numerics
from noma_rep import tests


class TestCorrection(tests.TestBase):
    def test_values(self):
        self.assertClose(bounds.correction_c(1), math.exp(-1.0))
        self.assertClose(bounds.correction_c(2), 0.520269, rel=1e-5)
        self.assertClose(bounds.correction_c(16), 0.8654, rel=1e-3)

    def test_increasing_below_one(self):
        values = [bounds.correction_c(d) for d in range(1, 200)]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))
        self.assertLess(values[-1], 1.0)

    def test_domain(self):
        with self.assertRaises(DomainError):
            bounds.correction_c(0)


class TestChernoff(tests.TestBase):
    def test_corrected_left_bound_dominates_cdf(self):
        for d in range(1, 33):
            c_d = bounds.correction_c(d)
            for z in np.linspace(0.0, 1.0 / c_d, 1000):
                left, _ = bounds.chernoff_cdf_bounds(d, float(z))
                exact = bounds.zd_cdf(d, float(z))
                if left < exact * (1.0 - 1e-12):
                    self.fail("violated at D={} z={!r}".format(d, z))

    def test_right_bound_dominates_tail(self):
        for d in (1, 4, 16):
            for z in (1.1, 1.5, 3.0):
                _, right = bounds.chernoff_cdf_bounds(d, z)
                self.assertGreaterEqual(right, 1.0 - bounds.zd_cdf(d, z))

    def test_ranges(self):
        left, right = bounds.chernoff_cdf_bounds(4, 0.5)
        self.assertIsNotNone(left)
        self.assertIsNone(right)
        left, right = bounds.chernoff_cdf_bounds(4, 5.0)
        self.assertIsNone(left)
        self.assertIsNotNone(right)
        self.assertEqual(bounds.chernoff_cdf_bounds(4, 0.0)[0], 0.0)
        with self.assertRaises(DomainError):
            bounds.chernoff_cdf_bounds(4, -1.0)

    def test_correction_tightens(self):
        for d in (2, 8, 16):
            for z in (0.1, 0.5, 0.9):
                left, _ = bounds.chernoff_cdf_bounds(d, z)
                self.assertLessEqual(left, bounds.chernoff_plain_left(d, z))
        self.assertIsNone(bounds.chernoff_plain_left(2, 1.0))


class TestNoInterference(tests.TestBase):
    def test_anchor(self):
        self.assertClose(
            bounds.outage_exact_m0(2, 0.5, 1.0), 0.090204, rel=1e-5
        )
        self.assertClose(
            bounds.outage_bound_m0(2, 0.5, 1.0), 0.096361, rel=2e-4
        )

    def test_single_copy(self):
        self.assertClose(
            bounds.outage_exact_m0(1, 2.0, 4.0), -math.expm1(-0.5)
        )

    def test_bound_dominates_exact(self):
        for d in (1, 2, 4, 8, 16):
            c_d = bounds.correction_c(d)
            for ratio in (0.1, 0.5, 1.0):
                if ratio / d > 1.0 / c_d:
                    continue
                exact = bounds.outage_exact_m0(d, ratio, 1.0)
                corrected = bounds.outage_bound_m0(d, ratio, 1.0)
                loose = bounds.outage_bound_m0_loose(d, ratio, 1.0)
                self.assertGreaterEqual(corrected, exact * (1 - 1e-12))
                self.assertGreaterEqual(loose, corrected)

    def test_diversity_order(self):
        # Ten times the SNR gives 10^-D times the bound, up to the
        # vanishing exponential correction.
        low = bounds.outage_bound_m0(4, 1.0, 1.0e3)
        high = bounds.outage_bound_m0(4, 1.0, 1.0e4)
        self.assertClose(math.log10(low / high), 4.0, rel=1e-3)


class TestClosedFormBound(tests.TestBase):
    def test_residual_anchor(self):
        self.assertClose(
            bounds.residual_term(16, 2, 10.0, 4.0), 0.6727, abs_tol=1e-3
        )
        self.assertClose(
            bounds.residual_term(16, 2, 10.0, tests.SNR_6DB),
            0.6710,
            abs_tol=1e-3,
        )

    def test_residual_condition(self):
        # d <= 0 once T >= D snr / c_D.
        with self.assertRaises(ConditionViolatedError):
            bounds.residual_term(2, 1, 100.0, 1.0)

    def test_interference_required(self):
        with self.assertRaises(DomainError):
            bounds.psi(4, 0, 1.0, 1.0)
        with self.assertRaises(DomainError):
            bounds.outage_bound(4, 0, 1.0, 1.0)

    def test_floor_single_copy(self):
        self.assertClose(
            bounds.psi_asymptotic(1, 1, 1.0),
            1.0 / (1.0 + math.exp(-1.0)) ** 2,
        )

    def test_psi_reaches_floor(self):
        for d, m, t in ((16, 2, 2.0), (8, 1, 1.0), (32, 3, 4.0)):
            self.assertClose(
                bounds.psi(d, m, t, 1.0e6),
                bounds.psi_asymptotic(d, m, t),
                rel=1e-3,
            )

    def test_floor_tracks_approximated_outage(self):
        # At 40 dB the outage of the moment-matched model has flattened
        # onto the closed-form floor.
        for m in (1, 2):
            floor = bounds.psi_asymptotic(16, m, 2.0)
            approx = bounds.omega_outage_exact(16, m, 2.0, 1.0e4)
            self.assertLessEqual(
                approx, bounds.outage_bound(16, m, 2.0, 1.0e4).total
            )
            self.assertGreater(approx, floor / 2.0)

    def test_psi_half_integer_shape(self):
        # D even gives N = (D + 1) / 2 and a half-integer MN.
        value = bounds.psi(8, 1, 1.0, 10.0)
        self.assertTrue(0.0 < value < 1.0)

    def test_bound_dominates_approximated_outage(self):
        for d in (4, 8, 16, 32):
            for m in (1, 2, 3):
                for t in (1.0, 2.0, 4.0):
                    for snr in (2.0, 4.0, 10.0):
                        result = bounds.outage_bound(d, m, t, snr)
                        if not result.valid:
                            continue
                        approx = bounds.omega_outage_exact(d, m, t, snr)
                        upper = bounds.outage_upper(d, m, t, snr)
                        self.assertGreaterEqual(
                            upper + 1e-9,
                            approx,
                            "D={} M={} T={} snr={}".format(d, m, t, snr),
                        )
                        if result.tail_ok:
                            self.assertGreaterEqual(
                                result.total + 1e-9, approx
                            )

    def test_invalid_region(self):
        result = bounds.outage_bound(2, 1, 100.0, 1.0)
        self.assertFalse(result.valid)
        self.assertIsNone(result.total)
        self.assertIsNotNone(result.floor)
        self.assertEqual(bounds.outage_upper(2, 1, 100.0, 1.0), 1.0)

    def test_outage_upper_no_interference(self):
        self.assertEqual(
            bounds.outage_upper(3, 0, 1.0, 2.0),
            bounds.outage_exact_m0(3, 1.0, 2.0),
        )

    def test_amgm_chain(self):
        for d, m, t, snr in ((8, 2, 1.0, 4.0), (16, 1, 2.0, 10.0)):
            value = bounds.psi(d, m, t, snr)
            amgm = bounds.psi_amgm_bound(d, m, t, snr)
            self.assertLessEqual(value, amgm * (1 + 1e-12))

    def test_floor_entropy_bound(self):
        for d, m, t in ((8, 2, 1.0), (16, 1, 2.0), (32, 3, 2.0)):
            self.assertLessEqual(
                bounds.psi_asymptotic(d, m, t),
                bounds.psi_floor_entropy_bound(d, m, t) * (1 + 1e-12),
            )

    def test_floor_decay(self):
        # Small rho: the per-copy exponent is negative and the floor
        # shrinks with D.
        self.assertLess(bounds.psi_floor_exponent(1, 0.1), 0.0)
        self.assertTrue(bounds.exponential_decay_condition(1, 0.1))
        self.assertGreater(
            bounds.psi_asymptotic(8, 1, 0.5),
            bounds.psi_asymptotic(32, 1, 0.5),
        )


class TestDiversity(tests.TestBase):
    def test_constant_is_at_most_one(self):
        for d, m, t, snr in ((16, 2, 2.0, 10.0), (8, 1, 1.0, 100.0)):
            check = bounds.diversity_condition(d, m, t, snr)
            self.assertLessEqual(check.c_const, 1.0)
            self.assertEqual(check.holds, check.lhs >= check.rhs)

    def test_holds_means_nu_below_one(self):
        for d, m, t, snr, expected in (
            (16, 2, 0.1, 10.0, True),
            (8, 1, 1.0, 100.0, False),
        ):
            check = bounds.diversity_condition(d, m, t, snr)
            self.assertIs(check.holds, expected)
            # nu = (rhs / lhs) (1 + 2 c_D T / (D + 1))^-M, so nu < 1 even
            # when both sides are equal.
            shrink = (1.0 + 2.0 * bounds.correction_c(d) * t / (d + 1)) ** (
                -m
            )
            self.assertLess(shrink, 1.0)
            self.assertClose(
                check.nu, check.rhs / check.lhs * shrink, rel=1e-9
            )
            if check.holds:
                self.assertLess(check.nu, 1.0)
            else:
                self.assertGreater(check.nu, 1.0)

    def test_envelope_dominates_psi(self):
        for d, m, t, snr in ((16, 2, 2.0, 10.0), (8, 1, 1.0, 4.0)):
            self.assertLessEqual(
                bounds.psi(d, m, t, snr),
                bounds.diversity_envelope(d, m, t, snr) * (1 + 1e-9),
            )

    def test_condition_violated(self):
        with self.assertRaises(ConditionViolatedError):
            bounds.diversity_condition(2, 1, 100.0, 1.0)


class TestDesignRules(tests.TestBase):
    def test_max_interferers(self):
        self.assertEqual(bounds.max_interferers(16, 2.0), 2)
        self.assertEqual(bounds.max_interferers(8, 2.0), 0)
        self.assertEqual(bounds.max_interferers(64, 1.0), 8)
        with self.assertRaises(DomainError):
            bounds.max_interferers(4, 2.0)

    def test_copies_needed(self):
        self.assertEqual(bounds.copies_needed(2, 2.0), 16)
        self.assertEqual(bounds.copies_needed(0, 2.0), 8)
        self.assertEqual(bounds.copies_needed(1, 1.0), 6)

    def test_sufficient_condition(self):
        self.assertTrue(bounds.sufficient_condition(16, 1, 1.0))
        self.assertFalse(bounds.sufficient_condition(4, 2, 2.0))

    def test_design_rules(self):
        rules = bounds.design_rules(copies=16, interferers=2, threshold=2.0)
        self.assertEqual(rules["max_interferers"], 2)
        self.assertEqual(rules["copies_needed"], 16)
        self.assertTrue(rules["rule_satisfied"])
        self.assertIn("exponential_decay", rules)
        rules = bounds.design_rules(copies=4, threshold=2.0)
        self.assertIsNone(rules["max_interferers"])
        with self.assertRaises(DomainError):
            bounds.design_rules(copies=4)


class TestBoundInputs(tests.TestBase):
    def test_derived(self):
        inputs = bounds.BoundInputs(8, 2, 1.0, 4.0)
        self.assertEqual(inputs.dof, 4.5)
        self.assertEqual(inputs.shape, 9.0)
        self.assertClose(
            inputs.d, 8 / (bounds.correction_c(8) * 1.0) - 0.25
        )

    def test_validation(self):
        for args in ((0, 1, 1.0, 1.0), (2, -1, 1.0, 1.0), (2, 1, 0.0, 1.0)):
            with self.assertRaises(DomainError):
                bounds.BoundInputs(*args)
        with self.assertRaises(DomainError):
            bounds.BoundInputs(2, 1, math.inf, 1.0)

    def test_regularized_gamma_link(self):
        self.assertClose(
            bounds.zd_cdf(3, 0.4), numerics.regularized_lower_gamma(3, 1.2)
        )
