# Copyright 2026 The zocop Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np

from zocop import core
from zocop import errors
from zocop.tests.unit import base


def _half_norm_squared():
    return core.SmoothObjective(lambda w: 0.5 * float(w @ w),
                                lambda w: np.array(w, dtype=float), 1.0,
                                1.0)


class TestSmoothObjective(base.ZocopTest):

    def test_quadratic_constants(self):
        obj = core.SmoothObjective.quadratic([[2.0, 0.0], [0.0, 4.0]],
                                             [1.0, 1.0], 3.0)
        self.assertAlmostEqual(4.0, obj.lipschitz_l_f)
        self.assertAlmostEqual(2.0, obj.strong_convexity_sigma_f)
        self.assertTrue(obj.is_quadratic)
        self.assertAlmostEqual(0.5 * 6 + 2 + 3, obj.value(np.ones(2)))

    def test_quadratic_indefinite_sigma_clamped(self):
        obj = core.SmoothObjective.quadratic([[1.0, 0.0], [0.0, -3.0]])
        self.assertAlmostEqual(3.0, obj.lipschitz_l_f)
        self.assertEqual(0.0, obj.strong_convexity_sigma_f)

    def test_quadratic_not_symmetric(self):
        self.assertRaises(errors.InvalidObjectiveError,
                          core.SmoothObjective.quadratic,
                          [[1.0, 1.0], [0.0, 1.0]])

    def test_quadratic_not_square(self):
        self.assertRaises(errors.DimensionMismatchError,
                          core.SmoothObjective.quadratic, np.ones((2, 3)))

    def test_negative_lipschitz(self):
        self.assertRaises(errors.InvalidObjectiveError,
                          core.SmoothObjective, None, None, -1.0)

    def test_infinite_sigma(self):
        self.assertRaises(errors.InvalidObjectiveError,
                          core.SmoothObjective, None, None, 1.0, math.inf)

    def test_quadratic_data_is_readonly(self):
        obj = core.SmoothObjective.quadratic(np.eye(2))
        self.assertFalse(obj.quadratic_form.H.flags.writeable)


class TestCopProblem(base.ZocopTest):

    def setUp(self):
        super(TestCopProblem, self).setUp()
        self.problem = core.CopProblem(
            core.SmoothObjective.quadratic(np.eye(2)),
            [[1.0, 0.0], [0.0, 2.0]], [0.0, -1.0], 2.0)

    def test_dimensions(self):
        self.assertEqual(2, self.problem.n)
        self.assertEqual(2, self.problem.p)
        self.assertEqual({'n': 2, 'p': 2, 'lam': 2.0},
                         self.problem.serialize())

    def test_residual(self):
        r = self.problem.residual(np.array([1.0, 1.0]),
                                  np.array([0.5, 0.0]))
        self.assertArrayAlmostEqual([0.5, 1.0], r)

    def test_zero_one_loss_counts_strictly_positive(self):
        self.assertEqual(2, core.CopProblem.zero_one_loss(
            [1.0, 0.0, -2.0, 1e-300]))

    def test_margin_loss_ignores_roundoff(self):
        margins = [2.2e-16, 1.1e-16, -1.0, 0.5]
        self.assertEqual(3, core.CopProblem.zero_one_loss(margins))
        self.assertEqual(1, core.margin_loss(margins))
        self.assertEqual(3, core.margin_loss(margins, tol=0.0))

    def test_margin_loss_follows_feasibility_tolerance(self):
        self.config.config(tol_feas=0.6, group='solver')
        self.assertEqual(0, core.margin_loss([0.5, 1e-3]))

    def test_objective_value(self):
        value = self.problem.objective_value(np.array([1.0, 1.0]),
                                             np.array([3.0, 0.0]))
        self.assertAlmostEqual(1.0 + 2.0, value)

    def test_lyapunov_all_zero(self):
        zero = np.zeros(2)
        problem = core.CopProblem(self.problem.objective, np.eye(2), zero,
                                  1.0)
        self.assertEqual(0.0, problem.lyapunov_value(zero, zero, zero,
                                                     zero, 3.0, 2.0))

    def test_lyapunov_by_terms(self):
        objective = core.SmoothObjective(lambda w: 0.0,
                                         lambda w: np.zeros_like(w), 0.0)
        problem = core.CopProblem(objective, [[1.0]], [0.0], 1.0)
        one = np.ones(1)
        value = problem.lyapunov_value(one, np.zeros(1), one, one, 2.0, 0.0)
        self.assertAlmostEqual(2.0, value)

    def test_lyapunov_feasible_is_objective(self):
        w = np.array([0.3, -0.7])
        u = self.problem.A @ w + self.problem.b
        value = self.problem.lyapunov_value(w, u, np.array([5.0, -2.0]), w,
                                            4.0, 1.0)
        self.assertAlmostEqual(self.problem.objective_value(w, u), value)

    def test_bad_lambda(self):
        for lam in (0.0, -1.0, math.inf):
            self.assertRaises(errors.InvalidInputError, core.CopProblem,
                              self.problem.objective, np.eye(2),
                              np.zeros(2), lam)

    def test_b_length_mismatch(self):
        self.assertRaises(errors.DimensionMismatchError, core.CopProblem,
                          self.problem.objective, np.eye(2), np.zeros(3),
                          1.0)

    def test_H_mismatch(self):
        self.assertRaises(errors.DimensionMismatchError, core.CopProblem,
                          self.problem.objective, np.ones((2, 3)),
                          np.zeros(2), 1.0)

    def test_non_finite_A(self):
        self.assertRaises(errors.InvalidInputError, core.CopProblem,
                          self.problem.objective, [[1.0, np.nan]] * 2,
                          np.zeros(2), 1.0)

    def test_check_point(self):
        w, u, z, v = self.problem.check_point([1, 2], [3, 4])
        self.assertArrayEqual([1.0, 2.0], w)
        self.assertIsNone(z)
        self.assertIsNone(v)
        self.assertRaises(errors.DimensionMismatchError,
                          self.problem.check_point, [1.0])


class TestSpectralInfo(base.ZocopTest):

    def test_identity(self):
        info = core.spectral_info(np.eye(2), rank_tolerance=1e-10)
        self.assertAlmostEqual(1.0, info.norm_A)
        self.assertAlmostEqual(1.0, info.gamma)
        self.assertTrue(info.full_row_rank)

    def test_tolerance_applies_to_gamma_squared(self):
        A = np.diag([1.0, 0.01])
        # gamma = 1e-2 exceeds the tolerance, gamma squared = 1e-4 does not
        info = core.spectral_info(A, rank_tolerance=1e-3)
        self.assertFalse(info.full_row_rank)
        self.assertEqual(0.0, info.gamma)
        info = core.spectral_info(A, rank_tolerance=1e-5)
        self.assertTrue(info.full_row_rank)
        self.assertAlmostEqual(0.01, info.gamma)

    def test_orthonormal_rows(self):
        info = core.spectral_info([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        self.assertAlmostEqual(1.0, info.norm_A)
        self.assertAlmostEqual(1.0, info.gamma)
        self.assertTrue(info.full_row_rank)

    def test_rank_deficient(self):
        info = core.spectral_info([[1.0, 0.0], [2.0, 0.0]])
        self.assertEqual(0.0, info.gamma)
        self.assertFalse(info.full_row_rank)
        self.assertAlmostEqual(math.sqrt(5.0), info.norm_A)

    def test_more_rows_than_columns(self):
        info = core.spectral_info(np.ones((3, 2)))
        self.assertFalse(info.full_row_rank)
        self.assertAlmostEqual(math.sqrt(6.0), info.norm_A)

    def test_default_tolerance_follows_config(self):
        self.config.config(rank_tolerance_factor=0.5, group='solver')
        # gamma^2 = 1 is not above 0.5 * |A|^2 = 2
        info = core.spectral_info(np.diag([1.0, 2.0]))
        self.assertFalse(info.full_row_rank)
        self.assertEqual(2.0, info.rank_tolerance)

    def test_transpose_keeps_norm(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            A = rng.standard_normal((4, 6))
            self.assertAlmostEqual(core.spectral_info(A).norm_A,
                                   core.spectral_info(A.T).norm_A)

    def test_gamma_scales_linearly(self):
        rng = np.random.default_rng(4)
        A = base.well_conditioned(rng, 3, 5)
        info = core.spectral_info(A)
        scaled = core.spectral_info(3.0 * A)
        self.assertAlmostEqual(3.0 * info.gamma, scaled.gamma)
        self.assertAlmostEqual(3.0 * info.norm_A, scaled.norm_A)


class TestCheckGradient(base.ZocopTest):

    def test_half_norm(self):
        error = core.check_gradient(_half_norm_squared(), [3.0, -4.0])
        self.assertLessEqual(error, 1e-8)

    def test_half_norm_at_zero(self):
        obj = _half_norm_squared()
        self.assertArrayEqual([0.0, 0.0], obj.gradient(np.zeros(2)))
        self.assertEqual(0.0, core.check_gradient(obj, np.zeros(2)))

    def test_quadratic(self):
        obj = core.SmoothObjective.quadratic([[2.0, 0.0], [0.0, 4.0]],
                                             [1.0, 1.0])
        self.assertArrayAlmostEqual([3.0, 5.0], obj.gradient(np.ones(2)))
        self.assertLessEqual(core.check_gradient(obj, np.ones(2)), 1e-8)

    def test_wrong_gradient_detected(self):
        obj = core.SmoothObjective(lambda w: 0.5 * float(w @ w),
                                   lambda w: 2.0 * w, 2.0)
        self.assertGreater(core.check_gradient(obj, [1.0, 1.0]), 0.4)

    def test_non_finite_gradient(self):
        obj = core.SmoothObjective(lambda w: 0.0,
                                   lambda w: np.full_like(w, np.inf), 1.0)
        self.assertRaises(errors.InvalidObjectiveError,
                          core.check_gradient, obj, [1.0])

    def test_non_finite_value(self):
        obj = core.SmoothObjective(lambda w: math.nan,
                                   lambda w: np.zeros_like(w), 1.0)
        self.assertRaises(errors.InvalidObjectiveError,
                          core.check_gradient, obj, [1.0])
