# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-14 13:51:40
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-17 16:12:55

import math
import os
import unittest

import numpy as np
import pytest
from scipy import integrate, stats

from common.utils import SeedLineage, Utils, substream
from extremes.errors import InvalidArgumentError
from extremes.pickands import (PickandsEstimator, estimate_interval_constant,
                               estimate_pickands, fit_rate)
from extremes.sampler import FbmSampler, Grid

RUN_SLOW = os.environ.get('LSGP_RUN_SLOW') == '1'


def grid_oracle_alpha2(points: np.ndarray) -> float:
    '''
    E max_k exp(sqrt(2) t_k Z - t_k^2) for B_2(t) = t Z,
    by quadrature over Z.
    '''
    def integrand(z):
        return math.exp(float(np.max(math.sqrt(2) * points * z - points ** 2))) * stats.norm.pdf(z)
    breaks = list(math.sqrt(2) * points[::8])
    value, _err = integrate.quad(integrand, -12, 12, points=breaks, limit=500)
    return value


class PickandsTester(unittest.TestCase):

# --------------------- Tests ------------------

    #------------------------------------
    # test_interval_constant
    #-------------------

    def test_zero_horizon(self):
        est = estimate_interval_constant(1.0, S=0.0, mesh=0.1, n_samples=100, seed=1)
        self.assertEqual(est.h_interval, 1.0)
        self.assertIsNone(est.h_rate)
        self.assertEqual(est.std_error, 0.0)

    def test_alpha2_against_quadrature(self):
        grid = Grid.from_mesh(0.0, 2.0, 1 / 64)
        oracle = grid_oracle_alpha2(grid.points)
        for method in ('shifted', 'direct'):
            est = estimate_interval_constant(2.0, S=2.0, mesh=1 / 64, n_samples=20_000,
                                             seed=11, method=method)
            self.assertLess(abs(est.h_interval - oracle), 3 * est.std_error,
                            f"{method}: {est.h_interval} vs {oracle}")

    def test_values_at_least_one(self):
        for method in ('shifted', 'direct'):
            est = estimate_interval_constant(1.0, S=1.0, mesh=1 / 32, n_samples=500,
                                             seed=3, method=method)
            self.assertGreaterEqual(est.h_interval, 1.0)
            self.assertGreater(est.std_error, 0.0)
            self.assertEqual(est.h_rate, est.h_interval / 1.0)

    def test_shifted_per_path_bound(self):
        estimator = PickandsEstimator(1.5)
        values = estimator._sample_functional(Grid.from_mesh(0.0, 4.0, 1 / 16), 0.0, 600, 5, 3)
        self.assertEqual(values.shape, (600,))
        self.assertTrue(np.all(values >= 1.0 - 1e-12))

    def test_nested_horizons_per_path(self):
        # Sup over [0, 1] never exceeds sup over [0, 2] on the same path
        grid = Grid.from_mesh(0.0, 2.0, 1 / 32)
        paths = FbmSampler(0.8, grid).draw(substream(SeedLineage(4, 3, 0)), 400)
        y = math.sqrt(2) * paths - grid.points ** 0.8
        half = grid.n // 2 + 1
        self.assertTrue(np.all(y[:, :half].max(axis=1) <= y.max(axis=1)))

    def test_deterministic(self):
        first = estimate_interval_constant(1.0, S=2.0, mesh=1 / 16, n_samples=1000, seed=8)
        second = estimate_interval_constant(1.0, S=2.0, mesh=1 / 16, n_samples=1000, seed=8)
        self.assertEqual(first.h_interval, second.h_interval)
        threaded = estimate_interval_constant(1.0, S=2.0, mesh=1 / 16, n_samples=1000, seed=8,
                                              n_jobs=2)
        self.assertEqual(first.h_interval, threaded.h_interval)

    def test_two_sided_and_scaled(self):
        est = estimate_interval_constant(1.0, S=1.0, mesh=1 / 16, n_samples=500, seed=2, left=1.0)
        self.assertEqual(est.S, 2.0)
        self.assertEqual(est.left, 1.0)
        self.assertGreaterEqual(est.h_interval, 1.0)

        scaled = estimate_interval_constant(1.0, S=1.0, mesh=1 / 16, n_samples=500, seed=2,
                                            horizon_scale=0.7)
        self.assertAlmostEqual(scaled.S, 0.7)
        self.assertAlmostEqual(scaled.mesh, 0.7 / 11)

    def test_subadditivity(self):
        short = estimate_interval_constant(1.0, S=2.0, mesh=1 / 16, n_samples=5000, seed=21)
        longer = estimate_interval_constant(1.0, S=4.0, mesh=1 / 16, n_samples=5000, seed=22)
        self.assertLessEqual(longer.h_interval,
                             2 * short.h_interval
                             + 3 * Utils.pooled_se(longer.std_error, 2 * short.std_error))

    def test_argument_errors(self):
        with self.assertRaises(InvalidArgumentError):
            PickandsEstimator(0.0)
        with self.assertRaises(InvalidArgumentError):
            PickandsEstimator(1.0, method='tilted')
        with self.assertRaises(InvalidArgumentError):
            estimate_interval_constant(1.0, S=-1.0, mesh=0.1, n_samples=100, seed=1)
        with self.assertRaises(InvalidArgumentError):
            estimate_interval_constant(1.0, S=1.0, mesh=0.1, n_samples=10, seed=1)
        with self.assertRaises(InvalidArgumentError):
            estimate_pickands(1.0, S_ladder=(4.0, 2.0, 8.0), mesh=0.25, n_samples=100)
        with self.assertRaises(InvalidArgumentError):
            estimate_pickands(1.0, S_ladder=(4.0, 8.0), mesh=0.25, n_samples=100)

    #------------------------------------
    # test_fit_rate
    #-------------------

    def test_fit_recovers_line(self):
        S = [16.0, 32.0, 64.0, 128.0]
        fit = fit_rate(S, [1.0 - 3.0 / s for s in S], [0.01] * 4)
        self.assertAlmostEqual(fit.intercept, 1.0, places=12)
        self.assertAlmostEqual(fit.slope, -3.0, places=10)
        self.assertLess(fit.residual, 1e-12)
        self.assertFalse(fit.fallback)
        self.assertGreater(fit.intercept_se, 0.0)

    def test_fit_fallback(self):
        S = [1.0, 2.0, 4.0]
        fit = fit_rate(S, [2.0 / s - 0.1 for s in S], [0.01] * 3)
        self.assertTrue(fit.fallback)
        self.assertAlmostEqual(fit.intercept, 0.4)

    def test_small_ladder_record(self):
        est = estimate_pickands(2.0, S_ladder=(1.0, 2.0, 4.0), mesh=1 / 8, n_samples=400, seed=6)
        record = est.as_record()
        for key in ('alpha', 'S', 'mesh', 'n', 'h_rate', 'se', 'extrapolated', 'raw_extrapolated',
                    'fit_residual'):
            self.assertIn(key, record)
        self.assertEqual(record['S'], 4.0)
        self.assertIsNotNone(est.mesh_bias)
        self.assertIsNotNone(est.mesh_corrected)

    def test_extrapolated_carries_mesh_correction(self):
        est = estimate_pickands(1.0, S_ladder=(1.0, 2.0, 4.0), mesh=1 / 8, n_samples=400, seed=6)
        self.assertEqual(est.raw_extrapolated, est.fit.intercept)
        self.assertEqual(est.extrapolated, est.mesh_corrected)
        growth = 2.0 ** 0.5
        self.assertAlmostEqual(est.extrapolated - est.raw_extrapolated,
                               est.mesh_bias * growth / (growth - 1.0), places=12)

        plain = estimate_pickands(1.0, S_ladder=(1.0, 2.0, 4.0), mesh=1 / 8, n_samples=400,
                                  seed=6, half_mesh_check=False)
        self.assertIsNone(plain.mesh_corrected)
        self.assertEqual(plain.extrapolated, plain.raw_extrapolated)
        self.assertEqual(plain.raw_extrapolated, est.raw_extrapolated)

    #------------------------------------
    # test_classical_values
    #-------------------

    @pytest.mark.slow
    @unittest.skipUnless(RUN_SLOW, "long Monte Carlo run; set LSGP_RUN_SLOW=1")
    def test_brownian_constant(self):
        est = estimate_pickands(1.0, seed=101)
        self.assertTrue(0.85 <= est.h_rate <= 1.15, est.as_record())
        self.assertLess(abs(est.extrapolated - 1.0), 0.10, est.as_record())

    @pytest.mark.slow
    @unittest.skipUnless(RUN_SLOW, "long Monte Carlo run; set LSGP_RUN_SLOW=1")
    def test_gaussian_constant(self):
        est = estimate_pickands(2.0, seed=102)
        self.assertLess(abs(est.extrapolated - 1 / math.sqrt(math.pi)), 0.05, est.as_record())

# ------------------------ Main ------------
if __name__ == '__main__':
    unittest.main()
