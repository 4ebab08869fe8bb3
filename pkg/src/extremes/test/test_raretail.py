# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-15 10:07:36
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-18 11:30:12

import math
import os
import unittest

import numpy as np
import pytest
from scipy import stats

from common.config import COMPARISON_COLUMNS
from common.utils import Utils
from extremes.errors import AsymptoticDomainError, InvalidArgumentError
from extremes.model import ProcessSpec, synthetic_spec
from extremes.pickands import estimate_pickands
from extremes.raretail import (CompareConfig, TailSimulator, clopper_pearson_upper,
                               compare_to_theory, crude_tail, importance_tail,
                               localization_check, region_mask, sandwich_check, theory_grid)
from extremes.sampler import CovarianceMatrix, DenseSampler, Grid
from extremes.specfun import survival

RUN_SLOW = os.environ.get('LSGP_RUN_SLOW') == '1'


def interior_spec(gamma=1.0, beta=2.0, b=0.5):
    return synthetic_spec(alpha0=1.0, a0=1.0, b=b, beta=beta, delta=0.5,
                          c=1.0, gamma=gamma, t0=0.5, end=1.0)


class CrudeTester(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.stationary = ProcessSpec.stationary(a0=1.0, alpha0=1.0, end=1.0)
        cls.spec = interior_spec()

# --------------------- Tests ------------------

    def test_single_point(self):
        est = crude_tail(self.spec, Grid.single(0.5), u=1.0, n=20_000, seed=1)
        self.assertEqual(est.method, 'crude')
        self.assertLess(abs(est.p_hat - survival(1.0)), 3 * est.std_error)

    def test_independent_pair(self):
        # exp(-50 |h|) at h = 1 is numerically zero correlation
        spec = ProcessSpec.stationary(a0=50.0, alpha0=1.0, end=1.0)
        est = crude_tail(spec, Grid(0.0, 1.0, 2), u=1.0, n=20_000, seed=2)
        expected = 1 - (1 - survival(1.0)) ** 2
        self.assertAlmostEqual(expected, 0.29214, places=5)
        self.assertLess(abs(est.p_hat - expected), 3 * est.std_error)

    def test_certain_exceedance(self):
        est = crude_tail(self.stationary, Grid(0.0, 1.0, 8), u=-1e6, n=1000, seed=3)
        self.assertEqual(est.p_hat, 1.0)
        self.assertEqual(est.hits, 1000)

    def test_no_hits_gives_bound(self):
        est = crude_tail(self.stationary, Grid(0.0, 1.0, 8), u=9.0, n=1000, seed=3)
        self.assertEqual(est.p_hat, 0.0)
        self.assertAlmostEqual(est.upper_bound, 1 - 0.05 ** (1 / 1000), places=10)
        self.assertTrue(est.warnings)

    def test_against_multivariate_normal(self):
        grid = Grid(0.25, 0.75, 3)
        pts = grid.points
        cov = self.spec.covariance(pts[:, None], pts[None, :])
        oracle = 1 - stats.multivariate_normal(mean=np.zeros(3), cov=cov).cdf(np.ones(3))
        est = crude_tail(self.spec, grid, u=1.0, n=40_000, seed=4)
        self.assertLess(abs(est.p_hat - oracle), 3 * est.std_error + 1e-4)

    @pytest.mark.slow
    @unittest.skipUnless(RUN_SLOW, "long Monte Carlo run; set LSGP_RUN_SLOW=1")
    def test_random_covariances_against_multivariate_normal(self):
        rng = np.random.default_rng(20260119)
        for case in range(20):
            dim = int(rng.integers(1, 6))
            factor = rng.standard_normal((dim, dim + 2))
            cov = factor @ factor.T / (dim + 2) + 0.1 * np.eye(dim)
            u = float(rng.uniform(0.0, 2.0))
            grid = Grid(0.0, 1.0, dim) if dim > 1 else Grid.single(0.0)
            sampler = DenseSampler(CovarianceMatrix.factorize(cov, grid))
            simulator = TailSimulator(self.stationary, grid, sampler=sampler)
            est = simulator.crude(u, 1_000_000, seed=100 + case)

            oracle = 1.0 - stats.multivariate_normal.cdf(np.full(dim, u), mean=np.zeros(dim),
                                                         cov=cov, abseps=1e-7, releps=1e-7)
            self.assertLess(abs(est.p_hat - oracle), 3 * est.std_error,
                            f"case {case}: dim {dim}, u {u:.3f}")

    def test_monotone_in_u(self):
        simulator = TailSimulator(self.stationary, Grid(0.0, 1.0, 16))
        probs = [simulator.crude(u, 2000, seed=5).p_hat for u in (0.5, 1.0, 1.5, 2.0)]
        self.assertEqual(probs, sorted(probs, reverse=True))

    def test_subgrid_containment(self):
        simulator = TailSimulator(self.stationary, Grid(0.0, 1.0, 16))
        full = simulator.crude(1.5, 2000, seed=6)
        part = simulator.crude(1.5, 2000, seed=6, region=[(0.0, 0.4)])
        self.assertLessEqual(part.hits, full.hits)

    def test_preconditions(self):
        with self.assertRaises(InvalidArgumentError):
            crude_tail(self.stationary, Grid(0.0, 1.0, 4), u=1.0, n=999, seed=1)
        with self.assertRaises(InvalidArgumentError):
            region_mask(Grid(0.0, 1.0, 4), [(0.4, 0.5)])

    def test_clopper_pearson(self):
        self.assertEqual(clopper_pearson_upper(10, 10), 1.0)
        self.assertGreater(clopper_pearson_upper(3, 100), 0.03)


class ImportanceTester(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.stationary = ProcessSpec.stationary(a0=1.0, alpha0=1.0, end=1.0)
        cls.spec = interior_spec()

# --------------------- Tests ------------------

    def test_single_point_identity(self):
        est = importance_tail(self.spec, Grid.single(0.5), u=5.0, n=2000, seed=7)
        self.assertEqual(est.tilt_points, 1)
        self.assertLess(abs(est.p_hat - survival(5.0)), 3 * est.std_error)
        self.assertLessEqual(est.ess, est.n)

    def test_agrees_with_crude(self):
        grid = Grid(0.0, 1.0, 16)
        crude = crude_tail(self.stationary, grid, u=3.0, n=40_000, seed=8)
        for tilt in ('mixture', 'argmax'):
            imp = importance_tail(self.stationary, grid, u=3.0, n=20_000, seed=9, tilt=tilt)
            self.assertLess(abs(imp.p_hat - crude.p_hat),
                            3 * Utils.pooled_se(imp.std_error, crude.std_error), tilt)
            self.assertLess(abs(imp.mean_weight - 1.0), 3 * imp.weight_se)
            self.assertLessEqual(imp.p_hat, 1.0)

    def test_default_tilt_is_single_argmax(self):
        grid = Grid(0.0, 1.0, 16)
        default = importance_tail(self.stationary, grid, u=3.0, n=1000, seed=18)
        self.assertEqual(default.tilt_points, 1)
        explicit = importance_tail(self.stationary, grid, u=3.0, n=1000, seed=18, tilt='argmax')
        self.assertEqual(default.as_dict(), explicit.as_dict())
        mixture = importance_tail(self.stationary, grid, u=3.0, n=1000, seed=18, tilt='mixture')
        self.assertEqual(mixture.tilt_points, grid.n)

    def test_non_stationary(self):
        grid = Grid(0.0, 1.0, 33)
        crude = crude_tail(self.spec, grid, u=2.5, n=40_000, seed=10)
        imp = importance_tail(self.spec, grid, u=2.5, n=20_000, seed=11)
        self.assertLess(abs(imp.p_hat - crude.p_hat),
                        3 * Utils.pooled_se(imp.std_error, crude.std_error))

    def test_deterministic(self):
        grid = Grid(0.0, 1.0, 16)
        one = importance_tail(self.stationary, grid, u=3.0, n=1500, seed=12)
        two = importance_tail(self.stationary, grid, u=3.0, n=1500, seed=12, n_jobs=2)
        self.assertEqual(one.p_hat, two.p_hat)
        self.assertEqual(one.as_dict(), two.as_dict())

    def test_preconditions(self):
        with self.assertRaises(InvalidArgumentError):
            importance_tail(self.stationary, Grid(0.0, 1.0, 4), u=0.0, n=100, seed=1)
        with self.assertRaises(InvalidArgumentError):
            importance_tail(self.stationary, Grid(0.0, 1.0, 4), u=3.0, n=100, seed=1,
                            tilt='pathwise')


class DiagnosticsTester(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.stationary = ProcessSpec.stationary(a0=1.0, alpha0=1.0, end=1.0)
        cls.spec = interior_spec()

# --------------------- Tests ------------------

    #------------------------------------
    # test_compare_to_theory
    #-------------------

    def test_theory_grid(self):
        grid = theory_grid(self.spec, u=4.0, alpha=1.0)
        self.assertLessEqual(grid.mesh, 0.1 / 16 + 1e-15)
        self.assertTrue(np.any(np.isclose(grid.points, 0.5, atol=1e-12)))

    def test_comparison_table(self):
        cfg = CompareConfig(n=5000, seed=13, grid_points=65)
        table = compare_to_theory(self.stationary, [3.0, 3.5], 1.0, cfg)
        self.assertEqual(list(table.columns), COMPARISON_COLUMNS)
        self.assertEqual(len(table), 2)
        self.assertTrue(np.all(np.isfinite(table['ratio'])))
        self.assertTrue(np.all(table['ratio'] > 0))
        self.assertTrue(np.all(table['ratio_lo'] <= table['ratio']))
        self.assertTrue(np.all(table['ratio'] <= table['ratio_hi']))

    def test_comparison_errors(self):
        with self.assertRaises(AsymptoticDomainError):
            compare_to_theory(self.stationary, [2.0, 3.0], 1.0, CompareConfig(n=100))
        with self.assertRaises(InvalidArgumentError):
            compare_to_theory(self.stationary, [4.0, 3.0], 1.0, CompareConfig(n=100))

    @pytest.mark.slow
    @unittest.skipUnless(RUN_SLOW, "long Monte Carlo run; set LSGP_RUN_SLOW=1")
    def test_stationary_sanity(self):
        # H_1 from simulation rather than its known value
        h_one = estimate_pickands(1.0, seed=14).extrapolated
        cfg = CompareConfig(n=100_000, seed=14, grid_points=2 ** 12, method='importance')
        table = compare_to_theory(self.stationary, [4.0], h_one, cfg)
        self.assertTrue(0.7 <= table['ratio'].iloc[0] <= 1.3, (h_one, table))

    #------------------------------------
    # test_localization
    #-------------------

    def test_localization_concentrates(self):
        report = localization_check(self.spec, u=4.0, n=20_000, seed=15)
        self.assertEqual(report.window_kind, 'delta1')
        self.assertIsNotNone(report.ratio if report.ratio is not None else report.ratio_upper)
        observed = report.ratio if report.ratio is not None else report.ratio_upper
        self.assertLess(observed, 0.2)
        inner = report.inner
        self.assertGreaterEqual(inner.p_hat + 3 * inner.std_error, report.single_point_lower)
        self.assertGreater(report.bound_shape, 0.0)

    def test_window_selection(self):
        report = localization_check(interior_spec(gamma=2.0, beta=1.0), u=4.0, n=2000, seed=16)
        self.assertEqual(report.window_kind, 'delta2')
        self.assertAlmostEqual(report.delta, math.log(math.log(4)) / math.log(4), places=12)

    #------------------------------------
    # test_sandwich
    #-------------------

    def test_slepian_ordering(self):
        spec = interior_spec(gamma=1.0, beta=2.0, b=0.05)
        report = sandwich_check(spec, u=3.0, nu=0.3, S=4.0, n=20_000, seed=17)
        self.assertTrue(report.ordering_holds, report.as_dict())
        self.assertEqual(set(report.jitter), {'lower', 'target', 'upper'})
        self.assertLessEqual(report.p_lower,
                             report.p_upper + 3 * Utils.pooled_se(report.se_lower, report.se_upper))

# ------------------------ Main ------------
if __name__ == '__main__':
    unittest.main()
