# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-13 10:02:19
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-16 11:48:27

import math
import unittest

import numpy as np

from extremes.errors import InvalidArgumentError, ModelError, WindowUndefinedError
from extremes.model import (IndexProfile, LocalScale, MfbmSpec, ProcessSpec, Regime,
                            RegimeParams, VarianceProfile, block_length, classify_regime,
                            delta1, delta2, mfbm_covariance, mfbm_to_process_spec,
                            synthetic_spec, window_delta)
from extremes.profiles import (ConstantProfile, ExpVarianceProfile, PowerProfile,
                               ScaledProfile, SineProfile, make_profile)
from extremes.specfun import mfbm_normalizer


def quadratic_hurst_spec(gamma=1.0, beta=2.0) -> MfbmSpec:
    '''H(t) = 0.4 + 0.2 |t - 1|^2 on [0.5, 1.5], t0 = 1'''
    return MfbmSpec(hurst=PowerProfile(offset=0.4, coef=0.2, center=1.0, power=2.0),
                    holder_exponent=2.0, interval=(0.5, 1.5), t0=1.0,
                    gamma=gamma, b=0.2, beta=beta, delta=0.5)


class ModelTester(unittest.TestCase):

# --------------------- Tests ------------------

    #------------------------------------
    # test_classify_regime
    #-------------------

    def test_classify_regime(self):
        self.assertEqual(classify_regime(1, 2), Regime.VarianceDominated)
        self.assertEqual(classify_regime(2, 2), Regime.Balanced)
        self.assertEqual(classify_regime(3, 2), Regime.IndexDominated)
        # Exact comparison: no tolerance band around equality
        self.assertEqual(classify_regime(2.0 + 1e-15, 2.0), Regime.IndexDominated)
        with self.assertRaises(InvalidArgumentError):
            classify_regime(0, 1)
        with self.assertRaises(InvalidArgumentError):
            classify_regime(1, -2)

    #------------------------------------
    # test_windows
    #-------------------

    def test_delta1(self):
        u = math.exp(10)
        self.assertAlmostEqual(delta1(u, 1, 2), 1 / (20 - 2 * math.log(10)), places=12)
        self.assertAlmostEqual(delta1(u, 1, 2), 0.0649569, places=7)
        self.assertAlmostEqual(delta1(u, 2, 2), 0.2548664, places=7)
        with self.assertRaises(WindowUndefinedError):
            delta1(math.e, 1, 2)
        with self.assertRaises(WindowUndefinedError):
            delta1(2.0, 1, 2)
        with self.assertRaises(InvalidArgumentError):
            delta1(u, 1, 1.0)

    def test_delta2(self):
        u = math.exp(10)
        self.assertAlmostEqual(delta2(u, 1, 1), math.log(10) / 10, places=12)
        self.assertAlmostEqual(delta2(u, 1, 2), 0.4798526, places=7)
        self.assertAlmostEqual(delta2(math.exp(math.e), 1, 1), 1 / math.e, places=12)
        with self.assertRaises(WindowUndefinedError):
            delta2(math.e, 1, 1)

    def test_windows_shrink(self):
        ladder = [math.exp(k) for k in range(3, 41)]
        d1 = [delta1(u, 1.5) for u in ladder]
        d2 = [delta2(u, 1.2, 0.8) for u in ladder]
        self.assertTrue(all(a > b for a, b in zip(d1, d1[1:])))
        self.assertTrue(all(a > b for a, b in zip(d2, d2[1:])))
        self.assertLess(d1[-1], 0.02)

    def test_variance_window_is_narrower(self):
        # gamma <= beta: delta1 / delta2 falls toward 0
        ladder = [math.exp(k) for k in list(range(3, 41)) + [100, 300, 700]]
        for gamma, beta in [(1.0, 2.0), (1.5, 1.5)]:
            ratios = [delta1(u, gamma) / delta2(u, 1.0, beta) for u in ladder]
            self.assertTrue(all(a > b for a, b in zip(ratios, ratios[1:])), (gamma, beta))
            self.assertLess(ratios[-1], ratios[0] / 3)
        self.assertLess(delta1(math.exp(700), 1.0) / delta2(math.exp(700), 1.0, 2.0), 0.02)

    def test_window_dispatch(self):
        variance_led = RegimeParams(alpha0=1, a0=1, b=1, beta=2, gamma=1, c=1, t0=0.5, T=1)
        index_led = RegimeParams(alpha0=1, a0=1, b=1, beta=1, gamma=2, c=1, t0=0.5, T=1)
        u = math.exp(5)
        self.assertEqual(window_delta(variance_led, u), delta1(u, 1))
        self.assertEqual(window_delta(index_led, u), delta2(u, 1, 1))

    def test_block_length(self):
        self.assertAlmostEqual(block_length(4.0, 1.0, S=2.0), 2.0 / 16, places=15)
        with self.assertRaises(InvalidArgumentError):
            block_length(4.0, 0.0)

    #------------------------------------
    # test_regime_params
    #-------------------

    def test_regime_params_ihat(self):
        interior = RegimeParams(alpha0=1, a0=1, b=1, beta=1, gamma=2, c=1, t0=0.3, T=1)
        boundary = RegimeParams(alpha0=1, a0=1, b=1, beta=1, gamma=2, c=1, t0=0.0, T=1)
        right = RegimeParams(alpha0=1, a0=1, b=1, beta=1, gamma=2, c=1, t0=1.0, T=1)
        self.assertEqual((interior.ihat, boundary.ihat, right.ihat), (2, 1, 1))
        self.assertEqual(interior.min_exponent, 1)
        with self.assertRaises(InvalidArgumentError):
            RegimeParams(alpha0=1, a0=1, b=1, beta=1, gamma=2, c=1, t0=0.3, T=1, ihat=1)
        with self.assertRaises(InvalidArgumentError):
            RegimeParams(alpha0=1, a0=1, b=1, beta=1, gamma=2, c=1, t0=1.5, T=1)

    #------------------------------------
    # test_process_spec
    #-------------------

    def test_stationary_spec(self):
        spec = ProcessSpec.stationary(a0=1.0, alpha0=1.0, end=2.0)
        self.assertTrue(spec.is_stationary)
        self.assertIsNone(spec.t0)
        cov = spec.covariance(np.array([0.0, 1.0]), np.array([[0.0], [2.0]]))
        np.testing.assert_allclose(cov, [[1, math.exp(-1)], [math.exp(-2), math.exp(-1)]])
        with self.assertRaises(ModelError):
            spec.regime_params()

    def test_synthetic_spec(self):
        spec = synthetic_spec(alpha0=1.0, a0=1.0, b=0.5, beta=2.0, delta=0.5,
                              c=1.0, gamma=1.0, t0=0.5, end=1.0)
        self.assertFalse(spec.is_stationary)
        self.assertEqual(spec.sigma(0.5), 1.0)
        self.assertTrue(np.all(spec.sigma(np.linspace(0, 1, 11)) <= 1.0))
        params = spec.regime_params()
        self.assertEqual(params.ihat, 2)
        self.assertEqual(params.regime, Regime.VarianceDominated)
        lo, hi = spec.localization_window(math.exp(4))
        self.assertLess(lo, 0.5)
        self.assertGreater(hi, 0.5)
        self.assertGreaterEqual(lo, 0.0)
        self.assertLessEqual(hi, 1.0)

    def test_spec_t0_offset(self):
        spec = synthetic_spec(alpha0=1.0, a0=1.0, b=0.5, beta=2.0, delta=0.5,
                              c=1.0, gamma=1.0, t0=2.0, start=2.0, end=3.0)
        params = spec.regime_params()
        self.assertEqual(params.t0, 0.0)
        self.assertEqual(params.T, 1.0)
        self.assertEqual(params.ihat, 1)

    def test_spec_consistency_errors(self):
        with self.assertRaises(InvalidArgumentError):
            ProcessSpec.stationary(a0=1.0, alpha0=1.0, end=0.0)
        with self.assertRaises(InvalidArgumentError):
            IndexProfile(alpha0=2.0, profile=ConstantProfile(2.0))
        with self.assertRaises(InvalidArgumentError):
            synthetic_spec(alpha0=1.0, a0=1.0, b=0.5, beta=2.0, delta=0.5,
                           c=1.0, gamma=1.0, t0=1.5, end=1.0)
        # alpha profile not equal to alpha0 at t0
        with self.assertRaises(ModelError):
            ProcessSpec(start=0.0, end=1.0,
                        index=IndexProfile(alpha0=1.0, profile=ConstantProfile(1.2)),
                        scale=LocalScale(a0=1.0, profile=ConstantProfile(1.0)),
                        correlation=lambda s, t: np.ones(np.broadcast(s, t).shape))
        # Same for a(t)
        with self.assertRaises(ModelError):
            ProcessSpec(start=0.0, end=1.0,
                        index=IndexProfile(alpha0=1.0, profile=ConstantProfile(1.0)),
                        scale=LocalScale(a0=1.0, profile=ConstantProfile(0.5)),
                        correlation=lambda s, t: np.ones(np.broadcast(s, t).shape),
                        variance=VarianceProfile(c=1, gamma=1, t0=0.5,
                                                 profile=ExpVarianceProfile(1, 1, 0.5)))

    def test_nonfinite_covariance(self):
        spec = ProcessSpec(start=0.0, end=1.0,
                           index=IndexProfile(alpha0=1.0, profile=ConstantProfile(1.0)),
                           scale=LocalScale(a0=1.0, profile=ConstantProfile(1.0)),
                           correlation=lambda s, t: np.full(np.broadcast(s, t).shape, np.nan))
        with self.assertRaises(ModelError):
            spec.covariance(0.1, 0.2)

    #------------------------------------
    # test_mfbm
    #-------------------

    def test_mfbm_covariance(self):
        spec = MfbmSpec(hurst=ConstantProfile(0.5), holder_exponent=1.0, interval=(0.5, 1.5),
                        t0=1.0, gamma=1.0, b=0.1, beta=2.0, delta=0.5)
        self.assertAlmostEqual(mfbm_covariance(spec, 1.0, 1.0), 2 * math.pi, places=12)
        self.assertEqual(mfbm_covariance(spec, 0.0, 0.7), 0.0)

        const_h = MfbmSpec(hurst=ConstantProfile(0.3), holder_exponent=1.0, interval=(0.5, 1.5),
                           t0=1.0, gamma=1.0, b=0.1, beta=2.0, delta=0.5)
        for s, t in [(0.6, 1.3), (1.0, 1.0), (1.4, 0.9)]:
            fbm = 0.5 * (s ** 0.6 + t ** 0.6 - abs(t - s) ** 0.6)
            self.assertAlmostEqual(mfbm_covariance(const_h, s, t),
                                   mfbm_normalizer(0.6) * fbm, places=12)

    def test_mfbm_spec_validation(self):
        with self.assertRaises(InvalidArgumentError):
            MfbmSpec(hurst=ConstantProfile(0.5), holder_exponent=1.0, interval=(0.5, 1.5),
                     t0=1.5, gamma=1.0, b=0.1, beta=2.0, delta=0.5)
        # H must stay below the Hoelder exponent
        with self.assertRaises(InvalidArgumentError):
            MfbmSpec(hurst=ConstantProfile(0.5), holder_exponent=0.4, interval=(0.5, 1.5),
                     t0=1.0, gamma=1.0, b=0.1, beta=2.0, delta=0.5)
        with self.assertRaises(InvalidArgumentError):
            MfbmSpec(hurst=ConstantProfile(0.5), holder_exponent=1.0, interval=(0.0, 1.5),
                     t0=1.0, gamma=1.0, b=0.1, beta=2.0, delta=0.5)

    def test_mfbm_to_process_spec(self):
        spec = MfbmSpec(hurst=ConstantProfile(0.5), holder_exponent=1.0, interval=(0.5, 1.5),
                        t0=1.0, gamma=1.0, b=0.1, beta=2.0, delta=0.5)
        proc = mfbm_to_process_spec(spec)
        self.assertEqual(proc.scale.a0, 0.5)
        self.assertEqual(proc.index.alpha0, 1.0)
        self.assertEqual(proc.sigma(1.0), 1.0)

    def test_mfbm_identities(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            h0 = rng.uniform(0.1, 0.9)
            t0 = rng.uniform(0.6, 1.4)
            b = rng.uniform(0.01, 0.05)
            spec = MfbmSpec(hurst=PowerProfile(offset=h0, coef=b, center=t0, power=2.0),
                            holder_exponent=2.0, interval=(0.5, 1.5), t0=t0,
                            gamma=1.0, b=b, beta=2.0, delta=0.5)
            params = mfbm_to_process_spec(spec).regime_params()
            prefactor = params.ihat * params.a0 ** (1 / params.alpha0)
            self.assertAlmostEqual(prefactor / (2 ** (1 - 1 / (2 * h0)) / t0), 1.0, places=12)
            self.assertAlmostEqual((2 * params.b / params.alpha0 ** 2) / (b / h0 ** 2), 1.0,
                                   places=12)

    def test_mfbm_local_stationarity(self):
        proc = mfbm_to_process_spec(quadratic_hurst_spec())
        h = 1e-4
        for t in (0.7, 1.0, 1.3):
            r = float(proc.correlation(t, t + h))
            alpha = proc.index.profile(t)
            self.assertAlmostEqual((1 - r) / (0.5 * t ** (-alpha) * h ** alpha), 1.0, delta=0.05)

    #------------------------------------
    # test_profiles
    #-------------------

    def test_make_profile(self):
        prof = make_profile({'kind': 'power', 'offset': 1.0, 'coef': 0.5, 'center': 0.5, 'power': 2})
        self.assertAlmostEqual(prof(1.5), 1.5)
        self.assertIsInstance(prof(np.array([0.0, 1.0])), np.ndarray)
        nested = make_profile({'kind': 'scaled', 'factor': 2.0,
                               'inner': {'kind': 'constant', 'value': 0.25}})
        self.assertIsInstance(nested, ScaledProfile)
        self.assertEqual(nested(0.3), 0.5)
        self.assertEqual(nested.describe()['inner'], {'kind': 'constant', 'value': 0.25})
        sine = make_profile({'kind': 'sine', 'offset': 1.0, 'amplitude': 0.5})
        self.assertIsInstance(sine, SineProfile)
        with self.assertRaises(InvalidArgumentError):
            make_profile({'kind': 'wavelet'})
        with self.assertRaises(InvalidArgumentError):
            make_profile({'kind': 'constant', 'level': 1})
        with self.assertRaises(InvalidArgumentError):
            make_profile({'value': 1})

    def test_exp_variance_profile(self):
        prof = ExpVarianceProfile(c=2.0, gamma=1.5, t0=0.3)
        self.assertEqual(prof(0.3), 1.0)
        t = 0.3 + 0.2
        self.assertAlmostEqual(1 / prof(t) - 1, 2.0 * math.exp(-(0.2 ** -1.5)), places=14)

# ------------------------ Main ------------
if __name__ == '__main__':
    unittest.main()
