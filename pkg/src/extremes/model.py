# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-06 16:25:40
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-16 09:14:52
"""
Data model of the process class: a centered Gaussian process X(t)
on [start, end] whose standardized version is alpha(t)-locally
stationary, and whose standard deviation sigma(t) has a unique
maximum 1 at t0, approached like

    1/sigma(t) = 1 + c exp(-|t - t0|^-gamma) (1 + o(1)),

while the local index behaves like

    alpha(t0 + t) = alpha0 + b |t|^beta + o(|t|^(beta + delta)).

Also here: the regime trichotomy, the localization windows
delta_1(u) and delta_2(u), and the multifractional Brownian
motion example with its conversion into a ProcessSpec.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Tuple

import numpy as np

from common.config import PROFILE_CONSISTENCY_TOL, WINDOW_Q
from extremes.errors import InvalidArgumentError, ModelError, WindowUndefinedError
from extremes.profiles import (ConstantProfile, ExpVarianceProfile, MfbmScaleProfile,
                               MfbmVarianceProfile, PowerProfile, Profile, ScaledProfile)
from extremes.specfun import mfbm_normalizer


class Regime(Enum):
    VarianceDominated = 'gamma<beta'
    Balanced = 'gamma=beta'
    IndexDominated = 'gamma>beta'


def _positive(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or not value > 0 or math.isinf(value):
        raise InvalidArgumentError(f"{name} must be positive and finite", {name: value})
    return value

# ---------------------- Regimes and windows -------------------

def classify_regime(gamma: float, beta: float) -> Regime:
    '''
    Which of the three cases of the tail formula applies. The
    comparison is exact: gamma == beta only when the two supplied
    values are identical floats.
    '''
    gamma = _positive('gamma', gamma)
    beta = _positive('beta', beta)
    if gamma < beta:
        return Regime.VarianceDominated
    if gamma == beta:
        return Regime.Balanced
    return Regime.IndexDominated


def _log_log(u: float) -> Tuple[float, float]:
    u = float(u)
    if math.isnan(u) or not u > math.e:
        raise WindowUndefinedError("Localization windows need u > e (ln ln u > 0)", {'u': u})
    ln_u = math.log(u)
    ln_ln_u = math.log(ln_u)
    if not ln_ln_u > 0:
        raise WindowUndefinedError("Localization windows need ln ln u > 0", {'u': u})
    return ln_u, ln_ln_u


def delta1(u: float, gamma: float, q: float = WINDOW_Q) -> float:
    '''
    delta_1(u) = (1 / (2 ln u - q ln ln u))^(1/gamma)

    The window inside which the supremum is decided when gamma <= beta.

    :raises WindowUndefinedError: unless u > e and 2 ln u - q ln ln u > 0
    '''
    gamma = _positive('gamma', gamma)
    q = float(q)
    if not q > 1:
        raise InvalidArgumentError("q must exceed 1", {'q': q})
    ln_u, ln_ln_u = _log_log(u)
    denom = 2.0 * ln_u - q * ln_ln_u
    if not denom > 0:
        raise WindowUndefinedError("2 ln u - q ln ln u must be positive", {'u': u, 'q': q})
    return (1.0 / denom) ** (1.0 / gamma)


def delta2(u: float, alpha0: float, beta: float) -> float:
    '''
    delta_2(u) = (alpha0^2 ln ln u / (beta ln u))^(1/beta)

    The window used when gamma > beta.

    :raises WindowUndefinedError: unless u > e
    '''
    alpha0 = _positive('alpha0', alpha0)
    beta = _positive('beta', beta)
    ln_u, ln_ln_u = _log_log(u)
    return (alpha0 ** 2 * ln_ln_u / (beta * ln_u)) ** (1.0 / beta)


def block_length(u: float, alpha: float, S: float = 1.0) -> float:
    '''Length S u^(-2/alpha) of the blocks the supremum is resolved on.'''
    return _positive('S', S) * _positive('u', u) ** (-2.0 / _positive('alpha', alpha))

# ---------------------- Profiles of the process class -------------------

@dataclass(frozen=True)
class IndexProfile:
    '''
    Local index alpha(t). alpha0 is the value at the variance
    maximizer; b, beta, delta describe the expansion around it.
    For the stationary class the expansion parameters are None.
    '''
    alpha0: float
    profile: Profile
    b: Optional[float] = None
    beta: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self):
        alpha0 = float(self.alpha0)
        # alpha0 = 2 is excluded: together with the expansion in
        # b |t|^beta it would push alpha(t) above 2 near t0.
        if not 0 < alpha0 < 2:
            raise InvalidArgumentError("alpha0 must lie in (0, 2)", {'alpha0': alpha0})
        for name in ('b', 'beta', 'delta'):
            val = getattr(self, name)
            if val is not None:
                _positive(name, val)

    @property
    def has_expansion(self) -> bool:
        return self.b is not None and self.beta is not None


@dataclass(frozen=True)
class VarianceProfile:
    '''sigma(t), with its unique maximum 1 at t0.'''
    c: float
    gamma: float
    t0: float
    profile: Profile

    def __post_init__(self):
        _positive('c', self.c)
        _positive('gamma', self.gamma)


@dataclass(frozen=True)
class LocalScale:
    '''Local scale a(t) of the correlation; a0 = a(t0).'''
    a0: float
    profile: Profile

    def __post_init__(self):
        _positive('a0', self.a0)

# ---------------------- Correlation kernels -------------------

@dataclass(frozen=True)
class PoweredExponential:
    '''Stationary r(s, t) = exp(-a |s - t|^alpha).'''
    a: float
    alpha: float
    kind = 'powered_exponential'
    stationary = True

    def __call__(self, s, t):
        h = np.abs(np.asarray(s, dtype=float) - np.asarray(t, dtype=float))
        return np.exp(-self.a * h ** self.alpha)

    def autocorrelation(self, lag):
        return np.exp(-self.a * np.abs(np.asarray(lag, dtype=float)) ** self.alpha)

    def describe(self) -> dict[str, Any]:
        return {'kind': self.kind, 'a': self.a, 'alpha': self.alpha}


@dataclass(frozen=True)
class LocalPoweredExponential:
    '''
    r(s, t) = exp(-a(m) |s - t|^alpha(m)), m = (s + t)/2.
    Satisfies the local stationarity expansion by construction.
    Positive definiteness is not guaranteed for strongly varying
    alpha(t); the sampler checks it numerically on every grid.
    '''
    index: Profile
    scale: Profile
    kind = 'local_powered_exponential'
    stationary = False

    def __call__(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        mid = 0.5 * (s + t)
        return np.exp(-np.asarray(self.scale(mid)) * np.abs(s - t) ** np.asarray(self.index(mid)))

    def describe(self) -> dict[str, Any]:
        return {'kind': self.kind}


@dataclass(frozen=True)
class MfbmCorrelation:
    '''Correlation of multifractional Brownian motion.'''
    spec: 'MfbmSpec'
    kind = 'mfbm'
    stationary = False

    def __call__(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        cov = mfbm_covariance(self.spec, s, t)
        var_s = mfbm_covariance(self.spec, s, s)
        var_t = mfbm_covariance(self.spec, t, t)
        return cov / np.sqrt(var_s * var_t)

    def describe(self) -> dict[str, Any]:
        return {'kind': self.kind}

# ---------------------- ProcessSpec -------------------

@dataclass(frozen=True)
class RegimeParams:
    '''
    The scalars that enter the tail formula. t0 is measured from the
    left end of the interval, T is the interval length, and ihat is
    1 when t0 sits on the boundary, 2 when it is interior.
    '''
    alpha0: float
    a0: float
    b: float
    beta: float
    gamma: float
    c: float
    t0: float
    T: float
    ihat: Optional[int] = None

    def __post_init__(self):
        for name in ('alpha0', 'a0', 'b', 'beta', 'gamma', 'c', 'T'):
            _positive(name, getattr(self, name))
        if not 0 <= self.t0 <= self.T:
            raise InvalidArgumentError("t0 must lie in [0, T]", {'t0': self.t0, 'T': self.T})
        expected = 1 if self.t0 in (0, self.T) else 2
        if self.ihat is None:
            object.__setattr__(self, 'ihat', expected)
        elif self.ihat != expected:
            raise InvalidArgumentError("ihat must be 1 exactly when t0 is an endpoint",
                                       {'ihat': self.ihat, 't0': self.t0, 'T': self.T})

    @property
    def regime(self) -> Regime:
        return classify_regime(self.gamma, self.beta)

    @property
    def min_exponent(self) -> float:
        return min(self.gamma, self.beta)


@dataclass(frozen=True)
class ProcessSpec:
    '''
    Full description of X(t) on [start, end]:
    Cov(X(s), X(t)) = sigma(s) sigma(t) r(s, t).

    variance is None for the constant-variance (stationary) class.
    '''
    start: float
    end: float
    index: IndexProfile
    scale: LocalScale
    correlation: Callable
    variance: Optional[VarianceProfile] = None
    label: str = field(default='process', compare=False)

    def __post_init__(self):
        if not self.end > self.start:
            raise InvalidArgumentError("Interval end must exceed start",
                                       {'start': self.start, 'end': self.end})
        anchor = self.start
        if self.variance is not None:
            t0 = self.variance.t0
            if not self.start <= t0 <= self.end:
                raise InvalidArgumentError("t0 must lie in the interval",
                                           {'t0': t0, 'start': self.start, 'end': self.end})
            anchor = t0
        alpha_at = float(self.index.profile(anchor))
        if abs(alpha_at - self.index.alpha0) > PROFILE_CONSISTENCY_TOL:
            raise ModelError("alpha profile disagrees with alpha0 at t0",
                             {'profile_value': alpha_at, 'alpha0': self.index.alpha0})
        a_at = float(self.scale.profile(anchor))
        if abs(a_at - self.scale.a0) > PROFILE_CONSISTENCY_TOL * max(1.0, abs(self.scale.a0)):
            raise ModelError("a(t) profile disagrees with a0 at t0",
                             {'profile_value': a_at, 'a0': self.scale.a0})

    @classmethod
    def stationary(cls, a0: float, alpha0: float, end: float, start: float = 0.0,
                   label: str = 'stationary') -> 'ProcessSpec':
        '''Unit-variance process with r(s, t) = exp(-a0 |s - t|^alpha0).'''
        return cls(start=start,
                   end=end,
                   index=IndexProfile(alpha0=alpha0, profile=ConstantProfile(alpha0)),
                   scale=LocalScale(a0=a0, profile=ConstantProfile(a0)),
                   correlation=PoweredExponential(a=a0, alpha=alpha0),
                   variance=None,
                   label=label)

    @property
    def horizon(self) -> float:
        return self.end - self.start

    @property
    def t0(self) -> Optional[float]:
        return None if self.variance is None else self.variance.t0

    @property
    def is_stationary(self) -> bool:
        return self.variance is None and bool(getattr(self.correlation, 'stationary', False))

    def sigma(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.variance is None:
            return np.ones_like(t)
        return np.asarray(self.variance.profile(t), dtype=float)

    def covariance(self, s, t) -> np.ndarray:
        '''sigma(s) sigma(t) r(s, t), broadcasting over s and t.'''
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        cov = self.sigma(s) * self.sigma(t) * np.asarray(self.correlation(s, t), dtype=float)
        if not np.all(np.isfinite(cov)):
            raise ModelError(f"Non-finite covariance values in spec '{self.label}'")
        return cov

    def regime_params(self) -> RegimeParams:
        '''
        Scalars for the tail formula.

        :raises ModelError: for specs outside the class of the
            formula (constant variance, or no index expansion)
        '''
        if self.variance is None or not self.index.has_expansion:
            raise ModelError(f"Spec '{self.label}' has no variance maximizer or index "
                             f"expansion; use the stationary formula instead")
        return RegimeParams(alpha0=self.index.alpha0,
                            a0=self.scale.a0,
                            b=self.index.b,
                            beta=self.index.beta,
                            gamma=self.variance.gamma,
                            c=self.variance.c,
                            t0=self.variance.t0 - self.start,
                            T=self.horizon)

    def localization_window(self, u: float, q: float = WINDOW_Q) -> Tuple[float, float]:
        '''
        [t0 - delta(u), t0 + delta(u)] clipped to the interval, with
        delta = delta_1 when gamma <= beta and delta_2 otherwise.
        '''
        delta = window_delta(self.regime_params(), u, q)
        t0 = self.variance.t0
        return max(self.start, t0 - delta), min(self.end, t0 + delta)


def window_delta(p: RegimeParams, u: float, q: float = WINDOW_Q) -> float:
    '''delta_1(u) if gamma <= beta, else delta_2(u).'''
    if p.gamma <= p.beta:
        return delta1(u, p.gamma, q)
    return delta2(u, p.alpha0, p.beta)


def synthetic_spec(alpha0: float, a0: float, b: float, beta: float, delta: float,
                   c: float, gamma: float, t0: float, end: float, start: float = 0.0,
                   label: str = 'synthetic') -> ProcessSpec:
    '''
    Spec that satisfies the assumptions exactly:
    alpha(t) = alpha0 + b |t - t0|^beta, a(t) = a0,
    1/sigma(t) = 1 + c exp(-|t - t0|^-gamma), and the local
    powered-exponential correlation.
    '''
    index = IndexProfile(alpha0=alpha0, b=b, beta=beta, delta=delta,
                         profile=PowerProfile(offset=alpha0, coef=b, center=t0, power=beta))
    scale = LocalScale(a0=a0, profile=ConstantProfile(a0))
    variance = VarianceProfile(c=c, gamma=gamma, t0=t0,
                               profile=ExpVarianceProfile(c=c, gamma=gamma, t0=t0))
    return ProcessSpec(start=start, end=end, index=index, scale=scale,
                       correlation=LocalPoweredExponential(index=index.profile, scale=scale.profile),
                       variance=variance, label=label)

# ---------------------- Multifractional Brownian motion -------------------

@dataclass(frozen=True)
class MfbmSpec:
    '''
    Multifractional Brownian motion B_H(t)(t) on [T1, T2] with
    Hurst function H(t) = H(t0) + b |t - t0|^beta + ..., observed
    through sigma(t) = 1 - exp(-|t - t0|^-gamma).
    '''
    hurst: Profile
    holder_exponent: float
    interval: Tuple[float, float]
    t0: float
    gamma: float
    b: float
    beta: float
    delta: float

    def __post_init__(self):
        t1, t2 = (float(x) for x in self.interval)
        if not 0 < t1 < t2:
            raise InvalidArgumentError("Need 0 < T1 < T2", {'interval': self.interval})
        if not t1 < self.t0 < t2:
            raise InvalidArgumentError("t0 must be interior to (T1, T2)",
                                       {'t0': self.t0, 'interval': self.interval})
        for name in ('holder_exponent', 'gamma', 'b', 'beta', 'delta'):
            _positive(name, getattr(self, name))
        probe = np.linspace(t1, t2, 257)
        h_vals = np.asarray(self.hurst(probe), dtype=float)
        upper = min(1.0, self.holder_exponent)
        if np.any(h_vals <= 0) or np.any(h_vals >= upper):
            raise InvalidArgumentError("H(t) must stay inside (0, min(1, lambda))",
                                       {'min_H': float(h_vals.min()), 'max_H': float(h_vals.max()),
                                        'bound': upper})

    @property
    def hurst0(self) -> float:
        return float(self.hurst(self.t0))


def mfbm_covariance(spec: MfbmSpec, s, t):
    '''
    E[B_H(s)(s) B_H(t)(t)] =
        1/2 D(H(s) + H(t)) [ |s|^k + |t|^k - |t - s|^k ],  k = H(s) + H(t)

    Broadcasts over s and t; returns a float for scalar input.
    '''
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise InvalidArgumentError("mfBm covariance needs s, t >= 0")
    kappa = np.asarray(spec.hurst(s)) + np.asarray(spec.hurst(t))
    cov = 0.5 * mfbm_normalizer(kappa) * (np.abs(s) ** kappa + np.abs(t) ** kappa
                                          - np.abs(t - s) ** kappa)
    cov = np.asarray(cov, dtype=float)
    return float(cov) if cov.ndim == 0 else cov


def mfbm_to_process_spec(spec: MfbmSpec) -> ProcessSpec:
    '''
    ProcessSpec of sigma(t) B_H(t)(t) / sd(B_H(t)(t)) on [T1, T2]:
    alpha(t) = 2 H(t), a(t) = 1/2 t^(-2 H(t)), c = 1, and the index
    expansion coefficient doubles (b_index = 2 b).
    '''
    t1, t2 = spec.interval
    h0 = spec.hurst0
    index = IndexProfile(alpha0=2.0 * h0, b=2.0 * spec.b, beta=spec.beta, delta=spec.delta,
                         profile=ScaledProfile(inner=spec.hurst, factor=2.0))
    scale = LocalScale(a0=0.5 * spec.t0 ** (-2.0 * h0), profile=MfbmScaleProfile(hurst=spec.hurst))
    variance = VarianceProfile(c=1.0, gamma=spec.gamma, t0=spec.t0,
                               profile=MfbmVarianceProfile(gamma=spec.gamma, t0=spec.t0))
    return ProcessSpec(start=t1, end=t2, index=index, scale=scale,
                       correlation=MfbmCorrelation(spec), variance=variance, label='mfbm')
