# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-07 15:02:37
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-15 18:46:12
"""
Closed-form tail approximations for P(sup X(t) > u).

    stationary_tail:  T H_alpha a^(1/alpha) u^(2/alpha) Psi(u)
    theorem1_tail:    I a0^(1/alpha0) H_alpha u^(2/alpha0)
                          (ln u)^(-1/min(gamma, beta)) Psi(u) C

where I is 1 for a boundary maximizer and 2 for an interior one,
and C is the regime constant. The Pickands constant H_alpha is
always an input: either a Monte Carlo estimate or a closed form
(H_1 = 1, H_2 = 1/sqrt(pi)).

Every result keeps its factors, so comparisons can be made
factor by factor, and keeps the log of its value, which stays
finite after Psi(u) underflows.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Optional

from scipy import special

from extremes.errors import AsymptoticDomainError, InvalidArgumentError
from extremes.model import MfbmSpec, Regime, RegimeParams, classify_regime
from extremes.specfun import log_survival, regime_integral, survival_checked


@dataclass(frozen=True)
class TailComponents:
    prefactor: float        # I a^(1/alpha) H_alpha, or T a^(1/alpha) H_alpha
    power: float            # u^(2/alpha)
    log_factor: float       # (ln u)^(-1/min(gamma, beta)); 1 for the stationary formula
    survival: float         # Psi(u)
    regime_constant: float  # C; 1 for the stationary formula

    def product(self) -> float:
        return self.prefactor * self.power * self.log_factor * self.survival * self.regime_constant


@dataclass(frozen=True)
class TailApprox:
    value: float
    log_value: float
    components: TailComponents
    formula: str
    u: float
    underflow: bool = False
    regime: Optional[Regime] = None

    def as_dict(self) -> dict[str, Any]:
        return {'formula': self.formula,
                'u': self.u,
                'value': self.value,
                'log_value': self.log_value,
                'underflow': self.underflow,
                'regime': None if self.regime is None else self.regime.name,
                'components': asdict(self.components)}


def _positive(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or not value > 0 or math.isinf(value):
        raise InvalidArgumentError(f"{name} must be positive and finite", {name: value})
    return value


def _assemble(components: TailComponents, u: float, formula: str,
              regime: Optional[Regime] = None) -> TailApprox:
    surv, underflow = survival_checked(u)
    components = TailComponents(prefactor=components.prefactor,
                                power=components.power,
                                log_factor=components.log_factor,
                                survival=surv,
                                regime_constant=components.regime_constant)
    log_value = (math.log(components.prefactor) + math.log(components.power)
                 + math.log(components.log_factor) + log_survival(u)
                 + math.log(components.regime_constant))
    return TailApprox(value=components.product(), log_value=log_value,
                      components=components, formula=formula, u=u,
                      underflow=underflow, regime=regime)

# ---------------------- Stationary formula -------------------

def stationary_tail(T: float, a: float, alpha: float, H_alpha: float, u: float) -> TailApprox:
    '''
    Tail of the supremum over [0, T] of a unit-variance stationary
    process with r(t) = 1 - a |t|^alpha + o(|t|^alpha).

    :param T: interval length
    :param a: local scale of the correlation
    :param alpha: index in (0, 2]
    :param H_alpha: Pickands constant
    :param u: threshold, > 0
    :return: T H_alpha a^(1/alpha) u^(2/alpha) Psi(u) with its factors
    '''
    T = _positive('T', T)
    a = _positive('a', a)
    H_alpha = _positive('H_alpha', H_alpha)
    alpha = float(alpha)
    if not 0 < alpha <= 2:
        raise InvalidArgumentError("alpha must lie in (0, 2]", {'alpha': alpha})
    u = _positive('u', u)
    parts = TailComponents(prefactor=T * a ** (1.0 / alpha) * H_alpha,
                           power=u ** (2.0 / alpha),
                           log_factor=1.0,
                           survival=0.0,
                           regime_constant=1.0)
    return _assemble(parts, u, 'stationary')

# ---------------------- Non-stationary formula -------------------

def regime_constant(p: RegimeParams) -> float:
    '''
    gamma < beta:  2^(-1/gamma)
    gamma = beta:  integral_0^(2^(-1/gamma)) exp(-2b x^beta / alpha0^2) dx
    gamma > beta:  integral_0^inf           exp(-2b x^beta / alpha0^2) dx
    '''
    regime = classify_regime(p.gamma, p.beta)
    edge = 2.0 ** (-1.0 / p.gamma)
    if regime is Regime.VarianceDominated:
        return edge
    if regime is Regime.Balanced:
        return regime_integral(p.b, p.beta, p.alpha0, edge)
    return regime_integral(p.b, p.beta, p.alpha0, math.inf)


def _require_asymptotic(u: float) -> float:
    u = float(u)
    if math.isnan(u) or not u > math.e:
        raise AsymptoticDomainError("The non-stationary tail formula needs u > e", {'u': u})
    return u


def theorem1_tail(p: RegimeParams, H_alpha: float, u: float) -> TailApprox:
    '''
    Tail of sup X(t) over [0, T] for a process whose variance peaks
    at t0 and whose local index varies near t0.

    :param p: regime parameters, usually from ProcessSpec.regime_params()
    :param H_alpha: Pickands constant for alpha0
    :param u: threshold, > e
    :raises AsymptoticDomainError: for u <= e
    '''
    H_alpha = _positive('H_alpha', H_alpha)
    u = _require_asymptotic(u)
    parts = TailComponents(prefactor=p.ihat * p.a0 ** (1.0 / p.alpha0) * H_alpha,
                           power=u ** (2.0 / p.alpha0),
                           log_factor=math.log(u) ** (-1.0 / p.min_exponent),
                           survival=0.0,
                           regime_constant=regime_constant(p))
    return _assemble(parts, u, 'theorem1', p.regime)


def alpha_constant_limit(p: RegimeParams, H_alpha: float, u: float) -> TailApprox:
    '''
    Tail when alpha(t) is constant near t0 (b = 0). This is the
    b -> 0 limit of the balanced case and coincides with the
    gamma < beta formula whatever beta is: log factor
    (ln u)^(-1/gamma), constant 2^(-1/gamma).
    '''
    H_alpha = _positive('H_alpha', H_alpha)
    u = _require_asymptotic(u)
    parts = TailComponents(prefactor=p.ihat * p.a0 ** (1.0 / p.alpha0) * H_alpha,
                           power=u ** (2.0 / p.alpha0),
                           log_factor=math.log(u) ** (-1.0 / p.gamma),
                           survival=0.0,
                           regime_constant=2.0 ** (-1.0 / p.gamma))
    return _assemble(parts, u, 'alpha_constant', Regime.VarianceDominated)


def mfbm_example_tail(spec: MfbmSpec, H_2H: float, u: float) -> TailApprox:
    '''
    Tail of the standardized multifractional Brownian motion,
    written directly in terms of H = H(t0):

        2^(1 - 1/(2H)) (H_2H / t0) u^(1/H) (ln u)^(-1/min(gamma, beta)) Psi(u) C

    with C computed from exp(-b x^beta / H^2). Kept independent of
    theorem1_tail so the two can be checked against each other.
    '''
    H_2H = _positive('H_2H', H_2H)
    u = _require_asymptotic(u)
    hurst = spec.hurst0
    gamma, beta = spec.gamma, spec.beta
    edge = 2.0 ** (-1.0 / gamma)
    if gamma < beta:
        const = edge
    else:
        rate = spec.b / hurst ** 2
        full = rate ** (-1.0 / beta) * special.gamma(1.0 + 1.0 / beta)
        if gamma == beta:
            const = float(full * special.gammainc(1.0 / beta, rate * edge ** beta))
        else:
            const = float(full)
    parts = TailComponents(prefactor=2.0 ** (1.0 - 1.0 / (2.0 * hurst)) * H_2H / spec.t0,
                           power=u ** (1.0 / hurst),
                           log_factor=math.log(u) ** (-1.0 / min(gamma, beta)),
                           survival=0.0,
                           regime_constant=const)
    return _assemble(parts, u, 'mfbm_example', classify_regime(gamma, beta))
