# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-05 09:40:18
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-15 11:27:50
"""
Scalar special functions used by the tail formulas:
the standard normal survival function, the incomplete gamma
function, the integrals that make up the regime constants,
and the normalizer D(x) of multifractional Brownian motion.

All functions are pure. Out-of-domain input raises an
InvalidArgumentError (or DomainError), never returns NaN.
"""

import math
from typing import Tuple

import numpy as np
from scipy import special

from common.config import MFBM_EDGE_EPS, SURVIVAL_UNDERFLOW_U
from extremes.errors import DomainError, InvalidArgumentError


def _require_real(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value):
        raise InvalidArgumentError(f"{name} must be a number, got NaN", {name: value})
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_real(name, value)
    if not value > 0 or math.isinf(value):
        raise InvalidArgumentError(f"{name} must be positive and finite", {name: value})
    return value

# ------------------- Normal survival -----------------

def survival(u: float) -> float:
    '''
    Psi(u) = P(Z > u) for standard normal Z.

    Evaluated through the complementary error function, so the
    result keeps full relative accuracy deep into the upper tail.
    Beyond u = 38 the value is subnormal, and eventually zero;
    use survival_checked() to learn whether that happened, or
    log_survival() to keep working in log space.

    :param u: threshold
    :raises InvalidArgumentError: for NaN input
    :return: upper-tail probability
    '''
    u = _require_real('u', u)
    return float(special.ndtr(-u))


def survival_checked(u: float) -> Tuple[float, bool]:
    '''
    Like survival(), but also returns a flag that is True when
    the result has left the normal floating point range.
    '''
    value = survival(u)
    return value, bool(u > SURVIVAL_UNDERFLOW_U)


def log_survival(u: float) -> float:
    '''Natural log of Psi(u); finite for every finite u.'''
    u = _require_real('u', u)
    return float(special.log_ndtr(-u))

# ------------------- Gamma family -----------------

def lower_incomplete_gamma(a: float, x: float) -> float:
    '''
    Unnormalized lower incomplete gamma function
        gamma_lower(a, x) = integral_0^x s^(a-1) e^-s ds.

    scipy's gammainc switches between the power series and the
    continued fraction of the complementary function at x ~ a,
    which keeps the relative error uniform.
    '''
    a = _require_positive('a', a)
    x = _require_real('x', x)
    if x < 0:
        raise InvalidArgumentError("x must be nonnegative", {'x': x})
    if math.isinf(x):
        return float(special.gamma(a))
    return float(special.gamma(a) * special.gammainc(a, x))


def regime_integral(b: float, beta: float, alpha: float, L: float) -> float:
    '''
    Integral_0^L exp(-(2b/alpha^2) x^beta) dx in closed form.
    With c = 2b/alpha^2 the substitution s = c x^beta gives

        c^(-1/beta) * Gamma(1 + 1/beta) * P(1/beta, c L^beta)

    where P is the regularized lower incomplete gamma function.
    L = inf yields Gamma(1 + 1/beta) c^(-1/beta).

    :param b: coefficient of the index expansion, > 0
    :param beta: exponent of the index expansion, > 0
    :param alpha: index at the variance maximizer, > 0
    :param L: upper limit, >= 0 or math.inf
    :return: value of the integral
    '''
    b = _require_positive('b', b)
    beta = _require_positive('beta', beta)
    alpha = _require_positive('alpha', alpha)
    L = _require_real('L', L)
    if L < 0:
        raise InvalidArgumentError("Upper limit L must be nonnegative", {'L': L})
    if L == 0:
        return 0.0

    c = 2.0 * b / alpha ** 2
    inv_beta = 1.0 / beta
    scale = c ** (-inv_beta) * special.gamma(1.0 + inv_beta)
    if math.isinf(L):
        return float(scale)
    return float(scale * special.gammainc(inv_beta, c * L ** beta))

# ------------------- Multifractional normalizer -----------------

def mfbm_normalizer(x: float | np.ndarray) -> float | np.ndarray:
    '''
    D(x) = 2 pi / (Gamma(x + 1) sin(pi x / 2)), the normalizer in the
    covariance of multifractional Brownian motion. Defined for x in
    (0, 2); the sine factor vanishes at 2, so arguments within 1e-9
    of 2 are rejected as well. Accepts scalars or arrays.

    :raises DomainError: if any argument lies outside (0, 2 - 1e-9)
    '''
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise InvalidArgumentError("D(x) argument is NaN")
    bad = (arr <= 0) | (arr >= 2.0 - MFBM_EDGE_EPS)
    if np.any(bad):
        offender = float(arr[bad].flat[0]) if arr.ndim else float(arr)
        raise DomainError("D(x) is defined only for x in (0, 2)", {'x': offender})
    values = 2.0 * np.pi / (special.gamma(arr + 1.0) * np.sin(np.pi * arr / 2.0))
    if values.ndim == 0:
        return float(values)
    return values
