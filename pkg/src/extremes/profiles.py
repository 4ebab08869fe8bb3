# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-06 14:02:11
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-15 11:58:23
"""
Named profile vocabulary for the functional fields of a ProcessSpec:
alpha(t), sigma(t), a(t), and H(t).

Every profile is a small immutable object that is callable on
scalars or numpy arrays, and that can describe itself as a
dict in the same form make_profile() accepts. That makes
experiment configs round-trip through their echo.

    make_profile({'kind': 'power', 'offset': 1.0, 'coef': 0.5,
                  'center': 1.0, 'power': 2.0})
"""

from dataclasses import asdict, dataclass
from typing import Any, Protocol

import numpy as np

from extremes.errors import InvalidArgumentError


class Profile(Protocol):
    kind: str

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray: ...

    def describe(self) -> dict[str, Any]: ...


def _scalar_or_array(values: np.ndarray) -> float | np.ndarray:
    return float(values) if values.ndim == 0 else values


class _Described:
    '''Mixin: dict form of a dataclass profile, tagged with its kind.'''

    def describe(self) -> dict[str, Any]:
        doc = {'kind': self.kind}
        for key, val in asdict(self).items():
            doc[key] = val
        return doc


@dataclass(frozen=True)
class ConstantProfile(_Described):
    value: float
    kind = 'constant'

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(np.full_like(t, self.value, dtype=float))


@dataclass(frozen=True)
class PowerProfile(_Described):
    '''offset + coef * |t - center|^power'''
    offset: float
    coef: float
    center: float
    power: float
    kind = 'power'

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(self.offset + self.coef * np.abs(t - self.center) ** self.power)


@dataclass(frozen=True)
class ExpVarianceProfile(_Described):
    '''
    sigma(t) = 1 / (1 + c exp(-|t - t0|^-gamma)), so that
    1/sigma(t) - 1 equals c exp(-|t - t0|^-gamma) exactly.
    '''
    c: float
    gamma: float
    t0: float
    kind = 'exp_variance'

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(1.0 / (1.0 + self.c * _flat_bump(t, self.t0, self.gamma)))


@dataclass(frozen=True)
class MfbmVarianceProfile(_Described):
    '''sigma(t) = 1 - exp(-|t - t0|^-gamma), the variance profile of the mfBm example.'''
    gamma: float
    t0: float
    kind = 'mfbm_variance'

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(1.0 - _flat_bump(t, self.t0, self.gamma))


@dataclass(frozen=True)
class SineProfile(_Described):
    '''offset + amplitude * sin(frequency * t + phase)'''
    offset: float
    amplitude: float
    frequency: float = 1.0
    phase: float = 0.0
    kind = 'sine'

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(self.offset + self.amplitude * np.sin(self.frequency * t + self.phase))


@dataclass(frozen=True)
class MfbmScaleProfile:
    '''a(t) = 1/2 t^(-2 H(t)), the local scale of standardized mfBm.'''
    hurst: Any
    kind = 'mfbm_scale'

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(0.5 * t ** (-2.0 * np.asarray(self.hurst(t))))

    def describe(self) -> dict[str, Any]:
        return {'kind': self.kind, 'hurst': self.hurst.describe()}


@dataclass(frozen=True)
class ScaledProfile:
    '''factor * inner(t); used for alpha(t) = 2 H(t).'''
    inner: Any
    factor: float
    kind = 'scaled'

    def __call__(self, t):
        return _scalar_or_array(self.factor * np.asarray(self.inner(t), dtype=float))

    def describe(self) -> dict[str, Any]:
        return {'kind': self.kind, 'factor': self.factor, 'inner': self.inner.describe()}


def _flat_bump(t: np.ndarray, t0: float, gamma: float) -> np.ndarray:
    '''exp(-|t - t0|^-gamma), with the value 0 at t = t0.'''
    dist = np.abs(t - t0)
    out = np.zeros_like(dist, dtype=float)
    away = dist > 0
    out[away] = np.exp(-dist[away] ** (-gamma))
    return out


_SIMPLE_KINDS = {
    'constant': ConstantProfile,
    'power': PowerProfile,
    'exp_variance': ExpVarianceProfile,
    'mfbm_variance': MfbmVarianceProfile,
    'sine': SineProfile,
}


def make_profile(doc: dict[str, Any]) -> Profile:
    '''
    Build a profile from its dict description. The 'kind' key
    selects the profile; the remaining keys are its parameters.

    :raises InvalidArgumentError: for unknown kinds or parameters
    '''
    if not isinstance(doc, dict) or 'kind' not in doc:
        raise InvalidArgumentError("Profile description needs a 'kind'", {'doc': doc})
    params = {key: val for key, val in doc.items() if key != 'kind'}
    kind = doc['kind']
    try:
        if kind in _SIMPLE_KINDS:
            return _SIMPLE_KINDS[kind](**params)
        if kind == 'mfbm_scale':
            return MfbmScaleProfile(hurst=make_profile(params['hurst']))
        if kind == 'scaled':
            return ScaledProfile(inner=make_profile(params['inner']), factor=float(params['factor']))
    except (TypeError, KeyError) as e:
        raise InvalidArgumentError(f"Bad parameters for profile kind '{kind}': {e}", {'doc': doc})
    raise InvalidArgumentError(f"Unknown profile kind '{kind}'", {'doc': doc})
