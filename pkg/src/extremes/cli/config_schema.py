# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-12 13:20:47
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-17 19:02:31
"""
JSON schemas for experiment configs, and the builders that turn
a validated config into model objects.

An experiment config looks like:

    {
      "experiment": "compare",
      "seed": 17,
      "process": {"kind": "stationary", "a0": 1.0, "alpha0": 1.0, "end": 1.0},
      "params": {"u_ladder": [3.0, 3.5, 4.0], "H_alpha": 1.0, "n": 100000}
    }

Process kinds:

   stationary   unit variance, r(h) = exp(-a0 |h|^alpha0)
   synthetic    alpha(t) = alpha0 + b |t - t0|^beta, constant a0,
                1/sigma(t) = 1 + c exp(-|t - t0|^-gamma), local
                powered-exponential correlation
   mfbm         standardized multifractional Brownian motion
   custom       profiles from the named vocabulary for alpha(t),
                a(t), and optionally sigma(t)

Every object rejects unknown keys.
"""

import copy
from typing import Any

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from common.config import DEFAULT_SEED
from extremes.errors import ConfigError, ExtremesError
from extremes.model import (IndexProfile, LocalPoweredExponential, LocalScale, MfbmSpec,
                            PoweredExponential, ProcessSpec, RegimeParams, VarianceProfile,
                            mfbm_to_process_spec, synthetic_spec)
from extremes.profiles import make_profile

EXPERIMENTS = ('asympt', 'pickands', 'tail', 'compare', 'validate', 'sandwich')

_POS = {'type': 'number', 'exclusiveMinimum': 0}
_NONNEG = {'type': 'number', 'minimum': 0}
_NUM = {'type': 'number'}
_COUNT = {'type': 'integer', 'minimum': 1}


def _obj(properties: dict, required: tuple = ()) -> dict:
    return {'type': 'object', 'properties': properties,
            'required': list(required), 'additionalProperties': False}


def _profile_kind(kind: str, properties: dict, required: tuple) -> dict:
    props = {'kind': {'const': kind}}
    props.update(properties)
    return _obj(props, ('kind',) + required)


PROFILE_SCHEMA = {
    'oneOf': [
        _profile_kind('constant', {'value': _NUM}, ('value',)),
        _profile_kind('power', {'offset': _NUM, 'coef': _NUM, 'center': _NUM, 'power': _POS},
                      ('offset', 'coef', 'center', 'power')),
        _profile_kind('exp_variance', {'c': _POS, 'gamma': _POS, 't0': _NUM}, ('c', 'gamma', 't0')),
        _profile_kind('mfbm_variance', {'gamma': _POS, 't0': _NUM}, ('gamma', 't0')),
        _profile_kind('sine', {'offset': _NUM, 'amplitude': _NUM, 'frequency': _NUM, 'phase': _NUM},
                      ('offset', 'amplitude')),
        _profile_kind('mfbm_scale', {'hurst': {'$ref': '#/$defs/profile'}}, ('hurst',)),
        _profile_kind('scaled', {'factor': _NUM, 'inner': {'$ref': '#/$defs/profile'}},
                      ('factor', 'inner')),
    ]
}

_INTERVAL = {'start': _NUM, 'end': _NUM}

PROCESS_SCHEMA = {
    'oneOf': [
        _obj({'kind': {'const': 'stationary'}, 'a0': _POS, 'alpha0': _POS, **_INTERVAL,
              'label': {'type': 'string'}},
             ('kind', 'a0', 'alpha0', 'end')),
        _obj({'kind': {'const': 'synthetic'}, 'alpha0': _POS, 'a0': _POS, 'b': _POS, 'beta': _POS,
              'delta': _POS, 'c': _POS, 'gamma': _POS, 't0': _NUM, **_INTERVAL,
              'label': {'type': 'string'}},
             ('kind', 'alpha0', 'a0', 'b', 'beta', 'delta', 'c', 'gamma', 't0', 'end')),
        _obj({'kind': {'const': 'mfbm'}, 'hurst': {'$ref': '#/$defs/profile'},
              'holder_exponent': _POS,
              'interval': {'type': 'array', 'items': _POS, 'minItems': 2, 'maxItems': 2},
              't0': _POS, 'gamma': _POS, 'b': _POS, 'beta': _POS, 'delta': _POS},
             ('kind', 'hurst', 'holder_exponent', 'interval', 't0', 'gamma', 'b', 'beta', 'delta')),
        _obj({'kind': {'const': 'custom'}, **_INTERVAL, 'label': {'type': 'string'},
              'index': _obj({'alpha0': _POS, 'b': _POS, 'beta': _POS, 'delta': _POS,
                             'profile': {'$ref': '#/$defs/profile'}}, ('alpha0', 'profile')),
              'scale': _obj({'a0': _POS, 'profile': {'$ref': '#/$defs/profile'}}, ('a0', 'profile')),
              'variance': _obj({'c': _POS, 'gamma': _POS, 't0': _NUM,
                                'profile': {'$ref': '#/$defs/profile'}},
                               ('c', 'gamma', 't0', 'profile')),
              'correlation': {'enum': ['powered_exponential', 'local_powered_exponential']}},
             ('kind', 'end', 'index', 'scale', 'correlation')),
    ]
}

REGIME_SCHEMA = _obj({'alpha0': _POS, 'a0': _POS, 'b': _POS, 'beta': _POS, 'gamma': _POS,
                      'c': _POS, 't0': _NONNEG, 'T': _POS},
                     ('alpha0', 'a0', 'b', 'beta', 'gamma', 'c', 't0', 'T'))

_LADDER = {'type': 'array', 'items': _POS, 'minItems': 1}
_REGION = {'type': 'array', 'minItems': 1,
           'items': {'type': 'array', 'items': _NUM, 'minItems': 2, 'maxItems': 2}}

PARAMS_SCHEMAS = {
    'asympt': _obj({'u_ladder': _LADDER, 'H_alpha': _POS, 'regime': REGIME_SCHEMA},
                   ('u_ladder', 'H_alpha')),
    'pickands': _obj({'alpha': {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 2},
                      'S_ladder': {**_LADDER, 'minItems': 3}, 'S': _NONNEG, 'left': _NONNEG,
                      'horizon_scale': _POS, 'mesh': _POS, 'n_samples': {'type': 'integer', 'minimum': 100},
                      'method': {'enum': ['shifted', 'direct']}, 'half_mesh_check': {'type': 'boolean'}},
                     ('alpha',)),
    'tail': _obj({'u': _NUM, 'n': _COUNT, 'method': {'enum': ['crude', 'importance']},
                  'tilt': {'enum': ['mixture', 'argmax']}, 'grid_points': _COUNT,
                  'mesh_factor': _POS, 'region': _REGION, 'export_paths': _COUNT,
                  'localize': {'type': 'boolean'}, 'q': {'type': 'number', 'exclusiveMinimum': 1},
                  'bound_c': _POS},
                 ('u', 'n')),
    'compare': _obj({'u_ladder': _LADDER, 'H_alpha': _POS, 'n': _COUNT,
                     'method': {'enum': ['crude', 'importance']}, 'tilt': {'enum': ['mixture', 'argmax']},
                     'grid_points': _COUNT, 'mesh_factor': _POS,
                     'confidence': {'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1}},
                    ('H_alpha',)),
    'validate': _obj({'h_ladder': _LADDER, 'tolerance': _POS, 'probe_points': _COUNT}),
    'sandwich': _obj({'u': _POS, 'nu': {'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1},
                      'S': _POS, 'n': _COUNT, 'mesh': _POS, 'k_se': _POS},
                     ('u', 'nu', 'S')),
}

# Experiments whose params alone do not describe the process
NEEDS_PROCESS = {'tail', 'compare', 'validate', 'sandwich'}


def experiment_schema(experiment: str) -> dict:
    return {
        '$schema': 'https://json-schema.org/draft/2020-12/schema',
        '$defs': {'profile': PROFILE_SCHEMA},
        **_obj({'experiment': {'enum': list(EXPERIMENTS)},
                'seed': {'type': 'integer', 'minimum': 0},
                'label': {'type': 'string'},
                'process': PROCESS_SCHEMA,
                'params': PARAMS_SCHEMAS[experiment]},
               ('params',) + (('process',) if experiment in NEEDS_PROCESS else ())),
    }


def validate_config(doc: Any, experiment: str) -> dict:
    '''
    Check doc against the schema of the named experiment, and return
    a copy with 'experiment' and 'seed' filled in.

    :raises ConfigError: naming the JSON path of the offending field
    '''
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"Unknown experiment '{experiment}'", '$.experiment')
    if not isinstance(doc, dict):
        raise ConfigError("Config must be a JSON object", '$')
    if doc.get('experiment', experiment) != experiment:
        raise ConfigError(f"Config is for '{doc['experiment']}', not '{experiment}'", '$.experiment')
    validator = Draft202012Validator(experiment_schema(experiment))
    error = best_match(validator.iter_errors(doc))
    if error is not None:
        raise ConfigError(error.message, error.json_path)
    if experiment == 'asympt' and 'process' not in doc and 'regime' not in doc['params']:
        raise ConfigError("asympt needs either a process or params.regime", '$.params')
    config = copy.deepcopy(doc)
    config['experiment'] = experiment
    config.setdefault('seed', DEFAULT_SEED)
    return config

# ---------------------- Builders -------------------

def _wrap(path: str, build, *args):
    '''Re-raise model construction failures as config errors at path.'''
    try:
        return build(*args)
    except ExtremesError as e:
        raise ConfigError(str(e), path) from e


def build_mfbm(doc: dict) -> MfbmSpec:
    return _wrap('$.process', lambda: MfbmSpec(hurst=make_profile(doc['hurst']),
                                               holder_exponent=doc['holder_exponent'],
                                               interval=tuple(doc['interval']),
                                               t0=doc['t0'], gamma=doc['gamma'],
                                               b=doc['b'], beta=doc['beta'], delta=doc['delta']))


def build_process(doc: dict) -> ProcessSpec:
    '''ProcessSpec from a validated 'process' block.'''
    kind = doc['kind']
    start = doc.get('start', 0.0)
    if kind == 'stationary':
        return _wrap('$.process', ProcessSpec.stationary, doc['a0'], doc['alpha0'], doc['end'],
                     start, doc.get('label', 'stationary'))
    if kind == 'synthetic':
        return _wrap('$.process', synthetic_spec, doc['alpha0'], doc['a0'], doc['b'], doc['beta'],
                     doc['delta'], doc['c'], doc['gamma'], doc['t0'], doc['end'], start,
                     doc.get('label', 'synthetic'))
    if kind == 'mfbm':
        return _wrap('$.process', mfbm_to_process_spec, build_mfbm(doc))
    return _wrap('$.process', _build_custom, doc)


def _build_custom(doc: dict) -> ProcessSpec:
    idx = doc['index']
    index = IndexProfile(alpha0=idx['alpha0'], profile=make_profile(idx['profile']),
                         b=idx.get('b'), beta=idx.get('beta'), delta=idx.get('delta'))
    scale = LocalScale(a0=doc['scale']['a0'], profile=make_profile(doc['scale']['profile']))
    variance = None
    if 'variance' in doc:
        var = doc['variance']
        variance = VarianceProfile(c=var['c'], gamma=var['gamma'], t0=var['t0'],
                                   profile=make_profile(var['profile']))
    if doc['correlation'] == 'powered_exponential':
        correlation = PoweredExponential(a=scale.a0, alpha=index.alpha0)
    else:
        correlation = LocalPoweredExponential(index=index.profile, scale=scale.profile)
    return ProcessSpec(start=doc.get('start', 0.0), end=doc['end'], index=index, scale=scale,
                       correlation=correlation, variance=variance, label=doc.get('label', 'custom'))


def build_regime(doc: dict) -> RegimeParams:
    return _wrap('$.params.regime', lambda: RegimeParams(**doc))
