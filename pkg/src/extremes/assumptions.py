# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-07 10:44:03
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-16 10:31:19
"""
Numerical check that a ProcessSpec belongs to the process class:

    (i)   0 < alpha(t) <= 2 on the interval
    (ii)  0 < inf a(t) <= sup a(t) < inf
    (iii) 1 - r(t, t+h) = a(t) |h|^alpha(t) (1 + o(1)), uniformly in t
    (iv)  sigma has its unique maximum 1 at t0, and
          1/sigma(t) - 1 = c exp(-|t - t0|^-gamma) (1 + o(1))
    (v)   alpha(t0 + t) - alpha0 = b |t|^beta (1 + o(|t|^delta))

The o(.) conditions can only be observed as residuals at finite
resolution. Each check therefore reports the relative residual at
every probe of a shrinking ladder, and passes when the residual at
the finest probe is within tolerance.

Usage:
    report = validate_assumptions(spec)
    if not report.passed:
        print(report.to_frame())
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import pandas as pd
from logging_service import LoggingService

from common.config import (ASSUMPTION_TOLERANCE, H_PROBE_LADDER, MAXIMUM_TOL,
                           PROBE_POINTS, PROFILE_GRID_POINTS, VARIANCE_EXPONENT_LADDER)
from extremes.errors import ModelError
from extremes.model import ProcessSpec


@dataclass(frozen=True)
class ValidationConfig:
    h_ladder: tuple[float, ...] = H_PROBE_LADDER
    tolerance: float = ASSUMPTION_TOLERANCE
    probe_points: int = PROBE_POINTS
    variance_exponents: tuple[float, ...] = VARIANCE_EXPONENT_LADDER
    grid_points: int = PROFILE_GRID_POINTS


@dataclass
class AssumptionCheck:
    '''Outcome of one assumption: residual per probe and the verdict.'''
    name: str
    passed: bool
    residuals: dict[str, float] = field(default_factory=dict)
    worst: Optional[float] = None
    message: str = ''


@dataclass
class ValidationReport:
    label: str
    checks: list[AssumptionCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> AssumptionCheck:
        for one_check in self.checks:
            if one_check.name == name:
                return one_check
        raise KeyError(f"No assumption check named '{name}'")

    def as_dict(self) -> dict[str, Any]:
        return {'label': self.label,
                'passed': self.passed,
                'checks': [{'name': c.name, 'passed': c.passed, 'worst': c.worst,
                            'residuals': c.residuals, 'message': c.message}
                           for c in self.checks]}

    def to_frame(self) -> pd.DataFrame:
        '''One row per (assumption, probe) residual.'''
        rows = []
        for one_check in self.checks:
            if not one_check.residuals:
                rows.append({'assumption': one_check.name, 'probe': None,
                             'residual': one_check.worst, 'passed': one_check.passed})
            for probe, residual in one_check.residuals.items():
                rows.append({'assumption': one_check.name, 'probe': probe,
                             'residual': residual, 'passed': one_check.passed})
        return pd.DataFrame(rows, columns=['assumption', 'probe', 'residual', 'passed'])

# ---------------------- Class AssumptionValidator -------------------

class AssumptionValidator:
    '''
    Runs the five assumption checks against one ProcessSpec. All probes
    are deterministic, so a report is reproducible from the ProcessSpec
    and the ValidationConfig alone.
    '''

    def __init__(self, spec: ProcessSpec, cfg: Optional[ValidationConfig] = None):
        self.log = LoggingService()
        self.spec = spec
        self.cfg = cfg or ValidationConfig()
        self.dense = np.linspace(spec.start, spec.end, self.cfg.grid_points)

    def run(self) -> ValidationReport:
        checks = [self.check_index_range(),
                  self.check_scale_bounds(),
                  self.check_correlation_expansion(),
                  self.check_variance(),
                  self.check_index_expansion()]
        report = ValidationReport(label=self.spec.label, checks=checks)
        for one_check in checks:
            if not one_check.passed:
                self.log.warn(f"Assumption {one_check.name} fails for '{self.spec.label}': "
                              f"{one_check.message}")
        self.log.info(f"Validated '{self.spec.label}': "
                      f"{'all assumptions pass' if report.passed else 'FAILED'}")
        return report

    #------------------------------------
    # check_index_range
    #-------------------

    def check_index_range(self) -> AssumptionCheck:
        alpha = self._finite(self.spec.index.profile(self.dense), 'alpha(t)')
        low, high = float(alpha.min()), float(alpha.max())
        passed = low > 0 and high <= 2
        return AssumptionCheck(name='i', passed=passed,
                               residuals={'min_alpha': low, 'max_alpha': high},
                               worst=max(0.0, -low, high - 2),
                               message='' if passed else f"alpha(t) ranges over [{low}, {high}]")

    #------------------------------------
    # check_scale_bounds
    #-------------------

    def check_scale_bounds(self) -> AssumptionCheck:
        scale = self._finite(self.spec.scale.profile(self.dense), 'a(t)')
        low, high = float(scale.min()), float(scale.max())
        passed = low > 0
        return AssumptionCheck(name='ii', passed=passed,
                               residuals={'inf_a': low, 'sup_a': high},
                               worst=max(0.0, -low),
                               message='' if passed else f"inf a(t) = {low} is not positive")

    #------------------------------------
    # check_correlation_expansion
    #-------------------

    def check_correlation_expansion(self) -> AssumptionCheck:
        '''
        Relative residual of 1 - r(t, t+h) against a(t) |h|^alpha(t)
        at probe_points interior locations, for each h of the ladder.
        Probes near the right end look leftward.
        '''
        spec = self.spec
        span = spec.horizon
        k = self.cfg.probe_points
        probes = spec.start + span * (np.arange(k) + 0.5) / k

        diag = self._finite(spec.correlation(probes, probes), 'r(t, t)')
        diag_err = float(np.max(np.abs(diag - 1.0)))
        if diag_err > 1e-12:
            return AssumptionCheck(name='iii', passed=False, worst=diag_err,
                                   message=f"r(t, t) deviates from 1 by {diag_err}")

        alpha = np.asarray(spec.index.profile(probes), dtype=float)
        scale = np.asarray(spec.scale.profile(probes), dtype=float)
        residuals = {}
        for h in self.cfg.h_ladder:
            h = min(h, 0.5 * span / k)
            partner = np.where(probes + h <= spec.end, probes + h, probes - h)
            r = self._finite(spec.correlation(probes, partner), 'r(s, t)')
            if np.any(np.abs(r) > 1 + 1e-12):
                return AssumptionCheck(name='iii', passed=False, worst=float(np.max(np.abs(r))),
                                       message="|r(s, t)| exceeds 1")
            expected = scale * h ** alpha
            rel = np.abs((1.0 - r) / expected - 1.0)
            residuals[f"h={h:g}"] = float(rel.max())
        worst = residuals[list(residuals)[-1]]
        passed = worst <= self.cfg.tolerance
        return AssumptionCheck(name='iii', passed=passed, residuals=residuals, worst=worst,
                               message='' if passed else
                               f"finest-probe residual {worst:.3g} above {self.cfg.tolerance}")

    #------------------------------------
    # check_variance
    #-------------------

    def check_variance(self) -> AssumptionCheck:
        spec = self.spec
        if spec.variance is None:
            sigma = self._finite(spec.sigma(self.dense), 'sigma(t)')
            worst = float(np.max(np.abs(sigma - 1.0)))
            return AssumptionCheck(name='iv', passed=worst <= MAXIMUM_TOL, worst=worst,
                                   message='constant variance')
        var = spec.variance
        t0 = var.t0
        at_t0 = float(var.profile(t0))
        if abs(at_t0 - 1.0) > MAXIMUM_TOL:
            return AssumptionCheck(name='iv', passed=False, worst=abs(at_t0 - 1.0),
                                   message=f"sigma(t0) = {at_t0}, not 1")

        grid = np.union1d(self.dense, [t0])
        sigma = self._finite(var.profile(grid), 'sigma(t)')
        if np.any(sigma > 1.0 + MAXIMUM_TOL):
            return AssumptionCheck(name='iv', passed=False, worst=float(sigma.max() - 1.0),
                                   message="sigma exceeds 1 somewhere")
        if not self._unique_maximum(grid, sigma, t0):
            return AssumptionCheck(name='iv', passed=False,
                                   message="sigma attains its maximum away from t0")

        residuals = {}
        for x in self.cfg.variance_exponents:
            tau = x ** (-1.0 / var.gamma)
            sides = [t0 + s for s in (tau, -tau) if spec.start <= t0 + s <= spec.end]
            if not sides:
                continue
            sides = np.asarray(sides)
            excess = 1.0 / np.asarray(var.profile(sides), dtype=float) - 1.0
            expected = var.c * np.exp(-x)
            residuals[f"tau={tau:g}"] = float(np.max(np.abs(excess / expected - 1.0)))
        if not residuals:
            return AssumptionCheck(name='iv', passed=False,
                                   message="no variance probe fits inside the interval")
        worst = residuals[list(residuals)[-1]]
        passed = worst <= self.cfg.tolerance
        return AssumptionCheck(name='iv', passed=passed, residuals=residuals, worst=worst,
                               message='' if passed else
                               f"variance expansion residual {worst:.3g} above {self.cfg.tolerance}")

    #------------------------------------
    # check_index_expansion
    #-------------------

    def check_index_expansion(self) -> AssumptionCheck:
        '''
        Residual of (alpha(t0 + t) - alpha0) / (b |t|^beta) - 1. Offsets
        are t = h^(1/beta) over the h ladder, which keeps b |t|^beta
        far above rounding level for every beta.
        '''
        spec = self.spec
        index = spec.index
        if spec.variance is None or not index.has_expansion:
            return AssumptionCheck(name='v', passed=True, message='not applicable')
        t0 = spec.variance.t0
        residuals = {}
        for h in self.cfg.h_ladder:
            offset = min(h ** (1.0 / index.beta), spec.horizon)
            sides = [t0 + s for s in (offset, -offset) if spec.start <= t0 + s <= spec.end]
            if not sides:
                continue
            sides = np.asarray(sides)
            alpha = self._finite(index.profile(sides), 'alpha(t)')
            rel = np.abs((alpha - index.alpha0) / (index.b * offset ** index.beta) - 1.0)
            residuals[f"t={offset:g}"] = float(rel.max())
        if not residuals:
            return AssumptionCheck(name='v', passed=False,
                                   message="no index probe fits inside the interval")
        worst = residuals[list(residuals)[-1]]
        passed = worst <= self.cfg.tolerance
        return AssumptionCheck(name='v', passed=passed, residuals=residuals, worst=worst,
                               message='' if passed else
                               f"index expansion residual {worst:.3g} above {self.cfg.tolerance}")

    # ---------------------- Utilities -------------------

    @staticmethod
    def _unique_maximum(grid: np.ndarray, sigma: np.ndarray, t0: float) -> bool:
        '''
        True if every grid point with sigma within MAXIMUM_TOL of 1
        belongs to the contiguous run of such points around t0.
        Flat variance profiles form a plateau at t0, not a second peak.
        '''
        at_max = sigma >= 1.0 - MAXIMUM_TOL
        i0 = int(np.argmin(np.abs(grid - t0)))
        lo = i0
        while lo > 0 and at_max[lo - 1]:
            lo -= 1
        hi = i0
        while hi < len(grid) - 1 and at_max[hi + 1]:
            hi += 1
        outside = at_max.copy()
        outside[lo:hi + 1] = False
        return not bool(outside.any())

    def _finite(self, values, what: str) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ModelError(f"Non-finite {what} values in spec '{self.spec.label}'")
        return values


def validate_assumptions(spec: ProcessSpec, cfg: Optional[ValidationConfig] = None) -> ValidationReport:
    '''
    Check assumptions (i) to (v) numerically.

    :param spec: the process to check
    :param cfg: probe ladders and tolerance; defaults from common.config
    :raises ModelError: if the spec yields non-finite values on a probe
    :return: per-assumption residuals and verdicts
    '''
    return AssumptionValidator(spec, cfg).run()
