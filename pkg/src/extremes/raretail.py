# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-10 14:09:33
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-18 10:47:26
"""
Empirical exceedance probabilities P(max over grid of X > u), and
the diagnostics that hold them against the asymptotic formulas.

Estimators:

   crude       fraction of sampled paths that exceed u
   importance  paths drawn with the mean shift u Cov(X, X(t_k)) / Var X(t_k)
               toward a point t_k of largest variance, reweighted by the
               exact Gaussian likelihood ratio. With tilt='mixture' the
               shift point is drawn from all near-maximal variance points,
               with weights Psi(u / sd(t_k)); tilt='argmax' uses the single
               first maximizer.

A region restricts the supremum (and the tilt points) to a union
of sub-intervals of the grid, so the mass inside and outside a
localization window is estimated on one grid.

Usage:
    spec = ProcessSpec.stationary(a0=1.0, alpha0=1.0, end=1.0)
    grid = Grid(0.0, 1.0, 4097)
    est = importance_tail(spec, grid, u=4.0, n=100_000, seed=7)
    print(est.p_hat, est.std_error, est.ess)
"""

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
import pandas as pd
from logging_service import LoggingService
from scipy import special, stats
from scipy.special import logsumexp

from common.config import (BATCH_SIZE, COMPARISON_COLUMNS, CONFIDENCE, CRUDE_MIN_SAMPLES,
                           DEFAULT_SEED, ESS_WARN_FRACTION, IMPORTANCE_MIN_U,
                           LOCALIZATION_BOUND_C, MAX_GRID_POINTS, MAX_TILT_POINTS,
                           MESH_GUIDANCE_FACTOR, STREAM_CRUDE, STREAM_IMPORTANCE,
                           STREAM_SANDWICH, TILT_WEIGHT_FLOOR, WINDOW_Q)
from common.utils import Utils, run_batches, timed
from extremes.asympt import stationary_tail, theorem1_tail
from extremes.errors import AsymptoticDomainError, InvalidArgumentError
from extremes.model import ProcessSpec, window_delta
from extremes.sampler import (CovarianceMatrix, Grid, PathSampler, comparison_process_cov,
                              make_sampler, mesh_guidance)
from extremes.specfun import survival

Method = Literal['crude', 'importance']
Tilt = Literal['mixture', 'argmax']
Region = Sequence[tuple[float, float]]


@dataclass
class TailEstimate:
    u: float
    p_hat: float
    std_error: float
    n: int
    method: Method
    grid: Grid
    hits: int = 0
    ess: Optional[float] = None
    mean_weight: Optional[float] = None
    weight_se: Optional[float] = None
    tilt_points: Optional[int] = None
    upper_bound: Optional[float] = None
    seed: Optional[int] = None
    stream: Optional[int] = None
    warnings: list[str] = field(default_factory=list)

    @property
    def ill_tilted(self) -> bool:
        return self.ess is not None and self.ess < ESS_WARN_FRACTION * self.n

    def as_dict(self) -> dict:
        return {'u': self.u, 'p_hat': self.p_hat, 'se': self.std_error, 'n': self.n,
                'method': self.method, 'hits': self.hits, 'ess': self.ess,
                'mean_weight': self.mean_weight, 'weight_se': self.weight_se,
                'tilt_points': self.tilt_points, 'upper_bound': self.upper_bound,
                'grid': self.grid.as_dict(),
                'seed_lineage': {'root': self.seed, 'stream': self.stream},
                'warnings': list(self.warnings)}


def region_mask(grid: Grid, region: Optional[Region]) -> np.ndarray:
    '''Points of grid inside the union of the region's closed intervals; all if None.'''
    if region is None:
        return np.ones(grid.n, dtype=bool)
    mask = np.zeros(grid.n, dtype=bool)
    for lo, hi in region:
        if hi >= lo:
            mask |= grid.mask(lo, hi)
    if not mask.any():
        raise InvalidArgumentError("Region contains no grid points", {'region': list(region)})
    return mask


def clopper_pearson_upper(hits: int, n: int, confidence: float = CONFIDENCE) -> float:
    '''One-sided upper confidence bound for a binomial proportion.'''
    if hits >= n:
        return 1.0
    return float(stats.beta.ppf(confidence, hits + 1, n - hits))

# ---------------------- Class TailSimulator -------------------

class TailSimulator:
    '''
    Exceedance estimators for one (spec, grid) pair. The sampler
    (circulant or dense) is built once and shared by every threshold.
    '''

    def __init__(self, spec: ProcessSpec, grid: Grid, n_jobs: int = 1,
                 batch_size: int = BATCH_SIZE, sampler: Optional[PathSampler] = None):
        self.log = LoggingService()
        self.spec = spec
        self.grid = grid
        self.n_jobs = n_jobs
        self.batch_size = batch_size
        self.sampler = sampler or make_sampler(spec, grid, self.log)

    #------------------------------------
    # crude
    #-------------------

    def crude(self, u: float, n: int, seed: int, region: Optional[Region] = None,
              stream: int = STREAM_CRUDE) -> TailEstimate:
        '''
        Fraction of n paths whose supremum over the region exceeds u,
        with binomial standard error. With no hits at all, upper_bound
        carries a Clopper-Pearson bound.
        '''
        u = float(u)
        if math.isnan(u):
            raise InvalidArgumentError("u must be a number")
        if n < CRUDE_MIN_SAMPLES:
            raise InvalidArgumentError(f"Crude estimates need n >= {CRUDE_MIN_SAMPLES}", {'n': n})
        mask = region_mask(self.grid, region)
        sampler = self.sampler

        def batch(rng, size, lineage):
            paths = sampler.draw(rng, size)
            return int(np.count_nonzero(paths[:, mask].max(axis=1) > u))

        hits = sum(run_batches(batch, n, seed, stream, self.batch_size, self.n_jobs))
        p_hat = hits / n
        est = TailEstimate(u=u, p_hat=p_hat, std_error=math.sqrt(p_hat * (1.0 - p_hat) / n),
                           n=n, method='crude', grid=self.grid, hits=hits,
                           seed=seed, stream=stream)
        if hits == 0:
            est.upper_bound = clopper_pearson_upper(0, n)
            est.warnings.append(f"No exceedances in {n} paths; "
                                f"{CONFIDENCE:.0%} upper bound {est.upper_bound:.3g}")
        return est

    #------------------------------------
    # importance
    #-------------------

    def importance(self, u: float, n: int, seed: int, tilt: Tilt = 'mixture',
                   region: Optional[Region] = None, stream: int = STREAM_IMPORTANCE) -> TailEstimate:
        '''
        Weighted exceedance mean under the mean-shifted law.

        For tilt points k with variances v_k and mixture weights pi_k,
        a path is drawn as X + u Cov(X, X(t_k)) / v_k with k ~ pi, and
        weighted by

            1 / sum_k pi_k exp(u x_k / v_k - u^2 / (2 v_k))

        which for a single tilt point is exp(-u x* / v + u^2 / (2 v)).
        '''
        u = float(u)
        if math.isnan(u) or u < IMPORTANCE_MIN_U:
            raise InvalidArgumentError(f"Importance sampling needs u >= {IMPORTANCE_MIN_U}",
                                       {'u': u})
        if n < 2:
            raise InvalidArgumentError("Need at least two samples", {'n': n})
        if tilt not in ('mixture', 'argmax'):
            raise InvalidArgumentError(f"Unknown tilt '{tilt}'")
        mask = region_mask(self.grid, region)
        points, weights = self._tilt_points(u, mask, tilt)
        variances = self.sampler.variances()[points]
        shifts = np.stack([u * self.sampler.column(k) / variances[i] for i, k in enumerate(points)])
        log_pi = np.log(weights)
        offset = u * u / (2.0 * variances)
        sampler = self.sampler

        def batch(rng, size, lineage):
            comp = rng.choice(points.size, size=size, p=weights)
            paths = sampler.draw(rng, size) + shifts[comp]
            log_terms = log_pi[None, :] + u * paths[:, points] / variances[None, :] - offset[None, :]
            weight = np.exp(-logsumexp(log_terms, axis=1))
            hit = paths[:, mask].max(axis=1) > u
            return weight, hit

        batches = run_batches(batch, n, seed, stream, self.batch_size, self.n_jobs)
        weight = np.concatenate([w for w, _ in batches])
        hit = np.concatenate([h for _, h in batches])
        values = weight * hit

        p_hat = float(values.mean())
        std_error = float(values.std(ddof=1) / math.sqrt(n))
        ess = float(weight.sum() ** 2 / np.sum(weight ** 2))
        est = TailEstimate(u=u, p_hat=p_hat, std_error=std_error, n=n, method='importance',
                           grid=self.grid, hits=int(hit.sum()), ess=ess,
                           mean_weight=float(weight.mean()),
                           weight_se=float(weight.std(ddof=1) / math.sqrt(n)),
                           tilt_points=int(points.size), seed=seed, stream=stream)
        if p_hat > 1.0:
            est.warnings.append(f"Weighted estimate {p_hat:.4g} exceeds 1; clipped")
            est.p_hat = 1.0
        if est.ill_tilted:
            msg = f"Ill-tilted importance weights at u={u:g}: ess {ess:.1f} of n={n}"
            self.log.warn(msg)
            est.warnings.append(msg)
        if est.hits == 0:
            est.warnings.append(f"No exceedances under the tilted law at u={u:g}")
        return est

    def _tilt_points(self, u: float, mask: np.ndarray, tilt: Tilt) -> tuple[np.ndarray, np.ndarray]:
        '''Grid indices of the tilt points and their mixture weights.'''
        variances = self.sampler.variances()
        candidates = np.flatnonzero(mask & (variances > 0))
        if candidates.size == 0:
            raise InvalidArgumentError("No grid point with positive variance in the region")
        if tilt == 'argmax':
            best = candidates[np.argmax(variances[candidates])]
            return np.array([best]), np.array([1.0])
        log_w = special.log_ndtr(-u / np.sqrt(variances[candidates]))
        keep = log_w >= log_w.max() + math.log(TILT_WEIGHT_FLOOR)
        candidates, log_w = candidates[keep], log_w[keep]
        if candidates.size > MAX_TILT_POINTS:
            pick = np.unique(np.round(np.linspace(0, candidates.size - 1, MAX_TILT_POINTS)).astype(int))
            candidates, log_w = candidates[pick], log_w[pick]
        weights = np.exp(log_w - logsumexp(log_w))
        return candidates, weights / weights.sum()


def crude_tail(spec: ProcessSpec, grid: Grid, u: float, n: int, seed: int,
               region: Optional[Region] = None, n_jobs: int = 1) -> TailEstimate:
    '''Crude Monte Carlo estimate of P(max over grid of X > u).'''
    return TailSimulator(spec, grid, n_jobs).crude(u, n, seed, region)


def importance_tail(spec: ProcessSpec, grid: Grid, u: float, n: int, seed: int,
                    tilt: Tilt = 'argmax', region: Optional[Region] = None,
                    n_jobs: int = 1) -> TailEstimate:
    '''
    Importance sampling estimate of P(max over grid of X > u); u >= 2.
    By default the shift goes toward the single point of largest
    variance. tilt='mixture' spreads it over all near-maximal points,
    which suits flat variance profiles such as stationary ones.
    '''
    return TailSimulator(spec, grid, n_jobs).importance(u, n, seed, tilt, region)

# ---------------------- Theory comparison -------------------

@dataclass(frozen=True)
class CompareConfig:
    n: int = 100_000
    seed: int = DEFAULT_SEED
    method: Method = 'importance'
    tilt: Tilt = 'mixture'
    mesh_factor: float = MESH_GUIDANCE_FACTOR
    grid_points: Optional[int] = None      # fixed grid size; overrides mesh_factor
    confidence: float = CONFIDENCE
    n_jobs: int = 1


def theory_grid(spec: ProcessSpec, u: float, alpha: float, mesh_factor: float = MESH_GUIDANCE_FACTOR,
                min_points: int = 2) -> Grid:
    '''
    Uniform grid over the process interval with mesh at most
    mesh_factor * u^(-2/alpha), and with t0 on the grid whenever
    t0 divides the interval in a ratio with small denominator.
    '''
    span = spec.horizon
    steps = max(min_points - 1, math.ceil(span / (mesh_factor * u ** (-2.0 / alpha))))
    if spec.t0 is not None:
        frac = (spec.t0 - spec.start) / span
        for denom in range(1, 65):
            if abs(frac * denom - round(frac * denom)) < 1e-12:
                steps = denom * math.ceil(steps / denom)
                break
    if steps > MAX_GRID_POINTS:
        raise InvalidArgumentError(f"Guidance mesh needs {steps} steps, above {MAX_GRID_POINTS}",
                                   {'u': u, 'span': span})
    return Grid(spec.start, spec.end, steps + 1)


def theory_value(spec: ProcessSpec, H_alpha: float, u: float):
    '''Stationary formula for constant-variance specs, else the non-stationary one.'''
    if spec.variance is None:
        return stationary_tail(spec.horizon, spec.scale.a0, spec.index.alpha0, H_alpha, u)
    return theorem1_tail(spec.regime_params(), H_alpha, u)


def compare_to_theory(spec: ProcessSpec, u_ladder: Sequence[float], H_alpha: float,
                      cfg: Optional[CompareConfig] = None) -> pd.DataFrame:
    '''
    One row per threshold: empirical probability on a grid obeying
    the mesh guidance, the asymptotic value, their ratio, and the
    ratio band from the Monte Carlo error.

    :return: DataFrame with columns u, p_emp, se, p_theory, ratio,
        ratio_lo, ratio_hi, mesh, n, method
    '''
    log = LoggingService()
    cfg = cfg or CompareConfig()
    ladder = [float(u) for u in u_ladder]
    if not ladder:
        raise InvalidArgumentError("Empty threshold ladder")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidArgumentError("Thresholds must be increasing", {'u_ladder': ladder})
    if ladder[0] <= math.e:
        raise AsymptoticDomainError("Every threshold must exceed e", {'u': ladder[0]})
    z = float(stats.norm.ppf(0.5 + cfg.confidence / 2.0))
    alpha = spec.index.alpha0

    rows = []
    simulator = None
    with timed(f"comparison for '{spec.label}'", log) as timer:
        for i, u in enumerate(ladder):
            if cfg.grid_points is not None:
                grid = Grid(spec.start, spec.end, cfg.grid_points)
            else:
                grid = theory_grid(spec, u, alpha, cfg.mesh_factor)
            mesh_guidance(grid, u, alpha, cfg.mesh_factor, log)
            if simulator is None or simulator.grid != grid:
                simulator = TailSimulator(spec, grid, cfg.n_jobs)
            if cfg.method == 'importance':
                est = simulator.importance(u, cfg.n, cfg.seed, cfg.tilt,
                                           stream=STREAM_IMPORTANCE * 1000 + i)
            else:
                est = simulator.crude(u, cfg.n, cfg.seed, stream=STREAM_CRUDE * 1000 + i)
            p_theory = theory_value(spec, H_alpha, u).value
            rows.append({'u': u,
                         'p_emp': est.p_hat,
                         'se': est.std_error,
                         'p_theory': p_theory,
                         'ratio': est.p_hat / p_theory,
                         'ratio_lo': max(0.0, est.p_hat - z * est.std_error) / p_theory,
                         'ratio_hi': (est.p_hat + z * est.std_error) / p_theory,
                         'mesh': grid.mesh,
                         'n': cfg.n,
                         'method': cfg.method})
            log.info(f"  u={u:g}: p_emp={est.p_hat:.4g} p_theory={p_theory:.4g} "
                     f"ratio={rows[-1]['ratio']:.3f}")
            timer.step(i, total=len(ladder))
    return pd.DataFrame(rows, columns=COMPARISON_COLUMNS)

# ---------------------- Localization -------------------

@dataclass
class LocalizationReport:
    u: float
    q: float
    window_kind: str
    delta: float
    window: tuple[float, float]
    inner: TailEstimate
    outer: Optional[TailEstimate]
    ratio: Optional[float]
    ratio_upper: Optional[float]
    outer_upper_bound: Optional[float]
    bound_shape: float
    single_point_lower: float

    def as_dict(self) -> dict:
        return {'u': self.u, 'q': self.q, 'window_kind': self.window_kind,
                'delta': self.delta, 'window': list(self.window),
                'inner': self.inner.as_dict(),
                'outer': None if self.outer is None else self.outer.as_dict(),
                'ratio': self.ratio, 'ratio_upper': self.ratio_upper,
                'outer_upper_bound': self.outer_upper_bound,
                'bound_shape': self.bound_shape,
                'single_point_lower': self.single_point_lower}


def localization_check(spec: ProcessSpec, u: float, q: float = WINDOW_Q, n: int = 100_000,
                       seed: int = DEFAULT_SEED, bound_c: float = LOCALIZATION_BOUND_C,
                       mesh_factor: float = MESH_GUIDANCE_FACTOR, n_jobs: int = 1) -> LocalizationReport:
    '''
    Exceedance mass inside the window [t0 - delta(u), t0 + delta(u)]
    against the mass outside it, both by importance sampling on one
    grid. delta is delta_1 when gamma <= beta, else delta_2. When the
    outer run sees no exceedance at all, a crude run supplies a
    Clopper-Pearson upper bound instead of a point estimate.
    '''
    log = LoggingService()
    p = spec.regime_params()
    delta = window_delta(p, u, q)
    kind = 'delta1' if p.gamma <= p.beta else 'delta2'
    lo, hi = spec.localization_window(u, q)
    alpha = p.alpha0
    grid = theory_grid(spec, u, alpha, mesh_factor)
    simulator = TailSimulator(spec, grid, n_jobs)

    inner = simulator.importance(u, n, seed, region=[(lo, hi)], stream=STREAM_IMPORTANCE * 1000)
    half = 0.5 * grid.mesh
    outer_region = [(spec.start, lo - half), (hi + half, spec.end)]
    outer_region = [(a, b) for a, b in outer_region if b >= a and grid.mask(a, b).any()]

    outer, ratio, ratio_upper, outer_upper = None, None, None, None
    if outer_region:
        outer = simulator.importance(u, n, seed, region=outer_region,
                                     stream=STREAM_IMPORTANCE * 1000 + 1)
        if outer.hits == 0:
            crude = simulator.crude(u, max(n, CRUDE_MIN_SAMPLES), seed, region=outer_region)
            outer_upper = crude.upper_bound if crude.hits == 0 else \
                crude.p_hat + float(stats.norm.ppf(CONFIDENCE)) * crude.std_error
            ratio_upper = outer_upper / inner.p_hat if inner.p_hat > 0 else None
            log.info(f"Outer mass below resolution; upper bound {outer_upper:.3g}")
        elif inner.p_hat > 0:
            ratio = outer.p_hat / inner.p_hat
    else:
        # Window covers the whole interval
        ratio = 0.0

    bound = bound_c * spec.horizon * u ** (2.0 / alpha) * math.log(u) ** (-4.0 / (3.0 * p.beta)) \
        * survival(u)
    report = LocalizationReport(u=u, q=q, window_kind=kind, delta=delta, window=(lo, hi),
                                inner=inner, outer=outer, ratio=ratio, ratio_upper=ratio_upper,
                                outer_upper_bound=outer_upper, bound_shape=bound,
                                single_point_lower=survival(u))
    log.info(f"Localization at u={u:g}: window [{lo:.4g}, {hi:.4g}] ({kind}), "
             f"outer/inner = {ratio if ratio is not None else ratio_upper}")
    return report

# ---------------------- Slepian sandwich -------------------

@dataclass
class SandwichReport:
    u: float
    nu: float
    S: float
    delta: float
    n: int
    p_lower: float
    p_target: float
    p_upper: float
    se_lower: float
    se_target: float
    se_upper: float
    k_se: float
    ordering_holds: bool
    jitter: dict[str, float]

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _local_time_correlation(spec: ProcessSpec, u: float, grid: Grid) -> CovarianceMatrix:
    '''
    Standardized correlation of X at t0 + s u^(-2/alpha0), s on the
    grid; mirrored to t0 - s u^(-2/alpha0) if the window would leave
    the interval to the right.
    '''
    p = spec.regime_params()
    scale = u ** (-2.0 / p.alpha0)
    t0 = spec.t0
    direction = 1.0 if t0 + grid.end * scale <= spec.end else -1.0
    times = t0 + direction * grid.points * scale
    if times.min() < spec.start or times.max() > spec.end:
        raise InvalidArgumentError("Local-time window does not fit in the interval",
                                   {'u': u, 'S': grid.end})
    corr = np.asarray(spec.correlation(times[:, None], times[None, :]), dtype=float)
    return CovarianceMatrix.factorize(corr, grid, label='local-time target correlation')


def sandwich_check(spec: ProcessSpec, u: float, nu: float, S: float, n: int = 100_000,
                   seed: int = DEFAULT_SEED, mesh: Optional[float] = None, k_se: float = 3.0,
                   n_jobs: int = 1) -> SandwichReport:
    '''
    Slepian comparison in local time on [0, S]: exceedance of the
    standardized target against the lower comparison kernel
    1 - (1 - nu) a u^-2 |h|^(alpha + 2 b delta^beta) and the upper one
    1 - (1 + nu) a u^-2 |h|^alpha. All three are driven by the same
    normal draws. Larger covariance means smaller exceedance, so the
    expected ordering is p_lower <= p_target <= p_upper.
    '''
    log = LoggingService()
    p = spec.regime_params()
    delta = window_delta(p, u)
    grid = Grid.from_mesh(0.0, S, mesh if mesh is not None else S / 64.0)
    covs = {'lower': comparison_process_cov('lower', nu, u, p, S, delta, grid),
            'target': _local_time_correlation(spec, u, grid),
            'upper': comparison_process_cov('upper', nu, u, p, S, delta, grid)}
    factors = {name: cov.factor.T for name, cov in covs.items()}

    def batch(rng, size, lineage):
        noise = rng.standard_normal((size, grid.n))
        return {name: int(np.count_nonzero((noise @ f).max(axis=1) > u))
                for name, f in factors.items()}

    batches = run_batches(batch, n, seed, STREAM_SANDWICH, n_jobs=n_jobs)
    probs, ses = {}, {}
    for name in covs:
        probs[name] = sum(b[name] for b in batches) / n
        ses[name] = math.sqrt(probs[name] * (1.0 - probs[name]) / n)

    holds = (probs['lower'] <= probs['target'] + k_se * Utils.pooled_se(ses['lower'], ses['target'])
             and probs['target'] <= probs['upper'] + k_se * Utils.pooled_se(ses['target'], ses['upper']))
    if not holds:
        log.warn(f"Slepian ordering violated at u={u:g}, nu={nu:g}: {probs}")
    return SandwichReport(u=u, nu=nu, S=S, delta=delta, n=n,
                          p_lower=probs['lower'], p_target=probs['target'], p_upper=probs['upper'],
                          se_lower=ses['lower'], se_target=ses['target'], se_upper=ses['upper'],
                          k_se=k_se, ordering_holds=holds,
                          jitter={name: cov.jitter_applied for name, cov in covs.items()})
