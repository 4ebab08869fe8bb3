# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-08 09:18:55
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-17 12:05:41
"""
Exact Gaussian path simulation on uniform grids.

Two methods:

   o Circulant embedding (Davies-Harte) for stationary sequences.
     Fractional Gaussian noise is drawn this way, and cumulated
     into fractional Brownian motion. Stationary process specs use
     the same machinery directly.
   o Dense covariance factorization (Cholesky, with a recorded
     jitter ladder) for the general non-stationary class.

Both are wrapped as path samplers with a common draw(rng, size)
method, so the Monte Carlo estimators never care which one they
are given. All draws come from substreams of a root seed; see
common.utils.run_batches.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Optional

import numpy as np
import pandas as pd
from logging_service import LoggingService

from common.config import (DENSE_MAX_POINTS, EMBEDDING_NEG_TOL, JITTER_LADDER,
                           MAX_GRID_POINTS, MESH_GUIDANCE_FACTOR, PATH_EXPORT_COLUMNS,
                           PSD_EIGEN_TOL, STREAM_FBM, STREAM_PATHS, SYMMETRY_TOL)
from common.utils import SeedLineage, run_batches, substream
from extremes.errors import (EmbeddingError, InvalidArgumentError, ModelError,
                             NotPositiveDefiniteError)
from extremes.model import ProcessSpec, RegimeParams

# ---------------------- Grid -------------------

@dataclass(frozen=True)
class Grid:
    '''
    n equally spaced points from start to end, both included.
    A single-point grid has start == end.
    '''
    start: float
    end: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("A grid needs at least one point", {'n': self.n})
        if self.n > MAX_GRID_POINTS + 1:
            raise InvalidArgumentError(f"Grids are limited to {MAX_GRID_POINTS} intervals",
                                       {'n': self.n})
        if self.n == 1 and self.end != self.start:
            raise InvalidArgumentError("A single-point grid needs start == end",
                                       {'start': self.start, 'end': self.end})
        if self.n >= 2 and not self.end > self.start:
            raise InvalidArgumentError("Grid end must exceed start",
                                       {'start': self.start, 'end': self.end})

    @classmethod
    def from_mesh(cls, start: float, end: float, mesh: float) -> 'Grid':
        '''Grid with the given spacing; mesh must divide end - start.'''
        if not mesh > 0:
            raise InvalidArgumentError("mesh must be positive", {'mesh': mesh})
        steps = (end - start) / mesh
        n_steps = int(round(steps))
        if n_steps < 1 or abs(steps - n_steps) > 1e-9 * max(1.0, steps):
            raise InvalidArgumentError("mesh must divide the interval length",
                                       {'start': start, 'end': end, 'mesh': mesh})
        return cls(start, end, n_steps + 1)

    @classmethod
    def single(cls, t: float) -> 'Grid':
        return cls(t, t, 1)

    @property
    def mesh(self) -> float:
        return 0.0 if self.n == 1 else (self.end - self.start) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        if self.n == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.end, self.n)

    def refine(self, factor: int = 2) -> 'Grid':
        '''Nested grid: every point of self is a point of the result.'''
        if self.n == 1:
            return self
        return Grid(self.start, self.end, (self.n - 1) * factor + 1)

    def mask(self, lo: float, hi: float) -> np.ndarray:
        '''Boolean mask of the points inside [lo, hi].'''
        pts = self.points
        slack = 1e-12 * max(1.0, abs(self.end))
        return (pts >= lo - slack) & (pts <= hi + slack)

    def as_dict(self) -> dict:
        return {'start': self.start, 'end': self.end, 'n': self.n, 'mesh': self.mesh}


@dataclass
class GridPath:
    '''
    One sampled path. seed_lineage names the batch substream the path
    was drawn from, draw_index its position within that batch.
    '''
    grid: Grid
    values: np.ndarray
    seed_lineage: SeedLineage
    draw_index: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise InvalidArgumentError("Path values must match the grid",
                                       {'values': self.values.shape, 'n': self.grid.n})
        if not np.all(np.isfinite(self.values)):
            raise ModelError("Sampled path has non-finite values",
                             {'lineage': self.seed_lineage.as_dict()})


def path_supremum(path: GridPath) -> float:
    '''Largest value of the path over its grid.'''
    if path.values.size == 0:
        raise InvalidArgumentError("Path has no values")
    return float(np.max(path.values))


def mesh_guidance(grid: Grid, u: float, alpha: float, factor: float = MESH_GUIDANCE_FACTOR,
                  log: Optional[LoggingService] = None) -> Optional[str]:
    '''
    Warning text when the grid is too coarse to resolve blocks of
    length u^(-2/alpha), else None. Logged if a log is passed.
    '''
    if grid.n == 1:
        return None
    limit = factor * u ** (-2.0 / alpha)
    if grid.mesh <= limit:
        return None
    msg = (f"Grid mesh {grid.mesh:.3g} exceeds {factor:g} u^(-2/alpha) = {limit:.3g} "
           f"at u={u:g}; the grid supremum will underestimate the continuous one")
    if log is not None:
        log.warn(msg)
    return msg

# ---------------------- Circulant embedding -------------------

class CirculantEmbedding:
    '''
    Exact sampler for a stationary Gaussian sequence of length m
    with autocovariance autocov[0..m]. The sequence's covariance is
    embedded in a circulant matrix of size 2m whose first row is

        autocov[0], ..., autocov[m-1], autocov[m], autocov[m-1], ..., autocov[1]

    and whose eigenvalues are the real parts of that row's FFT.
    One complex FFT yields two independent sequences.
    '''

    def __init__(self, autocov: np.ndarray, tol: float = EMBEDDING_NEG_TOL):
        autocov = np.asarray(autocov, dtype=float)
        if autocov.ndim != 1 or autocov.size < 2:
            raise InvalidArgumentError("Need autocovariances at lags 0..m with m >= 1")
        if not np.all(np.isfinite(autocov)):
            raise ModelError("Non-finite autocovariance values")
        self.m = autocov.size - 1
        row = np.concatenate([autocov, autocov[-2:0:-1]])
        eigenvalues = np.fft.fft(row).real
        largest = float(eigenvalues.max())
        smallest = float(eigenvalues.min())
        if smallest < -tol * largest:
            raise EmbeddingError("Circulant embedding is not nonnegative definite",
                                 eigenvalue=smallest, details={'largest': largest, 'm': self.m})
        self.eigenvalues = np.clip(eigenvalues, 0.0, None)
        self._amplitude = np.sqrt(self.eigenvalues / row.size)

    @classmethod
    def from_kernel(cls, kernel, m: int, spacing: float) -> 'CirculantEmbedding':
        '''Embedding for kernel(lag) sampled at lags 0, spacing, ..., m*spacing.'''
        return cls(np.asarray(kernel(np.arange(m + 1) * spacing), dtype=float))

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        '''size independent sequences as rows of a (size, m) array.'''
        pairs = (size + 1) // 2
        noise = (rng.standard_normal((pairs, self._amplitude.size))
                 + 1j * rng.standard_normal((pairs, self._amplitude.size)))
        spectrum = np.fft.fft(self._amplitude * noise, axis=1)[:, :self.m]
        both = np.concatenate([spectrum.real, spectrum.imag], axis=0)
        return both[:size]


def fgn_autocovariance(hurst: float, m: int) -> np.ndarray:
    '''Unit-lag fractional Gaussian noise autocovariance at lags 0..m.'''
    k = np.arange(m + 1, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k ** two_h + np.abs(k - 1) ** two_h)

# ---------------------- Dense covariance -------------------

@dataclass
class CovarianceMatrix:
    '''
    Symmetric covariance with its lower Cholesky factor. jitter_applied
    is the multiple of the identity that was added before factoring.
    '''
    matrix: np.ndarray
    factor: np.ndarray
    jitter_applied: float = 0.0
    grid: Optional[Grid] = None
    label: str = field(default='covariance', compare=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def factorize(cls, matrix: np.ndarray, grid: Optional[Grid] = None,
                  label: str = 'covariance') -> 'CovarianceMatrix':
        '''
        Cholesky factor of matrix, adding the smallest jitter from
        JITTER_LADDER * (trace / n) that lets the factorization succeed.

        :raises ModelError: if the matrix is non-finite or not symmetric
        :raises NotPositiveDefiniteError: if the matrix is materially
            indefinite, or the ladder is exhausted
        '''
        log = LoggingService()
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidArgumentError("Covariance must be a square matrix", {'shape': matrix.shape})
        if not np.all(np.isfinite(matrix)):
            raise ModelError(f"Non-finite entries in {label}")
        scale = max(1.0, float(np.max(np.abs(matrix))))
        asym = float(np.max(np.abs(matrix - matrix.T)))
        if asym > SYMMETRY_TOL * scale:
            raise ModelError(f"{label} is not symmetric", {'max_asymmetry': asym})
        matrix = 0.5 * (matrix + matrix.T)
        n = matrix.shape[0]
        level = max(float(np.trace(matrix)) / n, np.finfo(float).tiny)

        try:
            return cls(matrix, np.linalg.cholesky(matrix), 0.0, grid, label)
        except np.linalg.LinAlgError:
            pass

        min_eig = float(np.linalg.eigvalsh(matrix)[0])
        if min_eig < -PSD_EIGEN_TOL * level:
            raise NotPositiveDefiniteError(f"{label} is not positive semidefinite",
                                           min_eigenvalue=min_eig, details={'n': n})
        for multiple in JITTER_LADDER:
            jitter = multiple * level
            try:
                factor = np.linalg.cholesky(matrix + jitter * np.eye(n))
            except np.linalg.LinAlgError:
                continue
            log.warn(f"Added jitter {jitter:.3g} to factor {label} (n={n})")
            return cls(matrix, factor, jitter, grid, label)
        raise NotPositiveDefiniteError(f"{label} not factorizable after largest jitter",
                                       min_eigenvalue=min_eig,
                                       details={'n': n, 'largest_jitter': JITTER_LADDER[-1] * level})


def covariance_on_grid(spec: ProcessSpec, grid: Grid) -> CovarianceMatrix:
    '''
    sigma(s) sigma(t) r(s, t) over all grid pairs, factored.

    :raises InvalidArgumentError: if the grid leaves [start, end]
    '''
    if grid.start < spec.start or grid.end > spec.end:
        raise InvalidArgumentError("Grid must lie within the process interval",
                                   {'grid': grid.as_dict(), 'start': spec.start, 'end': spec.end})
    pts = grid.points
    matrix = spec.covariance(pts[:, None], pts[None, :])
    return CovarianceMatrix.factorize(matrix, grid, label=f"covariance of '{spec.label}'")


def comparison_process_cov(kind: Literal['lower', 'upper'], nu: float, u: float,
                           p: RegimeParams, S: float, window: float, grid: Grid) -> CovarianceMatrix:
    '''
    Stationary comparison covariances in local time:

        lower:  1 - (1 - nu) a u^-2 |s - t|^(alpha + 2 b window^beta)
        upper:  1 - (1 + nu) a u^-2 |s - t|^alpha

    :param kind: 'lower' or 'upper'
    :param nu: in (0, 1)
    :param u: threshold
    :param p: supplies alpha0, a0, b, beta
    :param S: local-time horizon; the grid must lie in [0, S]
    :param window: localization window delta(u)
    :param grid: points in [0, S]
    :raises NotPositiveDefiniteError: if the kernel is not positive
        definite on this grid
    '''
    nu = float(nu)
    if not 0 < nu < 1:
        raise InvalidArgumentError("nu must lie in (0, 1)", {'nu': nu})
    if not u > 0:
        raise InvalidArgumentError("u must be positive", {'u': u})
    if not window > 0:
        raise InvalidArgumentError("window must be positive", {'window': window})
    if grid.start < 0 or grid.end > S:
        raise InvalidArgumentError("Grid must lie within [0, S]", {'grid': grid.as_dict(), 'S': S})
    if kind == 'lower':
        coef = (1.0 - nu) * p.a0
        exponent = p.alpha0 + 2.0 * p.b * window ** p.beta
        if exponent > 2:
            raise InvalidArgumentError("alpha + 2 b window^beta must not exceed 2",
                                       {'exponent': exponent})
    elif kind == 'upper':
        coef = (1.0 + nu) * p.a0
        exponent = p.alpha0
    else:
        raise InvalidArgumentError(f"Unknown comparison kind '{kind}'")
    pts = grid.points
    lag = np.abs(pts[:, None] - pts[None, :])
    matrix = 1.0 - coef * u ** -2.0 * lag ** exponent
    return CovarianceMatrix.factorize(matrix, grid, label=f"{kind} comparison covariance")

# ---------------------- Path samplers -------------------

class PathSampler:
    '''
    Draws centered Gaussian vectors on a fixed grid. Subclasses
    supply draw(), variances(), and column(k) = Cov(X, X(t_k)).
    '''
    grid: Grid

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def variances(self) -> np.ndarray:
        raise NotImplementedError

    def column(self, k: int) -> np.ndarray:
        raise NotImplementedError


class DenseSampler(PathSampler):

    def __init__(self, cov: CovarianceMatrix, grid: Optional[Grid] = None):
        self.cov = cov
        self.grid = grid or cov.grid
        if self.grid is None or self.grid.n != cov.n:
            raise InvalidArgumentError("DenseSampler needs a grid matching the covariance")

    def draw(self, rng, size):
        return rng.standard_normal((size, self.cov.n)) @ self.cov.factor.T

    def variances(self):
        return np.diag(self.cov.matrix).copy()

    def column(self, k):
        return self.cov.matrix[:, k].copy()


class StationarySampler(PathSampler):
    '''Stationary process with autocovariance kernel(lag), via embedding.'''

    def __init__(self, kernel, grid: Grid):
        if grid.n < 2:
            raise InvalidArgumentError("The embedding sampler needs at least two grid points")
        self.grid = grid
        self.kernel = kernel
        # lags 0..n give sequences of length n
        self.embedding = CirculantEmbedding.from_kernel(kernel, grid.n, grid.mesh)
        self._autocov = np.asarray(kernel(np.arange(grid.n) * grid.mesh), dtype=float)

    def draw(self, rng, size):
        return self.embedding.draw(rng, size)

    def variances(self):
        return np.full(self.grid.n, self._autocov[0])

    def column(self, k):
        return self._autocov[np.abs(np.arange(self.grid.n) - k)]


class FbmSampler(PathSampler):
    '''
    Fractional Brownian motion with Var B(t) = t^alpha on a grid
    starting at 0. alpha = 2 is the degenerate B(t) = t Z.
    '''

    def __init__(self, alpha: float, grid: Grid):
        if not 0 < alpha <= 2:
            raise InvalidArgumentError("alpha must lie in (0, 2]", {'alpha': alpha})
        if grid.start != 0 or grid.n < 2:
            raise InvalidArgumentError("fBm grids start at 0 and have at least two points",
                                       {'grid': grid.as_dict()})
        self.alpha = float(alpha)
        self.grid = grid
        self.embedding = None
        if self.alpha < 2:
            self.embedding = CirculantEmbedding(fgn_autocovariance(self.alpha / 2.0, grid.n - 1))
        self._scale = grid.mesh ** (self.alpha / 2.0)

    def draw(self, rng, size):
        if self.embedding is None:
            return rng.standard_normal((size, 1)) * self.grid.points[None, :]
        increments = self.embedding.draw(rng, size)
        paths = np.zeros((size, self.grid.n))
        np.cumsum(increments, axis=1, out=paths[:, 1:])
        paths *= self._scale
        return paths

    def variances(self):
        return self.grid.points ** self.alpha

    def column(self, k):
        t = self.grid.points
        return 0.5 * (t ** self.alpha + t[k] ** self.alpha - np.abs(t - t[k]) ** self.alpha)


def make_sampler(spec: ProcessSpec, grid: Grid, log: Optional[LoggingService] = None) -> PathSampler:
    '''
    Sampler for spec on grid. Unit-variance stationary specs go
    through circulant embedding when it is nonnegative definite;
    everything else is factored densely.
    '''
    log = log or LoggingService()
    if grid.start < spec.start or grid.end > spec.end:
        raise InvalidArgumentError("Grid must lie within the process interval",
                                   {'grid': grid.as_dict(), 'start': spec.start, 'end': spec.end})
    if spec.is_stationary and grid.n >= 2:
        try:
            return StationarySampler(spec.correlation.autocorrelation, grid)
        except EmbeddingError as e:
            if grid.n > DENSE_MAX_POINTS:
                raise
            log.warn(f"Embedding failed for '{spec.label}' ({e}); factoring densely")
    if grid.n > DENSE_MAX_POINTS:
        raise InvalidArgumentError(f"Dense factorization is limited to {DENSE_MAX_POINTS} points",
                                   {'n': grid.n})
    return DenseSampler(covariance_on_grid(spec, grid))

# ---------------------- Batched drawing -------------------

def _collect_paths(sampler: PathSampler, count: int, seed: int, stream: int,
                   n_jobs: int) -> list[GridPath]:

    def batch(rng, size, lineage):
        values = sampler.draw(rng, size)
        return [GridPath(sampler.grid, row, lineage, i) for i, row in enumerate(values)]

    if count < 1:
        raise InvalidArgumentError("count must be positive", {'count': count})
    batches = run_batches(batch, count, seed, stream, n_jobs=n_jobs)
    return [path for one_batch in batches for path in one_batch]


def fbm_path(alpha: float, grid: Grid, seed: int) -> GridPath:
    '''
    One exact fBm path with E[B(t)^2] = t^alpha: fractional Gaussian
    noise by circulant embedding, cumulated, scaled by mesh^(alpha/2).

    :param alpha: in (0, 2)
    :param grid: uniform grid starting at 0, n >= 2
    :param seed: root seed
    :raises EmbeddingError: if the embedding has a negative eigenvalue
    '''
    if not 0 < alpha < 2:
        raise InvalidArgumentError("alpha must lie in (0, 2)", {'alpha': alpha})
    sampler = FbmSampler(alpha, grid)
    lineage = SeedLineage(seed, STREAM_FBM, 0)
    return GridPath(grid, sampler.draw(substream(lineage), 1)[0], lineage, 0)


def fbm_paths(alpha: float, grid: Grid, count: int, seed: int, n_jobs: int = 1) -> list[GridPath]:
    '''count fBm paths, drawn batch-wise from the fBm stream of seed.'''
    if not 0 < alpha < 2:
        raise InvalidArgumentError("alpha must lie in (0, 2)", {'alpha': alpha})
    return _collect_paths(FbmSampler(alpha, grid), count, seed, STREAM_FBM, n_jobs)


def sample_paths(cov: CovarianceMatrix, count: int, seed: int, n_jobs: int = 1) -> list[GridPath]:
    '''count independent centered paths with covariance cov.'''
    return _collect_paths(DenseSampler(cov), count, seed, STREAM_PATHS, n_jobs)


def sample_process_paths(spec: ProcessSpec, grid: Grid, count: int, seed: int,
                         n_jobs: int = 1) -> list[GridPath]:
    '''Paths of spec on grid, by embedding when stationary, else densely.'''
    return _collect_paths(make_sampler(spec, grid), count, seed, STREAM_PATHS, n_jobs)


def export_paths(paths: Iterable[GridPath], path: str | Path) -> Path:
    '''
    Write paths in long form, one row per (path, grid point),
    with columns t, value, path_id.
    '''
    frames = []
    for path_id, one_path in enumerate(paths):
        frames.append(pd.DataFrame({'t': one_path.grid.points,
                                    'value': one_path.values,
                                    'path_id': path_id}))
    if not frames:
        raise InvalidArgumentError("No paths to export")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    pd.concat(frames, ignore_index=True)[PATH_EXPORT_COLUMNS].to_csv(out, index=False)
    return out
