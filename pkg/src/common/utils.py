# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2025-11-23 08:29:37
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-16 17:41:09

import os
import time
from contextlib import contextmanager
from datetime import timedelta
from typing import Callable, NamedTuple, Optional, TypeVar

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from common.config import BATCH_SIZE, THREADS_ENV_VAR

T = TypeVar('T')

# --------------------- Context Managers ----------------

class StageTimer:
    '''
    Yielded by timed(). Loops over slow stages, such as the
    horizons of a Pickands ladder or the thresholds of a
    comparison, call step() after each stage.
    '''

    def __init__(self, label: str, log_func: Callable[[str], None]):
        self.label = label
        self.start_time = time.perf_counter()
        self.log = log_func

    def step(self, i: int, total: Optional[int] = None, every: int = 1):
        '''
        Log stage i (0-based) every 'every' stages, with the mean
        time per stage and, given total, the estimated time left.
        '''
        done = i + 1
        if done % every:
            return
        per_stage = self.elapsed / done
        parts = [f"  > {self.label}: stage {done}" + (f"/{total}" if total else ""),
                 f"{per_stage:.2f}s per stage"]
        if total:
            parts.append(f"{timedelta(seconds=round(per_stage * (total - done)))} left")
        self.log(" | ".join(parts))

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start_time

@contextmanager
def timed(label: str, log=None):
    '''
    Bracket a block with start and finish messages on log.info,
    or on stdout without a log. Yields a StageTimer.
    '''
    log_func = print if log is None else log.info
    log_func(f"Starting {label}")
    timer = StageTimer(label, log_func)
    try:
        yield timer
    finally:
        log_func(f"Finished {label} in {timedelta(seconds=round(timer.elapsed))}")

# ---------------------- Seed Lineage -------------------

class SeedLineage(NamedTuple):
    '''
    Identifies one pseudo-random draw: the root seed of the run,
    the stream (which kind of simulation), and the batch within
    that stream.
    '''
    root: int
    stream: int
    batch: int

    def as_dict(self) -> dict[str, int]:
        return {'root': int(self.root), 'stream': int(self.stream), 'batch': int(self.batch)}

def substream(lineage: SeedLineage) -> np.random.Generator:
    '''
    Independent generator for one (root, stream, batch) triple.
    The same triple always yields the same generator state, no
    matter in which order, or on which worker, batches run.
    '''
    seq = np.random.SeedSequence(entropy=int(lineage.root),
                                 spawn_key=(int(lineage.stream), int(lineage.batch)))
    return np.random.Generator(np.random.PCG64(seq))

def batch_sizes(count: int, batch_size: int = BATCH_SIZE) -> list[int]:
    '''
    Split count draws into fixed-size batches plus a remainder.
    The split depends only on count and batch_size, never on
    the number of workers.
    '''
    if count < 0:
        raise ValueError(f"Draw count must be nonnegative, not {count}")
    full, rest = divmod(count, batch_size)
    sizes = [batch_size] * full
    if rest:
        sizes.append(rest)
    return sizes

def run_batches(batch_fn: Callable[[np.random.Generator, int, SeedLineage], T],
                count: int,
                root_seed: int,
                stream: int,
                batch_size: int = BATCH_SIZE,
                n_jobs: int = 1,
                desc: Optional[str] = None,
                show_progress: bool = False) -> list[T]:
    '''
    Run batch_fn once per batch, each batch drawing from its own
    substream, and return the per-batch results in batch-index
    order. Workers are threads; numpy releases the GIL in the
    FFT and linear algebra kernels that dominate the batches.

    :param batch_fn: called as batch_fn(rng, size, lineage)
    :param count: total number of draws
    :param root_seed: root of the seed lineage
    :param stream: stream index of the seed lineage
    :param batch_size: draws per batch
    :param n_jobs: number of worker threads
    :param desc: label for the progress bar
    :param show_progress: whether to show a tqdm progress bar
    :return: list of batch results, ordered by batch index
    '''
    sizes = batch_sizes(count, batch_size)
    lineages = [SeedLineage(root_seed, stream, i) for i in range(len(sizes))]

    def one_batch(size: int, lineage: SeedLineage) -> T:
        return batch_fn(substream(lineage), size, lineage)

    runner = Parallel(n_jobs=n_jobs, prefer='threads', return_as='generator')
    results = runner(delayed(one_batch)(size, lineage)
                     for size, lineage in zip(sizes, lineages))
    return list(tqdm(results, total=len(sizes), desc=desc, disable=not show_progress))

def resolve_threads(requested: Optional[int] = None) -> int:
    '''
    Number of worker threads: the explicit request if given,
    else the environment override, else 1.
    '''
    if requested is not None:
        threads = int(requested)
    else:
        threads = int(os.environ.get(THREADS_ENV_VAR, 1))
    if threads < 1:
        raise ValueError(f"Thread count must be at least 1, not {threads}")
    return threads

# ---------------------- Class Utils -------------------

class Utils:

    @staticmethod
    def pooled_se(*std_errors: float) -> float:
        '''Standard error of a difference of independent estimates.'''
        return float(np.sqrt(np.sum(np.square(std_errors))))

    @staticmethod
    def to_jsonable(obj):
        '''
        Turn numpy scalars and arrays, tuples and nested containers
        into plain JSON types. Floats keep full repr precision, so
        re-running a computation reproduces the JSON text exactly.
        '''
        if isinstance(obj, dict):
            return {str(k): Utils.to_jsonable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [Utils.to_jsonable(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return [Utils.to_jsonable(v) for v in obj.tolist()]
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            obj = float(obj)
        if isinstance(obj, float) and not np.isfinite(obj):
            # JSON has no inf/nan literals
            return str(obj)
        return obj
