#!/usr/bin/env python
# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2026-01-12 15:06:58
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-18 11:20:14
"""
Run one experiment from a JSON config, and write its tables
(CSV) and a RunReport (report.json) into an output directory.
Wall-clock time goes into a separate timing.json, so that rerunning
a config with the same seed reproduces report.json byte for byte.

Usage:
    lsgp asympt   --config asympt.json
    lsgp pickands --config pickands.json --seed 7 --threads 8
    lsgp compare  --config compare.json --out results/compare

Exit codes: 0 success, 1 config error, 2 numerical or model error.
"""

import argparse
import json
import platform
import sys
import time
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Optional

import pandas as pd
from logging_service import LoggingService

from common.config import (BATCH_SIZE, PICKANDS_MESH, PICKANDS_SAMPLES, STREAM_CRUDE,
                           STREAM_FBM, STREAM_IMPORTANCE, STREAM_PATHS, STREAM_PICKANDS,
                           STREAM_SANDWICH)
from common.utils import Utils, resolve_threads
from extremes.assumptions import ValidationConfig, validate_assumptions
from extremes.asympt import mfbm_example_tail, stationary_tail, theorem1_tail
from extremes.cli.config_schema import (EXPERIMENTS, build_mfbm, build_process,
                                        build_regime, validate_config)
from extremes.cli.plotdata import emit_plotdata
from extremes.errors import ConfigError, ExtremesError
from extremes.pickands import estimate_interval_constant, estimate_pickands
from extremes.raretail import (CompareConfig, TailSimulator, compare_to_theory,
                               localization_check, sandwich_check, theory_grid)
from extremes.sampler import Grid, export_paths, sample_process_paths

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

_VERSIONED = ('locstat-extremes', 'numpy', 'scipy', 'pandas', 'joblib', 'jsonschema')

TAIL_COLUMNS = ['u', 'formula', 'value', 'log_value', 'prefactor', 'power',
                'log_factor', 'survival', 'regime_constant', 'underflow']


@dataclass
class RunReport:
    experiment: str
    config: dict
    results: dict
    versions: dict
    seed_lineage: dict
    outputs: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    def to_json(self) -> str:
        '''Everything except wall time, with sorted keys.'''
        doc = {'experiment': self.experiment,
               'config': self.config,
               'results': self.results,
               'versions': self.versions,
               'seed_lineage': self.seed_lineage,
               'outputs': self.outputs}
        return json.dumps(Utils.to_jsonable(doc), indent=2, sort_keys=True) + '\n'


def package_versions() -> dict[str, str]:
    versions = {'python': platform.python_version()}
    for package in _VERSIONED:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = 'not installed'
    return versions

# ---------------------- Class ExperimentRunner -------------------

class ExperimentRunner:
    '''
    Dispatches a validated config to the matching library call and
    writes the outputs. One instance per run.
    '''

    def __init__(self, config: dict, out_dir: Path, threads: int = 1):
        self.log = LoggingService()
        self.config = config
        self.experiment = config['experiment']
        self.params = config['params']
        self.seed = int(config['seed'])
        self.out_dir = Path(out_dir)
        self.threads = threads
        self.outputs: list[str] = []

    def run(self) -> RunReport:
        dispatch = {'asympt': self._run_asympt,
                    'pickands': self._run_pickands,
                    'tail': self._run_tail,
                    'compare': self._run_compare,
                    'validate': self._run_validate,
                    'sandwich': self._run_sandwich}
        self.out_dir.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        results, streams = dispatch[self.experiment]()
        wall_time = time.perf_counter() - start

        report = RunReport(experiment=self.experiment,
                           config=self.config,
                           results=results,
                           versions=package_versions(),
                           seed_lineage={'root': self.seed, 'batch_size': BATCH_SIZE,
                                         'streams': streams},
                           outputs=sorted(self.outputs + ['report.json']),
                           wall_time=wall_time)
        (self.out_dir / 'report.json').write_text(report.to_json())
        (self.out_dir / 'timing.json').write_text(
            json.dumps({'wall_time_seconds': wall_time, 'threads': self.threads}, indent=2) + '\n')
        self.log.info(f"Finished {self.experiment} in {wall_time:.1f}s; outputs in {self.out_dir}")
        return report

    #------------------------------------
    # _run_asympt
    #-------------------

    def _run_asympt(self):
        H_alpha = self.params['H_alpha']
        ladder = self.params['u_ladder']
        approximations = []
        if 'regime' in self.params:
            regime = build_regime(self.params['regime'])
            approximations = [theorem1_tail(regime, H_alpha, u) for u in ladder]
        else:
            spec = build_process(self.config['process'])
            mfbm = None
            if self.config['process']['kind'] == 'mfbm':
                mfbm = build_mfbm(self.config['process'])
            for u in ladder:
                if spec.variance is None:
                    approximations.append(stationary_tail(spec.horizon, spec.scale.a0,
                                                          spec.index.alpha0, H_alpha, u))
                else:
                    approximations.append(theorem1_tail(spec.regime_params(), H_alpha, u))
                if mfbm is not None:
                    approximations.append(mfbm_example_tail(mfbm, H_alpha, u))
        rows = [{'u': a.u, 'formula': a.formula, 'value': a.value, 'log_value': a.log_value,
                 **a.as_dict()['components'], 'underflow': a.underflow}
                for a in approximations]
        self._write_csv(pd.DataFrame(rows, columns=TAIL_COLUMNS), 'asympt.csv')
        return {'tails': [a.as_dict() for a in approximations]}, {}

    #------------------------------------
    # _run_pickands
    #-------------------

    def _run_pickands(self):
        prm = self.params
        common = {'method': prm.get('method', 'shifted'), 'n_jobs': self.threads}
        if 'n_samples' in prm:
            common['n_samples'] = prm['n_samples']
        if 'mesh' in prm:
            common['mesh'] = prm['mesh']

        if 'S' in prm:
            est = estimate_interval_constant(prm['alpha'], prm['S'], common.pop('mesh', PICKANDS_MESH),
                                             common.pop('n_samples', PICKANDS_SAMPLES), self.seed,
                                             left=prm.get('left', 0.0),
                                             horizon_scale=prm.get('horizon_scale', 1.0), **common)
            rows = [{'S': est.S, 'h_interval': est.h_interval, 'h_rate': est.h_rate,
                     'se': est.std_error}]
            streams = {'pickands': STREAM_PICKANDS}
        else:
            if 'S_ladder' in prm:
                common['S_ladder'] = prm['S_ladder']
            est = estimate_pickands(prm['alpha'], seed=self.seed,
                                    half_mesh_check=prm.get('half_mesh_check', True), **common)
            rows = [{'S': S, 'h_interval': rate * S, 'h_rate': rate, 'se': se}
                    for S, rate, se in zip(est.fit.horizons, est.fit.rates, est.fit.std_errors)]
            streams = {f"pickands_S={S:g}": STREAM_PICKANDS * 1000 + i
                       for i, S in enumerate(est.fit.horizons)}
        self._write_csv(pd.DataFrame(rows, columns=['S', 'h_interval', 'h_rate', 'se']), 'pickands.csv')
        return {'pickands': est.as_record()}, {**streams, 'fbm': STREAM_FBM}

    #------------------------------------
    # _run_tail
    #-------------------

    def _run_tail(self):
        prm = self.params
        spec = build_process(self.config['process'])
        u = float(prm['u'])
        if 'grid_points' in prm:
            grid = Grid(spec.start, spec.end, prm['grid_points'])
        else:
            grid = theory_grid(spec, max(u, 1.0), spec.index.alpha0, prm.get('mesh_factor', 0.1))
        region = [tuple(pair) for pair in prm['region']] if 'region' in prm else None

        simulator = TailSimulator(spec, grid, self.threads)
        if prm.get('method', 'importance') == 'importance':
            est = simulator.importance(u, prm['n'], self.seed, prm.get('tilt', 'mixture'), region)
        else:
            est = simulator.crude(u, prm['n'], self.seed, region)
        results = {'tail': est.as_dict()}
        streams = {est.method: est.stream}
        self._write_csv(pd.DataFrame([{'u': est.u, 'p_hat': est.p_hat, 'se': est.std_error,
                                       'n': est.n, 'method': est.method, 'ess': est.ess,
                                       'mesh': grid.mesh}]), 'tail.csv')

        if prm.get('localize', False):
            loc_kwargs = {'n': prm['n'], 'seed': self.seed, 'n_jobs': self.threads}
            if 'q' in prm:
                loc_kwargs['q'] = prm['q']
            if 'bound_c' in prm:
                loc_kwargs['bound_c'] = prm['bound_c']
            results['localization'] = localization_check(spec, u, **loc_kwargs).as_dict()
            streams['localization'] = STREAM_IMPORTANCE * 1000
        if 'export_paths' in prm:
            paths = sample_process_paths(spec, grid, prm['export_paths'], self.seed, self.threads)
            export_paths(paths, self.out_dir / 'paths.csv')
            self.outputs.append('paths.csv')
            streams['paths'] = STREAM_PATHS
        return results, streams

    #------------------------------------
    # _run_compare
    #-------------------

    def _run_compare(self):
        prm = self.params
        spec = build_process(self.config['process'])
        cfg_kwargs = {key: prm[key] for key in ('n', 'method', 'tilt', 'grid_points',
                                                'mesh_factor', 'confidence') if key in prm}
        cfg = CompareConfig(seed=self.seed, n_jobs=self.threads, **cfg_kwargs)
        ladder = prm.get('u_ladder', [3.0, 3.5, 4.0, 4.5, 5.0])
        table = compare_to_theory(spec, ladder, prm['H_alpha'], cfg)
        self._write_csv(table, 'comparison.csv')
        emit_plotdata(table, self.out_dir / 'plotdata.csv')
        self.outputs.append('plotdata.csv')
        base = STREAM_IMPORTANCE if cfg.method == 'importance' else STREAM_CRUDE
        streams = {f"u={u:g}": base * 1000 + i for i, u in enumerate(ladder)}
        return {'comparison': table.to_dict(orient='records')}, streams

    #------------------------------------
    # _run_validate
    #-------------------

    def _run_validate(self):
        prm = self.params
        spec = build_process(self.config['process'])
        cfg_kwargs = {}
        if 'h_ladder' in prm:
            cfg_kwargs['h_ladder'] = tuple(prm['h_ladder'])
        if 'tolerance' in prm:
            cfg_kwargs['tolerance'] = prm['tolerance']
        if 'probe_points' in prm:
            cfg_kwargs['probe_points'] = prm['probe_points']
        report = validate_assumptions(spec, ValidationConfig(**cfg_kwargs))
        self._write_csv(report.to_frame(), 'validation.csv')
        return {'validation': report.as_dict()}, {}

    #------------------------------------
    # _run_sandwich
    #-------------------

    def _run_sandwich(self):
        prm = self.params
        spec = build_process(self.config['process'])
        kwargs = {key: prm[key] for key in ('n', 'mesh', 'k_se') if key in prm}
        report = sandwich_check(spec, prm['u'], prm['nu'], prm['S'], seed=self.seed,
                                n_jobs=self.threads, **kwargs)
        return {'sandwich': report.as_dict()}, {'sandwich': STREAM_SANDWICH}

    # ---------------------- Utilities -------------------

    def _write_csv(self, table: pd.DataFrame, name: str):
        table.to_csv(self.out_dir / name, index=False)
        self.outputs.append(name)


def run(config: dict, experiment: Optional[str] = None, seed: Optional[int] = None,
        out_dir: str | Path = 'lsgp_out', threads: Optional[int] = None) -> RunReport:
    '''
    Validate config, apply the seed override, run the experiment,
    and write its outputs into out_dir.

    :raises ConfigError: for schema violations
    :raises ExtremesError: for numerical or model failures
    '''
    experiment = experiment or (config.get('experiment') if isinstance(config, dict) else None)
    if experiment is None:
        raise ConfigError("No experiment named", '$.experiment')
    if seed is not None:
        config = {**config, 'seed': int(seed)}
    config = validate_config(config, experiment)
    try:
        n_threads = resolve_threads(threads)
    except ValueError as e:
        raise ConfigError(str(e), '--threads') from e
    return ExperimentRunner(config, Path(out_dir), n_threads).run()


def load_config(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}", '$') from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config is not valid JSON: {e}", '$') from e


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog='lsgp',
        description='Extreme-value experiments for locally stationary Gaussian processes',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Evaluate tail formulas over a threshold ladder
  %(prog)s asympt --config configs/asympt.json

  # Estimate the Pickands constant for alpha=1 on 8 threads
  %(prog)s pickands --config configs/pickands.json --threads 8

  # Empirical against asymptotic tails, with a fixed seed
  %(prog)s compare --config configs/compare.json --seed 7 --out results/compare
        """
    )
    subparsers = parser.add_subparsers(dest='experiment', required=True)
    helps = {'asympt': 'Evaluate the closed-form tail approximations',
             'pickands': 'Estimate Pickands constants by Monte Carlo',
             'tail': 'Estimate one exceedance probability (optionally with localization)',
             'compare': 'Compare empirical exceedance with the asymptotic formula',
             'validate': 'Check a process spec against the model assumptions',
             'sandwich': 'Slepian comparison-process diagnostic'}
    for name in EXPERIMENTS:
        sub = subparsers.add_parser(name, help=helps[name])
        sub.add_argument('--config', '-c', required=True,
                         help='Path to the JSON experiment config')
        sub.add_argument('--seed', type=int, default=None,
                         help='Root seed; overrides the config value')
        sub.add_argument('--out', '-o', default='lsgp_out',
                         help='Output directory (default: lsgp_out)')
        sub.add_argument('--threads', '-t', type=int, default=None,
                         help='Worker threads (default: $LSGP_THREADS, else 1)')
    args = parser.parse_args(argv)

    log = LoggingService()
    try:
        config = load_config(args.config)
        run(config, args.experiment, args.seed, args.out, args.threads)
    except ConfigError as e:
        log.err(f"Config error: {e}")
        return EXIT_CONFIG
    except ExtremesError as e:
        log.err(f"{args.experiment} failed: {e}")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
