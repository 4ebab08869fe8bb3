# -*- coding: utf-8 -*-
# @Author: Andreas Paepcke
# @Date:   2025-11-18 15:27:01
# @Last Modified by:   Andreas Paepcke
# @Last Modified time: 2026-01-14 10:02:37
"""Default settings for the extremes toolkit."""

# Localization windows
# Any fixed q > 1 is admissible for delta_1(u):
WINDOW_Q = 2.0

# Assumption validation
H_PROBE_LADDER = (1e-2, 1e-3, 1e-4)
ASSUMPTION_TOLERANCE = 0.05   # relative residual allowed at the smallest probe
PROBE_POINTS = 9              # interior probe locations for assumption (iii)
PROFILE_CONSISTENCY_TOL = 1e-12
VARIANCE_EXPONENT_LADDER = (8.0, 12.0, 16.0)  # values of |t-t0|^-gamma at the variance probes
PROFILE_GRID_POINTS = 2049    # dense grid for range, bounds and uniqueness checks
MAXIMUM_TOL = 1e-9            # sigma within this of 1 counts as attaining the maximum

# Special functions
SURVIVAL_UNDERFLOW_U = 38.0
MFBM_EDGE_EPS = 1e-9

# Covariance assembly and sampling
JITTER_LADDER = (1e-14, 1e-12, 1e-10)   # multiples of trace/n
PSD_EIGEN_TOL = 1e-8                    # multiples of trace/n
EMBEDDING_NEG_TOL = 1e-9                # multiples of the largest eigenvalue
SYMMETRY_TOL = 1e-12
MAX_GRID_POINTS = 2 ** 14
DENSE_MAX_POINTS = 8192                 # largest grid factorized as a dense matrix
MESH_GUIDANCE_FACTOR = 0.1              # warn when mesh > factor * u^(-2/alpha)

# Monte Carlo plumbing
BATCH_SIZE = 512
DEFAULT_SEED = 20260118
THREADS_ENV_VAR = "LSGP_THREADS"
CONFIDENCE = 0.95

# Stream indices of the seed lineage (root seed, stream, batch)
STREAM_FBM = 1
STREAM_PATHS = 2
STREAM_PICKANDS = 3
STREAM_CRUDE = 4
STREAM_IMPORTANCE = 5
STREAM_SANDWICH = 6

# Pickands constants
PICKANDS_S_LADDER = (16.0, 32.0, 64.0, 128.0)
PICKANDS_MESH = 1.0 / 64.0
PICKANDS_SAMPLES = 100_000
PICKANDS_MIN_SAMPLES = 100
PICKANDS_FIT_COND_MAX = 1e8

# Rare tails
U_LADDER = (3.0, 3.5, 4.0, 4.5, 5.0)
CRUDE_MIN_SAMPLES = 1000
IMPORTANCE_MIN_U = 2.0
ESS_WARN_FRACTION = 0.01
TILT_WEIGHT_FLOOR = 1e-3      # mixture tilt points below this relative weight are dropped
MAX_TILT_POINTS = 4096
LOCALIZATION_BOUND_C = 1.0

# Output
COMPARISON_COLUMNS = ['u', 'p_emp', 'se', 'p_theory', 'ratio',
                      'ratio_lo', 'ratio_hi', 'mesh', 'n', 'method']
PLOTDATA_COLUMNS = ['u', 'ratio', 'ratio_lo', 'ratio_hi']
PATH_EXPORT_COLUMNS = ['t', 'value', 'path_id']
