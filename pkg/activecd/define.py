# -*- coding: utf-8 -*-

"""
This module defines the global constants and the named experiment presets.
"""

import math


# Pathloss model, distances in kilometers
PATHLOSS_CONST_DB = -128.1
PATHLOSS_SLOPE = 37.6
CELL_RADIUS_KM = 1.0
MIN_DISTANCE_KM = 0.035

TX_POWER_DBM = 40.0
NOISE_POWER_DBM = -99.0

# Dense refactorization period of the cached inverse covariance
REFACTOR_PERIOD = 500

# Smallest admissible 1 + delta * c of a rank-one update
SINGULARITY_EPS = 1e-12

# Bandit defaults
DEFAULT_EPSILON = 0.6
DEFAULT_NUM_ARMS = 10
DEFAULT_KAPPA_MAX = 1.0

# Stopping rule defaults
DEFAULT_REL_TOL = 1e-6
DEFAULT_MAX_ITERS = 1500

# Quantizer defaults
DEFAULT_ADC_STEP = 0.5
FORMULA_STANDARD = 'standard_bussgang'
FORMULA_LITERAL = 'paper_literal'
FORMULA_MODES = (FORMULA_STANDARD, FORMULA_LITERAL)

# Reference run used as suboptimality floor
REFERENCE_ITERS_PER_COORD = 50
REFERENCE_REL_TOL = 1e-12

POLICY_NAMES = ('random', 'bernoulli', 'thompson', 'greedy')

STREAM_NAMES = ('sequences', 'activity', 'channels', 'noise',
                'placement', 'policy', 'reference')

EXIT_OK = 0
EXIT_SPEC_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

SPEC_SCHEMA_VERSION = '1.0'
TRACE_SCHEMA = ('activecd-trace', '1.0')
PROBE_SCHEMA = ('activecd-probe', '1.0')
AGGREGATE_SCHEMA = ('activecd-aggregate', '1.0')
FIGURE_SCHEMA = ('activecd-figure', '1.0')

TRACE_COLUMNS = ('t', 'k', 'delta', 'reward', 'F', 'greedy', 'arm', 'nu',
                 'elapsed_s')
PROBE_COLUMNS = ('t', 'elapsed_s', 'p_md')
AGGREGATE_COLUMNS = ('policy', 'adc_bits', 'seed', 'status', 'final_F',
                     'iterations', 'reward_scans', 'p_md', 'p_fa',
                     'stop_reason', 'config_digest')
TIMING_COLUMNS = ('policy', 'adc_bits', 'seed', 'wall_s')
FIGURE_COLUMNS = ('figure', 'series', 'seed', 'x', 'y')

EMIT_CHOICES = ('traces', 'summaries', 'aggregate_csv', 'probes', 'scenario')

LOCAL_CONF_FILE_NAME = 'activecd.conf'
ENV_VAR_PREFIX = 'ACTIVECD_'

TRACES_DIR = 'traces'
SUMMARIES_DIR = 'summaries'
PROBES_DIR = 'probes'
SCENARIOS_DIR = 'scenarios'
AGGREGATE_FILE = 'aggregate.csv'
TIMING_FILE = 'timing.csv'
RESOLVED_SPEC_FILE = 'resolved-spec.json'


def default_refresh_period(num_coords):
    """
    Full reward-scan period B = E = NR/2, rounded up.
    """
    return max(1, int(math.ceil(num_coords / 2.0)))


# Presets are partial specs; anything not named falls back to the full-scale
# settings of the attrs defaults.
PRESETS = {
    'full': {
        'scenario': {
            'num_devices': 1500,
            'bits_per_message': 1,
            'seq_len': 200,
            'num_antennas': 16,
            'num_active': 50,
        },
        'policies': [
            {'name': 'random'},
            {'name': 'bernoulli', 'epsilon': DEFAULT_EPSILON},
            {'name': 'thompson', 'num_arms': DEFAULT_NUM_ARMS},
        ],
        'stop': {
            'rel_tol': DEFAULT_REL_TOL,
            'max_iters': DEFAULT_MAX_ITERS,
            'window': 1,
        },
    },
    'desk': {
        'scenario': {
            'num_devices': 100,
            'bits_per_message': 1,
            'seq_len': 40,
            'num_antennas': 16,
            'num_active': 10,
        },
        'policies': [
            {'name': 'random'},
            {'name': 'bernoulli', 'epsilon': DEFAULT_EPSILON},
            {'name': 'thompson', 'num_arms': DEFAULT_NUM_ARMS},
        ],
        # window and max_iters are NR and 50 * NR for NR = 200
        'stop': {
            'rel_tol': DEFAULT_REL_TOL,
            'max_iters': 10000,
            'window': 200,
        },
        'num_seeds': 20,
    },
    'toy': {
        'scenario': {
            'num_devices': 1,
            'bits_per_message': 1,
            'seq_len': 1,
            'num_antennas': 1,
            'num_active': 0,
        },
        'policies': [{'name': 'random'}],
        'stop': {'rel_tol': DEFAULT_REL_TOL, 'max_iters': 1, 'window': 1},
        'num_seeds': 1,
        'reference': False,
    },
}

# Desk scale saturates at P_md = 0 for every sequence length and ADC depth
# worth comparing; twice the active devices and 4 dB more noise keep
# detection errors measurable.
PRESETS['crowded'] = {
    'scenario': dict(PRESETS['desk']['scenario'],
                     num_active=20,
                     noise_power_dbm=NOISE_POWER_DBM + 4.0),
    'policies': [dict(policy) for policy in PRESETS['desk']['policies']],
    'stop': dict(PRESETS['desk']['stop']),
    'num_seeds': 20,
}
