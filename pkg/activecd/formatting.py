import os
import re

from .define import (TRACES_DIR, SUMMARIES_DIR, PROBES_DIR, SCENARIOS_DIR)


def clean_label(label):
    """
    Make a policy label safe to embed in file names.
    """
    return re.sub(r'[^A-Za-z0-9_.-]+', '-', label).strip('-') or 'policy'


def format_cell(policy, adc_bits, seed):
    """
    Stem shared by every file of one cell, e.g. 'bernoulli_b03_s0007'.
    adc_bits is 0 for the unquantized receiver.
    """
    return '%s_b%02d_s%04d' % (clean_label(policy), adc_bits, seed)


def format_scenario(adc_bits, seed):
    return 'scenario_b%02d_s%04d.json' % (adc_bits, seed)


def get_trace_filename(out_dir, policy, adc_bits, seed):
    return os.path.join(out_dir, TRACES_DIR,
                        format_cell(policy, adc_bits, seed) + '.csv')


def get_summary_filename(out_dir, policy, adc_bits, seed):
    return os.path.join(out_dir, SUMMARIES_DIR,
                        format_cell(policy, adc_bits, seed) + '.json')


def get_probe_filename(out_dir, policy, adc_bits, seed):
    return os.path.join(out_dir, PROBES_DIR,
                        format_cell(policy, adc_bits, seed) + '.csv')


def get_scenario_filename(out_dir, adc_bits, seed):
    return os.path.join(out_dir, SCENARIOS_DIR,
                        format_scenario(adc_bits, seed))
