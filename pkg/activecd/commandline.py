"""
This module contains code that is related to command-line argument
handling. The primary candidate is argument parser.
"""

import os
import sys
import logging
import configargparse as argparse
from argparse import ArgumentTypeError

from activecd import __version__

from .define import (LOCAL_CONF_FILE_NAME, ENV_VAR_PREFIX, PRESETS,
                     EMIT_CHOICES)

COMMANDS = ('solve', 'figures', 'validate')


def command_arg_required(args):
    """
    Evaluates whether the command arg is required.

    @param args: Command-line arguments.
    @type args: namedtuple
    """
    return not args.version


def parse_bit_list(value):
    """
    Parse a comma separated list of bit depths, e.g. "1,2,3,4".
    """
    try:
        bits = [int(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise ArgumentTypeError(
            'expected comma separated integers, got %r' % value)
    if not bits or any(b < 1 for b in bits):
        raise ArgumentTypeError(
            'bit depths must be positive integers, got %r' % value)
    return bits


def parse_args(args=None):
    """
    Parse the arguments/options passed to the program on the command line.
    """

    parse_kwargs = {
        "description": 'Grant-free activity detection by covariance-based '
                       'coordinate descent with bandit coordinate selection.',
        "auto_env_var_prefix": ENV_VAR_PREFIX,
    }

    conf_file_path = os.path.join(os.getcwd(), LOCAL_CONF_FILE_NAME)
    if os.path.isfile(conf_file_path):
        parse_kwargs["default_config_files"] = [conf_file_path]
    parser = argparse.ArgParser(**parse_kwargs)

    # Basic options
    group_basic = parser.add_argument_group('Basic options')

    group_basic.add_argument(
        'command',
        action='store',
        nargs='?',
        choices=COMMANDS,
        help='what to do: solve an experiment, build figure tables from '
        'results, or validate the solver invariants')

    group_basic.add_argument(
        '--spec',
        dest='spec',
        action='store',
        default=None,
        help='JSON experiment spec. (Default: the preset alone)')

    group_basic.add_argument(
        '--preset',
        dest='preset',
        action='store',
        default='desk',
        choices=sorted(PRESETS),
        help='named preset used when no spec file is given. '
        '(Default: desk)')

    group_basic.add_argument(
        '--seed',
        dest='seed',
        action='store',
        default=None,
        type=int,
        help='master seed; overrides scenario.master_seed of the spec')

    group_basic.add_argument(
        '--num-seeds',
        dest='num_seeds',
        action='store',
        default=None,
        type=int,
        help='number of replicates; overrides num_seeds of the spec')

    group_basic.add_argument(
        '--jobs',
        dest='jobs',
        action='store',
        default=1,
        type=int,
        help='number of cells solved in parallel. (Default: 1)')

    group_basic.add_argument(
        '--out',
        dest='out',
        action='store',
        default=None,
        help='output directory; overrides output_dir of the spec')

    group_basic.add_argument(
        '--emit',
        dest='emit',
        action='store',
        default=None,
        help='comma separated outputs to write, among: %s'
        % ', '.join(EMIT_CHOICES))

    group_basic.add_argument(
        '--set',
        dest='overrides',
        action='append',
        default=[],
        metavar='KEY=VALUE',
        help='override a spec entry by dotted path, e.g. '
        '"stop.max_iters=500" (may be repeated)')

    # Low-resolution ADC
    group_adc = parser.add_argument_group('Low-resolution ADC')

    group_adc.add_argument(
        '--adc-bits',
        dest='adc_bits',
        action='store',
        default=None,
        type=int,
        help='quantize the received signal with this many bits per real '
        'dimension')

    group_adc.add_argument(
        '--adc-step',
        dest='adc_step',
        action='store',
        default=None,
        type=float,
        help='quantizer step size. (Default: 0.5)')

    group_adc.add_argument(
        '--adc-formula',
        dest='adc_formula',
        action='store',
        default=None,
        choices=['standard', 'paper', 'literal'],
        help='covariance gain of the quantizer model: (1-rho)^2 '
        '("standard") or rho^2 ("paper", also "literal"). '
        '(Default: standard)')

    group_adc.add_argument(
        '--adc-sweep',
        dest='adc_sweep',
        action='store',
        default=None,
        type=parse_bit_list,
        help='comma separated bit depths solved next to the unquantized '
        'receiver, e.g. "1,2,3,4"')

    # Figures
    group_figures = parser.add_argument_group('Figures')

    group_figures.add_argument(
        '--inputs',
        dest='inputs',
        action='store',
        nargs='+',
        default=None,
        help='results directories read by the figures command. '
        '(Default: the output directory)')

    group_figures.add_argument(
        '--svg',
        dest='svg',
        action='store_true',
        default=False,
        help='also render the figures as SVG. (Default: False)')

    # Debug
    group_debug = parser.add_argument_group('Debugging options')

    group_debug.add_argument(
        '--debug',
        dest='debug',
        action='store_true',
        default=False,
        help='print lots of debug information')

    group_debug.add_argument(
        '--quiet',
        dest='quiet',
        action='store_true',
        default=False,
        help='omit as many messages as possible'
        ' (only printing errors)')

    group_debug.add_argument(
        '--version',
        dest='version',
        action='store_true',
        default=False,
        help='display version and exit')

    args = parser.parse_args(args)

    # Initialize the logging system first so that other functions
    # can use it right away
    if args.debug:
        logging.basicConfig(level=logging.DEBUG,
                            format='%(name)s[%(funcName)s] %(message)s')
    elif args.quiet:
        logging.basicConfig(level=logging.ERROR,
                            format='%(name)s: %(message)s')
    else:
        logging.basicConfig(level=logging.INFO,
                            format='%(message)s')

    # show version?
    if args.version:
        # we use print (not logging) function because version may be used
        # by some external script while logging may output excessive
        # information
        print(__version__)
        sys.exit(0)

    if command_arg_required(args) and not args.command:
        parser.print_usage()
        logging.error('You must supply a command: %s', ', '.join(COMMANDS))
        sys.exit(1)

    if args.jobs < 1:
        logging.error('--jobs must be at least 1')
        sys.exit(1)

    # turn comma separated string into list
    if args.emit is not None:
        args.emit = [item.strip() for item in args.emit.split(',')
                     if item.strip()]

    return args
