#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Grant-free activity detection experiments from the command line.

The solve command draws random-access scenarios, estimates the device
activity by coordinate descent on the covariance likelihood with the
configured coordinate-selection policies, and writes per-cell traces,
summaries and an aggregate table. The figures command turns result
directories into figure tables; validate runs the solver invariant suite.

Examples:
  activecd solve --preset desk --num-seeds 5 --jobs 4 --out results
  activecd solve --spec experiment.json --adc-sweep 1,2,3,4
  activecd figures --inputs results --svg
  activecd validate --preset toy
"""

import json
import logging
import os
import sys

from .checks import run_checks
from .covariance import NumericalError
from .define import EXIT_OK, EXIT_SPEC_ERROR, EXIT_NUMERICAL_FAILURE
from .figures import make_figures
from .parallel import get_runner
from .specfile import (SpecError, load_spec, preset_spec, apply_overrides,
                       dumps_spec)
from .utils import is_debug_run
from .workflow import CellSolver, ExperimentRunner
from .commandline import parse_args

from activecd import __version__


def build_spec(args):
    """
    Load the spec named on the command line (or the preset) and apply the
    command-line overrides on top of it.

    @param args: Command-line arguments.
    @type args: namedtuple

    @rtype: activecd.specfile.ExperimentSpec
    """
    spec = load_spec(args.spec) if args.spec else preset_spec(args.preset)

    overrides = []
    if args.seed is not None:
        overrides.append('scenario.master_seed=%d' % args.seed)
    if args.num_seeds is not None:
        overrides.append('num_seeds=%d' % args.num_seeds)
    if args.out is not None:
        overrides.append('output_dir=%s' % json.dumps(args.out))
    if args.emit is not None:
        overrides.append("emit=%s" % json.dumps(args.emit))
    if args.adc_bits is not None:
        overrides.append('adc.bits=%d' % args.adc_bits)
    if args.adc_step is not None:
        overrides.append('adc.step=%r' % args.adc_step)
    if args.adc_formula is not None:
        overrides.append("adc.formula_mode=%s" % json.dumps(args.adc_formula))
    if args.adc_sweep is not None:
        overrides.append('adc_sweep_bits=[%s]'
                         % ','.join(str(b) for b in args.adc_sweep))
    overrides.extend(args.overrides)

    if overrides:
        spec = apply_overrides(spec, overrides)
    return spec


def cmd_solve(args):
    spec = build_spec(args)
    if is_debug_run():
        logging.debug('Resolved spec:\n%s', dumps_spec(spec))

    cell_solver = CellSolver(spec)
    runner = get_runner(cell_solver, args.jobs)
    experiment = ExperimentRunner(runner, spec)
    experiment.run_cells()

    logging.info('-' * 80)
    logging.info('%d cells solved, %d failed; results in %s',
                 len(experiment.results), len(experiment.failures),
                 os.path.abspath(spec.output_dir))
    if experiment.failures:
        logging.info('The following cells failed:')
        for cell, error in experiment.failures:
            logging.info('%s: %s: %s', cell, type(error).__name__, error)
        if any(isinstance(e, NumericalError)
               for _, e in experiment.failures):
            return EXIT_NUMERICAL_FAILURE
        return 1
    return EXIT_OK


def cmd_figures(args):
    if args.inputs:
        inputs = args.inputs
    elif args.out:
        inputs = [args.out]
    else:
        inputs = [build_spec(args).output_dir]
    out_dir = args.out or inputs[0]
    make_figures(inputs, out_dir, svg=args.svg)
    return EXIT_OK


def cmd_validate(args):
    spec = build_spec(args)
    results = run_checks(spec)
    failed = [result for result in results if not result.passed]
    logging.info('%d of %d checks passed', len(results) - len(failed),
                 len(results))
    return EXIT_NUMERICAL_FAILURE if failed else EXIT_OK


COMMANDS = {
    'solve': cmd_solve,
    'figures': cmd_figures,
    'validate': cmd_validate,
}


def main(argv=None):
    """
    Main entry point for execution as a program (instead of as a module).
    """

    args = parse_args(argv)
    logging.info('activecd version %s', __version__)

    try:
        code = COMMANDS[args.command](args)
    except SpecError as e:
        logging.error('%s', e)
        code = EXIT_SPEC_ERROR
    except NumericalError as e:
        logging.error('Numerical failure: %s', e)
        if is_debug_run():
            raise
        code = EXIT_NUMERICAL_FAILURE
    sys.exit(code)


if __name__ == '__main__':
    main()
