import csv
import io
import logging
import math
import os
import threading

import attr
import numpy as np

from .adc import quantize_complex_matrix, quantized_objective_model
from .covariance import NumericalError
from .define import (AGGREGATE_COLUMNS, AGGREGATE_SCHEMA, AGGREGATE_FILE,
                     PROBE_COLUMNS, PROBE_SCHEMA, TIMING_COLUMNS, TIMING_FILE,
                     RESOLVED_SPEC_FILE, SPEC_SCHEMA_VERSION)
from .detection import detect
from .formatting import (get_trace_filename, get_summary_filename,
                         get_probe_filename, get_scenario_filename)
from .model import (generate_scenario, sample_covariance, effective_noise_var,
                    scenario_to_dict)
from .rng import RandomStreams
from .solver import run, reference_objective
from .specfile import dumps_spec
from .utils import (mkdir_p, write_atomically, spit_json_atomically,
                    config_digest, format_float, is_debug_run)

# Calibrated thresholds never drop to zero, so an all-zero block is never
# counted as a detection.
DETECTION_FLOOR = np.finfo(float).tiny


@attr.s(frozen=True)
class Cell(object):
    """
    One (policy, ADC variant, replicate) run of an experiment.
    """
    policy = attr.ib()
    adc = attr.ib()
    seed = attr.ib()

    @property
    def adc_bits(self):
        return 0 if self.adc is None else self.adc.bits

    @property
    def label(self):
        return self.policy.display_name

    def sort_key(self):
        return (self.label, self.adc_bits, self.seed)

    def __str__(self):
        return '%s/b%d/seed %d' % (self.label, self.adc_bits, self.seed)


def _iter_cells(spec):
    """
    Generate the cells of an experiment, replicate-major so that a serial
    run finishes whole replicates first.
    """
    for seed in range(spec.num_seeds):
        for adc in spec.quantizers():
            for policy in spec.policies:
                yield Cell(policy=policy, adc=adc, seed=seed)


def cell_config(spec, cell):
    """
    Everything that determines the outcome of a cell, as plain data; its
    digest identifies the cell in the outputs.
    """
    return {
        'schema_version': SPEC_SCHEMA_VERSION,
        'scenario': attr.asdict(spec.scenario),
        'replicate': cell.seed,
        'policy': attr.asdict(cell.policy),
        'adc': None if cell.adc is None else attr.asdict(cell.adc),
        'stop': attr.asdict(spec.stop),
        'refactor_period': spec.refactor_period,
    }


@attr.s
class Problem(object):
    """
    Solver inputs of one scenario as seen through one receiver.
    """
    sequences = attr.ib(repr=False)
    sigma_hat = attr.ib(repr=False)
    noise_floor = attr.ib()
    truth = attr.ib(repr=False)
    raw_sequences = attr.ib(repr=False)
    received = attr.ib(repr=False)


@attr.s
class CellResult(object):
    cell = attr.ib()
    trace = attr.ib(repr=False)
    digest = attr.ib()
    threshold = attr.ib()
    declared = attr.ib()
    p_md = attr.ib()
    p_fa = attr.ib()
    reference_F = attr.ib(default=None)
    probes = attr.ib(default=attr.Factory(list), repr=False)

    def summary(self):
        summary = self.trace.summary()
        summary.update({
            'schema_version': SPEC_SCHEMA_VERSION,
            'adc_bits': self.cell.adc_bits,
            'seed': self.cell.seed,
            'config_digest': self.digest,
            'reference_F': self.reference_F,
            'detection': {
                'threshold': (self.threshold
                              if math.isfinite(self.threshold) else None),
                'declared': list(self.declared),
                'p_md': self.p_md,
                'p_fa': self.p_fa,
            },
        })
        return summary

    def aggregate_row(self):
        trace = self.trace
        return [self.cell.label, str(self.cell.adc_bits), str(self.cell.seed),
                'ok', format_float(trace.final_objective),
                str(trace.iterations), str(trace.reward_scans),
                format_float(self.p_md), format_float(self.p_fa),
                trace.stop_reason, self.digest]


def probes_to_csv(probes):
    out = io.StringIO()
    out.write('# %s %s\n' % PROBE_SCHEMA)
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(PROBE_COLUMNS)
    for t, elapsed_s, p_md in probes:
        writer.writerow([str(t), format_float(elapsed_s), format_float(p_md)])
    return out.getvalue()


class CellSolver(object):
    """
    Solves single cells of an experiment spec and writes their files.
    Reference objectives are shared by the policies of one replicate and
    ADC variant, and computed once.
    """

    def __init__(self, spec, out_dir=None):
        self._spec = spec
        self._out_dir = out_dir or spec.output_dir
        self._lock = threading.Lock()
        self._key_locks = {}
        self._references = {}

    def prepare(self, cell):
        """
        Draw the cell's scenario and build the solver inputs for its
        receiver.

        @rtype: Problem
        """
        config = self._spec.scenario
        streams = RandomStreams(config.master_seed, cell.seed)
        sequences, truth, received = generate_scenario(config, streams)
        noise_var = effective_noise_var(config)

        if cell.adc is None:
            return Problem(sequences=sequences,
                           sigma_hat=sample_covariance(received),
                           noise_floor=noise_var, truth=truth,
                           raw_sequences=sequences, received=received)

        quantized = quantize_complex_matrix(received, cell.adc)
        sigma_hat = sample_covariance(quantized)
        model = quantized_objective_model(sequences, noise_var, sigma_hat,
                                          cell.adc)
        return Problem(sequences=model.sequences, sigma_hat=sigma_hat,
                       noise_floor=model.noise_floor, truth=truth,
                       raw_sequences=sequences, received=received)

    def _key_lock(self, key):
        with self._lock:
            return self._key_locks.setdefault(key, threading.Lock())

    def reference(self, cell, problem):
        key = (cell.seed, cell.adc_bits)
        with self._key_lock(key):
            if key not in self._references:
                logging.info('Computing reference objective for seed %d, '
                             '%d-bit ADC', cell.seed, cell.adc_bits)
                streams = RandomStreams(self._spec.scenario.master_seed,
                                        cell.seed)
                self._references[key] = reference_objective(
                    problem.sequences, problem.sigma_hat, problem.noise_floor,
                    streams.stream('reference'),
                    refactor_period=self._spec.refactor_period)
            return self._references[key]

    def solve(self, cell):
        """
        Run one cell end to end.

        @rtype: CellResult
        """
        spec = self._spec
        problem = self.prepare(cell)
        streams = RandomStreams(spec.scenario.master_seed, cell.seed)

        probes = []
        observer = None
        probe_period = None
        if 'probes' in spec.emit:
            probe_period = spec.resolved_probe_period()

            def observer(t, state, elapsed_s):
                _, p_md, _ = detect(state.gamma, problem.truth,
                                    min_threshold=DETECTION_FLOOR)
                probes.append((t, elapsed_s, p_md))

        gamma_hat, trace = run(problem.sequences, problem.sigma_hat,
                               problem.noise_floor, cell.policy, spec.stop,
                               streams.stream('policy'),
                               refactor_period=spec.refactor_period,
                               observer=observer, probe_period=probe_period)

        detection, p_md, p_fa = detect(gamma_hat, problem.truth,
                                       min_threshold=DETECTION_FLOOR)
        reference_F = self.reference(cell, problem) if spec.reference else None

        result = CellResult(
            cell=cell, trace=trace,
            digest=config_digest(cell_config(spec, cell)),
            threshold=detection.threshold,
            declared=detection.declared_active,
            p_md=p_md, p_fa=p_fa,
            reference_F=reference_F, probes=probes)
        self._write_outputs(result, problem)
        return result

    def _write_outputs(self, result, problem):
        spec = self._spec
        cell = result.cell
        out = self._out_dir
        if 'traces' in spec.emit:
            write_atomically(
                get_trace_filename(out, cell.label, cell.adc_bits, cell.seed),
                result.trace.to_csv())
        if 'summaries' in spec.emit:
            spit_json_atomically(
                result.summary(),
                get_summary_filename(out, cell.label, cell.adc_bits,
                                     cell.seed))
        if 'probes' in spec.emit:
            write_atomically(
                get_probe_filename(out, cell.label, cell.adc_bits, cell.seed),
                probes_to_csv(result.probes))
        if 'scenario' in spec.emit and cell.policy == spec.policies[0]:
            spit_json_atomically(
                scenario_to_dict(spec.scenario, problem.raw_sequences,
                                 problem.truth, problem.received),
                get_scenario_filename(out, cell.adc_bits, cell.seed))


class ExperimentRunner(object):
    """
    Dispatches every cell of a spec to a runner, collects the results and
    writes the aggregate tables.
    """

    def __init__(self, runner, spec, out_dir=None):
        self._runner = runner
        self._spec = spec
        self._out_dir = out_dir or spec.output_dir

        self.results = []
        self.failures = []

    def run_cells(self):
        """
        @return: True if every cell succeeded.
        @rtype: bool
        """
        mkdir_p(self._out_dir)
        write_atomically(os.path.join(self._out_dir, RESOLVED_SPEC_FILE),
                         dumps_spec(self._spec))

        cells = list(_iter_cells(self._spec))
        for index, cell in enumerate(cells):
            logging.info('Solving cell %s (%d / %d)',
                         cell, index + 1, len(cells))
            self._runner.run(self._completion_handler, cell)

        for cell, outcome in self._runner.join():
            if isinstance(outcome, Exception):
                self.failures.append((cell, outcome))
            else:
                self.results.append(outcome)

        if 'aggregate_csv' in self._spec.emit:
            self._write_aggregate()

        unexpected = [error for _, error in self.failures
                      if not isinstance(error, NumericalError)]
        if unexpected and is_debug_run():
            raise unexpected[0]
        return not self.failures

    def _completion_handler(self, cell, result):
        if isinstance(result, NumericalError):
            logging.error('Numerical failure in cell %s: %s', cell, result)
        elif isinstance(result, Exception):
            logging.error('Unknown exception occurred in cell %s: %s',
                          cell, result)
        else:
            logging.info('Cell %s: F=%.10g after %d iterations (%s), '
                         'P_md=%.3f', cell, result.trace.final_objective,
                         result.trace.iterations, result.trace.stop_reason,
                         result.p_md)

    def aggregate_rows(self):
        rows = [(result.cell.sort_key(), result.aggregate_row())
                for result in self.results]
        for cell, error in self.failures:
            rows.append((cell.sort_key(), [
                cell.label, str(cell.adc_bits), str(cell.seed),
                'failed:%s' % type(error).__name__,
                '', '', '', '', '', '',
                config_digest(cell_config(self._spec, cell))]))
        return [row for _, row in sorted(rows)]

    def _write_aggregate(self):
        out = io.StringIO()
        out.write('# %s %s\n' % AGGREGATE_SCHEMA)
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(AGGREGATE_COLUMNS)
        writer.writerows(self.aggregate_rows())
        write_atomically(os.path.join(self._out_dir, AGGREGATE_FILE),
                         out.getvalue())

        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(TIMING_COLUMNS)
        for result in sorted(self.results, key=lambda r: r.cell.sort_key()):
            writer.writerow([result.cell.label, str(result.cell.adc_bits),
                             str(result.cell.seed),
                             format_float(result.trace.wall_s)])
        write_atomically(os.path.join(self._out_dir, TIMING_FILE),
                         out.getvalue())
