# -*- coding: utf-8 -*-

"""
The outer coordinate-descent loop: select a coordinate, compute its step,
apply it, log it, and stop once the objective settles.
"""

import csv
import io
import logging
import time

import attr
import numpy as np

from .covariance import (init_state, coordinate_step, apply_update, refactor,
                         InconsistentStateError)
from .define import (DEFAULT_REL_TOL, DEFAULT_MAX_ITERS, REFACTOR_PERIOD,
                     REFERENCE_ITERS_PER_COORD, REFERENCE_REL_TOL,
                     TRACE_COLUMNS, TRACE_SCHEMA)
from .policies import PolicyConfig, make_policy
from .utils import ConfigError, format_float


STOP_CONVERGED = 'converged'
STOP_MAX_ITERS = 'max_iters'


@attr.s(frozen=True)
class StopRule(object):
    """
    Stop when |F^t - F^(t-W)| <= rel_tol * |F^(t-W)| or after max_iters
    iterations.
    """
    rel_tol = attr.ib(default=DEFAULT_REL_TOL, converter=float)
    max_iters = attr.ib(default=DEFAULT_MAX_ITERS, converter=int)
    window = attr.ib(default=1, converter=int)

    def __attrs_post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError('rel_tol must be positive')
        if self.max_iters < 1:
            raise ConfigError('max_iters must be at least 1')
        if self.window < 1:
            raise ConfigError('window must be at least 1')

    def settled(self, history):
        """
        @param history: Objective values F^0, ..., F^t.
        @type history: list
        """
        t = len(history) - 1
        if t < self.window:
            return False
        anchor = history[t - self.window]
        return abs(history[t] - anchor) <= self.rel_tol * abs(anchor)


@attr.s(frozen=True)
class TraceRecord(object):
    t = attr.ib()
    k = attr.ib()
    delta = attr.ib()
    reward = attr.ib()
    F = attr.ib()
    greedy = attr.ib()
    arm = attr.ib()
    nu = attr.ib()
    elapsed_s = attr.ib()

    def as_row(self, with_timing=True):
        return [
            str(self.t),
            str(self.k),
            format_float(self.delta),
            format_float(self.reward),
            format_float(self.F),
            '1' if self.greedy else '0',
            '' if self.arm is None else str(self.arm),
            format_float(self.nu),
            format_float(self.elapsed_s) if with_timing else '',
        ]


@attr.s
class Trace(object):
    """
    Per-iteration log of a run plus its summary counters.
    """
    policy = attr.ib()
    initial_objective = attr.ib()
    records = attr.ib(default=attr.Factory(list), repr=False)
    reward_scans = attr.ib(default=0)
    stop_reason = attr.ib(default=None)
    wall_s = attr.ib(default=0.0)

    @property
    def iterations(self):
        return len(self.records)

    @property
    def final_objective(self):
        if not self.records:
            return self.initial_objective
        return self.records[-1].F

    def objectives(self):
        """
        Objective series F^0, F^1, ..., F^T including the initial value.

        @rtype: numpy.ndarray
        """
        return np.array([self.initial_objective]
                        + [record.F for record in self.records])

    def summary(self):
        return {
            'policy': self.policy,
            'iterations': self.iterations,
            'reward_scans': self.reward_scans,
            'initial_F': self.initial_objective,
            'final_F': self.final_objective,
            'stop_reason': self.stop_reason,
            'wall_s': self.wall_s,
        }

    def to_csv(self, with_timing=True):
        """
        Render the trace as CSV text, schema comment line first.

        @param with_timing: Write the elapsed_s column; disable to obtain
            bytes that only depend on seeds and configuration.
        @type with_timing: bool

        @rtype: str
        """
        out = io.StringIO()
        out.write('# %s %s\n' % TRACE_SCHEMA)
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(TRACE_COLUMNS)
        for record in self.records:
            writer.writerow(record.as_row(with_timing))
        return out.getvalue()


def _checked_step(state, sigma_hat, k):
    try:
        return coordinate_step(state, sigma_hat, k)
    except InconsistentStateError as e:
        logging.warning('%s; refactorizing and retrying', e)
        refactor(state, sigma_hat)
        return coordinate_step(state, sigma_hat, k)


def run(sequences, sigma_hat, noise_var, policy, stop, rng,
        refactor_period=REFACTOR_PERIOD, observer=None, probe_period=None,
        clock=time.perf_counter, log_every=1000):
    """
    Minimize F(gamma) by coordinate descent.

    @param sequences: L x NR signature matrix (possibly rescaled, see adc).
    @type sequences: numpy.ndarray

    @param sigma_hat: L x L sample covariance.
    @type sigma_hat: numpy.ndarray

    @param noise_var: Noise floor of the model covariance.
    @type noise_var: float

    @param policy: Coordinate-selection policy.
    @type policy: activecd.policies.PolicyConfig

    @param stop: Stopping rule.
    @type stop: StopRule

    @param rng: The run's policy random stream.
    @type rng: numpy.random.Generator

    @param observer: Optional callable(t, state, elapsed_s) invoked at
        t = 0 and every probe_period iterations and at the end; the time it
        spends is excluded from the run's clock.
    @type observer: callable

    @param clock: Monotonic time source, in seconds.
    @type clock: callable

    @return: Tuple (gamma_hat, trace).
    @rtype: (numpy.ndarray, Trace)
    """
    if isinstance(policy, str):
        policy = PolicyConfig(policy)

    excluded = [0.0]
    started = clock()

    def elapsed():
        return clock() - started - excluded[0]

    def notify(t, state):
        if observer is None:
            return
        paused = clock()
        observer(t, state, elapsed())
        excluded[0] += clock() - paused

    state = init_state(sequences, sigma_hat, noise_var, refactor_period)
    selector = make_policy(policy, state.num_coords)
    selector.start(state, sigma_hat)

    trace = Trace(policy=policy.display_name,
                  initial_objective=state.objective_F)
    history = [state.objective_F]
    notify(0, state)

    trace.stop_reason = STOP_MAX_ITERS
    t = 0
    while t < stop.max_iters:
        t += 1
        choice = selector.select(t, state, sigma_hat, rng)
        step = _checked_step(state, sigma_hat, choice.coordinate)
        selector.observe(choice, step, state.objective_F)
        apply_update(state, sigma_hat, step)
        selector.after_update(choice, state, sigma_hat)

        history.append(state.objective_F)
        trace.records.append(TraceRecord(
            t=t, k=choice.coordinate, delta=step.delta, reward=step.reward,
            F=state.objective_F, greedy=choice.greedy, arm=choice.arm,
            nu=choice.nu, elapsed_s=elapsed()))

        if log_every and t % log_every == 0:
            logging.debug('t=%d F=%.10g reward=%.3g', t, state.objective_F,
                          step.reward)
        if probe_period and t % probe_period == 0:
            notify(t, state)

        if stop.settled(history):
            trace.stop_reason = STOP_CONVERGED
            break

    if not probe_period or t % probe_period != 0:
        notify(t, state)

    trace.reward_scans = selector.reward_scans
    trace.wall_s = elapsed()
    logging.debug('%s stopped (%s) after %d iterations, F=%.10g',
                  trace.policy, trace.stop_reason, t, state.objective_F)
    return state.gamma.copy(), trace


def reference_objective(sequences, sigma_hat, noise_var, rng,
                        refactor_period=REFACTOR_PERIOD):
    """
    Long CD-Random run whose final objective serves as the floor F* of
    suboptimality series: 50 NR iterations at most, relative tolerance
    1e-12 over an epoch-long window.

    @rtype: float
    """
    num_coords = sequences.shape[1]
    stop = StopRule(rel_tol=REFERENCE_REL_TOL,
                    max_iters=REFERENCE_ITERS_PER_COORD * num_coords,
                    window=num_coords)
    _, trace = run(sequences, sigma_hat, noise_var, PolicyConfig('random'),
                   stop, rng, refactor_period=refactor_period, log_every=0)
    return float(np.min(trace.objectives()))


def objective_floor(reference, finals):
    """
    F* = min(reference, observed finals), pushed down by a machine-epsilon
    guard so suboptimality stays positive on log axes.
    """
    candidates = [value for value in [reference] + list(finals)
                  if value is not None]
    floor = min(candidates)
    return floor - 4 * np.finfo(float).eps * max(1.0, abs(floor))


def suboptimality_series(trace, f_star):
    """
    epsilon(gamma^t) = F^t - F*, floored at zero, for t = 0..T.

    @param trace: A solver trace or an objective series.
    @type trace: Trace or numpy.ndarray

    @rtype: numpy.ndarray
    """
    if isinstance(trace, Trace):
        values = trace.objectives()
    else:
        values = np.asarray(trace, dtype=float)
    return np.maximum(values - f_star, 0.0)


def iterations_to_tolerance(series, fraction=1e-3):
    """
    First t with series[t] <= fraction * series[0], or None.
    """
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        return None
    hits = np.nonzero(series <= fraction * series[0])[0]
    return int(hits[0]) if hits.size else None
