# -*- coding: utf-8 -*-

"""
Invariant suite behind the validate command. Every check draws the first
replicate of the spec's scenario and reports PASS or FAIL with a short
measurement; nothing is written to disk.
"""

import logging

import attr
import numpy as np
import scipy.optimize

from .covariance import (init_state, coordinate_step, apply_update, objective,
                         dense_objective, inverse_drift)
from .model import generate_scenario, sample_covariance, effective_noise_var
from .rng import RandomStreams
from .solver import StopRule, run

REWARD_TOL = 1e-9
DENSE_TOL = 1e-7
ORACLE_TOL = 1e-6
DRIFT_TOL = 1e-6
MONOTONE_TOL = 1e-9


@attr.s(frozen=True)
class CheckResult(object):
    name = attr.ib()
    passed = attr.ib()
    detail = attr.ib(default='')

    def __str__(self):
        return '%s %s: %s' % ('PASS' if self.passed else 'FAIL',
                              self.name, self.detail)


def check_sample_covariance(sigma_hat):
    """
    Sigma_hat must be Hermitian and positive semidefinite.
    """
    scale = max(1.0, float(np.max(np.abs(sigma_hat))))
    asymmetry = float(np.max(np.abs(sigma_hat - sigma_hat.conj().T)))
    min_eig = float(np.min(np.linalg.eigvalsh(sigma_hat)))
    passed = asymmetry <= 1e-12 * scale and min_eig >= -1e-10 * scale
    return CheckResult('sample-covariance', passed,
                       'asymmetry %.3g, smallest eigenvalue %.3g'
                       % (asymmetry, min_eig))


def check_reward_identity(sequences, sigma_hat, noise_var, rng,
                          num_updates=2000, dense_every=50,
                          refactor_period=500):
    """
    Along random coordinate updates, the objective after each step equals
    the objective before it minus the step's reward. Every dense_every
    steps the cached objective is also compared with a from-scratch one.
    """
    state = init_state(sequences, sigma_hat, noise_var, refactor_period)
    worst = 0.0
    worst_dense = 0.0
    for t in range(1, num_updates + 1):
        before = state.objective_F
        step = coordinate_step(state, sigma_hat,
                               int(rng.integers(state.num_coords)))
        apply_update(state, sigma_hat, step)
        after = objective(state, sigma_hat)
        worst = max(worst, abs(after - (before - step.reward))
                    / max(1.0, abs(before)))
        if t % dense_every == 0:
            exact = dense_objective(state.sequences, state.gamma,
                                    state.noise_var, sigma_hat)
            worst_dense = max(worst_dense, abs(exact - state.objective_F)
                              / max(1.0, abs(exact)))
    passed = worst <= REWARD_TOL and worst_dense <= DENSE_TOL
    return CheckResult('reward-identity', passed,
                       '%d updates, worst step error %.3g, worst dense '
                       'error %.3g' % (num_updates, worst, worst_dense))


def oracle_step(quad, quad_data, gamma_k):
    """
    Minimize log(1 + d c) - d g / (1 + d c) over d >= -gamma_k by bounded
    scalar search, independently of the closed form.
    """
    def profile(d):
        return np.log1p(d * quad) - d * quad_data / (1.0 + d * quad)

    upper = max(0.0, (quad_data - quad) / quad ** 2) * 2.0 + 4.0 / quad
    found = scipy.optimize.minimize_scalar(
        profile, bounds=(-gamma_k, upper), method='bounded',
        options={'xatol': 1e-12 / quad})
    # the bounded search never evaluates the end points themselves
    candidates = [(profile(found.x), found.x), (profile(-gamma_k), -gamma_k)]
    return min(candidates)[1]


def check_step_oracle(sequences, sigma_hat, noise_var, rng, num_states=5,
                      coords_per_state=20, warmup=None):
    """
    The closed-form step of sampled coordinates matches a numerical
    minimization of the coordinate profile, measured in units of 1/c.
    """
    worst = 0.0
    checked = 0
    num_coords = sequences.shape[1]
    for _ in range(num_states):
        state = init_state(sequences, sigma_hat, noise_var)
        for _ in range(warmup if warmup is not None else num_coords):
            apply_update(state, sigma_hat, coordinate_step(
                state, sigma_hat, int(rng.integers(num_coords))))
        picks = rng.choice(num_coords, size=min(coords_per_state, num_coords),
                           replace=False)
        for k in picks:
            step = coordinate_step(state, sigma_hat, int(k))
            d = oracle_step(step.quad, step.quad_data, state.gamma[k])
            u_closed = step.delta * step.quad
            u_oracle = d * step.quad
            worst = max(worst, abs(u_closed - u_oracle)
                        / max(1.0, abs(u_closed)))
            checked += 1
    return CheckResult('step-oracle', worst <= ORACLE_TOL,
                       '%d coordinates, worst scaled deviation %.3g'
                       % (checked, worst))


def check_inverse_drift(sequences, sigma_hat, noise_var, rng,
                        num_updates=2000, refactor_period=500,
                        measure_every=10):
    """
    The maintained inverse stays close to the inverse of the maintained
    covariance between refactorizations.
    """
    state = init_state(sequences, sigma_hat, noise_var, refactor_period)
    worst = 0.0
    for t in range(1, num_updates + 1):
        apply_update(state, sigma_hat, coordinate_step(
            state, sigma_hat, int(rng.integers(state.num_coords))))
        if t % measure_every == 0 or state.updates_since_refactor == 0:
            worst = max(worst, inverse_drift(state))
    return CheckResult('inverse-drift', worst <= DRIFT_TOL,
                       '%d updates, %d refactorizations, worst drift %.3g'
                       % (num_updates, state.refactor_count, worst))


def trace_is_monotone(trace, tol=MONOTONE_TOL):
    """
    @return: Largest relative increase of F between consecutive iterations.
    @rtype: float
    """
    values = trace.objectives()
    if values.size < 2:
        return 0.0
    increase = (values[1:] - values[:-1]) / np.maximum(1.0,
                                                       np.abs(values[:-1]))
    return float(max(0.0, np.max(increase)))


def check_monotone(sequences, sigma_hat, noise_var, policies, stop, streams,
                   refactor_period=500):
    results = []
    for policy in policies:
        _, trace = run(sequences, sigma_hat, noise_var, policy, stop,
                       streams.stream('policy'),
                       refactor_period=refactor_period, log_every=0)
        worst = trace_is_monotone(trace)
        results.append(CheckResult(
            'monotone-descent[%s]' % policy.display_name,
            worst <= MONOTONE_TOL,
            '%d iterations, largest relative increase %.3g'
            % (trace.iterations, worst)))
    return results


def run_checks(spec, num_updates=2000):
    """
    Run the whole suite on the first replicate of spec.

    @type spec: activecd.specfile.ExperimentSpec

    @rtype: [CheckResult]
    """
    config = spec.scenario
    streams = RandomStreams(config.master_seed, 0)
    sequences, _, received = generate_scenario(config, streams)
    sigma_hat = sample_covariance(received)
    noise_var = effective_noise_var(config)
    rng = streams.stream('policy')

    results = [check_sample_covariance(sigma_hat)]
    results.append(check_reward_identity(
        sequences, sigma_hat, noise_var, rng, num_updates=num_updates,
        refactor_period=spec.refactor_period))
    results.append(check_step_oracle(sequences, sigma_hat, noise_var, rng))
    results.append(check_inverse_drift(
        sequences, sigma_hat, noise_var, rng, num_updates=num_updates,
        refactor_period=spec.refactor_period))

    stop = StopRule(rel_tol=spec.stop.rel_tol,
                    max_iters=min(spec.stop.max_iters, 5 * config.num_coords),
                    window=spec.stop.window)
    results.extend(check_monotone(sequences, sigma_hat, noise_var,
                                  spec.policies, stop, streams,
                                  refactor_period=spec.refactor_period))

    for result in results:
        if result.passed:
            logging.info('%s', result)
        else:
            logging.error('%s', result)
    return results
