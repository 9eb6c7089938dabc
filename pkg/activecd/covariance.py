# -*- coding: utf-8 -*-

"""
Maintenance of the model covariance Sigma(gamma) = Q Gamma Q^H + s^2 I
under single-coordinate updates, together with its inverse, its
log-determinant and the negative log-likelihood objective

    F(gamma) = log det Sigma + tr(Sigma^{-1} Sigma_hat).

The sample covariance Sigma_hat already carries the 1/M factor.
"""

import logging

import attr
import numpy as np
import scipy.linalg

from .define import REFACTOR_PERIOD, SINGULARITY_EPS
from .utils import DomainError


class NumericalError(ArithmeticError):
    """
    Base class of floating-point failures in the covariance machinery.
    """


class InconsistentStateError(NumericalError):
    """
    Raised if the cached inverse yields a non-positive quadratic form, which
    cannot happen for a positive definite covariance.
    """


class SingularUpdateError(NumericalError):
    """
    Raised if a rank-one update would make the covariance singular.
    """


class SolverState(object):
    """
    Single-owner mutable state of one coordinate-descent run.
    """

    def __init__(self, sequences, noise_var, refactor_period=REFACTOR_PERIOD):
        self.sequences = sequences
        self.noise_var = float(noise_var)
        self.refactor_period = int(refactor_period)

        seq_len, num_coords = sequences.shape
        self.gamma = np.zeros(num_coords)
        self.sigma = self.noise_var * np.eye(seq_len, dtype=complex)
        self.sigma_inv = np.eye(seq_len, dtype=complex) / self.noise_var
        self.logdet_sigma = seq_len * np.log(self.noise_var)
        self.objective_F = 0.0
        self.iter_count = 0
        self.updates_since_refactor = 0
        self.refactor_count = 0

    @property
    def seq_len(self):
        return self.sequences.shape[0]

    @property
    def num_coords(self):
        return self.sequences.shape[1]

    def column(self, k):
        return self.sequences[:, k]


@attr.s(frozen=True)
class UpdateStep(object):
    coordinate = attr.ib()
    delta = attr.ib()
    reward = attr.ib()
    quad = attr.ib()
    quad_data = attr.ib()


@attr.s(frozen=True)
class RewardScan(object):
    """
    Steps and rewards of every coordinate at one state, in index order.
    """
    delta = attr.ib(repr=False)
    reward = attr.ib(repr=False)

    def best(self):
        # np.argmax returns the lowest index on ties
        return int(np.argmax(self.reward))


def _hermitian(matrix):
    return (matrix + matrix.conj().T) / 2.0


def trace_product(a, b):
    """
    Real part of tr(a b) without forming the product.
    """
    return float(np.real(np.einsum('ij,ji->', a, b)))


def init_state(sequences, sigma_hat, noise_var,
               refactor_period=REFACTOR_PERIOD):
    """
    State at gamma = 0: Sigma = s^2 I.

    @param sequences: L x NR signature matrix.
    @type sequences: numpy.ndarray

    @param sigma_hat: L x L sample covariance.
    @type sigma_hat: numpy.ndarray

    @param noise_var: Noise floor s^2 > 0.
    @type noise_var: float

    @rtype: SolverState
    """
    if not noise_var > 0:
        raise DomainError('noise variance must be positive, got %r'
                          % noise_var)
    if refactor_period < 1:
        raise DomainError('refactor period must be at least 1')

    state = SolverState(np.asarray(sequences, dtype=complex), noise_var,
                        refactor_period)
    state.objective_F = (state.logdet_sigma
                         + float(np.real(np.trace(sigma_hat))) / noise_var)
    return state


def objective(state, sigma_hat):
    """
    F(gamma) evaluated from the cached inverse and log-determinant.
    """
    return state.logdet_sigma + trace_product(state.sigma_inv, sigma_hat)


def step_from_quadratics(k, gamma_k, quad, quad_data):
    """
    Clamped closed-form coordinate minimizer and its reward.

    The unconstrained minimizer of d -> log(1 + d c) - d g / (1 + d c) is
    (g - c) / c^2; it is clamped at -gamma_k to keep gamma non-negative.
    """
    delta = max((quad_data - quad) / quad ** 2, -gamma_k)
    reward = quad_data * delta / (1.0 + delta * quad) - np.log1p(delta * quad)
    return UpdateStep(coordinate=int(k),
                      delta=float(delta),
                      reward=float(max(reward, 0.0)),
                      quad=float(quad),
                      quad_data=float(quad_data))


def coordinate_step(state, sigma_hat, k):
    """
    Compute the update of coordinate k at the current state.

    @param k: Coordinate index in [0, NR).
    @type k: int

    @rtype: UpdateStep
    """
    column = state.column(k)
    projected = state.sigma_inv @ column
    quad = float(np.real(np.vdot(column, projected)))
    if not quad > 0:
        raise InconsistentStateError(
            'a_k^H Sigma^-1 a_k = %r for coordinate %d' % (quad, k))
    quad_data = float(np.real(np.vdot(projected, sigma_hat @ projected)))
    return step_from_quadratics(k, state.gamma[k], quad, quad_data)


def coordinate_profile(state, sigma_hat, k, d):
    """
    Change F(gamma + d e_k) - F(gamma) along coordinate k, in closed form.
    Defined for 1 + d c > 0.
    """
    column = state.column(k)
    projected = state.sigma_inv @ column
    quad = float(np.real(np.vdot(column, projected)))
    quad_data = float(np.real(np.vdot(projected, sigma_hat @ projected)))
    return np.log1p(d * quad) - d * quad_data / (1.0 + d * quad)


def apply_update(state, sigma_hat, step):
    """
    Apply a coordinate step in place: gamma, Sigma, its inverse (rank-one
    inverse identity), the log-determinant and the cached objective. Every
    refactor_period updates the inverse and log-determinant are recomputed
    from a dense factorization.

    @return: The same, updated state.
    @rtype: SolverState
    """
    state.iter_count += 1
    delta = step.delta
    if delta == 0.0:
        return state

    k = step.coordinate
    denom = 1.0 + delta * step.quad
    if denom <= SINGULARITY_EPS:
        raise SingularUpdateError(
            '1 + delta * c = %r for coordinate %d' % (denom, k))

    column = state.column(k)
    projected = state.sigma_inv @ column

    state.gamma[k] += delta
    if state.gamma[k] < 0.0:
        state.gamma[k] = 0.0
    state.sigma = _hermitian(
        state.sigma + delta * np.outer(column, column.conj()))
    state.sigma_inv = _hermitian(
        state.sigma_inv
        - (delta / denom) * np.outer(projected, projected.conj()))
    state.logdet_sigma += np.log1p(delta * step.quad)
    state.objective_F -= step.reward

    state.updates_since_refactor += 1
    if state.updates_since_refactor >= state.refactor_period:
        refactor(state, sigma_hat)
    return state


def dense_covariance(sequences, gamma, noise_var):
    weighted = sequences * gamma[np.newaxis, :]
    cov = weighted @ sequences.conj().T
    cov += noise_var * np.eye(sequences.shape[0])
    return _hermitian(cov)


def dense_inverse_logdet(sigma):
    """
    Inverse and log-determinant of a Hermitian positive definite matrix
    through its Cholesky factor.
    """
    factor = scipy.linalg.cho_factor(sigma, lower=True)
    inverse = scipy.linalg.cho_solve(factor, np.eye(sigma.shape[0]))
    logdet = 2.0 * float(np.sum(np.log(np.real(np.diag(factor[0])))))
    return _hermitian(inverse), logdet


def refactor(state, sigma_hat):
    """
    Rebuild Sigma from gamma and recompute its inverse, log-determinant and
    the objective from scratch.
    """
    state.sigma = dense_covariance(state.sequences, state.gamma,
                                   state.noise_var)
    try:
        state.sigma_inv, state.logdet_sigma = dense_inverse_logdet(
            state.sigma)
    except np.linalg.LinAlgError as e:
        raise SingularUpdateError('Cholesky refactorization failed: %s' % e)
    state.objective_F = objective(state, sigma_hat)
    state.updates_since_refactor = 0
    state.refactor_count += 1
    logging.debug('Refactorized covariance after %d updates (F=%.12g)',
                  state.iter_count, state.objective_F)
    return state


def dense_objective(sequences, gamma, noise_var, sigma_hat):
    """
    F(gamma) computed from scratch; the oracle for the cached machinery.
    """
    sigma = dense_covariance(sequences, np.asarray(gamma, dtype=float),
                             noise_var)
    inverse, logdet = dense_inverse_logdet(sigma)
    return logdet + trace_product(inverse, sigma_hat)


def inverse_drift(state):
    """
    max |Sigma Sigma^-1 - I|, the drift of the cached inverse.
    """
    product = state.sigma @ state.sigma_inv
    return float(np.max(np.abs(product - np.eye(state.seq_len))))


def full_reward_scan(state, sigma_hat):
    """
    Steps and rewards of all coordinates at the current state, without
    mutating it. Costs O(NR L^2).

    @rtype: RewardScan
    """
    sequences = state.sequences
    projected = state.sigma_inv @ sequences
    quad = np.real(np.einsum('lk,lk->k', sequences.conj(), projected))
    if np.any(~(quad > 0)):
        bad = int(np.argmin(quad))
        raise InconsistentStateError(
            'a_k^H Sigma^-1 a_k = %r for coordinate %d' % (quad[bad], bad))
    quad_data = np.real(np.einsum('lk,lk->k', projected.conj(),
                                  sigma_hat @ projected))

    delta = np.maximum((quad_data - quad) / quad ** 2, -state.gamma)
    reward = quad_data * delta / (1.0 + delta * quad) - np.log1p(delta * quad)
    return RewardScan(delta=delta, reward=np.maximum(reward, 0.0))
