# -*- coding: utf-8 -*-

"""
Coordinate-selection policies.

Four policies share one interface: uniform sampling (CD-Random), greedy
selection over cached rewards with probability epsilon (CD-Bernoulli),
the same rule with epsilon learned by an inner Beta-Bernoulli bandit over
q arms (CD-Thompson), and the full greedy rule that rescans every reward
each round (Gauss-Southwell).

Usage::

  >>> policy = make_policy(PolicyConfig('bernoulli'), num_coords)
  >>> policy.start(state, sigma_hat)
  >>> choice = policy.select(t, state, sigma_hat, rng)
"""

import abc
import logging

import attr
import numpy as np

from .covariance import coordinate_step, full_reward_scan
from .define import (POLICY_NAMES, DEFAULT_EPSILON, DEFAULT_NUM_ARMS,
                     DEFAULT_KAPPA_MAX, default_refresh_period)
from .utils import ConfigError, DomainError


@attr.s
class RewardCache(object):
    """
    Most recently observed reward of every coordinate.
    """
    r_bar = attr.ib(repr=False)
    last_full_refresh = attr.ib(default=0)
    scan_count = attr.ib(default=0)

    @classmethod
    def from_scan(cls, scan, t=0):
        cache = cls(r_bar=np.array(scan.reward, dtype=float))
        cache.last_full_refresh = t
        cache.scan_count = 1
        return cache

    def best(self):
        # lowest index on ties
        return int(np.argmax(self.r_bar))

    def record(self, k, reward):
        self.r_bar[k] = reward


@attr.s(frozen=True)
class BernoulliPolicyConfig(object):
    epsilon = attr.ib(default=DEFAULT_EPSILON, converter=float)
    refresh_period = attr.ib(default=1, converter=int)

    def __attrs_post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError('epsilon must lie in [0, 1], got %r'
                              % self.epsilon)
        if self.refresh_period < 1:
            raise ConfigError('refresh period must be at least 1')


@attr.s
class ThompsonState(object):
    """
    Beta posteriors of the q arms of the inner exploration bandit.
    """
    alpha = attr.ib(repr=False)
    beta = attr.ib(repr=False)
    refresh_period = attr.ib()
    kappa_max = attr.ib(default=DEFAULT_KAPPA_MAX)

    @classmethod
    def uniform_prior(cls, num_arms, refresh_period, prior_alpha=1.0,
                      prior_beta=1.0, kappa_max=DEFAULT_KAPPA_MAX):
        if num_arms < 1:
            raise ConfigError('the exploration bandit needs at least one arm')
        if not (prior_alpha > 0 and prior_beta > 0):
            raise ConfigError('Beta prior parameters must be positive')
        return cls(alpha=np.full(num_arms, float(prior_alpha)),
                   beta=np.full(num_arms, float(prior_beta)),
                   refresh_period=int(refresh_period),
                   kappa_max=float(kappa_max))

    @property
    def num_arms(self):
        return len(self.alpha)


@attr.s(frozen=True)
class Choice(object):
    """
    Outcome of one selection round. arm and nu are only set by Thompson
    sampling.
    """
    coordinate = attr.ib()
    greedy = attr.ib(default=False)
    arm = attr.ib(default=None)
    nu = attr.ib(default=None)


def _check_name(instance, attribute, value):
    if value not in POLICY_NAMES:
        raise ConfigError('unknown policy %r; expected one of %s'
                          % (value, ', '.join(POLICY_NAMES)))


def _optional_int(value):
    return None if value is None else int(value)


@attr.s(frozen=True)
class PolicyConfig(object):
    """
    Serializable description of a selection policy. refresh_period None
    means NR/2 rounded up. label distinguishes several configurations of
    the same policy (an epsilon sweep, say) in outputs.
    """
    name = attr.ib(validator=_check_name)
    epsilon = attr.ib(default=DEFAULT_EPSILON, converter=float)
    refresh_period = attr.ib(default=None, converter=_optional_int)
    num_arms = attr.ib(default=DEFAULT_NUM_ARMS, converter=int)
    prior_alpha = attr.ib(default=1.0, converter=float)
    prior_beta = attr.ib(default=1.0, converter=float)
    kappa_max = attr.ib(default=DEFAULT_KAPPA_MAX, converter=float)
    label = attr.ib(default=None)

    def __attrs_post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError('epsilon must lie in [0, 1]')
        if self.refresh_period is not None and self.refresh_period < 1:
            raise ConfigError('refresh_period must be at least 1')
        if self.num_arms < 1:
            raise ConfigError('num_arms must be at least 1')
        if not (self.prior_alpha > 0 and self.prior_beta > 0):
            raise ConfigError('Beta prior parameters must be positive')
        if not 0.0 <= self.kappa_max:
            raise ConfigError('kappa_max must be non-negative')

    @property
    def display_name(self):
        return self.label or self.name

    def resolved_refresh_period(self, num_coords):
        if self.refresh_period is None:
            return default_refresh_period(num_coords)
        return self.refresh_period


#
# Selection primitives
#

def select_random(num_coords, rng):
    """
    Uniform coordinate index in [0, num_coords).
    """
    if num_coords < 1:
        raise DomainError('there must be at least one coordinate')
    return int(rng.integers(num_coords))


def select_bernoulli(cache, cfg, rng):
    """
    With probability epsilon take the best cached reward, otherwise a
    uniform coordinate.

    @type cache: RewardCache
    @type cfg: BernoulliPolicyConfig

    @return: Tuple (coordinate, greedy).
    @rtype: (int, bool)
    """
    greedy = bool(rng.random() < cfg.epsilon)
    if greedy:
        return cache.best(), True
    return select_random(len(cache.r_bar), rng), False


def sample_beta(alpha, beta, rng):
    """
    Beta(alpha, beta) variates from two Gamma variates, G_a / (G_a + G_b).
    numpy's standard_gamma is a rejection sampler valid for every positive
    real shape, so alpha and beta need not be integers. Accepts scalars or
    arrays of matching shape.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(~(alpha > 0)) or np.any(~(beta > 0)):
        raise DomainError('Beta parameters must be positive, got %r, %r'
                          % (alpha, beta))

    gamma_a = rng.standard_gamma(alpha)
    gamma_b = rng.standard_gamma(beta)
    total = gamma_a + gamma_b
    # both draws may underflow to zero for tiny shapes
    sample = np.where(total > 0, gamma_a / np.where(total > 0, total, 1.0),
                      alpha / (alpha + beta))
    if sample.ndim == 0:
        return float(sample)
    return sample


def thompson_round(ts, cache, rng):
    """
    Sample every arm, keep the arm with the largest draw, and use its draw
    as the probability of a greedy selection.

    @type ts: ThompsonState
    @type cache: RewardCache

    @rtype: Choice
    """
    draws = np.atleast_1d(sample_beta(ts.alpha, ts.beta, rng))
    arm = int(np.argmax(draws))
    nu = float(draws[arm])

    greedy = bool(rng.random() < nu)
    if greedy:
        coordinate = cache.best()
    else:
        coordinate = select_random(len(cache.r_bar), rng)
    return Choice(coordinate=coordinate, greedy=greedy, arm=arm, nu=nu)


def thompson_update(ts, arm, nu, greedy, reward, objective_value):
    """
    Posterior update of the played arm with kappa = r / |F| clamped to
    [0, kappa_max]: alpha += nu * kappa after a greedy round, beta +=
    (1 - nu) * kappa otherwise.

    @return: The same, updated state.
    @rtype: ThompsonState
    """
    if reward < 0:
        raise DomainError('reward must be non-negative, got %r' % reward)

    if objective_value == 0 or not np.isfinite(objective_value):
        kappa = 0.0
    else:
        kappa = min(max(reward / abs(objective_value), 0.0), ts.kappa_max)

    if greedy:
        ts.alpha[arm] += nu * kappa
    else:
        ts.beta[arm] += (1.0 - nu) * kappa
    return ts


def refresh_cache(cache, scan, t):
    """
    Overwrite every cached reward with a full scan taken at round t.
    """
    cache.r_bar = np.array(scan.reward, dtype=float)
    cache.last_full_refresh = t
    cache.scan_count += 1
    return cache


#
# Policies driving the solver loop
#

class SelectionPolicy(abc.ABC):
    """
    Base class of coordinate-selection policies. Subclasses implement
    `select`; the hooks `start`, `observe` and `after_update` default to
    no-ops.
    """

    def __init__(self, config, num_coords):
        self.config = config
        self.num_coords = num_coords
        self.reward_scans = 0

    def start(self, state, sigma_hat):
        pass

    @abc.abstractmethod
    def select(self, t, state, sigma_hat, rng):
        raise NotImplementedError()

    def observe(self, choice, step, objective_value):
        pass

    def after_update(self, choice, state, sigma_hat):
        pass


class RandomPolicy(SelectionPolicy):
    def select(self, t, state, sigma_hat, rng):
        return Choice(coordinate=select_random(self.num_coords, rng))


class _CachedRewardPolicy(SelectionPolicy):
    """
    Shared bookkeeping of the policies that keep a reward cache refreshed
    by periodic full scans.
    """

    def __init__(self, config, num_coords):
        super(_CachedRewardPolicy, self).__init__(config, num_coords)
        self.refresh_period = config.resolved_refresh_period(num_coords)
        self.cache = None

    def start(self, state, sigma_hat):
        self.cache = RewardCache.from_scan(full_reward_scan(state, sigma_hat))
        self.reward_scans = self.cache.scan_count

    def _maybe_refresh(self, t, state, sigma_hat):
        if t % self.refresh_period == 0:
            refresh_cache(self.cache, full_reward_scan(state, sigma_hat), t)
            self.reward_scans = self.cache.scan_count
            logging.debug('Full reward scan at t=%d (%d so far)',
                          t, self.reward_scans)

    def after_update(self, choice, state, sigma_hat):
        k = choice.coordinate
        self.cache.record(k, coordinate_step(state, sigma_hat, k).reward)


class BernoulliPolicy(_CachedRewardPolicy):
    def __init__(self, config, num_coords):
        super(BernoulliPolicy, self).__init__(config, num_coords)
        self.bernoulli = BernoulliPolicyConfig(
            epsilon=config.epsilon, refresh_period=self.refresh_period)

    def select(self, t, state, sigma_hat, rng):
        self._maybe_refresh(t, state, sigma_hat)
        coordinate, greedy = select_bernoulli(self.cache, self.bernoulli, rng)
        return Choice(coordinate=coordinate, greedy=greedy)


class ThompsonPolicy(_CachedRewardPolicy):
    def __init__(self, config, num_coords):
        super(ThompsonPolicy, self).__init__(config, num_coords)
        self.thompson = ThompsonState.uniform_prior(
            config.num_arms, self.refresh_period,
            prior_alpha=config.prior_alpha, prior_beta=config.prior_beta,
            kappa_max=config.kappa_max)

    def select(self, t, state, sigma_hat, rng):
        self._maybe_refresh(t, state, sigma_hat)
        return thompson_round(self.thompson, self.cache, rng)

    def observe(self, choice, step, objective_value):
        thompson_update(self.thompson, choice.arm, choice.nu, choice.greedy,
                        step.reward, objective_value)


class GreedyPolicy(SelectionPolicy):
    def select(self, t, state, sigma_hat, rng):
        scan = full_reward_scan(state, sigma_hat)
        self.reward_scans += 1
        return Choice(coordinate=scan.best(), greedy=True)


POLICY_CLASSES = {
    'random': RandomPolicy,
    'bernoulli': BernoulliPolicy,
    'thompson': ThompsonPolicy,
    'greedy': GreedyPolicy,
}


def make_policy(config, num_coords):
    """
    Build the policy described by config.

    @type config: PolicyConfig
    @type num_coords: int

    @rtype: SelectionPolicy
    """
    return POLICY_CLASSES[config.name](config, num_coords)
