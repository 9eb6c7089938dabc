# -*- coding: utf-8 -*-

"""
Scenario generation for grant-free random access: signature sequences,
activity ground truth, Rayleigh channels, noise, the received signal and
its sample covariance.

Coordinates of the decision vector are laid out device-major: column
k = i * R + r of the sequence matrix belongs to device i, message r
(both zero-based).
"""

import logging
import math

import attr
import numpy as np

from .define import (PATHLOSS_CONST_DB, PATHLOSS_SLOPE, CELL_RADIUS_KM,
                     MIN_DISTANCE_KM, TX_POWER_DBM, NOISE_POWER_DBM)
from .utils import ConfigError, DomainError


PLACEMENTS = ('edge', 'disk')


def _optional_distances(value):
    if value is None:
        return None
    return tuple(float(d) for d in value)


@attr.s(frozen=True)
class SystemConfig(object):
    """
    All scenario and physical-layer parameters of one experiment.
    """
    num_devices = attr.ib(default=1500, converter=int)
    bits_per_message = attr.ib(default=1, converter=int)
    seq_len = attr.ib(default=200, converter=int)
    num_antennas = attr.ib(default=16, converter=int)
    num_active = attr.ib(default=50, converter=int)
    tx_power_dbm = attr.ib(default=TX_POWER_DBM, converter=float)
    noise_power_dbm = attr.ib(default=NOISE_POWER_DBM, converter=float)
    pathloss_const_db = attr.ib(default=PATHLOSS_CONST_DB, converter=float)
    pathloss_slope = attr.ib(default=PATHLOSS_SLOPE, converter=float)
    cell_radius_km = attr.ib(default=CELL_RADIUS_KM, converter=float)
    placement = attr.ib(default='edge')
    min_distance_km = attr.ib(default=MIN_DISTANCE_KM, converter=float)
    distances_km = attr.ib(default=None, converter=_optional_distances)
    normalize_power = attr.ib(default=True, converter=bool)
    master_seed = attr.ib(default=0, converter=int)

    def __attrs_post_init__(self):
        for name in ('num_devices', 'bits_per_message', 'seq_len',
                     'num_antennas'):
            if getattr(self, name) < 1:
                raise ConfigError('%s must be a positive integer' % name)
        if self.num_active < 0:
            raise ConfigError('num_active must be non-negative')
        if self.num_active > self.num_devices:
            raise ConfigError('num_active (%d) exceeds num_devices (%d)'
                              % (self.num_active, self.num_devices))
        for name in ('tx_power_dbm', 'noise_power_dbm', 'pathloss_const_db',
                     'pathloss_slope'):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError('%s must be finite' % name)
        if self.cell_radius_km <= 0:
            raise ConfigError('cell_radius_km must be positive')
        if self.placement not in PLACEMENTS:
            raise ConfigError('placement must be one of %s, got %r'
                              % (PLACEMENTS, self.placement))
        if not 0 < self.min_distance_km <= self.cell_radius_km:
            raise ConfigError('min_distance_km must lie in (0, cell radius]')
        if self.distances_km is not None:
            if len(self.distances_km) != self.num_devices:
                raise ConfigError('distances_km must list one distance '
                                  'per device')
            if any(not d > 0 for d in self.distances_km):
                raise ConfigError('device distances must be positive')
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError('master_seed must fit in 64 unsigned bits')

    @property
    def num_messages(self):
        """R = 2^J."""
        return 2 ** self.bits_per_message

    @property
    def num_coords(self):
        return self.num_devices * self.num_messages


@attr.s
class GroundTruth(object):
    """
    The activity draw of one scenario.

    @ivar active_set: Sorted tuple of active device indices.
    @ivar messages: Message index per active device, aligned with active_set.
    @ivar gamma_true: Length-NR vector, one nonzero per active device block.
    @ivar pathloss: Linear (possibly normalized) pathloss power per device.
    """
    active_set = attr.ib()
    messages = attr.ib()
    gamma_true = attr.ib(repr=False)
    pathloss = attr.ib(repr=False)
    num_messages = attr.ib()

    @property
    def num_devices(self):
        return len(self.pathloss)

    @property
    def num_active(self):
        return len(self.active_set)


def coord_index(device, message, num_messages):
    return device * num_messages + message


def _raw_pathloss(distance_km, config):
    gain_db = (config.pathloss_const_db
               - config.pathloss_slope * np.log10(distance_km))
    return 10.0 ** (gain_db / 10.0)


def reference_pathloss(config):
    """
    Linear pathloss at the cell radius; the power normalization factor.
    """
    return float(_raw_pathloss(config.cell_radius_km, config))


def pathloss_linear(distance_km, config):
    """
    Linear pathloss power g^2 = 10^((C - S log10(d)) / 10) with d in km.

    When config.normalize_power is set the value is divided by the pathloss
    at the cell radius, so a device at the cell edge has unit power.

    @param distance_km: Scalar or array of positive distances.
    @type distance_km: float or numpy.ndarray

    @return: Linear power of the same shape.
    @rtype: float or numpy.ndarray
    """
    distance = np.asarray(distance_km, dtype=float)
    if np.any(~(distance > 0)):
        raise DomainError('distance must be positive, got %r' % distance_km)

    value = _raw_pathloss(distance, config)
    if config.normalize_power:
        value = value / reference_pathloss(config)

    if value.ndim == 0:
        return float(value)
    return value


def effective_noise_var(config):
    """
    Noise power normalized by the transmit power, rescaled by the same
    reference factor as pathloss_linear so the signal-to-noise ratio of the
    scenario is unchanged.
    """
    noise_var = 10.0 ** ((config.noise_power_dbm - config.tx_power_dbm) / 10.0)
    if config.normalize_power:
        noise_var /= reference_pathloss(config)
    return noise_var


def device_distances(config, rng):
    """
    Distances of all devices from the base station.

    'edge' puts every device at the cell radius; 'disk' draws positions
    uniformly over the annulus [min_distance_km, cell_radius_km].
    """
    if config.distances_km is not None:
        return np.array(config.distances_km, dtype=float)

    if config.placement == 'edge':
        return np.full(config.num_devices, config.cell_radius_km)

    inner = config.min_distance_km ** 2
    outer = config.cell_radius_km ** 2
    u = rng.random(config.num_devices)
    return np.sqrt(inner + u * (outer - inner))


def complex_gaussian(rng, shape, variance=1.0):
    """
    I.i.d. circularly-symmetric complex Gaussian entries of the given
    per-entry variance.
    """
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape)
                    + 1j * rng.standard_normal(shape))


def generate_sequences(config, rng):
    """
    Signature matrix Q of shape L x NR with entries CN(0, 1/L).
    """
    return complex_gaussian(rng, (config.seq_len, config.num_coords),
                            variance=1.0 / config.seq_len)


def generate_scenario(config, streams):
    """
    Draw one grant-free access scenario.

    @param config: Scenario parameters.
    @type config: SystemConfig

    @param streams: Named random substreams.
    @type streams: activecd.rng.RandomStreams

    @return: Tuple (Q, truth, Y) of the L x NR sequence matrix, the ground
        truth and the L x M received signal.
    @rtype: (numpy.ndarray, GroundTruth, numpy.ndarray)
    """
    if config.num_active > config.num_devices:
        raise ConfigError('num_active exceeds num_devices')

    L, M = config.seq_len, config.num_antennas
    N, R, K = config.num_devices, config.num_messages, config.num_active

    sequences = generate_sequences(config, streams.stream('sequences'))

    distances = device_distances(config, streams.stream('placement'))
    pathloss = pathloss_linear(distances, config)
    pathloss = np.atleast_1d(np.asarray(pathloss, dtype=float))

    activity_rng = streams.stream('activity')
    active = np.sort(activity_rng.choice(N, size=K, replace=False))
    messages = activity_rng.integers(0, R, size=K)

    gamma_true = np.zeros(N * R)
    columns = active * R + messages
    gamma_true[columns] = pathloss[active]

    channels = complex_gaussian(streams.stream('channels'), (K, M))
    noise_var = effective_noise_var(config)
    noise = complex_gaussian(streams.stream('noise'), (L, M),
                             variance=noise_var)

    amplitudes = np.sqrt(pathloss[active])[:, np.newaxis]
    received = sequences[:, columns] @ (amplitudes * channels) + noise

    truth = GroundTruth(active_set=tuple(int(i) for i in active),
                        messages=tuple(int(m) for m in messages),
                        gamma_true=gamma_true,
                        pathloss=pathloss,
                        num_messages=R)

    logging.debug('Scenario: N=%d R=%d L=%d M=%d K=%d noise_var=%.4g',
                  N, R, L, M, K, noise_var)
    return sequences, truth, received


def sample_covariance(received):
    """
    Sample covariance (1/M) Y Y^H, made exactly Hermitian by averaging the
    conjugate pairs.

    @param received: L x M received signal (M >= 1).
    @type received: numpy.ndarray

    @rtype: numpy.ndarray
    """
    received = np.atleast_2d(received)
    num_antennas = received.shape[1]
    if num_antennas < 1:
        raise DomainError('received signal needs at least one antenna')
    cov = received @ received.conj().T / num_antennas
    return (cov + cov.conj().T) / 2.0


#
# Scenario serialization: complex matrices as interleaved re/im float64,
# row-major, with a shape header.
#

def encode_complex_matrix(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    interleaved = np.empty(matrix.size * 2)
    flat = matrix.ravel(order='C')
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    return {'shape': list(matrix.shape), 'dtype': 'complex128',
            'layout': 'row-major-interleaved',
            'data': interleaved.tolist()}


def decode_complex_matrix(payload):
    shape = tuple(payload['shape'])
    data = np.asarray(payload['data'], dtype=float)
    if data.size != 2 * int(np.prod(shape)):
        raise ValueError('complex matrix payload does not match its shape')
    return (data[0::2] + 1j * data[1::2]).reshape(shape)


def scenario_to_dict(config, sequences, truth, received):
    return {
        'config': attr.asdict(config),
        'sequences': encode_complex_matrix(sequences),
        'received': encode_complex_matrix(received),
        'truth': {
            'active_set': list(truth.active_set),
            'messages': list(truth.messages),
            'gamma_true': truth.gamma_true.tolist(),
            'pathloss': truth.pathloss.tolist(),
            'num_messages': truth.num_messages,
        },
    }


def scenario_from_dict(payload):
    """
    Inverse of scenario_to_dict.

    @return: Tuple (config, Q, truth, Y).
    """
    config = SystemConfig(**payload['config'])
    truth_payload = payload['truth']
    truth = GroundTruth(
        active_set=tuple(truth_payload['active_set']),
        messages=tuple(truth_payload['messages']),
        gamma_true=np.asarray(truth_payload['gamma_true'], dtype=float),
        pathloss=np.asarray(truth_payload['pathloss'], dtype=float),
        num_messages=truth_payload['num_messages'])
    return (config,
            decode_complex_matrix(payload['sequences']),
            truth,
            decode_complex_matrix(payload['received']))
