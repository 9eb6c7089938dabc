# -*- coding: utf-8 -*-

"""
Activity and message decisions from an estimated gamma, and the detection
error rates.
"""

import attr
import numpy as np

from .utils import DomainError


@attr.s(frozen=True)
class DetectionResult(object):
    """
    @ivar indicators: Length-NR 0/1 vector, at most one 1 per device block.
    @ivar threshold: The threshold s_th used.
    @ivar declared_active: Sorted tuple of devices declared active.
    @ivar decoded_messages: Mapping device -> decoded message.
    """
    indicators = attr.ib(repr=False)
    threshold = attr.ib()
    declared_active = attr.ib()
    decoded_messages = attr.ib(repr=False)

    @property
    def num_declared(self):
        return len(self.declared_active)


def _blocks(gamma_hat, num_messages):
    gamma_hat = np.asarray(gamma_hat, dtype=float)
    if gamma_hat.size % num_messages:
        raise DomainError('gamma length %d is not a multiple of R=%d'
                          % (gamma_hat.size, num_messages))
    return gamma_hat.reshape(-1, num_messages)


def decode(gamma_hat, threshold, num_messages):
    """
    Per device, pick the message with the largest gamma (lowest index on
    ties) and declare the device active when that value reaches threshold.

    @rtype: DetectionResult
    """
    blocks = _blocks(gamma_hat, num_messages)
    best = np.argmax(blocks, axis=1)
    maxima = blocks[np.arange(blocks.shape[0]), best]
    active = np.nonzero(maxima >= threshold)[0]

    indicators = np.zeros(blocks.shape, dtype=np.int8)
    indicators[active, best[active]] = 1
    return DetectionResult(
        indicators=indicators.ravel(),
        threshold=float(threshold),
        declared_active=tuple(int(i) for i in active),
        decoded_messages=dict((int(i), int(best[i])) for i in active))


def calibrate_threshold(gamma_hat, num_messages, target_active):
    """
    Threshold admitting the target_active devices with the largest block
    maxima: the target_active-th largest block maximum, or +inf for zero.
    Ties at the cut admit every tied device.

    @rtype: float
    """
    blocks = _blocks(gamma_hat, num_messages)
    num_devices = blocks.shape[0]
    if target_active < 0 or target_active > num_devices:
        raise DomainError('target of %d active devices is outside [0, %d]'
                          % (target_active, num_devices))
    if target_active == 0:
        return float('inf')
    maxima = np.sort(blocks.max(axis=1))[::-1]
    return float(maxima[target_active - 1])


def missed_detection_prob(truth, result):
    """
    Fraction of active devices declared inactive or decoded with the wrong
    message; 0 when nothing is active.
    """
    if truth.num_active == 0:
        return 0.0
    misses = 0
    for device, message in zip(truth.active_set, truth.messages):
        if result.decoded_messages.get(device) != message:
            misses += 1
    return misses / float(truth.num_active)


def false_alarm_prob(truth, result):
    """
    Fraction of inactive devices declared active; 0 when all are active.
    """
    inactive = truth.num_devices - truth.num_active
    if inactive == 0:
        return 0.0
    active = set(truth.active_set)
    alarms = sum(1 for device in result.declared_active
                 if device not in active)
    return alarms / float(inactive)


def detect(gamma_hat, truth, target_active=None, min_threshold=0.0):
    """
    Calibrate the threshold to target_active (default: the true K), decode,
    and score. min_threshold bounds the calibrated threshold from below; a
    tiny positive value keeps all-zero blocks undetected.

    @return: Tuple (result, p_md, p_fa).
    """
    if target_active is None:
        target_active = truth.num_active
    threshold = calibrate_threshold(gamma_hat, truth.num_messages,
                                    target_active)
    threshold = max(threshold, min_threshold)
    result = decode(gamma_hat, threshold, truth.num_messages)
    return (result, missed_detection_prob(truth, result),
            false_alarm_prob(truth, result))
