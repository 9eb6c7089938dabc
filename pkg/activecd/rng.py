"""
Named random substreams derived from a master seed.

Each consumer (sequence draw, activity draw, channels, noise, device
placement, coordinate-selection policy) owns its own generator, so swapping
a policy or adding a draw never perturbs the others.
"""

import numpy as np

from .define import STREAM_NAMES
from .utils import ConfigError


class RandomStreams(object):
    """
    Factory of independent numpy generators keyed by stream name.

    @param master_seed: Non-negative 64-bit experiment seed.
    @type master_seed: int

    @param replicate: Replicate (trial) index; every replicate gets an
        unrelated family of streams.
    @type replicate: int
    """

    def __init__(self, master_seed, replicate=0):
        if master_seed < 0 or master_seed >= 2 ** 64:
            raise ConfigError('master_seed must fit in 64 unsigned bits, '
                              'got %r' % master_seed)
        if replicate < 0:
            raise ConfigError('replicate must be non-negative')
        self.master_seed = int(master_seed)
        self.replicate = int(replicate)

    def seed_sequence(self, name):
        try:
            index = STREAM_NAMES.index(name)
        except ValueError:
            raise ConfigError('unknown random stream %r' % name)
        return np.random.SeedSequence(
            entropy=[self.master_seed, self.replicate],
            spawn_key=(index,))

    def stream(self, name):
        """
        Return a fresh generator for the named stream. Calling this twice
        with the same name yields two generators in the same state.

        @rtype: numpy.random.Generator
        """
        return np.random.Generator(np.random.PCG64(self.seed_sequence(name)))

    def __repr__(self):
        return 'RandomStreams(master_seed=%d, replicate=%d)' % (
            self.master_seed, self.replicate)
