"""
Seeded random streams.

All randomness flows through numpy Generators backed by the counter-based
Philox bit generator, so fold assignment and minibatch draws replay exactly for
a given seed and call sequence. Workers never share a stream: `split_rng`
spawns independent children.
"""

import numpy as np


def make_rng(seed):
    """Create the root stream for a run from an int seed or a SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(seed))


def split_rng(rng, count):
    """Spawn `count` independent child streams from `rng`."""
    return [np.random.Generator(np.random.Philox(child))
            for child in rng.bit_generator.seed_seq.spawn(int(count))]


def spawn_seeds(seed, count):
    """Independent SeedSequences for `count` replications of a seeded study."""
    return np.random.SeedSequence(int(seed)).spawn(int(count))


def derive_seed(rng):
    """Draw a 32-bit integer seed, for APIs that take an int random_state."""
    return int(rng.integers(0, 2 ** 32 - 1))
