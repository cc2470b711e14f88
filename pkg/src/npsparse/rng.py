"""Seeding scheme for reproducible, order-independent Monte Carlo streams.

Every random draw in the package goes through a Philox counter-based
generator keyed by an explicit entropy tuple, so trial results do not
depend on worker scheduling or on how many draws other trials consumed.
"""

import numpy as np

SeedLike = "int | tuple[int, ...] | np.random.Generator"


def trial_entropy(master_seed, trial_index, n, m, k):
    """Entropy tuple identifying one trial of one experiment cell."""
    return (int(master_seed), int(trial_index), int(n), int(m), int(k))


def make_generator(seed):
    """Build a Philox-backed generator from an int, entropy tuple, or pass
    through an existing :class:`numpy.random.Generator` unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (int, np.integer)):
        entropy = [int(seed)]
    else:
        entropy = [int(x) for x in seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
