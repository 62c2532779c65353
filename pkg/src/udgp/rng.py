"""Seeded random streams shared by every stochastic routine in the package.

All randomness goes through :func:`generator`, which wraps numpy's
counter-based Philox bit generator. Sub-streams are keyed by a tuple of
integers so that, e.g., multistart run ``k`` draws from ``(seed, k)`` and does
not depend on how many other runs executed before it.
"""

import numpy as np


def generator(seed, *keys):
    """Return a ``numpy.random.Generator`` for the stream ``(seed, *keys)``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
