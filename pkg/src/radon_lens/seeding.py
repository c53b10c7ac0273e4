"""Single source of randomness for the whole package.

Every stochastic operation takes an integer seed and builds its generator
here, so identical seeds give identical results across runs and platforms.
The bit generator is Philox (counter-based, 64-bit output), whose stream is
specified independently of the hardware.
"""

import numpy as np


def make_rng(seed):
    """Return a ``numpy.random.Generator`` backed by Philox for ``seed``."""
    return np.random.Generator(np.random.Philox(seed))
