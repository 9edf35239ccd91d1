"""Counter-based random streams.

Every random draw in the package goes through :func:`stream`, which keys a
Philox generator on ``(seed, *path)``.  A stream depends only on its key, so
work items may be evaluated in any order, or in parallel, and still see
exactly the same numbers.
"""

import numpy as np

# stream tags; keep stable, they are part of the reproducibility contract
SCATTER = 1
BUCKET = 2
PERTURB = 3
BOOTSTRAP = 4
TRIAL = 5


def stream(seed, *path):
    """Return a ``numpy.random.Generator`` for the key ``(seed, *path)``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(p) for p in path]])
    key = ss.generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed, *path):
    """Derive a child integer seed (63-bit) from ``(seed, *path)``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(p) for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
