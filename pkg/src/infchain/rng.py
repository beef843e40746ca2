"""Counter-based random streams.

Every random draw in the library comes from a Philox generator keyed by a
tuple ``(seed, *ids)``.  Replication ``i`` of an experiment always reads the
stream ``(seed, stream_id, i)``, so results do not depend on how
replications are batched or scheduled across threads.
"""

import numpy as np

# Stream identifiers.  Fixed integers so that streams stay stable across
# releases.
PRE = 1  # innovations for t <= 0 (burn-in of the primary path)
POST = 2  # innovations for t >= 1 (shared by coupled paths)
PRE_STAR = 3  # independent burn-in innovations of the coupled copy
AUX = 4  # estimation side runs (moments, means, variances)
LIPSCHITZ = 5
STATS = 6


def stream(seed, *ids):
    """Return the generator for the stream ``(seed, *ids)``."""
    if seed is None:
        raise ValueError("an explicit seed is required")
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    key.extend(int(i) for i in ids)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))
