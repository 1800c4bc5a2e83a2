"""Counter-based random streams.

Lazily generated trees need a node's randomness to depend only on the node
itself, never on the order in which nodes were visited.  A splitmix64 hash of
(seed, stream, key) gives that; it is vectorized over numpy key arrays.
"""

import numpy as np

_M64 = (1 << 64) - 1
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)


def _mix(z):
    z = z ^ (z >> np.uint64(30))
    z = z * _C1
    z = z ^ (z >> np.uint64(27))
    z = z * _C2
    return z ^ (z >> np.uint64(31))


def hash_u64(seed, stream, keys):
    """splitmix64 digest of (seed, stream, key) for each key."""
    keys = np.asarray(keys, dtype=np.uint64)
    base = np.uint64(_scalar_mix((int(seed) & _M64) ^ ((int(stream) * 0x632BE59BD9B4E019) & _M64)))
    with np.errstate(over="ignore"):
        return _mix(base + (keys + np.uint64(1)) * _GOLD)


def uniform(seed, stream, keys):
    """Uniform doubles in [0, 1) keyed by integers."""
    return (hash_u64(seed, stream, keys) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _scalar_mix(z):
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def derive_seed(master, *path):
    """Child seed for a trial or sub-stream, fixed by the path of integers."""
    z = int(master) & _M64
    for p in path:
        z = _scalar_mix(z ^ _scalar_mix(int(p) & _M64))
    return z


def generator(master, *path):
    """numpy Generator seeded from ``derive_seed(master, *path)``."""
    return np.random.default_rng(derive_seed(master, *path))
