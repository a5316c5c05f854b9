"""Deterministic named random streams."""

import hashlib

import numpy as np


def _key(part):
    if isinstance(part, (int, np.integer)):
        return int(part)
    digest = hashlib.blake2s(str(part).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def stream(master_seed, *path):
    """Independent generator addressed by (master_seed, *path).

    The same address always yields the same draws; distinct addresses give
    statistically independent streams. Path parts may be ints or short
    strings (strings are hashed stably, not with the salted builtin hash).
    """
    # SeedSequence zero-pads its entropy, so [a] and [a, 0] would collide;
    # the explicit length keeps prefix addresses distinct from extensions
    entropy = [_key(master_seed), len(path)] + [_key(p) for p in path]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
