"""Stable, order-independent seeds for trials, vertices and valence types."""

import hashlib

import numpy as np


def derive_seed(seed: int, *labels) -> int:
    """
    Derive a 63-bit seed from a base seed and a sequence of labels.

    The result depends only on the arguments, never on call order or on
    Python's per-process hash randomization.

    Args:
        seed: Base seed
        *labels: Anything with a stable str() (trial number, vertex id, ...)

    Returns:
        Non-negative integer below 2^63
    """
    key = "\x1f".join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") & ((1 << 63) - 1)


def trial_seeds(seed: int, trials: int) -> list:
    """Per-trial seeds; the first k seeds never depend on the trial count."""
    return [derive_seed(seed, "trial", t) for t in range(trials)]


def rng_for(seed: int, *labels) -> np.random.Generator:
    """A numpy Generator seeded from derive_seed(seed, *labels)."""
    return np.random.default_rng(derive_seed(seed, *labels))
