"""
Utilities Module

Seed derivation and builders for the example networks.
"""

from .seeding import derive_seed, rng_for, trial_seeds

__all__ = [
    'derive_seed',
    'rng_for',
    'trial_seeds',
]
