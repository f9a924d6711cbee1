"""Counter-based random streams.

All randomness is drawn from Philox generators keyed by ``(seed, *stream)``
so that any block of work can be regenerated independently of execution order.
"""
import os

import numpy as np

MASK64 = (1 << 64) - 1


def rng_for(seed, *stream):
    """Return a Philox-backed generator for the given seed and stream path."""
    entropy = [int(seed) & MASK64] + [int(s) & MASK64 for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_generator(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return rng_for(0 if seed_or_rng is None else seed_or_rng)


def thread_count(requested=None):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("LATFADE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def complex_normal(rng, shape):
    """Circular complex Gaussian samples with unit total variance."""
    z = rng.standard_normal(shape + (2,) if isinstance(shape, tuple) else (shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)
