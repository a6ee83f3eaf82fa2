"""Seeded random streams.

All randomness in this package flows through numpy's PCG64 via
``default_rng``. Replicated runs derive independent substreams from a
master seed with :func:`substream`, so results do not depend on the
order in which replications execute.
"""
from __future__ import annotations

import numpy as np

__all__ = ["substream", "as_generator"]


def as_generator(seed: "int | np.random.Generator") -> np.random.Generator:
    """Pass Generators through, wrap integer seeds."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(master_seed: int, *indices: int) -> np.random.Generator:
    """Generator for substream ``(master_seed, *indices)``.

    The tuple is fed to ``SeedSequence`` whole, so substream (7, 1) and
    substream (71,) are unrelated streams. Replication i of a run uses
    (master_seed, i); sweeps add the sweep-point index.
    """
    if master_seed < 0:
        raise ValueError("master_seed must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence((master_seed, *indices)))
