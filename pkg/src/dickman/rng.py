"""Seeding helpers.

Every ensemble draws path i from its own child of a SeedSequence, so results
do not depend on the order paths are run in.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

SEED_MAX = 2**64 - 1


def check_seed(seed) -> int:
    if int(seed) != seed or not 0 <= seed <= SEED_MAX:
        raise ParameterError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for ``seed`` and an optional stream key (e.g. a criterion id)."""
    return np.random.default_rng(np.random.SeedSequence([check_seed(seed), *key]))


def spawn_rngs(seed: int, n: int, *key: int) -> list[np.random.Generator]:
    """n independent generators, child i of SeedSequence([seed, *key])."""
    ss = np.random.SeedSequence([check_seed(seed), *key])
    return [np.random.default_rng(c) for c in ss.spawn(n)]
