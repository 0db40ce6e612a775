"""Seeded random streams.

All randomness flows through Philox generators built from explicit seeds, so
any run can be replayed from its recorded 64-bit seed.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

_MASK64 = (1 << 64) - 1


def check_seed(seed) -> int:
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise InvalidInputError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise InvalidInputError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(check_seed(seed))))


def resolve_rng(rng) -> tuple[np.random.Generator, int | None]:
    """Accept a seed or a ready generator; return the generator and the seed if known."""
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = check_seed(rng)
    return make_rng(seed), seed


def trial_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit substream seed for trial ``index`` of a run."""
    state = np.random.SeedSequence([check_seed(master_seed), int(index)]).generate_state(1, np.uint64)
    return int(state[0])


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def pair_uniforms(key: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Counter-based uniforms in [0, 1), one per unordered pair (i, j), i < j.

    The value depends only on ``key`` and the pair, never on which other
    pairs were queried, so edges drawn at different parameters share them.
    """
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _splitmix64(np.uint64(key & _MASK64) ^ _splitmix64((i << np.uint64(32)) | j))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
