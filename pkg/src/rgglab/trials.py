"""Monte Carlo estimates and the deterministic trial runner."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInputError
from .rng import trial_seed


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidInputError("an estimate needs at least one trial")
        if not self.std_error >= 0:
            raise InvalidInputError("standard error must be non-negative")

    @classmethod
    def from_samples(cls, values: Sequence[float]) -> "Estimate":
        x = np.asarray(values, dtype=float)
        if x.size == 0:
            raise InvalidInputError("no samples")
        se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
        return cls(float(x.mean()), se, int(x.size))

    @classmethod
    def binomial(cls, successes: int, trials: int) -> "Estimate":
        if trials < 1:
            raise InvalidInputError("an estimate needs at least one trial")
        p = successes / trials
        return cls(p, math.sqrt(p * (1 - p) / trials), int(trials))


def fmt(value) -> str:
    """Shortest round-trip decimal form, locale independent; integers stay
    integers and strings pass through."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def csv_text(header: str, rows) -> str:
    return header + "\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)


def run_trials(fn: Callable, master_seed: int, trials: int, jobs: int = 1, args: tuple = ()) -> list:
    """Call ``fn(seed_k, *args)`` for k = 0..trials-1 and return the results
    in index order. Seeds depend only on (master_seed, k), so the result is
    the same for any ``jobs``."""
    if trials < 1:
        raise InvalidInputError(f"trials must be at least 1, got {trials}")
    if jobs < 1:
        raise InvalidInputError(f"jobs must be at least 1, got {jobs}")
    seeds = [trial_seed(master_seed, k) for k in range(trials)]
    if jobs == 1:
        return [fn(s, *args) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, trials // (4 * jobs))
        return list(pool.map(fn, seeds, *[[a] * trials for a in args], chunksize=chunk))
