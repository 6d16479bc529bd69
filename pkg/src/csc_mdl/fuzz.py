"""Random sequence generators for fuzzing and experiments."""

from __future__ import annotations

import numpy as np

from .events import Episode, EventSequence


def random_sequence(rng: np.random.Generator, n: int, n_types: int,
                    simultaneous: bool = True, max_step: int = 3) -> EventSequence:
    """``n`` events over ``n_types`` types with time steps drawn from 1..max_step.

    With ``simultaneous`` a step may also be 0, so several (distinct) types
    can share a time stamp.
    """
    alphabet = [f"E{i}" for i in range(n_types)]
    if n == 0:
        return EventSequence.empty(alphabet)
    lo = 0 if simultaneous else 1
    steps = rng.integers(lo, max_step + 1, size=n)
    types = np.empty(n, dtype=np.int64)
    times = np.empty(n, dtype=np.int64)
    t, used = -1, set()
    for i in range(n):
        if steps[i] > 0 or t < 0 or len(used) == n_types:
            t += max(1, int(steps[i]))
            used = set()
        e = int(rng.integers(0, n_types))
        while e in used:
            e = int(rng.integers(0, n_types))
        used.add(e)
        types[i], times[i] = e, t
    order = np.lexsort((types, times))
    return EventSequence(types[order], times[order], alphabet)


def planted_sequence(rng: np.random.Generator, episode: Episode, copies: int,
                     n_types: int, noise: int = 0, stride: int | None = None) -> EventSequence:
    """Non-overlapping copies of ``episode`` plus ``noise`` random events."""
    stride = stride or episode.span + 2
    cells = set()
    for c in range(copies):
        for e, off in zip(episode.types, episode.offsets):
            cells.add((c * stride + off, e))
    horizon = copies * stride
    if noise > horizon * n_types - len(cells):
        raise ValueError(f"only {horizon * n_types - len(cells)} free cells for {noise} noise events")
    while noise > 0:
        cell = (int(rng.integers(0, horizon)), int(rng.integers(0, n_types)))
        if cell not in cells:
            cells.add(cell)
            noise -= 1
    pairs = sorted(cells)
    alphabet = [f"E{i}" for i in range(n_types)]
    return EventSequence.from_events([(e, t) for t, e in pairs], alphabet)
