"""Depth-first mining of frequent episodes and greedy best-extension growth.

Both routes share one primitive: given the occurrence windows of a prefix,
find every event that follows a window end within ``max_gap`` time units and
group the resulting windows by ``(event type, gap)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .events import (
    TIME_DTYPE,
    Episode,
    EventSequence,
    OccurrenceList,
    OccurrenceWindow,
)


@dataclass(frozen=True)
class MinerConfig:
    max_gap: int = 5
    freq_threshold: float = 0.0
    max_episode_len: int | None = None
    # absolute count; overrides freq_threshold when set
    min_count: int | None = None

    def __post_init__(self):
        if self.max_gap < 1:
            raise ValueError("max_gap must be >= 1")
        if not 0.0 <= self.freq_threshold <= 1.0:
            raise ValueError("freq_threshold must lie in [0, 1]")
        if self.max_episode_len is not None and self.max_episode_len < 1:
            raise ValueError("max_episode_len must be >= 1")
        if self.min_count is not None and self.min_count < 1:
            raise ValueError("min_count must be >= 1")

    def threshold(self, n: int) -> int:
        """Smallest admissible frequency on a sequence of ``n`` events."""
        if self.min_count is not None:
            return self.min_count
        # tolerate float noise in f_th * n (e.g. (2/30) * 30)
        return max(1, math.ceil(self.freq_threshold * n - 1e-9))


class CandidateSet(list):
    """Ordered list of ``OccurrenceList`` with an episode lookup."""

    def episodes(self) -> list[Episode]:
        return [c.episode for c in self]

    def find(self, episode: Episode) -> OccurrenceList | None:
        for c in self:
            if c.episode == episode:
                return c
        return None


class _Index:
    """Time-sorted view of the events usable as extensions."""

    def __init__(self, types: np.ndarray, times: np.ndarray, n_types: int):
        self.types = types
        self.times = times
        self.n_types = n_types

    @classmethod
    def of_sequence(cls, seq: EventSequence) -> "_Index":
        return cls(seq.types, seq.times, len(seq.alphabet))

    @classmethod
    def of_ones(cls, ones: Iterable[OccurrenceList]) -> "_Index":
        ones = list(ones)
        if not ones:
            return cls(np.empty(0, np.int64), np.empty(0, TIME_DTYPE), 0)
        types = np.concatenate([np.full(o.frequency, o.episode.types[0]) for o in ones]).astype(np.int64)
        times = np.concatenate([o.starts for o in ones])
        order = np.lexsort((types, times))
        return cls(types[order], times[order], int(types.max(initial=-1)) + 1)

    def extensions(self, starts: np.ndarray, span: int, exclude: Sequence[int], max_gap: int):
        """Group candidate extension windows by (type, gap).

        Returns ``(keys, counts, groups)`` where ``keys`` are sorted
        ``type * (max_gap + 1) + gap`` codes, ``counts`` the group sizes and
        ``groups`` the start times of each group (ascending) concatenated in
        key order.
        """
        ends = starts + span
        lo = np.searchsorted(self.times, ends, side="right")
        hi = np.searchsorted(self.times, ends + max_gap, side="right")
        sizes = hi - lo
        total = int(sizes.sum())
        if total == 0:
            empty = np.empty(0, np.int64)
            return empty, empty, np.empty(0, TIME_DTYPE)
        owner = np.repeat(np.arange(len(starts)), sizes)
        idx = np.arange(total) - np.repeat(np.cumsum(sizes) - sizes, sizes) + lo[owner]
        ext_types = self.types[idx]
        gaps = self.times[idx] - ends[owner]
        keep = ~np.isin(ext_types, np.asarray(exclude, dtype=np.int64))
        key = ext_types[keep] * (max_gap + 1) + gaps[keep]
        ext_starts = starts[owner[keep]]
        # stable: starts stay ascending within a key
        order = np.argsort(key, kind="stable")
        key = key[order]
        ext_starts = ext_starts[order]
        keys, counts = np.unique(key, return_counts=True)
        return keys, counts, ext_starts


def _split(keys, counts, groups, max_gap):
    offs = np.concatenate(([0], np.cumsum(counts)))
    width = max_gap + 1
    for i, key in enumerate(keys.tolist()):
        yield key // width, key % width, groups[offs[i]:offs[i + 1]]


def one_node_lists(seq: EventSequence, min_count: int = 1) -> list[OccurrenceList]:
    return [OccurrenceList(Episode((e,)), seq.times_of(e))
            for e in seq.present_types if seq.type_counts[e] >= min_count]


def find_lists(prefix: OccurrenceList, single: OccurrenceList, max_gap: int) -> dict[int, list[OccurrenceWindow]]:
    """Windows of ``prefix -j-> single`` for every gap ``j`` in ``1..max_gap``.

    Scans forward from each prefix window end through the (sorted) times of
    the 1-node episode ``single``.
    """
    slots: dict[int, list[OccurrenceWindow]] = {j: [] for j in range(1, max_gap + 1)}
    times = single.starts
    span = prefix.episode.span
    for ts in prefix.starts.tolist():
        te = ts + span
        i = int(np.searchsorted(times, te, side="right"))
        while i < len(times) and times[i] - te <= max_gap:
            slots[int(times[i] - te)].append(OccurrenceWindow(ts, int(times[i])))
            i += 1
    return slots


def explore_dfs(prefix: OccurrenceList, ones: Sequence[OccurrenceList], cfg: MinerConfig,
                out: list, *, threshold: int | None = None, index: _Index | None = None) -> None:
    """Append every frequent right extension of ``prefix`` to ``out``."""
    if index is None:
        index = _Index.of_ones(ones)
    if threshold is None:
        threshold = cfg.threshold(len(index.times))
    allowed = {o.episode.types[0] for o in ones}
    cap = cfg.max_episode_len
    stack = [(prefix, False)]
    while stack:
        alpha, emit = stack.pop()
        if emit:
            out.append(alpha)
        ep = alpha.episode
        if (cap is not None and ep.k >= cap) or alpha.frequency < threshold:
            continue
        keys, counts, groups = index.extensions(alpha.starts, ep.span, ep.types, cfg.max_gap)
        children = [
            (OccurrenceList(ep.extend(etype, gap), starts), True)
            for etype, gap, starts in _split(keys, counts, groups, cfg.max_gap)
            if len(starts) >= threshold and etype in allowed
        ]
        stack.extend(reversed(children))


def mine_episodes(seq: EventSequence, cfg: MinerConfig, workers: int | None = None) -> CandidateSet:
    """All frequent injective fixed-interval episodes, 1-node ones included."""
    out = CandidateSet()
    if len(seq) == 0:
        return out
    threshold = cfg.threshold(len(seq))
    ones = one_node_lists(seq, threshold)
    index = _Index.of_sequence(seq)
    if workers is None:
        workers = int(os.environ.get("CSC_THREADS", "1") or 1)

    def subtree(one):
        found = [one]
        explore_dfs(one, ones, cfg, found, threshold=threshold, index=index)
        return found

    if workers > 1 and len(ones) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(subtree, ones))
    else:
        results = [subtree(one) for one in ones]
    for found in results:
        out.extend(found)
    return out


def extension_bar(k: int) -> int:
    """Least frequency that lets a ``k``-node prefix grow, as an integer."""
    return -(-(2 * (k + 1) + 1) // k)


def _extend_best(prefix: OccurrenceList, index: _Index, allowed, max_gap: int) -> OccurrenceList | None:
    ep = prefix.episode
    bar = extension_bar(ep.k)
    if prefix.frequency < bar:
        return None
    keys, counts, groups = index.extensions(prefix.starts, ep.span, ep.types, max_gap)
    if len(keys) == 0:
        return None
    width = max_gap + 1
    ok = counts >= bar
    if allowed is not None:
        ok &= np.isin(keys // width, allowed)
    if not ok.any():
        return None
    # max frequency, then smallest gap, then smallest type id
    cand = np.flatnonzero(ok)
    best = cand[np.lexsort((keys[cand] // width, keys[cand] % width, -counts[cand]))[0]]
    start = int(counts[:best].sum())
    key = int(keys[best])
    return OccurrenceList(ep.extend(key // width, key % width), groups[start:start + counts[best]])


def extend_best(prefix: OccurrenceList, ones: Sequence[OccurrenceList], max_gap: int) -> OccurrenceList | None:
    """The single most frequent admissible right extension of ``prefix``, if any."""
    index = _Index.of_ones(ones)
    allowed = np.array(sorted({o.episode.types[0] for o in ones}), dtype=np.int64)
    return _extend_best(prefix, index, allowed, max_gap)


def best_extensions(seq: EventSequence, max_gap: int, workers: int | None = None,
                    growth: str = "score") -> CandidateSet:
    """Grow one candidate per event type by repeated best extension.

    ``growth="score"`` stops as soon as the best extension would not raise
    the episode's score; ``growth="literal"`` keeps extending while any
    extension clears the frequency bar.
    """
    from .selector import score

    if growth not in ("score", "literal"):
        raise ValueError(f"unknown growth rule {growth!r}")

    out = CandidateSet()
    if len(seq) == 0:
        return out
    index = _Index.of_sequence(seq)
    if workers is None:
        workers = int(os.environ.get("CSC_THREADS", "1") or 1)

    def grow(one):
        patt = one
        while (nxt := _extend_best(patt, index, None, max_gap)) is not None:
            if growth == "score" and (score(nxt.episode.k, nxt.frequency)
                                      <= score(patt.episode.k, patt.frequency)):
                break
            patt = nxt
        if patt.episode.k > 1 and score(patt.episode.k, patt.frequency) > 0:
            return patt
        return None

    ones = one_node_lists(seq)
    if workers > 1 and len(ones) > 1:
        with ThreadPoolExecutor(workers) as pool:
            grown = list(pool.map(grow, ones))
    else:
        grown = [grow(one) for one in ones]
    out.extend(g for g in grown if g is not None)
    return out
