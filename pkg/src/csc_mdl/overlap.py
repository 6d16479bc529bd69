"""Pairwise shared-event counts between candidate episodes."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np

from .events import EventSequence, OccurrenceList

DENSE_LIMIT = 4096


class OverlapMatrix:
    """Symmetric matrix of shared-event counts with a zero diagonal.

    Dense numpy storage up to ``DENSE_LIMIT`` candidates, a dict of rows
    beyond that.
    """

    def __init__(self, size: int, dense: bool | None = None):
        self.size = size
        self.dense = size <= DENSE_LIMIT if dense is None else dense
        if self.dense:
            self._m = np.zeros((size, size), dtype=np.int64)
        else:
            self._rows: dict[int, dict[int, int]] = defaultdict(dict)

    def __getitem__(self, ab) -> int:
        a, b = ab
        if self.dense:
            return int(self._m[a, b])
        return self._rows.get(a, {}).get(b, 0)

    def row(self, a: int) -> np.ndarray:
        if self.dense:
            return self._m[a]
        out = np.zeros(self.size, dtype=np.int64)
        for b, c in self._rows.get(a, {}).items():
            out[b] = c
        return out

    def to_array(self) -> np.ndarray:
        if self.dense:
            return self._m.copy()
        return np.stack([self.row(a) for a in range(self.size)]) if self.size else np.zeros((0, 0), np.int64)

    def __eq__(self, other) -> bool:
        if isinstance(other, OverlapMatrix):
            other = other.to_array()
        return np.array_equal(self.to_array(), np.asarray(other))

    def __repr__(self) -> str:
        return f"OverlapMatrix({self.size}x{self.size}, dense={self.dense})"


def _pair_keys(members: np.ndarray, sizes: np.ndarray, size: int) -> np.ndarray:
    """``a * size + b`` for every ordered pair ``a != b`` inside each group."""
    group_start = np.cumsum(sizes) - sizes
    per_elem = np.repeat(sizes, sizes)
    left = np.repeat(members, per_elem)
    base = np.repeat(np.repeat(group_start, sizes), per_elem)
    run_start = np.cumsum(per_elem) - per_elem
    right = members[base + np.arange(len(left)) - np.repeat(run_start, per_elem)]
    keep = left != right
    return left[keep] * size + right[keep]


def _add_groups(om: OverlapMatrix, members: list[int], sizes: list[int], budget: int = 4_000_000) -> None:
    members_a = np.asarray(members, dtype=np.int64)
    sizes_a = np.asarray(sizes, dtype=np.int64)
    if om.dense:
        # big groups go straight into the matrix instead of through pair lists
        big = sizes_a * sizes_a > budget // 4
        if big.any():
            ends = np.cumsum(sizes_a)
            for i in np.flatnonzero(big).tolist():
                g = members_a[ends[i] - sizes_a[i]:ends[i]]
                om._m[np.ix_(g, g)] += 1
                om._m[g, g] -= 1
            keep = np.repeat(~big, sizes_a)
            members_a, sizes_a = members_a[keep], sizes_a[~big]
    ends = np.cumsum(sizes_a)
    cost = np.cumsum(sizes_a * sizes_a)
    lo, done = 0, 0
    while lo < len(sizes_a):
        # largest run of groups whose pair count fits the budget (at least one)
        hi = max(lo + 1, int(np.searchsorted(cost, done + budget, side="right")))
        first = int(ends[lo - 1]) if lo else 0
        keys = _pair_keys(members_a[first:int(ends[hi - 1])], sizes_a[lo:hi], om.size)
        if om.dense:
            om._m += np.bincount(keys, minlength=om.size * om.size).reshape(om.size, om.size)
        else:
            uniq, counts = np.unique(keys, return_counts=True)
            for key, c in zip(uniq.tolist(), counts.tolist()):
                a, b = divmod(key, om.size)
                om._rows[a][b] = om._rows[a].get(b, 0) + c
        done = int(cost[hi - 1])
        lo = hi


def find_overlap_matrix(seq: EventSequence, candidates: Sequence[OccurrenceList],
                        dense: bool | None = None) -> OverlapMatrix:
    """One pass over ``seq`` with episode automata.

    An automaton state is ``(candidate, j, t_s)``: it has accepted nodes
    ``0..j-1`` of an occurrence starting at ``t_s`` and waits for node ``j``.
    Waiting states are keyed by the ``(type, time)`` they can accept, i.e.
    node ``j``'s type at ``t_s`` plus its offset from the first node.
    Candidates accepting the same event share it; the pair counts are
    summed afterwards.
    """
    om = OverlapMatrix(len(candidates), dense)
    spawn: dict[tuple[int, int], list[int]] = defaultdict(list)
    for ci, cand in enumerate(candidates):
        e0 = cand.episode.types[0]
        for t in cand.starts.tolist():
            spawn[(e0, t)].append(ci)
    waits: dict[tuple[int, int], list[tuple[int, int, int]]] = defaultdict(list)
    members: list[int] = []
    sizes: list[int] = []

    for etype, t in zip(seq.types.tolist(), seq.times.tolist()):
        accepted = []
        for ci in spawn.get((etype, t), ()):
            accepted.append(ci)
            ep = candidates[ci].episode
            if ep.k > 1:
                waits[(ep.types[1], t + ep.offsets[1])].append((ci, 1, t))
        for ci, j, ts in waits.pop((etype, t), ()):
            accepted.append(ci)
            ep = candidates[ci].episode
            if j + 1 < ep.k:
                waits[(ep.types[j + 1], ts + ep.offsets[j + 1])].append((ci, j + 1, ts))
        if len(accepted) > 1:
            members.extend(accepted)
            sizes.append(len(accepted))
    if sizes:
        _add_groups(om, members, sizes)
    return om
