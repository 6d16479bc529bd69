"""Greedy MDL selection of episodes (CSC-1 and CSC-2)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .events import Episode, EventSequence, OccurrenceList
from .miner import MinerConfig, best_extensions, mine_episodes
from .overlap import OverlapMatrix, find_overlap_matrix

log = logging.getLogger(__name__)

CSC1 = "csc1"
CSC2 = "csc2"


def score(episode_len: int, frequency: int) -> int:
    """Units saved over trivially encoding the events of all occurrences."""
    return frequency * episode_len - (2 * episode_len + frequency + 1)


def overlap_score(candidate: int, selected: Sequence[int], om: OverlapMatrix,
                  candidates: Sequence[OccurrenceList]) -> int:
    c = candidates[candidate]
    return score(c.episode.k, c.frequency) - sum(om[candidate, b] for b in selected)


@dataclass(frozen=True)
class SelectionConfig:
    max_patterns: int | None = None
    algorithm: str = CSC2
    miner: MinerConfig = field(default_factory=MinerConfig)

    def __post_init__(self):
        if self.max_patterns is not None and self.max_patterns < 1:
            raise ValueError("max_patterns must be >= 1 (use None for unbounded)")
        if self.algorithm not in (CSC1, CSC2):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class SelectedModel:
    """Selected multi-node episodes plus singleton rows for what is left.

    ``episodes`` keeps selection order; ``gains`` holds the overlap-score
    each episode had when it was admitted.
    """

    alphabet: tuple[str, ...]
    episodes: list[OccurrenceList] = field(default_factory=list)
    singletons: list[tuple[int, np.ndarray]] = field(default_factory=list)
    gains: list[int] = field(default_factory=list)

    @property
    def n_patterns(self) -> int:
        return len(self.episodes)


def delete_occurrences(seq: EventSequence, admitted: Sequence[OccurrenceList]) -> EventSequence:
    """``seq`` without any event covered by an occurrence in ``admitted``."""
    if not admitted or len(seq) == 0:
        return seq
    keep = np.ones(len(seq), dtype=bool)
    for occ in admitted:
        ep = occ.episode
        for etype, off in zip(ep.types, ep.offsets):
            pos = seq.locate(etype, occ.starts + off)
            if (pos < 0).any():
                raise ValueError(f"occurrence of {ep.format(seq.alphabet)} not in sequence")
            keep[pos] = False
    return seq.select(keep)


def singleton_rows(seq: EventSequence) -> list[tuple[int, np.ndarray]]:
    return [(e, seq.times_of(e)) for e in seq.present_types]


def _candidates(seq: EventSequence, cfg: SelectionConfig) -> list[OccurrenceList]:
    if cfg.algorithm == CSC1:
        found = mine_episodes(seq, cfg.miner)
    else:
        found = best_extensions(seq, cfg.miner.max_gap)
    multi = [c for c in found if c.episode.k > 1]
    # longer first, then lexicographic (types, gaps): argmax picks the first
    multi.sort(key=lambda c: (-c.episode.k, c.episode.key()))
    return multi


def select(seq: EventSequence, cfg: SelectionConfig) -> SelectedModel:
    model = SelectedModel(seq.alphabet)
    K = cfg.max_patterns
    current = seq
    covering = True
    while covering and (K is None or len(model.episodes) < K):
        cands = _candidates(current, cfg)
        if not cands:
            break
        om = find_overlap_matrix(current, cands)
        base = np.array([score(c.episode.k, c.frequency) for c in cands], dtype=np.int64)
        penalty = np.zeros(len(cands), dtype=np.int64)
        open_ = np.ones(len(cands), dtype=bool)
        admitted: list[OccurrenceList] = []
        while True:
            gain = np.where(open_, base - penalty, np.iinfo(np.int64).min)
            best = int(np.argmax(gain))
            if gain[best] <= 0 or not open_[best]:
                if not admitted:
                    covering = False
                break
            admitted.append(cands[best])
            model.gains.append(int(gain[best]))
            open_[best] = False
            penalty += om.row(best)
            if K is not None and len(model.episodes) + len(admitted) == K:
                break
        log.debug("iteration: %d candidates, %d admitted, %d events left",
                  len(cands), len(admitted), len(current))
        current = delete_occurrences(current, admitted)
        model.episodes.extend(admitted)
    model.singletons = singleton_rows(current)
    return model


def model_from_rows(alphabet: Sequence[str], episodes: Sequence[tuple[Episode, Sequence[int]]],
                    singletons: Sequence[tuple[int, Sequence[int]]] = ()) -> SelectedModel:
    """Assemble a model from explicit rows (e.g. a hand-written dictionary)."""
    return SelectedModel(
        tuple(alphabet),
        [OccurrenceList(ep, np.asarray(starts)) for ep, starts in episodes],
        [(int(e), np.asarray(ts, dtype=np.int64)) for e, ts in singletons],
    )
