"""Event sequences, fixed-interval serial episodes and their occurrences."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

TIME_DTYPE = np.int64
TYPE_DTYPE = np.int64


class SequenceError(ValueError):
    """Raised when events violate the sequence invariants."""


class Event(NamedTuple):
    event_type: int
    time: int


def _frozen(a) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class EventSequence:
    """Time-ordered events over an interned alphabet.

    Events sharing a time stamp are kept sorted by type id, so two sequences
    holding the same events always compare equal.
    """

    def __init__(self, types, times, alphabet: Sequence[str], *, check: bool = True):
        self.types = _frozen(np.asarray(types, dtype=TYPE_DTYPE).reshape(-1))
        self.times = _frozen(np.asarray(times, dtype=TIME_DTYPE).reshape(-1))
        self.alphabet = tuple(alphabet)
        if check:
            self._validate()

    def _validate(self) -> None:
        if self.types.shape != self.times.shape:
            raise SequenceError("types and times differ in length")
        if len(self.types) == 0:
            return
        if self.times[0] < 0:
            raise SequenceError("negative time stamp")
        if self.types.min() < 0 or self.types.max() >= len(self.alphabet):
            raise SequenceError("event type outside the alphabet")
        dt = np.diff(self.times)
        if (dt < 0).any():
            i = int(np.flatnonzero(dt < 0)[0]) + 1
            raise SequenceError(f"time decreases at event {i}")
        same = dt == 0
        dtype = np.diff(self.types)
        if (same & (dtype == 0)).any():
            i = int(np.flatnonzero(same & (dtype == 0))[0]) + 1
            raise SequenceError(
                f"duplicate event ({self.alphabet[self.types[i]]}, {self.times[i]})")
        if (same & (dtype < 0)).any():
            raise SequenceError("simultaneous events not in type order")

    @classmethod
    def from_events(cls, events: Iterable, alphabet: Sequence[str] | None = None) -> "EventSequence":
        """Build a sequence from ``(type, time)`` pairs in any order.

        Types may be names (interned into ``alphabet`` in first-appearance
        order) or integer ids into a given ``alphabet``.
        """
        pairs = list(events)
        names = list(alphabet) if alphabet is not None else []
        index = {name: i for i, name in enumerate(names)}
        types = np.empty(len(pairs), dtype=TYPE_DTYPE)
        times = np.empty(len(pairs), dtype=TIME_DTYPE)
        for i, (etype, t) in enumerate(pairs):
            if isinstance(etype, (int, np.integer)) and alphabet is not None:
                types[i] = etype
            else:
                etype = str(etype)
                if etype not in index:
                    if alphabet is not None:
                        raise SequenceError(f"unknown event type {etype!r}")
                    index[etype] = len(names)
                    names.append(etype)
                types[i] = index[etype]
            times[i] = t
        order = np.lexsort((types, times))
        return cls(types[order], times[order], names)

    @classmethod
    def empty(cls, alphabet: Sequence[str] = ()) -> "EventSequence":
        return cls(np.empty(0, TYPE_DTYPE), np.empty(0, TIME_DTYPE), alphabet, check=False)

    def __len__(self) -> int:
        return len(self.types)

    @property
    def n(self) -> int:
        return len(self.types)

    def __iter__(self):
        for e, t in zip(self.types.tolist(), self.times.tolist()):
            yield Event(e, t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventSequence):
            return NotImplemented
        return (self.alphabet == other.alphabet
                and np.array_equal(self.types, other.types)
                and np.array_equal(self.times, other.times))

    def __repr__(self) -> str:
        body = " ".join(f"({self.alphabet[e]},{t})" for e, t in list(self)[:12])
        more = " ..." if len(self) > 12 else ""
        return f"EventSequence<{len(self)} events, M={len(self.alphabet)}: {body}{more}>"

    def events(self) -> list[Event]:
        return list(self)

    def named(self) -> list[tuple[str, int]]:
        return [(self.alphabet[e], t) for e, t in self]

    @cached_property
    def _by_type(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.types, kind="stable")
        bounds = np.searchsorted(self.types[order], np.arange(len(self.alphabet) + 1))
        return order, bounds

    def positions_of(self, etype: int) -> np.ndarray:
        """Indices of the events of type ``etype``, in time order."""
        order, bounds = self._by_type
        return order[bounds[etype]:bounds[etype + 1]]

    def times_of(self, etype: int) -> np.ndarray:
        return self.times[self.positions_of(etype)]

    @cached_property
    def type_counts(self) -> np.ndarray:
        return np.bincount(self.types, minlength=len(self.alphabet))

    @property
    def present_types(self) -> list[int]:
        return np.flatnonzero(self.type_counts).tolist()

    def contains(self, etype: int, time: int) -> bool:
        ts = self.times_of(etype)
        i = np.searchsorted(ts, time)
        return bool(i < len(ts) and ts[i] == time)

    def locate(self, etype: int, times: np.ndarray) -> np.ndarray:
        """Positions of ``(etype, t)`` for each t; -1 where absent."""
        pos = self.positions_of(etype)
        ts = self.times[pos]
        times = np.asarray(times, dtype=TIME_DTYPE)
        i = np.searchsorted(ts, times)
        hit = i < len(ts)
        hit[hit] = ts[i[hit]] == times[hit]
        out = np.full(len(times), -1, dtype=np.int64)
        out[hit] = pos[i[hit]]
        return out

    def select(self, mask: np.ndarray) -> "EventSequence":
        return EventSequence(self.types[mask], self.times[mask], self.alphabet, check=False)

    def with_alphabet(self, alphabet: Sequence[str]) -> "EventSequence":
        """Re-map onto a superset alphabet (names must all be present)."""
        index = {name: i for i, name in enumerate(alphabet)}
        remap = np.array([index[name] for name in self.alphabet], dtype=TYPE_DTYPE)
        types = remap[self.types] if len(self) else self.types
        order = np.lexsort((types, self.times))
        return EventSequence(types[order], self.times[order], alphabet)


@dataclass(frozen=True, order=True)
class Episode:
    """Injective serial episode ``types[0] -gaps[0]-> types[1] ...``."""

    types: tuple[int, ...]
    gaps: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(int(t) for t in self.types))
        object.__setattr__(self, "gaps", tuple(int(g) for g in self.gaps))
        if not self.types:
            raise ValueError("an episode needs at least one node")
        if len(self.gaps) != len(self.types) - 1:
            raise ValueError("an episode with k nodes needs k-1 gaps")
        if len(set(self.types)) != len(self.types):
            raise ValueError(f"episode {self.types} is not injective")
        if any(g < 1 for g in self.gaps):
            raise ValueError("inter-event gaps must be positive")

    @property
    def k(self) -> int:
        return len(self.types)

    def __len__(self) -> int:
        return len(self.types)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for g in self.gaps:
            out.append(out[-1] + g)
        return tuple(out)

    @property
    def span(self) -> int:
        return self.offsets[-1]

    def extend(self, etype: int, gap: int) -> "Episode":
        return Episode(self.types + (etype,), self.gaps + (gap,))

    def key(self) -> tuple:
        return (self.types, self.gaps)

    def format(self, alphabet: Sequence[str] | None = None, gaps: bool = True) -> str:
        names = [alphabet[t] if alphabet is not None else str(t) for t in self.types]
        if not gaps:
            return "->".join(names)
        out = names[0]
        for g, name in zip(self.gaps, names[1:]):
            out += f"-{g}->{name}"
        return out


@dataclass(frozen=True)
class OccurrenceWindow:
    start: int
    end: int


@dataclass(frozen=True, eq=False)
class OccurrenceList:
    """All occurrences of one episode, identified by their start times."""

    episode: Episode
    starts: np.ndarray = field(repr=False)

    def __post_init__(self):
        starts = np.asarray(self.starts, dtype=TIME_DTYPE).reshape(-1)
        if len(starts) > 1 and (np.diff(starts) <= 0).any():
            raise ValueError("occurrence starts must be strictly increasing")
        object.__setattr__(self, "starts", _frozen(starts))

    @property
    def frequency(self) -> int:
        return len(self.starts)

    @property
    def ends(self) -> np.ndarray:
        return self.starts + self.episode.span

    @property
    def windows(self) -> list[OccurrenceWindow]:
        span = self.episode.span
        return [OccurrenceWindow(s, s + span) for s in self.starts.tolist()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, OccurrenceList):
            return NotImplemented
        return self.episode == other.episode and np.array_equal(self.starts, other.starts)

    def __hash__(self):
        return hash((self.episode, self.starts.tobytes()))

    def __repr__(self) -> str:
        return f"OccurrenceList({self.episode.format()}, f={self.frequency})"

    def event_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Types and times of every event covered by these occurrences."""
        ep = self.episode
        types = np.repeat(np.asarray(ep.types, dtype=TYPE_DTYPE), self.frequency)
        times = (np.asarray(ep.offsets, dtype=TIME_DTYPE)[:, None] + self.starts[None, :]).reshape(-1)
        return types, times


def roll_out(episode: Episode, start: int) -> list[Event]:
    return [Event(e, start + off) for e, off in zip(episode.types, episode.offsets)]


def verify_occurrence(seq: EventSequence, episode: Episode, start: int) -> bool:
    return all(seq.contains(e, t) for e, t in roll_out(episode, start))


def occurrences(seq: EventSequence, episode: Episode) -> OccurrenceList:
    """Every occurrence of ``episode`` in ``seq``."""
    starts = seq.times_of(episode.types[0])
    for etype, off in zip(episode.types[1:], episode.offsets[1:]):
        if len(starts) == 0:
            break
        starts = starts[seq.locate(etype, starts + off) >= 0]
    return OccurrenceList(episode, starts)
