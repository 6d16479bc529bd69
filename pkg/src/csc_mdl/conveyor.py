"""Event traces of composable conveyor systems.

Packages are born on each input path by a Poisson process and move through
the path's units; handing a package to the next unit is one event, typed by
that unit.  The gap between consecutive events of a package is the dwell
time of the unit it enters, plus any delay from a clash with an earlier
package at the same unit and time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .events import Episode, EventSequence

DEFAULT_DWELL = {"I": 1, "S": 2, "T": 3, "O": 1}

_PATHS = {
    "2I-2O": (0.6, [
        "I1 S1 T1 S4 T3 S7 T4 S8 O2",
        "I2 S6 T3 S7 T4 S5 T2 S3 O1",
    ]),
    "3I-3O": (0.4, [
        "I1 S1 T1 S4 T3 S12 T7 S16 T8 S17 T9 S18 O3",
        "I2 S6 T3 S7 T4 S5 T2 S3 T5 S9 O1",
        "I3 S15 T7 S16 T8 S17 T9 S14 T6 S11 O2",
    ]),
    "PackageSorter": (0.2, [
        "I1 S39 T13 S32 S33 S34 T14 S28 S25 S22 T8 S19 T9 S20 T10 S21 T11 S24 T12 S27 O2",
        "I2 S31 T13 S32 S33 S34 T14 S35 T15 S36 S37 S38 T16 S40 O3",
        "I3 S16 T6 S17 T7 S13 T3 S5 S6 S7 S8 S9 T4 S10 T5 S11 O1",
        "I4 S2 T1 S3 T2 S4 T3 S5 S6 S7 S8 S9 T4 S10 T5 S15 T11 S24 T12 S27 O2",
        "I5 S1 T1 S3 T2 S12 T6 S17 T7 S18 T8 S19 T9 S23 S26 S29 T15 S36 S37 S38 T16 S40 O3",
    ]),
}


class TopologyError(ValueError):
    pass


@dataclass
class Topology:
    name: str
    units: list[str]
    paths: list[list[str]]
    transit_times: dict[str, int]
    arrival_rate: float

    def __post_init__(self):
        known = set(self.units)
        for i, path in enumerate(self.paths):
            if not path or path[0][0] != "I" or path[-1][0] != "O":
                raise TopologyError(f"path {i + 1} must run from an input to an output")
            missing = [u for u in path if u not in known]
            if missing:
                raise TopologyError(f"path {i + 1} uses unknown units {missing}")
        for u in self.units:
            self.transit_times.setdefault(u, DEFAULT_DWELL.get(u[0], 1))
        if any(t < 1 for t in self.transit_times.values()):
            raise TopologyError("transit times must be >= 1")
        if self.arrival_rate < 0:
            raise TopologyError("arrival rate must be >= 0")

    @property
    def M(self) -> int:
        return len(self.units)

    def to_dict(self) -> dict:
        return {"name": self.name, "units": self.units, "paths": self.paths,
                "transit_times": self.transit_times, "arrival_rate": self.arrival_rate}


def _unit_names(paths: Sequence[Sequence[str]]) -> list[str]:
    # every unit numbered up to the highest index of its kind, including
    # units no listed path crosses
    top = {}
    for path in paths:
        for u in path:
            top[u[0]] = max(top.get(u[0], 0), int(u[1:]))
    return [f"{kind}{i}" for kind in "ISTO" for i in range(1, top.get(kind, 0) + 1)]


def builtin_topology(name: str, dwell: dict[str, int] | None = None) -> Topology:
    if name not in _PATHS:
        raise TopologyError(f"unknown topology {name!r}; known: {', '.join(_PATHS)}")
    rate, raw = _PATHS[name]
    paths = [p.split() for p in raw]
    units = _unit_names(paths)
    kinds = {**DEFAULT_DWELL, **(dwell or {})}
    return Topology(name, units, paths, {u: kinds[u[0]] for u in units}, rate)


def load_topology(name: str) -> Topology:
    """A built-in name, or a JSON file with the ``Topology`` fields."""
    if name in _PATHS:
        return builtin_topology(name)
    path = Path(name)
    if not path.exists():
        raise TopologyError(f"unknown topology {name!r}; known: {', '.join(_PATHS)}")
    raw = json.loads(path.read_text())
    paths = [p.split() if isinstance(p, str) else list(p) for p in raw["paths"]]
    return Topology(raw.get("name", path.stem), list(raw.get("units") or _unit_names(paths)),
                    paths, dict(raw.get("transit_times", {})), float(raw.get("arrival_rate", 0.0)))


@dataclass
class Package:
    path_id: int
    birth: int
    times: list[int]


@dataclass
class Trace:
    sequence: EventSequence
    packages: list[Package] = field(default_factory=list)

    def ground_truth_lines(self) -> list[str]:
        return [f"{p.path_id + 1} {p.birth}" for p in self.packages]


def _births(rng: np.random.Generator, rate: float, horizon: int) -> list[int]:
    if rate <= 0:
        return []
    out = []
    t = rng.exponential(1.0 / rate)
    while t < horizon:
        out.append(int(t))
        t += rng.exponential(1.0 / rate)
    return out


def simulate(topo: Topology, horizon: int, seed: int | None = 0, rate_mode: str = "total-split") -> Trace:
    """Simulate ``horizon`` time units.

    ``rate_mode="total-split"`` divides the topology's arrival rate evenly
    over its input paths; ``"per-path"`` gives every path the full rate.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if rate_mode == "per-path":
        rate = topo.arrival_rate
    elif rate_mode == "total-split":
        rate = topo.arrival_rate / max(1, len(topo.paths))
    else:
        raise ValueError(f"unknown rate mode {rate_mode!r}")
    rng = np.random.default_rng(seed)
    born = [(b, pid) for pid in range(len(topo.paths)) for b in _births(rng, rate, horizon)]
    born.sort()

    index = {u: i for i, u in enumerate(topo.units)}
    taken: set[tuple[int, int]] = set()
    packages = []
    for birth, pid in born:
        path = topo.paths[pid]
        times = []
        t = birth
        for i, unit in enumerate(path):
            if i:
                t += topo.transit_times[unit]
            # a clash delays this package's remaining schedule
            while (index[unit], t) in taken:
                t += 1
            taken.add((index[unit], t))
            times.append(t)
        packages.append(Package(pid, birth, times))

    events = sorted(taken, key=lambda e: (e[1], e[0]))
    types = np.array([e for e, _ in events], dtype=np.int64)
    times = np.array([t for _, t in events], dtype=np.int64)
    return Trace(EventSequence(types, times, topo.units), packages)


def subpath_match(episode: Episode | Sequence[str], topo: Topology,
                  alphabet: Sequence[str] | None = None) -> bool:
    """True iff the episode's units appear contiguously, in order, on some path."""
    if isinstance(episode, Episode):
        if alphabet is None:
            raise ValueError("an alphabet is needed to name the episode's types")
        names = [alphabet[t] for t in episode.types]
    else:
        names = list(episode)
    k = len(names)
    if k == 0:
        return any(topo.paths)
    for path in topo.paths:
        for i in range(len(path) - k + 1):
            if path[i:i + k] == names:
                return True
    return False


def longest_subpath(episode: Episode, topo: Topology, alphabet: Sequence[str]) -> int:
    """Length of the longest run of the episode's units that lies contiguously on a path."""
    names = [alphabet[t] for t in episode.types]
    best = 0
    for i in range(len(names)):
        for j in range(len(names), i + best, -1):
            if subpath_match(names[i:j], topo):
                best = j - i
                break
    return best
