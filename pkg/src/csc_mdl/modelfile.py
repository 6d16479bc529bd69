"""JSON persistence for selected models."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .events import Episode, OccurrenceList
from .selector import SelectedModel

FORMAT = "csc-model/1"


def model_to_dict(model: SelectedModel, config: dict | None = None) -> dict:
    names = model.alphabet
    return {
        "format": FORMAT,
        "alphabet": list(names),
        "config": config or {},
        "episodes": [
            {"types": [names[t] for t in occ.episode.types], "gaps": list(occ.episode.gaps),
             "starts": occ.starts.tolist(),
             "gain": model.gains[i] if i < len(model.gains) else None}
            for i, occ in enumerate(model.episodes)
        ],
        "singletons": [{"type": names[e], "times": ts.tolist()} for e, ts in model.singletons],
    }


def model_from_dict(raw: dict) -> SelectedModel:
    if raw.get("format") != FORMAT:
        raise ValueError(f"not a model file (format {raw.get('format')!r})")
    alphabet = tuple(raw["alphabet"])
    index = {name: i for i, name in enumerate(alphabet)}

    def ids(names):
        try:
            return tuple(index[n] for n in names)
        except KeyError as exc:
            raise ValueError(f"event type {exc.args[0]!r} not in the model alphabet") from None

    episodes, gains = [], []
    for row in raw["episodes"]:
        ep = Episode(ids(row["types"]), tuple(row["gaps"]))
        episodes.append(OccurrenceList(ep, np.asarray(row["starts"], dtype=np.int64)))
        if row.get("gain") is not None:
            gains.append(int(row["gain"]))
    singles = [(ids([row["type"]])[0], np.asarray(row["times"], dtype=np.int64))
               for row in raw["singletons"]]
    return SelectedModel(alphabet, episodes, singles, gains)


def save_model(model: SelectedModel, path, config: dict | None = None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, config), indent=1) + "\n")


def load_model(path) -> SelectedModel:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed model file: {exc}") from None
    try:
        return model_from_dict(raw)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed model file: {exc!r}") from None
