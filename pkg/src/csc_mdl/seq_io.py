"""Text formats for sequences, corpora and feature matrices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .events import Episode, EventSequence, SequenceError, occurrences


class FormatError(SequenceError):
    def __init__(self, msg: str, path=None, line: int | None = None):
        where = f"{path}:" if path else ""
        where += f"{line}: " if line is not None else (" " if where else "")
        super().__init__(f"{where}{msg}")
        self.line = line


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            yield no, line, True
        else:
            yield no, line, False


def _parse_timed(lines, path, names, index) -> EventSequence:
    types, times = [], []
    for no, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"expected '<type> <time>', got {line!r}", path, no)
        name, raw_t = parts
        try:
            t = int(raw_t)
        except ValueError:
            raise FormatError(f"bad time stamp {raw_t!r}", path, no) from None
        if t < 0:
            raise FormatError(f"negative time stamp {t}", path, no)
        if times and t < times[-1]:
            raise FormatError(f"time {t} decreases (previous {times[-1]})", path, no)
        if name not in index:
            index[name] = len(names)
            names.append(name)
        types.append(index[name])
        times.append(t)
    seen = set()
    for (no, _), e, t in zip(lines, types, times):
        if (e, t) in seen:
            raise FormatError(f"duplicate event ({names[e]}, {t})", path, no)
        seen.add((e, t))
    types = np.asarray(types, dtype=np.int64)
    times = np.asarray(times, dtype=np.int64)
    order = np.lexsort((types, times))
    return EventSequence(types[order], times[order], list(names), check=False)


def _declared_alphabet(text: str) -> list[str]:
    for _, line, comment in _content_lines(text):
        if comment and line[1:].strip().lower().startswith("alphabet:"):
            return line[1:].strip().split(":", 1)[1].split()
    return []


def parse_sequence(text: str, path=None) -> EventSequence:
    """Parse ``<type> <time>`` lines.

    The alphabet follows first appearance unless a ``#alphabet: a b ...``
    comment declares it (as ``format_sequence`` writes).
    """
    names = _declared_alphabet(text)
    lines = [(no, line) for no, line, comment in _content_lines(text) if line and not comment]
    return _parse_timed(lines, path, names, {n: i for i, n in enumerate(names)})


def read_sequence(path) -> EventSequence:
    return parse_sequence(Path(path).read_text(encoding="utf-8"), path)


def format_sequence(seq: EventSequence, header: bool = True) -> str:
    body = "".join(f"{seq.alphabet[e]} {t}\n" for e, t in seq)
    if header and seq.alphabet:
        return f"#alphabet: {' '.join(seq.alphabet)}\n" + body
    return body


def write_sequence(seq: EventSequence, path) -> None:
    Path(path).write_text(format_sequence(seq), encoding="utf-8")


@dataclass
class Corpus:
    sequences: list[EventSequence]
    labels: list[str] | None = None
    alphabet: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.sequences):
            raise ValueError("labels and sequences differ in length")
        if not self.alphabet and self.sequences:
            self.alphabet = self.sequences[0].alphabet

    def __len__(self) -> int:
        return len(self.sequences)


def _is_timed(lines) -> bool:
    for _, line in lines:
        parts = line.split()
        if len(parts) != 2:
            return False
        try:
            int(parts[1])
        except ValueError:
            return False
    return True


def parse_corpus(text: str, path=None) -> Corpus:
    """Blank-line separated blocks, each optionally headed by ``#label: x``.

    A block whose lines are all ``<type> <int>`` is timed; any other block is
    a token stream stamped with positions 1..n.
    """
    blocks: list[tuple[str | None, list[tuple[int, str]]]] = []
    label: str | None = None
    current: list[tuple[int, str]] = []

    def close():
        nonlocal current, label
        if current:
            blocks.append((label, current))
        elif label is not None:
            raise FormatError(f"label {label!r} has no events", path)
        current, label = [], None

    for no, line, comment in _content_lines(text):
        if not line:
            close()
        elif comment:
            body = line[1:].strip()
            if body.lower().startswith("label:"):
                if current:
                    close()
                label = body.split(":", 1)[1].strip()
        else:
            current.append((no, line))
    close()

    names: list[str] = []
    index: dict[str, int] = {}
    seqs = []
    for _, lines in blocks:
        if _is_timed(lines):
            seqs.append(_parse_timed(lines, path, names, index))
        else:
            tokens = [(no, tok) for no, line in lines for tok in line.split()]
            stamped = [(no, f"{tok} {i}") for i, (no, tok) in enumerate(tokens, 1)]
            seqs.append(_parse_timed(stamped, path, names, index))
    alphabet = tuple(names)
    seqs = [EventSequence(s.types, s.times, alphabet, check=False) for s in seqs]
    labels = [lab for lab, _ in blocks]
    if any(lab is not None for lab in labels):
        if any(lab is None for lab in labels):
            raise FormatError("some blocks are labelled and others are not", path)
    else:
        labels = None
    return Corpus(seqs, labels, alphabet)


def read_corpus(path) -> Corpus:
    return parse_corpus(Path(path).read_text(encoding="utf-8"), path)


def format_corpus(corpus: Corpus) -> str:
    out = []
    for i, seq in enumerate(corpus.sequences):
        block = ""
        if corpus.labels is not None:
            block += f"#label: {corpus.labels[i]}\n"
        block += format_sequence(seq, header=False)
        out.append(block)
    return "\n".join(out)


def write_corpus(corpus: Corpus, path) -> None:
    Path(path).write_text(format_corpus(corpus), encoding="utf-8")


def concatenate(corpus: Corpus, max_gap: int) -> tuple[EventSequence, list[int]]:
    """Join a corpus into one sequence that no occurrence can straddle.

    Each block is shifted so it starts at least ``max_gap + 1`` after the end
    of the previous one.  Returns the sequence and per-block offsets.
    """
    alphabet = corpus.alphabet
    types, times, offsets = [], [], []
    next_start = 0
    for seq in corpus.sequences:
        if len(seq) == 0:
            offsets.append(next_start)
            continue
        offset = next_start - int(seq.times[0])
        offsets.append(offset)
        types.append(seq.types)
        times.append(seq.times + offset)
        next_start = int(seq.times[-1]) + offset + max_gap + 1
    if not types:
        return EventSequence.empty(alphabet), offsets
    return EventSequence(np.concatenate(types), np.concatenate(times), alphabet), offsets


def feature_matrix(corpus: Corpus, episodes: Sequence[Episode], drop_gaps: bool = False):
    """Per-sequence occurrence counts of ``episodes`` followed by singleton counts.

    With ``drop_gaps`` episodes sharing a type list become one column whose
    count is the number of distinct occurrences over all gap variants.
    """
    alphabet = corpus.alphabet
    columns: list[tuple[str, list[Episode]]] = []
    if drop_gaps:
        merged: dict[tuple[int, ...], list[Episode]] = {}
        for ep in episodes:
            merged.setdefault(ep.types, []).append(ep)
        columns = [(group[0].format(alphabet, gaps=False), group) for group in merged.values()]
    else:
        seen = set()
        for ep in episodes:
            if ep not in seen:
                seen.add(ep)
                columns.append((ep.format(alphabet), [ep]))
    header = [name for name, _ in columns] + list(alphabet)
    rows = []
    for seq in corpus.sequences:
        row = []
        for _, group in columns:
            occs = set()
            for ep in group:
                for s in occurrences(seq, ep).starts.tolist():
                    occs.add(tuple(s + off for off in ep.offsets))
            row.append(len(occs))
        row.extend(np.bincount(seq.types, minlength=len(alphabet)).tolist())
        rows.append(row)
    return header, rows


def export_features(corpus: Corpus, model, drop_gaps: bool = False, delimiter: str = ",",
                    out=None) -> str:
    """Write the feature matrix (with a header row, and labels if present) as text."""
    header, rows = feature_matrix(corpus, [o.episode for o in model.episodes], drop_gaps)
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    if corpus.labels is not None:
        w.writerow(header + ["label"])
        for row, lab in zip(rows, corpus.labels):
            w.writerow(row + [lab])
    else:
        w.writerow(header)
        w.writerows(rows)
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text
