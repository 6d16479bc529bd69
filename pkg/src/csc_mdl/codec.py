"""Dictionary-table encoding of event sequences.

A table row is ``size, types..., gaps..., count, starts...``; the encoded
data is the rows strung together.  Lengths are counted two ways: one unit
per integer, and in bits with Elias gamma codes for integers and fixed-width
codes for event types.
"""

from __future__ import annotations

import io
import struct
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .bitio import BitReader, BitstreamError, BitWriter, elias_len
from .events import TIME_DTYPE, TYPE_DTYPE, Episode, EventSequence
from .selector import SelectedModel

UNIT_MAGIC = b"CSEUNIT\x01"
BITS_MAGIC = b"CSEBITS\x01"
FLAG_RAW_STARTS = 1


class DecodeError(ValueError):
    """Malformed table or corrupt encoded stream."""


@dataclass(frozen=True, eq=False)
class CodeRow:
    size: int
    episode: Episode
    occ_count: int
    starts: np.ndarray

    def __eq__(self, other) -> bool:
        return (isinstance(other, CodeRow) and self.size == other.size
                and self.episode == other.episode and self.occ_count == other.occ_count
                and np.array_equal(self.starts, other.starts))

    def ints(self) -> list[int]:
        ep = self.episode
        return [self.size, *ep.types, *ep.gaps, self.occ_count, *self.starts.tolist()]


def make_row(episode: Episode, starts) -> CodeRow:
    starts = np.sort(np.asarray(starts, dtype=TIME_DTYPE))
    return CodeRow(episode.k, episode, len(starts), starts)


@dataclass(frozen=True)
class CodeTable:
    rows: tuple[CodeRow, ...]
    alphabet: tuple[str, ...]

    @property
    def alphabet_size(self) -> int:
        return len(self.alphabet)

    def ints(self) -> list[int]:
        out: list[int] = []
        for row in self.rows:
            out.extend(row.ints())
        return out

    def format(self) -> str:
        lines = ["size | episode | count | starts"]
        for r in self.rows:
            starts = ", ".join(map(str, r.starts.tolist()))
            lines.append(f"{r.size} | {r.episode.format(self.alphabet)} | {r.occ_count} | <{starts}>")
        return "\n".join(lines)


def build_table(model: SelectedModel) -> CodeTable:
    rows = [make_row(occ.episode, occ.starts) for occ in model.episodes]
    rows += [make_row(Episode((e,)), ts) for e, ts in model.singletons]
    return CodeTable(tuple(rows), tuple(model.alphabet))


def trivial_table(seq: EventSequence) -> CodeTable:
    rows = [make_row(Episode((e,)), seq.times_of(e)) for e in seq.present_types]
    return CodeTable(tuple(rows), seq.alphabet)


def trivial_length(seq: EventSequence) -> int:
    return 3 * len(seq.present_types) + len(seq)


def row_unit_length(row: CodeRow) -> int:
    return 2 * row.size + row.occ_count + 1


@dataclass
class EncodingStats:
    model_len: int
    data_len: int
    total: int
    trivial_len: int
    ratio: float
    bit_total: int | None = None
    bit_trivial: int | None = None
    bit_ratio: float | None = None
    n_patterns: int = 0
    runtime_ms: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)

    def format(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())


def unit_length(table: CodeTable) -> EncodingStats:
    """Unit-level lengths: model = sum of 2k, data = sum of (f + 1)."""
    model_len = sum(2 * r.size for r in table.rows)
    data_len = sum(r.occ_count + 1 for r in table.rows)
    total = model_len + data_len
    return EncodingStats(model_len, data_len, total, 0, 0.0,
                         n_patterns=sum(r.size > 1 for r in table.rows))


def encoding_stats(table: CodeTable, seq: EventSequence, *, bits: bool = True,
                   raw_starts: bool = False, runtime_ms: float | None = None) -> EncodingStats:
    stats = unit_length(table)
    stats.trivial_len = trivial_length(seq)
    stats.ratio = stats.trivial_len / stats.total if stats.total else 1.0
    if bits:
        stats.bit_total = bit_length(table, raw_starts=raw_starts)
        stats.bit_trivial = bit_length(trivial_table(seq), raw_starts=raw_starts)
        stats.bit_ratio = stats.bit_trivial / stats.bit_total if stats.bit_total else 1.0
    stats.runtime_ms = runtime_ms
    return stats


def decode(table: CodeTable) -> EventSequence:
    """Roll out every occurrence, sort by (time, type) and drop duplicates."""
    types, times = [], []
    for i, row in enumerate(table.rows):
        if row.occ_count != len(row.starts):
            raise DecodeError(f"row {i}: count {row.occ_count} but {len(row.starts)} starts")
        if row.size != row.episode.k:
            raise DecodeError(f"row {i}: size {row.size} but episode has {row.episode.k} nodes")
        ep = row.episode
        if max(ep.types) >= table.alphabet_size:
            raise DecodeError(f"row {i}: event type outside the alphabet")
        starts = np.asarray(row.starts, dtype=TIME_DTYPE)
        types.append(np.repeat(np.asarray(ep.types, dtype=TYPE_DTYPE), len(starts)))
        times.append((np.asarray(ep.offsets, dtype=TIME_DTYPE)[:, None] + starts[None, :]).reshape(-1))
    if not types:
        return EventSequence.empty(table.alphabet)
    types = np.concatenate(types)
    times = np.concatenate(times)
    order = np.lexsort((types, times))
    types, times = types[order], times[order]
    keep = np.ones(len(types), dtype=bool)
    keep[1:] = (types[1:] != types[:-1]) | (times[1:] != times[:-1])
    return EventSequence(types[keep], times[keep], table.alphabet)


def table_from_ints(ints: Sequence[int], alphabet: Sequence[str]) -> CodeTable:
    """Parse the row stream back into a table."""
    ints = list(ints)
    rows = []
    pos = 0

    def take(n: int) -> list[int]:
        nonlocal pos
        if n < 0 or pos + n > len(ints):
            raise DecodeError(f"row {len(rows)}: stream ends inside the row")
        out = ints[pos:pos + n]
        pos += n
        return out

    while pos < len(ints):
        (k,) = take(1)
        if k < 1:
            raise DecodeError(f"row {len(rows)}: episode size {k}")
        types = take(k)
        gaps = take(k - 1)
        (count,) = take(1)
        starts = take(count)
        try:
            ep = Episode(tuple(types), tuple(gaps))
        except ValueError as exc:
            raise DecodeError(f"row {len(rows)}: {exc}") from None
        rows.append(CodeRow(k, ep, count, np.asarray(starts, dtype=TIME_DTYPE)))
    return CodeTable(tuple(rows), tuple(alphabet))


def type_width(alphabet_size: int) -> int:
    """floor(log2 M) + 1 bits per event type."""
    return alphabet_size.bit_length()


def _start_codes(starts: np.ndarray, raw: bool) -> list[int]:
    s = starts.tolist()
    if raw or not s:
        return s
    return [s[0]] + np.diff(starts).tolist()


def bit_length(table: CodeTable, raw_starts: bool = False) -> int:
    """Bits the bit encoder emits for ``table``, computed from the integers."""
    width = type_width(table.alphabet_size)
    total = elias_len(table.alphabet_size + 1)
    for row in table.rows:
        total += elias_len(row.size + 1) + row.size * width
        total += sum(elias_len(g + 1) for g in row.episode.gaps)
        total += elias_len(row.occ_count + 1)
        total += sum(elias_len(v + 1) for v in _start_codes(row.starts, raw_starts))
    return total


def bit_encode(table: CodeTable, raw_starts: bool = False) -> tuple[bytes, int]:
    """Bit-level stream: M, then each row's size, types, gaps, count, starts.

    Every Elias-coded value v is written as gamma(v + 1) so zeros are
    representable.  Starts are delta-coded unless ``raw_starts``.
    """
    w = BitWriter()
    width = type_width(table.alphabet_size)
    w.write_gamma(table.alphabet_size + 1)
    for row in table.rows:
        w.write_gamma(row.size + 1)
        for t in row.episode.types:
            w.write_bits(t, width)
        for g in row.episode.gaps:
            w.write_gamma(g + 1)
        w.write_gamma(row.occ_count + 1)
        for v in _start_codes(row.starts, raw_starts):
            w.write_gamma(v + 1)
    return w.getvalue(), w.nbits


def bit_decode(data: bytes, nbits: int, alphabet: Sequence[str], raw_starts: bool = False) -> CodeTable:
    r = BitReader(data, nbits)
    try:
        m = r.read_gamma() - 1
        if m != len(alphabet):
            raise DecodeError(f"stream alphabet size {m} != {len(alphabet)} names")
        width = type_width(m)
        rows = []
        while r.remaining > 0:
            k = r.read_gamma() - 1
            if k < 1:
                raise DecodeError(f"row {len(rows)}: episode size {k}")
            types = [r.read_bits(width) for _ in range(k)]
            gaps = [r.read_gamma() - 1 for _ in range(k - 1)]
            count = r.read_gamma() - 1
            vals = [r.read_gamma() - 1 for _ in range(count)]
            starts = np.asarray(vals, dtype=TIME_DTYPE)
            if not raw_starts:
                starts = np.cumsum(starts, dtype=TIME_DTYPE)
            try:
                ep = Episode(tuple(types), tuple(gaps))
            except ValueError as exc:
                raise DecodeError(f"row {len(rows)}: {exc}") from None
            rows.append(CodeRow(k, ep, count, starts))
    except BitstreamError as exc:
        raise DecodeError(f"corrupt bit stream: {exc}") from None
    return CodeTable(tuple(rows), tuple(alphabet))


def _write_names(buf, names: Sequence[str]) -> None:
    buf.write(struct.pack("<Q", len(names)))
    for name in names:
        raw = name.encode("utf-8")
        buf.write(struct.pack("<Q", len(raw)))
        buf.write(raw)


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise DecodeError("corrupt stream: truncated")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def names(self) -> list[str]:
        (count,) = self.unpack("<Q")
        if count > len(self.data):
            raise DecodeError("corrupt stream: bad alphabet size")
        out = []
        for _ in range(count):
            (n,) = self.unpack("<Q")
            try:
                out.append(self.take(n).decode("utf-8"))
            except UnicodeDecodeError:
                raise DecodeError("corrupt stream: bad alphabet entry") from None
        return out


def dumps_units(table: CodeTable) -> bytes:
    ints = table.ints()
    buf = io.BytesIO()
    buf.write(UNIT_MAGIC)
    buf.write(struct.pack("<Q", len(ints)))
    buf.write(np.asarray(ints, dtype="<i8").tobytes())
    _write_names(buf, table.alphabet)
    return buf.getvalue()


def loads_units(data: bytes) -> CodeTable:
    cur = _Cursor(data)
    if cur.take(len(UNIT_MAGIC)) != UNIT_MAGIC:
        raise DecodeError("corrupt stream: bad magic for unit-level file")
    (n,) = cur.unpack("<Q")
    if n * 8 > len(data):
        raise DecodeError("corrupt stream: truncated")
    ints = np.frombuffer(cur.take(8 * n), dtype="<i8").tolist()
    names = cur.names()
    if cur.pos != len(data):
        raise DecodeError("corrupt stream: trailing bytes")
    return table_from_ints(ints, names)


def dumps_bits(table: CodeTable, raw_starts: bool = False) -> bytes:
    payload, nbits = bit_encode(table, raw_starts)
    buf = io.BytesIO()
    buf.write(BITS_MAGIC)
    buf.write(struct.pack("<BQ", FLAG_RAW_STARTS if raw_starts else 0, nbits))
    _write_names(buf, table.alphabet)
    buf.write(payload)
    return buf.getvalue()


def loads_bits(data: bytes) -> CodeTable:
    cur = _Cursor(data)
    if cur.take(len(BITS_MAGIC)) != BITS_MAGIC:
        raise DecodeError("corrupt stream: bad magic for bit-level file")
    flags, nbits = cur.unpack("<BQ")
    names = cur.names()
    payload = cur.take(-(-nbits // 8))
    if cur.pos != len(data):
        raise DecodeError("corrupt stream: trailing bytes")
    return bit_decode(payload, nbits, names, raw_starts=bool(flags & FLAG_RAW_STARTS))


def write_encoded(path, table: CodeTable, bitwise: bool = False, raw_starts: bool = False) -> None:
    data = dumps_bits(table, raw_starts) if bitwise else dumps_units(table)
    Path(path).write_bytes(data)


def read_encoded(path) -> CodeTable:
    """Read either format, dispatching on the magic header."""
    data = Path(path).read_bytes()
    if data.startswith(BITS_MAGIC):
        return loads_bits(data)
    if data.startswith(UNIT_MAGIC):
        return loads_units(data)
    raise DecodeError("corrupt stream: unknown magic")
