import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ABCDE, ep
from csc_mdl import (Episode, EventSequence, SelectionConfig, build_table, decode, elias_len,
                     encoding_stats, select, trivial_length, unit_length)
from csc_mdl import codec
from csc_mdl.bitio import BitReader, BitWriter
from csc_mdl.codec import CodeTable, DecodeError, make_row, trivial_table
from csc_mdl.fuzz import random_sequence
from csc_mdl.selector import model_from_rows
from oracles import elias_bits


def worked_table(worked_seq):
    model = model_from_rows(ABCDE, [(ep("ABC", (2, 1)), [2, 4]), (ep("DEC", (2, 2)), [1, 5])],
                            [(2, [3, 8])])
    return build_table(model)


def test_worked_table_rows_and_lengths(worked_seq):
    t = worked_table(worked_seq)
    assert [r.ints() for r in t.rows] == [[3, 0, 1, 2, 2, 1, 2, 2, 4],
                                          [3, 3, 4, 2, 2, 2, 2, 1, 5],
                                          [1, 2, 2, 3, 8]]
    assert [codec.row_unit_length(r) for r in t.rows] == [9, 9, 5]
    stats = encoding_stats(t, worked_seq)
    assert (stats.total, stats.trivial_len) == (23, 28)
    assert stats.ratio == 28 / 23
    assert stats.model_len == 2 * (3 + 3 + 1)
    assert stats.n_patterns == 2


def test_worked_table_decodes_to_worked(worked_seq):
    assert decode(worked_table(worked_seq)) == worked_seq


def test_decode_drops_shared_event(worked_seq):
    out = decode(worked_table(worked_seq))
    assert out.named().count(("C", 5)) == 1


def test_trivial_lengths(worked_seq):
    assert trivial_length(worked_seq) == 28
    assert trivial_length(EventSequence.empty()) == 0
    s = EventSequence.from_events([(f"T{i % 10}", i) for i in range(100)])
    assert trivial_length(s) == 130
    t = trivial_table(worked_seq)
    assert len(t.rows) == 5 and sum(r.occ_count for r in t.rows) == 13
    assert unit_length(t).total == 28


def test_single_row_length():
    row = make_row(Episode((0,)), [1, 4, 9])
    assert codec.row_unit_length(row) == 2 + 3 + 1


def test_empty_table():
    t = CodeTable((), ())
    assert decode(t) == EventSequence.empty()
    assert codec.loads_units(codec.dumps_units(t)) == t
    assert codec.loads_bits(codec.dumps_bits(t)) == t


@pytest.mark.parametrize("n,bits", [(1, 1), (2, 3), (3, 3), (4, 5), (8, 7), (1000, 19)])
def test_elias_len(n, bits):
    assert elias_len(n) == bits == elias_bits(n)


def test_elias_rejects_zero():
    with pytest.raises(ValueError):
        elias_len(0)
    with pytest.raises(ValueError):
        BitWriter().write_gamma(0)


@given(st.lists(st.integers(1, 10**9), max_size=50))
def test_gamma_round_trip(values):
    w = BitWriter()
    for v in values:
        w.write_gamma(v)
    assert w.nbits == sum(elias_bits(v) for v in values)
    r = BitReader(w.getvalue(), w.nbits)
    assert [r.read_gamma() for _ in values] == values
    assert r.remaining == 0


def test_type_width():
    assert codec.type_width(5) == 3
    assert codec.type_width(1) == 1
    assert codec.type_width(8) == 4


def reference_bits(table, raw):
    """Sum the code lengths over the integer stream by hand."""
    m = table.alphabet_size
    width = int(np.floor(np.log2(m))) + 1 if m else 0
    total = elias_bits(m + 1)
    for r in table.rows:
        starts = r.starts.tolist()
        vals = starts if raw or not starts else [starts[0]] + [b - a for a, b in zip(starts, starts[1:])]
        total += elias_bits(r.size + 1) + r.size * width + elias_bits(r.occ_count + 1)
        total += sum(elias_bits(g + 1) for g in r.episode.gaps) + sum(elias_bits(v + 1) for v in vals)
    return total


@pytest.mark.parametrize("raw", [False, True])
def test_bit_lengths_worked_table(worked_seq, raw):
    t = worked_table(worked_seq)
    data, nbits = codec.bit_encode(t, raw)
    assert nbits == codec.bit_length(t, raw) == reference_bits(t, raw)
    assert len(data) == -(-nbits // 8)
    assert codec.bit_decode(data, nbits, ABCDE, raw) == t


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans(), st.booleans())
def test_file_round_trips(seed, raw, simultaneous):
    rng = np.random.default_rng(seed)
    s = random_sequence(rng, int(rng.integers(0, 400)), int(rng.integers(1, 40)), simultaneous)
    t = build_table(select(s, SelectionConfig()))
    assert codec.bit_length(t, raw) == reference_bits(t, raw)
    assert decode(codec.loads_units(codec.dumps_units(t))) == s
    assert decode(codec.loads_bits(codec.dumps_bits(t, raw))) == s
    assert codec.table_from_ints(t.ints(), t.alphabet) == t


def test_write_and_read_files(tmp_path, worked_seq):
    t = worked_table(worked_seq)
    codec.write_encoded(tmp_path / "a.cse", t)
    codec.write_encoded(tmp_path / "a.cseb", t, bitwise=True, raw_starts=True)
    assert codec.read_encoded(tmp_path / "a.cse") == t
    assert codec.read_encoded(tmp_path / "a.cseb") == t


@pytest.mark.parametrize("bitwise", [False, True])
def test_corrupt_streams(worked_seq, bitwise):
    t = worked_table(worked_seq)
    data = codec.dumps_bits(t) if bitwise else codec.dumps_units(t)
    loads = codec.loads_bits if bitwise else codec.loads_units
    for cut in (3, 12, len(data) - 1):
        with pytest.raises(DecodeError):
            loads(data[:cut])
    with pytest.raises(DecodeError):
        loads(data + b"\0")
    with pytest.raises(DecodeError):
        loads(b"XXXXXXXX" + data[8:])


def test_read_encoded_unknown_magic(tmp_path):
    p = tmp_path / "junk"
    p.write_bytes(b"nothing here")
    with pytest.raises(DecodeError):
        codec.read_encoded(p)


def test_malformed_tables():
    with pytest.raises(DecodeError):
        codec.table_from_ints([3, 0, 1], ABCDE)            # stream ends inside a row
    with pytest.raises(DecodeError):
        codec.table_from_ints([2, 0, 0, 1, 1, 5], ABCDE)   # repeated type
    with pytest.raises(DecodeError):
        codec.table_from_ints([0], ABCDE)
    bad = CodeTable((codec.CodeRow(1, Episode((0,)), 3, np.array([1, 2])),), ("A",))
    with pytest.raises(DecodeError):
        decode(bad)
