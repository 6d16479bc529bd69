import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import WORKED_EVENTS, ep
from csc_mdl import (Episode, EventSequence, MinerConfig, SelectionConfig, mine_episodes,
                     read_corpus, read_sequence, select, write_corpus, write_sequence)
from csc_mdl.selector import SelectedModel, model_from_rows
from csc_mdl.seq_io import (Corpus, FormatError, concatenate, export_features, feature_matrix,
                            parse_corpus, parse_sequence)


def test_read_worked(tmp_path):
    p = tmp_path / "worked_seq.seq"
    p.write_text("# worked example\n" + "".join(f"{e} {t}\n" for e, t in WORKED_EVENTS))
    s = read_sequence(p)
    assert len(s) == 13 and len(s.alphabet) == 5
    assert s.alphabet == ("D", "A", "C", "E", "B")


def test_empty_file(tmp_path):
    p = tmp_path / "e.seq"
    p.write_text("")
    assert len(read_sequence(p)) == 0


@pytest.mark.parametrize("text,line,msg", [
    ("A 5\nA 5\n", 2, "duplicate"),
    ("A 5\nB 4\n", 2, "decreases"),
    ("A 1\nB\n", 2, "expected"),
    ("A x\n", 1, "bad time"),
    ("A -2\n", 1, "negative"),
])
def test_bad_lines(text, line, msg):
    with pytest.raises(FormatError, match=msg) as info:
        parse_sequence(text)
    assert info.value.line == line


def test_same_time_any_order():
    s = parse_sequence("B 1\nA 1\n")
    assert s.named() == [("B", 1), ("A", 1)]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["a", "b", "c", "x1"]), st.integers(0, 40)), unique=True))
def test_sequence_write_read_identity(pairs):
    s = EventSequence.from_events(pairs)
    import tempfile, os
    with tempfile.TemporaryDirectory() as d:
        write_sequence(s, os.path.join(d, "s.seq"))
        back = read_sequence(os.path.join(d, "s.seq"))
    assert back.named() == s.named()


def test_untimed_corpus():
    c = parse_corpus("a b c\n\nc b a\n")
    assert len(c) == 2 and c.labels is None
    assert [t.times.tolist() for t in c.sequences] == [[1, 2, 3], [1, 2, 3]]
    assert c.sequences[1].named() == [("c", 1), ("b", 2), ("a", 3)]
    assert c.sequences[0].alphabet == c.sequences[1].alphabet == ("a", "b", "c")


def test_labelled_corpus(tmp_path):
    text = "".join(f"#label: class{i % 5}\nw{i} x y\n\n" for i in range(10))
    c = parse_corpus(text)
    assert c.labels == [f"class{i % 5}" for i in range(10)]
    p = tmp_path / "c.txt"
    write_corpus(c, p)
    back = read_corpus(p)
    assert back.labels == c.labels
    assert [s.named() for s in back.sequences] == [s.named() for s in c.sequences]


def test_mixed_labels_rejected():
    with pytest.raises(FormatError):
        parse_corpus("#label: a\nx y\n\nx y\n")
    with pytest.raises(ValueError):
        Corpus([EventSequence.empty()], ["a", "b"])


def test_concatenation_blocks_no_cross_occurrence():
    rng = np.random.default_rng(0)
    blocks = []
    for _ in range(6):
        toks = rng.choice(list("abcd"), size=int(rng.integers(5, 30)))
        blocks.append(" ".join(toks))
    c = parse_corpus("\n\n".join(blocks))
    seq, offsets = concatenate(c, 5)
    bounds = [(int(s.times[0]) + o, int(s.times[-1]) + o) for s, o in zip(c.sequences, offsets)]
    for (_, e1), (s2, _) in zip(bounds, bounds[1:]):
        assert s2 - e1 >= 6
    for occ in mine_episodes(seq, MinerConfig(max_gap=5)):
        for w in occ.windows:
            assert any(lo <= w.start and w.end <= hi for lo, hi in bounds)


def test_features_empty_model_is_singleton_counts():
    c = parse_corpus("a b a\n\nb b c\n")
    header, rows = feature_matrix(c, [])
    assert header == ["a", "b", "c"]
    assert rows == [[2, 1, 0], [0, 2, 1]]


def test_features_drop_gaps_merges():
    c = parse_corpus("A B X A X B\n")   # A->1B at 1; A->2B at 4
    a, b = c.alphabet.index("A"), c.alphabet.index("B")
    eps = [Episode((a, b), (1,)), Episode((a, b), (2,))]
    header, rows = feature_matrix(c, eps)
    assert header[:2] == ["A-1->B", "A-2->B"] and rows[0][:2] == [1, 1]
    header, rows = feature_matrix(c, eps, drop_gaps=True)
    assert header[0] == "A->B" and rows[0][0] == 2
    assert len(header) == 1 + 3


def test_export_features_text():
    c = parse_corpus("#label: pos\na b a b\n\n#label: neg\nb a\n")
    seq, _ = concatenate(c, 5)
    model = SelectedModel(c.alphabet, [])
    text = export_features(c, model, delimiter="\t")
    assert text.splitlines() == ["a\tb\tlabel", "2\t2\tpos", "1\t1\tneg"]
    one = parse_corpus("a b\n")
    assert len(export_features(one, model).splitlines()) == 2
