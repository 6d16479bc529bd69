import numpy as np
import pytest

from csc_mdl import Episode, EventSequence

TOY_EVENTS = [("A", 1), ("A", 2), ("B", 3), ("E", 4), ("A", 5), ("B", 6), ("C", 6),
             ("B", 7), ("D", 8), ("C", 10), ("E", 11)]
WORKED_EVENTS = [("D", 1), ("A", 2), ("C", 3), ("E", 3), ("A", 4), ("B", 4), ("C", 5),
             ("D", 5), ("B", 6), ("C", 7), ("E", 7), ("C", 8), ("C", 9)]
ABCDE = ["A", "B", "C", "D", "E"]


def ep(names: str, gaps=(), alphabet=ABCDE) -> Episode:
    return Episode(tuple(alphabet.index(c) for c in names), tuple(gaps))


@pytest.fixture
def toy_seq() -> EventSequence:
    return EventSequence.from_events(TOY_EVENTS, ABCDE)


@pytest.fixture
def worked_seq() -> EventSequence:
    return EventSequence.from_events(WORKED_EVENTS, ABCDE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
