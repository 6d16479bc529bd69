"""Compressing event sequences with selected fixed-interval serial episodes."""

from .bitio import elias_len
from .codec import (
    CodeTable,
    DecodeError,
    EncodingStats,
    bit_decode,
    bit_encode,
    bit_length,
    build_table,
    decode,
    encoding_stats,
    read_encoded,
    trivial_length,
    unit_length,
    write_encoded,
)
from .conveyor import Topology, builtin_topology, load_topology, simulate, subpath_match
from .events import Episode, Event, EventSequence, OccurrenceList, SequenceError, occurrences
from .miner import MinerConfig, best_extensions, explore_dfs, extend_best, find_lists, mine_episodes
from .overlap import OverlapMatrix, find_overlap_matrix
from .selector import CSC1, CSC2, SelectedModel, SelectionConfig, overlap_score, score, select
from .seq_io import Corpus, export_features, read_corpus, read_sequence, write_corpus, write_sequence

__all__ = [
    "CSC1", "CSC2", "CodeTable", "Corpus", "DecodeError", "EncodingStats", "Episode", "Event",
    "EventSequence", "MinerConfig", "OccurrenceList", "OverlapMatrix", "SelectedModel",
    "SelectionConfig", "SequenceError", "Topology", "best_extensions", "bit_decode", "bit_encode",
    "bit_length", "build_table", "builtin_topology", "decode", "elias_len", "encoding_stats",
    "explore_dfs", "export_features", "extend_best", "find_lists", "find_overlap_matrix",
    "load_topology", "mine_episodes", "occurrences", "overlap_score", "read_corpus",
    "read_encoded", "read_sequence", "score", "select", "simulate", "subpath_match",
    "trivial_length", "unit_length", "write_corpus", "write_encoded", "write_sequence",
]
