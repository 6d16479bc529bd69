"""Command-line front end: ``csc-mdl <command> ...``.

Exit status is 0 on success, 1 when validation fails (bad flags, malformed
or corrupt input, a failed check) and 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import codec
from .conveyor import load_topology, longest_subpath, simulate, subpath_match
from .events import EventSequence
from .fuzz import random_sequence
from .miner import MinerConfig, mine_episodes
from .modelfile import load_model, save_model
from .selector import CSC1, CSC2, SelectionConfig, score, select
from .seq_io import (concatenate, export_features, format_sequence, read_corpus, read_sequence,
                     write_sequence)

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class Invalid(Exception):
    """A check or flag combination failed."""


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, indent=1))
    else:
        print(text)
    if getattr(args, "report", None):
        Path(args.report).write_text(json.dumps(report, indent=1) + "\n")


def _miner_config(args, algo: str) -> MinerConfig:
    if algo == CSC2 and args.freq_threshold is not None:
        raise Invalid("csc2 grows candidates without a frequency threshold; drop --freq-threshold")
    return MinerConfig(max_gap=args.max_gap, freq_threshold=args.freq_threshold or 0.0,
                       max_episode_len=getattr(args, "max_len", None))


def _load_input(args) -> EventSequence:
    if getattr(args, "corpus", False):
        seq, _ = concatenate(read_corpus(args.input), args.max_gap)
        return seq
    return read_sequence(args.input)


def _run_select(seq: EventSequence, args):
    cfg = SelectionConfig(max_patterns=args.max_patterns, algorithm=args.algo,
                          miner=_miner_config(args, args.algo))
    t0 = time.perf_counter()
    model = select(seq, cfg)
    ms = (time.perf_counter() - t0) * 1000
    config = {"algo": args.algo, "max_gap": args.max_gap, "freq_threshold": args.freq_threshold,
              "max_patterns": args.max_patterns}
    return model, ms, config


def _pattern_lines(model):
    return [{"episode": occ.episode.format(model.alphabet), "frequency": occ.frequency,
             "score": score(occ.episode.k, occ.frequency)} for occ in model.episodes]


def _stats(table, seq, args, ms=None):
    return codec.encoding_stats(table, seq, raw_starts=getattr(args, "raw_starts", False),
                                runtime_ms=ms)


def cmd_simulate(args) -> int:
    topo = load_topology(args.topology)
    trace = simulate(topo, args.horizon, seed=args.seed, rate_mode=args.rate_mode)
    text = format_sequence(trace.sequence)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.truth:
        Path(args.truth).write_text("\n".join(trace.ground_truth_lines()) + "\n")
    print(f"# {len(trace.sequence)} events, {len(trace.packages)} packages, M={topo.M}",
          file=sys.stderr)
    return EXIT_OK


def cmd_mine(args) -> int:
    seq = _load_input(args)
    cfg = MinerConfig(max_gap=args.max_gap, freq_threshold=args.freq_threshold or 0.0,
                      max_episode_len=args.max_len, min_count=args.min_count)
    t0 = time.perf_counter()
    found = mine_episodes(seq, cfg)
    ms = (time.perf_counter() - t0) * 1000
    rows = [{"episode": c.episode.format(seq.alphabet), "frequency": c.frequency,
             "score": score(c.episode.k, c.frequency)} for c in found]
    text = "\n".join(f"{r['frequency']}\t{r['score']}\t{r['episode']}" for r in rows)
    _emit(args, {"episodes": rows, "runtime_ms": ms}, text)
    return EXIT_OK


def cmd_select(args) -> int:
    seq = _load_input(args)
    model, ms, config = _run_select(seq, args)
    if args.out_model:
        save_model(model, args.out_model, config)
    stats = _stats(codec.build_table(model), seq, args, ms)
    patterns = _pattern_lines(model)
    report = {"config": config, "patterns": patterns, **stats.as_dict()}
    lines = [f"{p['frequency']}\t{p['score']}\t{p['episode']}" for p in patterns]
    _emit(args, report, "\n".join(lines + [stats.format()]))
    return EXIT_OK


def _model_for(seq: EventSequence, args):
    if args.model:
        model = load_model(args.model)
        table = codec.build_table(model)
        if codec.decode(table).named() != seq.named():
            raise Invalid(f"model {args.model} does not describe {args.input}")
        return table, None
    model, ms, _ = _run_select(seq, args)
    return codec.build_table(model), ms


def cmd_encode(args) -> int:
    seq = _load_input(args)
    table, ms = _model_for(seq, args)
    out = args.out or str(Path(args.input).with_suffix(".cseb" if args.bitwise else ".cse"))
    codec.write_encoded(out, table, bitwise=args.bitwise, raw_starts=args.raw_starts)
    stats = _stats(table, seq, args, ms)
    report = {"output": out, "bytes": Path(out).stat().st_size, **stats.as_dict()}
    _emit(args, report, f"wrote {out}\n{stats.format()}")
    return EXIT_OK


def cmd_decode(args) -> int:
    seq = codec.decode(codec.read_encoded(args.encoded))
    if args.out:
        write_sequence(seq, args.out)
    else:
        sys.stdout.write(format_sequence(seq))
    return EXIT_OK


def _round_trip(seq: EventSequence, table, bitwise: bool, raw_starts: bool) -> bool:
    data = codec.dumps_bits(table, raw_starts) if bitwise else codec.dumps_units(table)
    table2 = codec.loads_bits(data) if bitwise else codec.loads_units(data)
    return codec.decode(table2).named() == seq.named()


def cmd_verify(args) -> int:
    if args.fuzz:
        rng = np.random.default_rng(args.seed)
        failures = 0
        for i in range(args.fuzz):
            n = int(rng.integers(1, args.fuzz_len + 1))
            m = int(rng.integers(1, 27))
            seq = random_sequence(rng, n, m, simultaneous=bool(rng.integers(0, 2)))
            model, _, _ = _run_select(seq, args)
            if not _round_trip(seq, codec.build_table(model), args.bitwise, args.raw_starts):
                failures += 1
                print(f"case {i}: round trip mismatch (n={n}, M={m})", file=sys.stderr)
        _emit(args, {"cases": args.fuzz, "failures": failures},
              f"{args.fuzz - failures}/{args.fuzz} round trips exact")
        return EXIT_OK if failures == 0 else EXIT_INVALID
    if not args.input:
        raise Invalid("verify needs an input sequence or --fuzz N")
    seq = _load_input(args)
    table, _ = _model_for(seq, args)
    ok = _round_trip(seq, table, args.bitwise, args.raw_starts)
    _emit(args, {"ok": ok, "events": len(seq)}, "ok" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_evaluate(args) -> int:
    topo = load_topology(args.topology)
    model = load_model(args.model)
    unknown = sorted(set(model.alphabet) - set(topo.units))
    if unknown:
        raise Invalid(f"model alphabet does not match topology {topo.name}: {unknown[:5]}")
    table = codec.build_table(model)
    seq = read_sequence(args.input) if args.input else codec.decode(table)
    stats = _stats(table, seq, args)
    eps = [occ.episode for occ in model.episodes]
    hits = [subpath_match(ep, topo, model.alphabet) for ep in eps]
    longest = max((longest_subpath(ep, topo, model.alphabet) for ep in eps), default=0)
    frac = sum(hits) / len(hits) if hits else 0.0
    report = {"topology": topo.name, "patterns": len(eps), "subpath_matches": sum(hits),
              "subpath_fraction": frac, "longest_subpath": longest, **stats.as_dict()}
    text = (f"subpath_fraction={frac:.3f} ({sum(hits)}/{len(hits)})\n"
            f"longest_subpath={longest}\n{stats.format()}")
    _emit(args, report, text)
    return EXIT_OK


def cmd_features(args) -> int:
    corpus = read_corpus(args.input)
    model = load_model(args.model)
    if set(model.alphabet) - set(corpus.alphabet):
        raise Invalid("model alphabet has event types the corpus lacks")
    text = export_features(corpus, model, drop_gaps=args.drop_gaps,
                           delimiter=args.delimiter, out=args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def _selection_flags(p, with_input=True):
    if with_input:
        p.add_argument("input", help="sequence file (or corpus with --corpus)")
        p.add_argument("--corpus", action="store_true", help="input is a multi-sequence corpus")
    p.add_argument("--algo", choices=[CSC1, CSC2], default=CSC2)
    p.add_argument("--max-gap", type=int, default=5)
    p.add_argument("--freq-threshold", type=float, default=None)
    p.add_argument("--max-patterns", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csc-mdl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="print a JSON report")
        return p

    p = command("simulate", cmd_simulate, "generate a conveyor trace")
    p.add_argument("--topology", required=True, help="built-in name or JSON file")
    p.add_argument("--horizon", type=int, default=1418)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rate-mode", choices=["total-split", "per-path"], default="total-split")
    p.add_argument("--out")
    p.add_argument("--truth", help="write '<path> <birth>' per package here")

    p = command("mine", cmd_mine, "list frequent episodes")
    p.add_argument("input")
    p.add_argument("--corpus", action="store_true")
    p.add_argument("--max-gap", type=int, default=5)
    p.add_argument("--freq-threshold", type=float, default=None)
    p.add_argument("--min-count", type=int, default=None)
    p.add_argument("--max-len", type=int, default=None)

    p = command("select", cmd_select, "select episodes and report encoded lengths")
    _selection_flags(p)
    p.add_argument("--out-model")
    p.add_argument("--report", help="also write the JSON report here")
    p.add_argument("--raw-starts", action="store_true")

    p = command("encode", cmd_encode, "encode a sequence")
    _selection_flags(p)
    p.add_argument("--model", help="use this model instead of selecting")
    p.add_argument("--out")
    p.add_argument("--bitwise", action="store_true")
    p.add_argument("--raw-starts", action="store_true")

    p = command("decode", cmd_decode, "decode a .cse or .cseb file")
    p.add_argument("encoded")
    p.add_argument("--out")

    p = command("verify", cmd_verify, "check encode/decode round trips")
    p.add_argument("input", nargs="?")
    p.add_argument("--corpus", action="store_true")
    _selection_flags(p, with_input=False)
    p.add_argument("--model")
    p.add_argument("--bitwise", action="store_true")
    p.add_argument("--raw-starts", action="store_true")
    p.add_argument("--fuzz", type=int, default=0, metavar="N")
    p.add_argument("--fuzz-len", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)

    p = command("evaluate", cmd_evaluate, "score a conveyor model against its topology")
    p.add_argument("--model", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--input", help="trace the model was selected on")
    p.add_argument("--raw-starts", action="store_true")

    p = command("features", cmd_features, "export per-sequence pattern counts")
    p.add_argument("input", help="corpus file")
    p.add_argument("--model", required=True)
    p.add_argument("--drop-gaps", action="store_true")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.fn(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (Invalid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
