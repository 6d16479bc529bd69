import json
import subprocess
import sys

import pytest

from conftest import WORKED_EVENTS
from csc_mdl import read_sequence
from csc_mdl.cli import main


@pytest.fixture
def worked_file(tmp_path):
    p = tmp_path / "worked_seq.seq"
    p.write_text("".join(f"{e} {t}\n" for e, t in WORKED_EVENTS))
    return p


@pytest.fixture
def worked_model(tmp_path):
    p = tmp_path / "worked_table.json"
    p.write_text(json.dumps({
        "format": "csc-model/1", "alphabet": ["D", "A", "C", "E", "B"], "config": {},
        "episodes": [{"types": ["A", "B", "C"], "gaps": [2, 1], "starts": [2, 4]},
                     {"types": ["D", "E", "C"], "gaps": [2, 2], "starts": [1, 5]}],
        "singletons": [{"type": "C", "times": [3, 8]}]}))
    return p


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_encode_worked_table_reports_23(tmp_path, capsys, worked_file, worked_model):
    code, rep = run_json(capsys, "encode", str(worked_file), "--model", str(worked_model),
                         "--out", str(tmp_path / "worked_seq.cse"))
    assert code == 0
    assert (rep["total"], rep["trivial_len"], rep["n_patterns"]) == (23, 28, 2)
    assert main(["decode", str(tmp_path / "worked_seq.cse"), "--out", str(tmp_path / "back.seq")]) == 0
    assert read_sequence(tmp_path / "back.seq").named() == read_sequence(worked_file).named()


def test_select_csc1_report(tmp_path, capsys, worked_file):
    code, rep = run_json(capsys, "select", str(worked_file), "--algo", "csc1", "--max-gap", "5",
                         "--freq-threshold", "0.15", "--out-model", str(tmp_path / "m.json"))
    assert code == 0
    # the report's totals agree with the per-row formula over the saved model
    model = json.loads((tmp_path / "m.json").read_text())
    rows = [(len(e["types"]), len(e["starts"])) for e in model["episodes"]]
    rows += [(1, len(s["times"])) for s in model["singletons"]]
    assert rep["total"] == sum(2 * k + f + 1 for k, f in rows)
    assert rep["trivial_len"] == 28
    assert "runtime_ms" in rep and rep["config"]["algo"] == "csc1"


def test_csc2_rejects_threshold(capsys, worked_file):
    assert main(["select", str(worked_file), "--freq-threshold", "0.1"]) == 1
    assert "threshold" in capsys.readouterr().err


def test_missing_input(capsys):
    assert main(["select", "does-not-exist.seq"]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_flag_is_validation_error():
    assert main(["select"]) == 1
    assert main(["nonsense"]) == 1


def test_decode_truncated(tmp_path, capsys, worked_file, worked_model):
    out = tmp_path / "worked_seq.cseb"
    assert main(["encode", str(worked_file), "--model", str(worked_model), "--bitwise", "--out", str(out)]) == 0
    out.write_bytes(out.read_bytes()[:-2])
    assert main(["decode", str(out)]) == 1
    assert "corrupt" in capsys.readouterr().err


def test_model_not_matching_input(tmp_path, worked_model):
    p = tmp_path / "other.seq"
    p.write_text("A 1\nB 2\n")
    assert main(["encode", str(p), "--model", str(worked_model)]) == 1


def test_verify_fuzz(capsys):
    code, rep = run_json(capsys, "verify", "--fuzz", "200", "--seed", "1", "--fuzz-len", "120")
    assert code == 0 and rep == {"cases": 200, "failures": 0}
    code, rep = run_json(capsys, "verify", "--fuzz", "40", "--seed", "2", "--bitwise", "--raw-starts",
                         "--algo", "csc1", "--freq-threshold", "0.05")
    assert code == 0 and rep["failures"] == 0


def test_verify_file(capsys, worked_file, worked_model):
    code, rep = run_json(capsys, "verify", str(worked_file), "--model", str(worked_model), "--bitwise")
    assert code == 0 and rep["ok"]


def test_simulate_deterministic_and_evaluate(tmp_path, capsys):
    a, b = tmp_path / "a.seq", tmp_path / "b.seq"
    assert main(["simulate", "--topology", "2I-2O", "--seed", "7", "--out", str(a)]) == 0
    assert main(["simulate", "--topology", "2I-2O", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    model = tmp_path / "m.json"
    assert main(["select", str(a), "--out-model", str(model)]) == 0
    capsys.readouterr()
    code, rep = run_json(capsys, "evaluate", "--model", str(model), "--topology", "2I-2O",
                         "--input", str(a))
    assert code == 0
    assert rep["subpath_fraction"] >= 0.8 and rep["ratio"] >= 3.0


def test_evaluate_mismatched_alphabet(tmp_path, worked_model):
    assert main(["evaluate", "--model", str(worked_model), "--topology", "2I-2O"]) == 1
    assert main(["evaluate", "--model", str(worked_model), "--topology", "9I-9O"]) == 1


def test_features(tmp_path, capsys):
    corpus = tmp_path / "c.txt"
    corpus.write_text("#label: x\na b c a b c\n\n#label: y\nc b a\n")
    seq_model = tmp_path / "m.json"
    assert main(["select", str(corpus), "--corpus", "--out-model", str(seq_model)]) == 0
    capsys.readouterr()
    assert main(["features", str(corpus), "--model", str(seq_model)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].endswith("label") and len(lines) == 3


def test_module_entry_point(worked_file):
    proc = subprocess.run([sys.executable, "-m", "csc_mdl", "select", str(worked_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "total=" in proc.stdout
