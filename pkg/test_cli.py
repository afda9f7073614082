"""
Command-line tests: every command is driven through run.main.
"""

import logging
from fractions import Fraction

import pytest

import run
from wfsm_ais.fsm_io import write_wfsm
from wfsm_ais.wfsm import singleton, union_all

RULE = "hamming:r=1,len=3,alphabet=01"


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    """Run in a scratch directory and restore the root logger afterwards."""
    monkeypatch.chdir(tmp_path)
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield tmp_path
    root.handlers[:] = handlers
    root.setLevel(level)


def write_lines(path, lines):
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return path


def build(tmp_path, train, *extra):
    out = tmp_path / "rep.wfsm"
    status = run.main(["build", "--train", str(train), "--rule", RULE, "--out", str(out), *extra])
    return status, out


def test_build_reports_size(tmp_path, capsys):
    train = write_lines(tmp_path / "train.txt", ["000", "001", "001"])
    status, out = build(tmp_path, train)
    assert status == 0
    assert out.exists()
    assert not (tmp_path / "rep.wfsm.partial").exists()
    assert capsys.readouterr().out.strip().startswith("states=")


def test_build_missing_training_file(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        build(tmp_path, tmp_path / "missing.txt")
    assert excinfo.value.code != 0


def test_build_rejects_wrong_length_line(tmp_path, capsys):
    train = write_lines(tmp_path / "train.txt", ["000", "01"])
    status, out = build(tmp_path, train)
    assert status == 1
    assert "line 2" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.glob("*.partial")) == []


def test_build_rejects_bias_for_positive_selection(tmp_path, capsys):
    train = write_lines(tmp_path / "train.txt", ["000"])
    bias = write_lines(tmp_path / "bias.csv", ["0,1", "1/1,1/2", "1/1,1/2", "1/1,1/2"])
    status, _ = build(tmp_path, train, "--bias", str(bias))
    assert status == 1
    assert "negative selection" in capsys.readouterr().err


def test_build_rejects_empty_bias_table(tmp_path, capsys):
    train = write_lines(tmp_path / "train.txt", ["000"])
    bias = tmp_path / "bias.csv"
    bias.write_text("", encoding="utf-8")
    status, out = build(tmp_path, train, "--polarity", "negative", "--bias", str(bias))
    assert status == 1
    assert "❌ bias table" in capsys.readouterr().err
    assert not out.exists()


def test_negative_build_with_bias(tmp_path):
    train = write_lines(tmp_path / "train.txt", ["000"])
    bias = write_lines(tmp_path / "bias.csv", ["0,1", "1/1,1/2", "1/1,1/2", "1/1,1/2"])
    status, out = build(tmp_path, train, "--polarity", "negative", "--bias", str(bias))
    assert status == 0
    assert "# polarity=negative" in out.read_text().splitlines()


def test_score_writes_csv(tmp_path):
    train = write_lines(tmp_path / "train.txt", ["000", "000"])
    _, rep = build(tmp_path, train)
    test = write_lines(tmp_path / "test.txt", ["000", "111"])
    out = tmp_path / "scores.csv"
    status = run.main(["score", "--repertoire", str(rep), "--test", str(test), "--out", str(out)])
    assert status == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "string,score,decimal"
    assert lines[1] == "000,8/1,8"
    assert lines[2] == "111,0/1,0"


def test_score_empty_test_file(tmp_path):
    train = write_lines(tmp_path / "train.txt", ["000"])
    _, rep = build(tmp_path, train)
    test = tmp_path / "test.txt"
    test.write_text("", encoding="utf-8")
    out = tmp_path / "scores.csv"
    assert run.main(["score", "--repertoire", str(rep), "--test", str(test), "--out", str(out)]) == 0
    assert out.read_text().splitlines() == ["string,score,decimal"]


def test_score_corrupted_repertoire(tmp_path, capsys):
    train = write_lines(tmp_path / "train.txt", ["000", "011"])
    _, rep = build(tmp_path, train)
    rep.write_text(rep.read_text().replace("final", "final 9\nfinal", 1), encoding="utf-8")
    test = write_lines(tmp_path / "test.txt", ["000"])
    out = tmp_path / "scores.csv"
    status = run.main(["score", "--repertoire", str(rep), "--test", str(test), "--out", str(out)])
    assert status == 1
    assert "❌" in capsys.readouterr().err
    assert not out.exists()


def test_merge_bench(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    status = run.main(["experiment", "merge-bench", "--alphabet", "012", "--len", "6", "--out", str(out)])
    assert status == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == "states=7 transitions=18"
    lines = out.read_text().splitlines()
    assert lines[0] == "merge_step,num_strings,states,transitions,weight_mode"
    assert len(lines) == 729


def test_fsm_commands(tmp_path, capsys):
    machine = union_all([singleton(s, Fraction(1), "01") for s in ["00", "01", "10", "11"]])
    path = tmp_path / "all.wfsm"
    write_wfsm(machine, path)

    assert run.main(["fsm", "stats", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "states=3 transitions=4"

    assert run.main(["fsm", "print", str(path)]) == 0
    assert capsys.readouterr().out.splitlines() == ["00 1/1", "01 1/1", "10 1/1", "11 1/1"]

    assert run.main(["fsm", "check", str(path)]) == 0
    assert run.main(["fsm", "dump", str(path)]) == 0
    assert capsys.readouterr().out.endswith(path.read_text())


def test_fsm_check_reports_violations(tmp_path, capsys):
    path = tmp_path / "bad.wfsm"
    path.write_text("wfsm v1 alphabet=ab\n0 1 a 1/1\n0 2 a 1/1\nfinal 1\nfinal 2\n", encoding="utf-8")
    assert run.main(["fsm", "check", str(path)]) == 1
    assert "determinism violated" in capsys.readouterr().err
    assert run.main(["fsm", "stats", str(path)]) == 1


def noisy_args(out):
    return ["experiment", "noisy", "--len", "6", "--mu", "0.5", "--train-sizes", "5,10", "--test-size", "10",
            "--runs", "2", "--seed", "3", "--rule", "contiguous:r=3", "--out", str(out)]


def test_noisy_experiment_is_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run.main(noisy_args(first)) == 0
    assert run.main(noisy_args(second)) == 0
    assert len(first.read_text().splitlines()) == 1 + 2 * 2 * 2
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a_summary.csv").read_bytes() == (tmp_path / "b_summary.csv").read_bytes()


def test_noisy_experiment_rejects_bad_rate(tmp_path, capsys):
    out = tmp_path / "noisy.csv"
    args = noisy_args(out)
    args[args.index("0.5")] = "1.5"
    assert run.main(args) == 1
    assert "mutation rate" in capsys.readouterr().err
    assert not out.exists()


def test_failed_experiment_leaves_no_partial_files(tmp_path, capsys):
    train = write_lines(tmp_path / "train.txt", ["in the beginning", "god created the heaven"])
    normal = write_lines(tmp_path / "normal.txt", ["and the earth"])
    anomalous = write_lines(tmp_path / "anomalous.txt", ["a b", "c"])
    out = tmp_path / "language.csv"
    status = run.main(["experiment", "language", "--train", str(train), "--normal", str(normal),
                       "--anomalous", str(anomalous), "--train-sizes", "2", "--runs", "1", "--out", str(out)])
    assert status == 1
    assert "no 3-grams" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.glob("*.partial")) == []
