import json
import subprocess
import sys

import jsonschema
import pytest

from nsf import schemas
from nsf.cli import main

from oracles import bf_T

Q20 = 557940830126698960967415390


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    lines = [json.loads(line) for line in out.splitlines() if line.strip()]
    return code, lines, err


def validate(lines, name):
    jsonschema.validate(lines[0], schemas.load("manifest"))
    assert lines[0]["subcommand"] == name
    for line in lines[1:]:
        jsonschema.validate(line, schemas.load(name))


class TestVerify:
    def test_small_range(self, capsys):
        code, lines, _ = run(capsys, "verify", "--start", "25", "--end", "1000",
                             "--segment-width", "300")
        assert code == 0
        validate(lines, "verify")
        assert lines[0]["finished"] is None
        assert [l["lo"] for l in lines[1:-1]] == [25, 300, 600, 900]
        total = lines[-1]
        assert total["total"] is True and total["exceptions"] == []
        assert total["covered"] + total["targeted"] + total["fallback"] == 975

    def test_rejects_small_start(self, capsys):
        code, lines, err = run(capsys, "verify", "--start", "2", "--end", "25")
        assert code == 2 and not lines and "24" in err

    def test_needs_range(self, capsys):
        assert run(capsys, "verify")[0] == 2

    def test_bad_config(self, capsys):
        assert run(capsys, "verify", "--start", "25", "--end", "100",
                   "--s1-bound", "10", "--s2-bound", "20")[0] == 2

    def test_threads_env(self, capsys, monkeypatch):
        monkeypatch.setenv("NSF_THREADS", "4")
        code, lines, _ = run(capsys, "verify", "--start", "25", "--end", "5000",
                             "--segment-width", "1000")
        assert code == 0
        monkeypatch.setenv("NSF_THREADS", "x")
        assert run(capsys, "verify", "--start", "25", "--end", "100")[0] == 2

    def test_output_and_checkpoint(self, capsys, tmp_path):
        out, ck = tmp_path / "out.jsonl", tmp_path / "ck.jsonl"
        args = ["verify", "--start", "25", "--end", "3000", "--segment-width", "1000",
                "--output", str(out), "--checkpoint", str(ck)]
        assert run(capsys, *args)[0] == 0
        first = [json.loads(l) for l in out.read_text().splitlines()]
        validate(first, "verify")
        assert len(ck.read_text().splitlines()) == 3
        assert run(capsys, *args)[0] == 0
        second = [json.loads(l) for l in out.read_text().splitlines()]
        strip = lambda d: {k: v for k, v in d.items() if k not in ("ms", "finished")}
        assert [strip(l) for l in second[1:]] == [strip(l) for l in first[1:]]
        assert len(ck.read_text().splitlines()) == 3

    def test_no_left_extension(self, capsys):
        code, lines, _ = run(capsys, "verify", "--start", "25", "--end", "20000",
                             "--segment-width", "1000", "--s1-bound", "2000",
                             "--s2-bound", "200", "--no-left-extension")
        assert code == 0
        assert lines[-1]["targeted"] + lines[-1]["fallback"] > 0


class TestCount:
    def test_ten(self, capsys):
        code, lines, _ = run(capsys, "count", "--n", "10", "--what", "T", "--what", "g",
                             "--what", "R", "--what", "theta", "--what", "deficit")
        assert code == 0
        validate(lines, "count")
        line = lines[1]
        assert line["T"] == 3 and line["g"] == 2
        assert line["deficit"] == pytest.approx(-0.6931471805599453)

    def test_default_is_T(self, capsys):
        assert run(capsys, "count", "--n", "10")[1][1] == {"n": 10, "T": 3}

    def test_bad_n(self, capsys):
        assert run(capsys, "count", "--n", "1")[0] == 2


class TestExceptions:
    def test_found(self, capsys):
        code, lines, _ = run(capsys, "exceptions", "--start", "1", "--end", "25")
        assert code == 1
        validate(lines, "exceptions")
        assert lines[1]["exceptions"] == [1, 2, 3, 4, 5, 8, 24]

    def test_clean(self, capsys):
        assert run(capsys, "exceptions", "--start", "25", "--end", "1e4")[0] == 0

    def test_bad(self, capsys):
        assert run(capsys, "exceptions", "--start", "5", "--end", "5")[0] == 2


class TestCriterion:
    def test_odd(self, capsys):
        code, lines, _ = run(capsys, "criterion", "--mode", "odd", "--n", "8000000000",
                             "--A", "0.34843")
        assert code == 0
        validate(lines, "criterion")
        assert lines[1]["verdict"] is True
        assert lines[1]["rhs"] == pytest.approx(0.182, abs=2e-3)

    def test_grh_log_form(self, capsys):
        code, lines, _ = run(capsys, "criterion", "--mode", "grh", "--n", "log:61.597",
                             "--A", "0.2419")
        assert code == 0
        validate(lines, "criterion")

    def test_false_verdict_exit(self, capsys):
        assert run(capsys, "criterion", "--mode", "odd", "--n", "8000000000",
                   "--A", "0.49999")[0] == 1

    def test_exact(self, capsys):
        code, lines, _ = run(capsys, "criterion", "--mode", "odd", "--n", "8000000001",
                             "--A", "0.34843", "--exact")
        assert code == 0
        validate(lines, "criterion")
        code, lines, _ = run(capsys, "criterion", "--mode", "grh", "--n", str(Q20),
                             "--A", "0.2419", "--exact")
        assert code == 0
        assert "p_term" in lines[1]["terms"]

    @pytest.mark.parametrize("argv", [
        ["--mode", "odd", "--n", "log:abc", "--A", "0.3"],
        ["--mode", "odd", "--n", "8000000000", "--A", "0.7"],
        ["--mode", "odd", "--n", "100", "--A", "0.3"],
        ["--mode", "odd", "--n", "log:30", "--A", "0.3", "--exact"],
    ])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, "criterion", *argv)[0] == 2


class TestOptimize:
    def test_odd(self, capsys):
        code, lines, _ = run(capsys, "optimize-a", "--mode", "odd", "--n", "8000000000")
        assert code == 0
        validate(lines, "optimize-a")
        assert lines[1]["A"] == pytest.approx(0.34843, abs=1e-3)


class TestGate:
    def test_witness(self, capsys):
        code, lines, _ = run(capsys, "grh-gate", "--n", str(Q20 - 1))
        assert code == 0
        validate(lines, "grh-gate")
        assert lines[1]["witness"]["q"] == 2
        assert lines[1]["witness"]["n"] == Q20 - 1

    def test_no_witness(self, capsys):
        code, lines, _ = run(capsys, "grh-gate", "--n", str(Q20))
        assert code == 1
        validate(lines, "grh-gate")
        assert lines[1]["witness"] is None

    def test_small(self, capsys):
        assert run(capsys, "grh-gate", "--n", "100")[0] == 2
        assert run(capsys, "grh-gate", "--n", "abc")[0] == 2


def test_usage_exit_code(capsys):
    assert main(["nonsense"]) == 2
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nsf", "count", "--n", "30"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    lines = [json.loads(l) for l in proc.stdout.splitlines()]
    assert lines[1] == {"n": 30, "T": bf_T(30)}
