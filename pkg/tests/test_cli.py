import json
import random

import pytest

from ncperm import cli
from ncperm.abp import abp_to_json, random_abp
from ncperm.core import var


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def two_cycle(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("2\n1 1 a\n2 2 b\n1 2 c\n2 1 d\n")
    return str(p)


@pytest.fixture
def or_cnf(tmp_path):
    p = tmp_path / "f.cnf"
    p.write_text("p cnf 2 1\n1 2 0\n")
    return str(p)


def test_cperm_and_cdet(capsys, two_cycle):
    code, rep, _ = run(capsys, "cperm", "--graph", two_cycle, "--verify")
    assert code == 0 and rep["ok"]
    res = rep["result"]
    assert res["terms"] == 2 and res["abp_agrees"]
    assert len(res["input_sha256"]) == 64
    code, rep, _ = run(capsys, "cdet", "--graph", two_cycle)
    assert code == 0 and rep["result"]["signed"] is True


def test_satcount(capsys, or_cnf):
    code, rep, _ = run(capsys, "satcount", "--cnf", or_cnf, "--verify")
    assert code == 0
    assert rep["result"]["count"] == 3 and rep["result"]["naive_count"] == 3
    code, rep, _ = run(capsys, "satcount", "--cnf", or_cnf, "--signed")
    assert rep["result"]["count"] == 3


def test_nisan_two_cycle(capsys):
    code, rep, _ = run(capsys, "nisan", "--involution", "2 1")
    assert code == 0
    assert rep["result"]["B"] == 4 and rep["result"]["ranks"] == [1, 2, 1]


def test_cut_near_and_hard_involution(capsys):
    _, rep, _ = run(capsys, "cut", "--involution", "3 4 1 2")
    assert rep["result"]["cut"] == 2
    _, rep, _ = run(capsys, "near", "--involution", "3 4 1 2")
    assert rep["result"]["near"] == 2 and rep["ok"]
    code, rep, _ = run(capsys, "hard-involution", "--n", "6", "--report")
    assert code == 0 and rep["result"]["middle_rank"] == 8


def test_abp_round_trip_through_files(capsys, tmp_path):
    a = random_abp(random.Random(3), 3, 2, [var("x1"), var("x2")])
    f = tmp_path / "a.json"
    f.write_text(json.dumps(abp_to_json(a)))
    code, rep, _ = run(capsys, "abp-expand", "--abp", str(f))
    assert code == 0 and rep["result"]["size"] == a.size
    code, rep, _ = run(capsys, "abp-hadamard", "--abp", str(f), str(f), "--verify")
    assert code == 0 and rep["result"]["coefficientwise_agrees"]


def test_output_is_deterministic(capsys, tmp_path, or_cnf):
    outs = []
    for k in range(2):
        target = tmp_path / f"out{k}.json"
        assert cli.run(["--output", str(target), "satcount", "--cnf", or_cnf]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    a = cli.run(["involution-experiment", "--n", "40", "--samples", "20", "--seed", "4"])
    first = capsys.readouterr().out
    cli.run(["involution-experiment", "--n", "40", "--samples", "20", "--seed", "4"])
    assert a in (0, 1) and capsys.readouterr().out == first


def test_experiment_requires_seed(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["involution-experiment", "--n", "10"])
    assert exc.value.code == 2
    assert "--seed" in capsys.readouterr().err


def test_unknown_flag_and_missing_input(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["cperm", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.run(["nisan"])
    assert exc.value.code == 2
    assert "--involution or --involution-file" in capsys.readouterr().err


def test_parse_errors_name_file_and_line(capsys, tmp_path):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 2 1\n1 7 0\n")
    code, rep, err = run(capsys, "satcount", "--cnf", str(bad))
    assert code == 2 and rep is None
    assert f"{bad}:2" in err
    g = tmp_path / "bad.txt"
    g.write_text("2\n1 2 a\n1 2 b\n")
    code, _, err = run(capsys, "cperm", "--graph", str(g))
    assert code == 2 and f"{g}:3" in err
    code, _, err = run(capsys, "cperm", "--graph", str(tmp_path / "missing.txt"))
    assert code == 2


@pytest.mark.parametrize("verb", ["cut", "satcount", "sym-check", "mcoeff"])
def test_selftests_pass(capsys, verb):
    code, rep, err = run(capsys, verb, "--selftest")
    assert code == 0 and rep["ok"]
    assert "[PASS]" in err and "[FAIL]" not in err
