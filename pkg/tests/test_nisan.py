import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from ncperm.core import NcPoly, mat_rank, var
from ncperm.graph import (Involution, LabeledDigraph, all_involutions, build_cperm_abp,
                          cperm_brute, cut, near)
from ncperm.nisan import (NisanError, abp_complexity, full_nisan_matrix, hard_involution,
                          involution_experiment, nisan_matrix, nisan_ranks, nisan_report,
                          random_involution)


def cperm_of(p):
    return cperm_brute(LabeledDigraph.from_involution(p))


def adjacent(k):
    return Involution(2 * k, tuple((2 * i - 1, 2 * i) for i in range(1, k + 1)))


def test_two_cycle_matrix():
    f = cperm_of(Involution(2, ((1, 2),)))
    m = nisan_matrix(f, 1)
    assert m.shape == (2, 2)
    assert sorted(m.entries.values()) == [1, 1]
    assert {i for i, _ in m.entries} == {0, 1} and {j for _, j in m.entries} == {0, 1}
    assert m.rank() == 2
    row = nisan_matrix(f, 0)
    assert row.shape == (1, len(f)) and row.rank() == 1


def test_interleaved_middle_rank_is_tensor_square():
    f = cperm_of(Involution(4, ((1, 3), (2, 4))))
    assert nisan_matrix(f, 2).rank() == 4


def test_complexity_examples():
    assert abp_complexity(NcPoly.parse("x1*x2")) == 3
    assert abp_complexity(cperm_of(Involution(2, ((1, 2),)))) == 4
    assert nisan_ranks(cperm_of(Involution(2, ((1, 2),)))) == [1, 2, 1]


def test_adjacent_grows_linearly_interleaved_exponentially():
    adj = [abp_complexity(cperm_of(adjacent(n // 2))) for n in (4, 6, 8)]
    hard = [nisan_ranks(cperm_of(hard_involution(n)))[n // 2] for n in (4, 6, 8)]
    assert adj[2] - adj[1] == adj[1] - adj[0]
    assert hard == [4, 8, 16]


def test_errors():
    with pytest.raises(NisanError):
        abp_complexity(NcPoly.zero())
    with pytest.raises(NisanError, match="homogeneous"):
        nisan_matrix(NcPoly.parse("x1 + x1*x2"), 1)
    with pytest.raises(NisanError):
        nisan_matrix(NcPoly.parse("x1*x2"), 3)
    with pytest.raises(NisanError):
        hard_involution(5)
    with pytest.raises(NisanError):
        random_involution(3, 0)


def test_hard_involution_examples():
    assert hard_involution(4).pairs == ((1, 3), (2, 4)) and cut(hard_involution(4)) == 2
    assert cut(hard_involution(8)) == 4
    assert hard_involution(2).pairs == ((1, 2),) and cut(hard_involution(2)) == 1


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_restriction_does_not_change_rank(seed):
    rng = random.Random(seed)
    xs = [var("u"), var("v"), var("w")][:rng.randint(1, 3)]
    d = rng.randint(1, 3)
    terms = {}
    for _ in range(rng.randint(1, 6)):
        terms[tuple(rng.choice(xs) for _ in range(d))] = rng.randint(-2, 2) or 1
    f = NcPoly(terms)
    if not f:
        return
    for k in range(d + 1):
        assert nisan_matrix(f, k).rank() == mat_rank(full_nisan_matrix(f, k, xs))


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_sandwich(n):
    if n == 10:
        involutions = [random_involution(10, s) for s in range(40)]
    else:
        involutions = list(all_involutions(n))
    for p in involutions:
        g = LabeledDigraph.from_involution(p)
        b = abp_complexity(cperm_brute(g))
        assert 2 ** cut(p) <= b <= build_cperm_abp(g).size
        assert b <= (n + 1) * 3 ** (near(g) + 2)


def test_report_fields():
    rep = nisan_report(Involution(2, ((1, 2),)))
    assert rep["ranks"] == [1, 2, 1] and rep["B"] == 4 and rep["log2_B"] == 2.0
    assert rep["cut"] == 1 and rep["near"] == 1


def test_random_involution_determinism_and_validity():
    assert random_involution(2, 5).pairs == ((1, 2),)
    assert random_involution(20, 7) == random_involution(20, 7)
    p = random_involution(30, 3)
    assert sorted(v for pair in p.pairs for v in pair) == list(range(1, 31))


def test_random_involution_is_uniform_on_four_points():
    rng = random.Random(2024)
    samples = 100_000
    counts = Counter(random_involution(4, rng).pairs for _ in range(samples))
    assert len(counts) == 3
    for c in counts.values():
        assert abs(c / samples - 1 / 3) < 0.03
    expected = samples / 3
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 13.8  # 99.9% quantile with 2 degrees of freedom


def test_experiment_summary():
    res = involution_experiment(400, 50, seed=11)
    assert res["fraction"] >= 0.9
    assert res["cut_at_least_edges_over_n"]
    assert res == involution_experiment(400, 50, seed=11)
