import itertools
import random
from math import comb, factorial

import pytest

from ncperm.abp import expand_abp
from ncperm.core import NcPoly
from ncperm.graph import LabeledDigraph, cperm_brute, edge_var, permutation_sign
from ncperm.sym import (SymError, gen_sym, hadamard_pre_substitution, hammon_abp,
                        perm_via_hadamard, rank_one_cperm, rank_one_graph, sym_abp, sym_check,
                        sym_var, y_var)


def X(i):
    return NcPoly.var(sym_var(i))


def Y(j):
    return NcPoly.var(y_var(j))


def E(i, j):
    return NcPoly.var(edge_var(i, j))


def relabel(f, perm):
    """Apply x_i -> x_{perm[i]} to every monomial."""
    return f.evaluate({sym_var(i): X(perm[i]) for i in perm}, NcPoly.one())


def test_gen_sym_examples():
    assert gen_sym("cayley", 3, 2) == X(1) * X(2) + X(1) * X(3) + X(2) * X(3)
    assert gen_sym("nc", 2, 2) == X(1) * X(2) + X(2) * X(1)
    assert gen_sym("snc", 2, 2) == X(1) * X(2) - X(2) * X(1)
    assert gen_sym("nc", 3, 1) == X(1) + X(2) + X(3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_term_counts(n):
    for d in range(1, n + 1):
        assert len(gen_sym("cayley", n, d)) == comb(n, d)
        assert len(gen_sym("nc", n, d)) == comb(n, d) * factorial(d)
    assert len(gen_sym("snc", n, n)) == factorial(n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_relabeling_behaviour(n):
    for images in itertools.permutations(range(1, n + 1)):
        perm = dict(zip(range(1, n + 1), images))
        sign = permutation_sign(perm)
        for d in range(1, n + 1):
            assert relabel(gen_sym("nc", n, d), perm) == gen_sym("nc", n, d)
        assert relabel(gen_sym("snc", n, n), perm) == sign * gen_sym("snc", n, n)
    swap = {i: i for i in range(1, n + 1)}
    swap[1], swap[2] = 2, 1
    assert relabel(gen_sym("cayley", n, 2), swap) != gen_sym("cayley", n, 2)


def test_bad_arguments():
    with pytest.raises(SymError, match="variant"):
        gen_sym("foo", 2, 2)
    with pytest.raises(SymError):
        gen_sym("nc", 2, 3)
    with pytest.raises(SymError, match="d = n"):
        gen_sym("snc", 3, 2)
    with pytest.raises(SymError):
        hammon_abp(0)
    with pytest.raises(SymError):
        hadamard_pre_substitution(6)
    with pytest.raises(SymError):
        rank_one_cperm(7)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sym_abp_matches_generator(n):
    for d in range(1, n + 1):
        for variant in ("cayley", "nc"):
            assert expand_abp(sym_abp(variant, n, d)) == gen_sym(variant, n, d)
    assert expand_abp(sym_abp("snc", n, n)) == gen_sym("snc", n, n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fan_abp_is_substituted_generator(n):
    ell = sum((E(a, b) for a in range(1, n + 1) for b in range(1, n + 1)), NcPoly.zero())
    for variant in ("nc", "snc"):
        want = gen_sym(variant, n, n).evaluate(
            {sym_var(j): ell * Y(j) for j in range(1, n + 1)}, NcPoly.one())
        assert expand_abp(sym_abp(variant, n, n, fan=True)) == want


def test_hammon_expansions():
    assert expand_abp(hammon_abp(1)) == E(1, 1) * Y(1)
    row = [E(1, 1) * Y(1) + E(1, 2) * Y(2), E(2, 1) * Y(1) + E(2, 2) * Y(2)]
    assert expand_abp(hammon_abp(2)) == row[0] * row[1]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_hammon_node_count(n):
    a = hammon_abp(n)
    assert a.size == n * n + n + 1 <= 2 * n * n + 2 * n
    assert len(expand_abp(a)) == n ** n


@pytest.mark.parametrize("n", [1, 2, 3])
def test_perm_via_hadamard_matches_brute(n):
    g = LabeledDigraph.complete(n)
    for signed in (False, True):
        assert perm_via_hadamard(n, signed) == cperm_brute(g, signed=signed)


def test_pre_substitution_monomials_are_interleaved():
    n = 3
    _, pre = perm_via_hadamard(n, signed=True, with_pre=True)
    assert len(pre) == factorial(n)
    for images in itertools.permutations(range(1, n + 1)):
        w = []
        for i, s in enumerate(images, start=1):
            w += [edge_var(i, s), y_var(s)]
        sign = permutation_sign(dict(zip(range(1, n + 1), images)))
        assert pre[tuple(w)] == sign


def test_rank_one_examples():
    lhs, rhs = rank_one_cperm(1)
    assert lhs == rhs == X(1)
    for n in (2, 3, 4):
        lhs, rhs = rank_one_cperm(n, random.Random(n))
        assert lhs == rhs
    assert all(lab.var == sym_var(j) for (i, j), lab in rank_one_graph(3).edges.items())


def test_sym_check_report():
    rep = sym_check(2, signed=True)
    assert rep["equal"] and rep["rank_one_equal"]
    assert rep["hammon_nodes"] == 7
    assert rep["hadamard"] == E(1, 1) * E(2, 2) - E(1, 2) * E(2, 1)
