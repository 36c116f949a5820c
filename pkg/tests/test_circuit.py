import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ncperm.circuit import (CircuitBuilder, CircuitError, all_words, circuit_from_json,
                            circuit_to_json, eval_circuit, expand_circuit, indicator_encoding,
                            mcoeff, op_bound, pc_circuit, pcoeff_circuit, prefix_quotient,
                            random_circuit)
from ncperm.core import NcPoly, RatMatrix, var, word

x1, x2, x3 = var("x1"), var("x2"), var("x3")
XS = [x1, x2]


def build(fn):
    b = CircuitBuilder()
    return b.build(fn(b))


def square_of_sum():
    return build(lambda b: b.mul(b.add(b.var(x1), b.var(x2)), b.add(b.var(x1), b.var(x2))))


def test_expand_examples():
    assert expand_circuit(build(lambda b: b.const(7))) == NcPoly.const(7)
    sq = expand_circuit(square_of_sum())
    assert sq == NcPoly({word(a, b): 1 for a in ("x1", "x2") for b in ("x1", "x2")})
    assert expand_circuit(build(lambda b: b.mul(b.var(x1), b.var(x2)))) == NcPoly({word("x1", "x2"): 1})


def test_expand_degree_cap():
    with pytest.raises(CircuitError, match="exceeds"):
        expand_circuit(square_of_sum(), cap=1)


def test_mcoeff_examples():
    c = build(lambda b: b.mul(b.var(x1), b.var(x2)))
    assert mcoeff(c, (x1, x2)) == 1
    assert mcoeff(c, (x2, x1)) == 0
    assert mcoeff(square_of_sum(), (x1, x2)) == 1
    assert mcoeff(build(lambda b: b.add(b.const(3), b.var(x1))), ()) == 3


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_mcoeff_matches_expansion_with_op_bound(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(1, 30), 5, XS)
    f = expand_circuit(c)
    for w in all_words(XS, 5):
        counter = {"ops": 0}
        assert mcoeff(c, w, counter) == f[w]
        assert counter["ops"] <= op_bound(c, len(w))


def test_prefix_quotient_examples():
    f = NcPoly.parse("x1*x2*x3 + x1*x1")
    assert prefix_quotient(f, (x1,)) == NcPoly.parse("x2*x3 + x1")
    assert prefix_quotient(NcPoly.parse("x1*x2*x3"), (x2,)) == NcPoly.zero()
    assert prefix_quotient(NcPoly.parse("2*x1*x2 + 3*x1*x3"), (x1,)) == NcPoly.parse("2*x2 + 3*x3")


def test_pcoeff_examples():
    b = CircuitBuilder()
    t = b.add(b.product([b.var(x1), b.var(x2), b.var(x3)]), b.mul(b.var(x1), b.var(x1)))
    c = b.build(t)
    assert expand_circuit(pcoeff_circuit(c, (x1,))) == NcPoly.parse("x2*x3 + x1")
    assert expand_circuit(pcoeff_circuit(c, (x2,))) == NcPoly.zero()
    assert expand_circuit(pcoeff_circuit(c, ())) == expand_circuit(c)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_pcoeff_matches_prefix_quotient(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(1, 25), 5, XS)
    f = expand_circuit(c)
    for w in all_words(XS, 3, min_len=0):
        assert expand_circuit(pcoeff_circuit(c, w)) == prefix_quotient(f, w)


def test_pc_examples():
    c = build(lambda b: b.mul(b.var(x1), b.var(x2)))
    pc = pc_circuit(c, 2, [x1, x2])
    assert pc((x1, x2)) == 1
    assert pc((x2, x1)) == 0
    single = pc_circuit(build(lambda b: b.var(x1)), 1, [x1])
    assert single((x1,)) == 1


def test_pc_rejects_degree_violation():
    with pytest.raises(CircuitError, match="exceeds"):
        pc_circuit(square_of_sum(), 1)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_pc_matches_mcoeff_and_size_bound(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(1, 25), 4, XS)
    d = 4
    pc = pc_circuit(c, d, XS)
    assert pc.circuit.size <= op_bound(c, d)
    for w in all_words(XS, 3):
        assert pc(w) == mcoeff(c, w)


def test_pc_guard_kills_rows_with_two_ones():
    c = random_circuit(random.Random(1), 20, 3, XS)
    pc = pc_circuit(c, 3, XS)
    grid = indicator_encoding((x1, x2), 3, XS, pc.y)
    grid[pc.y[(1, x2)]] = 1
    assert eval_circuit(pc.circuit, grid) == 0
    # a one in a row after the encoded word is killed as well
    grid = indicator_encoding((x1,), 3, XS, pc.y)
    grid[pc.y[(3, x1)]] = 1
    assert eval_circuit(pc.circuit, grid) == 0


def test_indicator_encoding_rejects_bad_words():
    with pytest.raises(CircuitError):
        indicator_encoding((x1, x1, x1), 2, XS)
    with pytest.raises(CircuitError):
        indicator_encoding((x3,), 2, XS)


def test_eval_over_matrices_is_ordered():
    c = build(lambda b: b.mul(b.var(x1), b.var(x2)))
    a = RatMatrix([[0, 1], [0, 0]])
    bm = RatMatrix([[0, 0], [1, 0]])
    assert eval_circuit(c, {x1: a, x2: bm}) == a * bm
    assert eval_circuit(c, {x1: Fraction(2), x2: Fraction(3)}) == 6


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_json_round_trip(seed):
    c = random_circuit(random.Random(seed), 15, 4, XS)
    assert expand_circuit(circuit_from_json(circuit_to_json(c))) == expand_circuit(c)


def test_json_accepts_any_order_and_rejects_cycles():
    data = {"gates": [{"id": "m", "kind": "mul", "left": "a", "right": "b"},
                      {"id": "b", "kind": "var", "var": "x2"},
                      {"id": "a", "kind": "const", "value": "3/2"}], "output": "m"}
    assert expand_circuit(circuit_from_json(data)) == NcPoly({word("x2"): Fraction(3, 2)})
    cyc = {"gates": [{"id": 1, "kind": "add", "left": 2, "right": 2},
                     {"id": 2, "kind": "add", "left": 1, "right": 1}], "output": 1}
    with pytest.raises(CircuitError, match="cycle"):
        circuit_from_json(cyc)
    with pytest.raises(CircuitError, match="unknown"):
        circuit_from_json({"gates": [{"id": 1, "kind": "add", "left": 5, "right": 5}], "output": 1})
