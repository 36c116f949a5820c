import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ncperm.core import (NcPoly, RatMatrix, hadamard_poly, mat_rank, parse_fraction,
                         poly_from_json, poly_mul, poly_to_json, ring_one, tensor, var, word)

X = [var(f"x{i}") for i in range(1, 6)]
x1, x2, x3, x4 = (NcPoly.var(v) for v in X[:4])


def polys(max_vars=5, max_deg=4, max_terms=5, coeffs=st.integers(-3, 3)):
    words = st.lists(st.sampled_from(X[:max_vars]), max_size=max_deg).map(tuple)
    return st.dictionaries(words, coeffs, max_size=max_terms).map(NcPoly)


def gauss_jordan_rank(rows):
    """Row-reduce with Fractions and count pivots."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        m[rank] = [x / p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        col += 1
    return rank


# polynomial arithmetic

def test_product_is_ordered_concatenation():
    assert x1 * x2 == NcPoly({word("x1", "x2"): 1})
    assert x1 * x2 != x2 * x1


def test_product_distributes_over_sum():
    assert (x1 + x2) * x1 == NcPoly({word("x1", "x1"): 1, word("x2", "x1"): 1})


def test_scalars_are_bilinear():
    assert (2 * x1) * (3 * x2) == NcPoly({word("x1", "x2"): 6})


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_multiplication_associates_and_distributes(p, q, r):
    assert poly_mul(poly_mul(p, q), r) == poly_mul(p, poly_mul(q, r))
    assert p * (q + r) == p * q + p * r
    assert (p + q) * r == p * r + q * r


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_product_coefficients_sum_over_splits(p, q):
    prod = p * q
    for w, c in prod.items():
        expected = sum(p[w[:k]] * q[w[k:]] for k in range(len(w) + 1))
        assert c == expected
    if p and q:
        assert prod.degree <= p.degree + q.degree


@given(polys())
@settings(max_examples=60, deadline=None)
def test_no_zero_coefficients_and_canonical_fractions(p):
    q = (p * Fraction(1, 3)) * 6 - p
    for _, c in q.items():
        assert c != 0
        assert isinstance(c, Fraction)
    assert q == p


def test_hadamard_examples():
    f = NcPoly({word("x1", "x2"): 1, word("x2", "x1"): 2})
    assert hadamard_poly(f, NcPoly({word("x1", "x2"): 3})) == NcPoly({word("x1", "x2"): 3})
    assert hadamard_poly(f, NcPoly.zero()) == NcPoly.zero()
    assert hadamard_poly(x1 * x2, x2 * x1) == NcPoly.zero()


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_hadamard_algebra(f, g, h):
    assert hadamard_poly(f, g) == hadamard_poly(g, f)
    assert hadamard_poly(hadamard_poly(f, g), h) == hadamard_poly(f, hadamard_poly(g, h))
    for w, c in hadamard_poly(f, g).items():
        assert c == f[w] * g[w]


@given(polys(coeffs=st.just(1)))
@settings(max_examples=40, deadline=None)
def test_hadamard_idempotent_on_zero_one_polys(f):
    assert hadamard_poly(f, f) == f


@given(polys(max_vars=3), polys(max_vars=3), polys(max_vars=3, max_deg=2))
@settings(max_examples=40, deadline=None)
def test_substitution_is_a_homomorphism(p, q, s):
    sub = {X[0]: s, X[1]: NcPoly.const(2)}
    assert (p * q).substitute(sub) == p.substitute(sub) * q.substitute(sub)
    assert (p + q).substitute(sub) == p.substitute(sub) + q.substitute(sub)


@given(polys(max_vars=3))
@settings(max_examples=40, deadline=None)
def test_evaluation_at_matrices_respects_order(p):
    rng = random.Random(len(p))
    mats = {v: RatMatrix([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
            for v in X[:3]}
    total = RatMatrix.zeros(2)
    for w, c in p.items():
        acc = RatMatrix.identity(2)
        for v in w:
            acc = acc * mats[v]
        total = total + c * acc
    assert p.evaluate(mats, RatMatrix.identity(2)) == total


@given(polys())
@settings(max_examples=60, deadline=None)
def test_json_and_text_round_trip(p):
    assert poly_from_json(poly_to_json(p)) == p
    assert NcPoly.parse(str(p)) == p


def test_parse_and_degree():
    p = NcPoly.parse("2*x1*x2 - x2*x1 + 3/4")
    assert p[word("x1", "x2")] == 2 and p[word("x2", "x1")] == -1 and p[()] == Fraction(3, 4)
    assert p.degree == 2 and not p.is_homogeneous()
    assert NcPoly.zero().degree == -1


def test_parse_fraction_rejects_garbage():
    assert parse_fraction(" -6/4 ") == Fraction(-3, 2)
    with pytest.raises(ValueError):
        parse_fraction("1/0")
    with pytest.raises(ValueError):
        parse_fraction("abc")


# matrices

def test_rank_examples():
    assert mat_rank(RatMatrix.identity(2)) == 2
    assert mat_rank(RatMatrix.zeros(3)) == 0
    assert mat_rank([[1, 2], [2, 4]]) == 1


def test_rank_matches_gauss_jordan_on_random_matrices():
    rng = random.Random(20240611)
    for _ in range(200):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        rows = [[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)]
        if rng.random() < 0.3 and r > 1:
            rows[-1] = [a + 2 * b for a, b in zip(rows[0], rows[1 % r])]
        assert mat_rank(rows) == gauss_jordan_rank(rows)


@given(st.lists(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5),
                         min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_rank_with_fractional_entries(rows):
    assert mat_rank(rows) == gauss_jordan_rank(rows)
    assert 0 <= mat_rank(rows) <= min(len(rows), 3)


def test_tensor_examples():
    assert tensor(RatMatrix.identity(2), RatMatrix.identity(2)) == RatMatrix.identity(4)
    assert tensor(RatMatrix.zeros(2), RatMatrix.zeros(3)).shape == (6, 6)
    ones = RatMatrix([[1, 1], [1, 1]])
    explicit = RatMatrix([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1]])
    assert tensor(ones, RatMatrix.identity(2)) == explicit
    assert mat_rank(explicit) == 2


def test_tensor_rank_is_multiplicative():
    rng = random.Random(7)
    for _ in range(60):
        def rand():
            r, c = rng.randint(1, 4), rng.randint(1, 4)
            k = rng.randint(1, min(r, c))
            u = RatMatrix([[rng.randint(-2, 2) for _ in range(k)] for _ in range(r)])
            v = RatMatrix([[rng.randint(-2, 2) for _ in range(c)] for _ in range(k)])
            return u * v
        a, b = rand(), rand()
        assert mat_rank(tensor(a, b)) == mat_rank(a) * mat_rank(b)


def test_tensor_mixed_product():
    rng = random.Random(3)
    m = lambda: RatMatrix([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
    a, b, c, d = m(), m(), m(), m()
    assert tensor(a, b) * tensor(c, d) == tensor(a * c, b * d)


def test_matrix_dimension_mismatch_is_an_error():
    with pytest.raises(ValueError):
        RatMatrix.identity(2) + RatMatrix.identity(3)
    with pytest.raises(ValueError):
        RatMatrix.identity(2) * RatMatrix.zeros(3, 2)
    with pytest.raises(ValueError):
        ring_one([RatMatrix.identity(2), RatMatrix.identity(3)])


def test_ring_one_picks_identity():
    assert ring_one([Fraction(2)]) == 1
    assert ring_one([RatMatrix.zeros(3)]) == RatMatrix.identity(3)
    assert ring_one([x1]) == NcPoly.one()
