"""Symmetric polynomial families and the Hadamard-product route to C-perm and C-det."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Optional, Tuple

from .abp import Abp, Label, _AbpBuilder, expand_abp, hadamard_abp, substitute_abp
from .core import NcPoly, mat_rank, var
from .graph import LabeledDigraph, cperm_brute, edge_var

__all__ = [
    "VARIANTS", "SymError", "sym_var", "y_var", "gen_sym", "sym_abp", "hammon_abp",
    "perm_via_hadamard", "hadamard_pre_substitution", "rank_one_graph", "rank_one_cperm",
    "sym_check",
]

VARIANTS = ("cayley", "nc", "snc")
HADAMARD_MAX_N = 5
RANK_ONE_MAX_N = 6


class SymError(ValueError):
    pass


def sym_var(i: int) -> int:
    return var(f"x_{i}")


def y_var(j: int) -> int:
    return var(f"y_{j}")


def _check(variant: str, n: int, d: int) -> None:
    if variant not in VARIANTS:
        raise SymError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    if not 1 <= d <= n:
        raise SymError(f"need 1 <= d <= n, got n={n}, d={d}")
    if variant == "snc" and d != n:
        raise SymError("the signed variant is defined only for d = n")


def _inversions(seq) -> int:
    return sum(1 for a, b in itertools.combinations(seq, 2) if a > b)


def gen_sym(variant: str, n: int, d: int) -> NcPoly:
    """Sum over ordered d-subsets of x_1..x_n.

    ``cayley`` keeps increasing sequences only, ``nc`` keeps every ordering
    and ``snc`` (d = n) weights each ordering by the sign of the permutation.
    """
    _check(variant, n, d)
    terms = {}
    for seq in itertools.permutations(range(1, n + 1), d):
        if variant == "cayley" and list(seq) != sorted(seq):
            continue
        sign = -1 if variant == "snc" and _inversions(seq) % 2 else 1
        terms[tuple(sym_var(i) for i in seq)] = Fraction(sign)
    return NcPoly(terms)


def sym_abp(variant: str, n: int, d: int, fan: bool = False) -> Abp:
    """Subset-state ABP for the symmetric families.

    A node remembers the set of indices used so far (for ``cayley`` only the
    largest one).  With ``fan`` every letter x_j becomes l * y_j, where
    l = sum_{a,b} x_{a,b} is a bundle of parallel edges into a middle node.
    """
    _check(variant, n, d)
    step = 2 if fan else 1
    b = _AbpBuilder(step * d + 1)
    src = b.node(0, 0)
    snk = b.node(step * d, "sink")
    frontier = {0: src}
    ell = [edge_var(a, c) for a in range(1, n + 1) for c in range(1, n + 1)]
    for pos in range(d):
        nxt = {}
        last = pos + 1 == d
        for state, nid in frontier.items():
            for j in range(1, n + 1):
                if variant == "cayley":
                    if j <= state:
                        continue
                    new_state = j
                    sign = 1
                else:
                    if state >> j & 1:
                        continue
                    new_state = state | 1 << j
                    above = bin(state >> (j + 1)).count("1")
                    sign = -1 if variant == "snc" and above % 2 else 1
                if last:
                    dst = snk
                else:
                    if new_state not in nxt:
                        nxt[new_state] = b.node(step * (pos + 1), new_state)
                    dst = nxt[new_state]
                if fan:
                    mid = b.node(step * pos + 1, (state, j))
                    for x in ell:
                        b.edge(nid, mid, Fraction(1), x)
                    b.edge(mid, dst, Fraction(sign), y_var(j))
                else:
                    b.edge(nid, dst, Fraction(sign), sym_var(j))
        frontier = nxt
    return b.build(src, snk)


def hammon_abp(n: int) -> Abp:
    """ABP for prod_{i=1..n} (sum_j x_{i,j} y_j) with n^2 + n + 1 nodes."""
    if n < 1:
        raise SymError(f"n must be positive, got {n}")
    b = _AbpBuilder(2 * n + 1)
    rows = [b.node(2 * i, "row") for i in range(n + 1)]
    for i in range(n):
        for j in range(1, n + 1):
            mid = b.node(2 * i + 1, j)
            b.edge(rows[i], mid, Fraction(1), edge_var(i + 1, j))
            b.edge(mid, rows[i + 1], Fraction(1), y_var(j))
    return b.build(rows[0], rows[n])


def hadamard_pre_substitution(n: int, signed: bool = False) -> Abp:
    """(Sym_{n,n}(l y_1, ..., l y_n) Hadamard-times the hammon ABP), before y -> 1."""
    if not 1 <= n <= HADAMARD_MAX_N:
        raise SymError(f"n={n} outside 1..{HADAMARD_MAX_N}")
    sym = sym_abp("snc" if signed else "nc", n, n, fan=True)
    return hadamard_abp(sym, hammon_abp(n))


def perm_via_hadamard(n: int, signed: bool = False, with_pre: bool = False):
    """C-perm (C-det if ``signed``) of the complete graph on x_{i,j}, via the Hadamard route."""
    h = hadamard_pre_substitution(n, signed)
    out = expand_abp(substitute_abp(h, {y_var(j): 1 for j in range(1, n + 1)}))
    if with_pre:
        return out, expand_abp(h)
    return out


def rank_one_graph(n: int) -> LabeledDigraph:
    """Complete graph with A[i, j] = x_j, so every row of A is the same."""
    return LabeledDigraph(n, {(i, j): Label(Fraction(1), sym_var(j))
                              for i in range(1, n + 1) for j in range(1, n + 1)})


def rank_one_cperm(n: int, rng: Optional[random.Random] = None,
                   trials: int = 5) -> Tuple[NcPoly, NcPoly]:
    """(C-perm of the rank-one matrix, nc-Sym_{n,n}).

    Also checks that random rational substitutions give a matrix of rank at most 1.
    """
    if not 1 <= n <= RANK_ONE_MAX_N:
        raise SymError(f"n={n} outside 1..{RANK_ONE_MAX_N}")
    g = rank_one_graph(n)
    rng = rng or random.Random(0)
    for _ in range(trials):
        vals = {sym_var(j): Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for j in range(1, n + 1)}
        rows = [[g.edges[(i, j)].coeff * vals[g.edges[(i, j)].var] for j in range(1, n + 1)]
                for i in range(1, n + 1)]
        if mat_rank(rows) > 1:
            raise SymError("substituted matrix has rank above 1")
    return cperm_brute(g), gen_sym("nc", n, n)


def sym_check(n: int, signed: bool = False) -> dict:
    """Compare the Hadamard pipeline against the brute-force C-perm / C-det."""
    got = perm_via_hadamard(n, signed)
    want = cperm_brute(LabeledDigraph.complete(n), signed=signed)
    lhs, rhs = rank_one_cperm(min(n, RANK_ONE_MAX_N))
    return {
        "n": n,
        "signed": signed,
        "hadamard": got,
        "brute": want,
        "equal": got == want,
        "rank_one_equal": lhs == rhs,
        "hammon_nodes": hammon_abp(n).size,
    }
