"""Nisan partial-derivative matrices and the ABP complexity of homogeneous polynomials."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from .core import NcPoly, RatMatrix, Word, mat_rank
from .graph import (Involution, LabeledDigraph, build_cperm_abp, cperm_brute, cut,
                    interval_edges, near)

__all__ = [
    "NisanMatrix", "NisanError", "nisan_matrix", "full_nisan_matrix", "nisan_ranks",
    "abp_complexity", "hard_involution", "random_involution", "nisan_report",
    "involution_experiment",
]


class NisanError(ValueError):
    pass


@dataclass(frozen=True)
class NisanMatrix:
    """M_k(f) restricted to its nonzero rows (length-k prefixes) and columns (suffixes)."""
    k: int
    d: int
    row_words: Tuple[Word, ...]
    col_words: Tuple[Word, ...]
    entries: Dict[Tuple[int, int], Fraction]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_words), len(self.col_words)

    def dense(self) -> List[List[Fraction]]:
        rows, cols = self.shape
        out = [[Fraction(0)] * cols for _ in range(rows)]
        for (i, j), c in self.entries.items():
            out[i][j] = c
        return out

    def to_matrix(self) -> Optional[RatMatrix]:
        if not self.row_words or not self.col_words:
            return None
        return RatMatrix(self.dense())

    def rank(self) -> int:
        if not self.entries:
            return 0
        return mat_rank(self.dense())


def _degree_of(f: NcPoly) -> int:
    if not f:
        raise NisanError("zero polynomial has no Nisan matrices")
    if not f.is_homogeneous():
        raise NisanError("polynomial is not homogeneous")
    return f.degree


def nisan_matrix(f: NcPoly, k: int) -> NisanMatrix:
    d = _degree_of(f)
    if not 0 <= k <= d:
        raise NisanError(f"split position {k} outside 0..{d}")
    rows: Dict[Word, int] = {}
    cols: Dict[Word, int] = {}
    entries: Dict[Tuple[int, int], Fraction] = {}
    for w, c in sorted(f.items()):
        i = rows.setdefault(w[:k], len(rows))
        j = cols.setdefault(w[k:], len(cols))
        entries[(i, j)] = c
    return NisanMatrix(k, d, tuple(rows), tuple(cols), entries)


def full_nisan_matrix(f: NcPoly, k: int, variables: Sequence[int]) -> RatMatrix:
    """Unrestricted M_k(f) indexed by all n^k by n^(d-k) words (small cases only)."""
    d = _degree_of(f)
    rows = list(_cartesian(variables, repeat=k))
    cols = list(_cartesian(variables, repeat=d - k))
    return RatMatrix([[f[u + v] for v in cols] for u in rows])


def nisan_ranks(f: NcPoly) -> List[int]:
    d = _degree_of(f)
    return [nisan_matrix(f, k).rank() for k in range(d + 1)]


def abp_complexity(f: NcPoly) -> int:
    """Sum of the Nisan ranks: the minimum size of an ABP computing f."""
    return sum(nisan_ranks(f))


def hard_involution(n: int) -> Involution:
    """pi(i) = i + n/2."""
    if n <= 0 or n % 2:
        raise NisanError(f"n must be a positive even number, got {n}")
    h = n // 2
    return Involution(n, tuple((i, i + h) for i in range(1, h + 1)))


def random_involution(n: int, seed) -> Involution:
    """Uniform fixed-point-free involution: pair the smallest free point with a uniform partner."""
    if n <= 0 or n % 2:
        raise NisanError(f"n must be a positive even number, got {n}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    free = list(range(1, n + 1))
    pairs = []
    while free:
        a = free.pop(0)
        b = free.pop(rng.randrange(len(free)))
        pairs.append((a, b))
    return Involution(n, tuple(pairs))


def nisan_report(inv: Involution) -> dict:
    g = LabeledDigraph.from_involution(inv)
    f = cperm_brute(g)
    ranks = nisan_ranks(f)
    total = sum(ranks)
    return {
        "n": inv.n,
        "cut": cut(inv),
        "near": near(g),
        "ranks": ranks,
        "B": total,
        "log2_B": math.log2(total),
        "abp_nodes": build_cperm_abp(g).size,
    }


def involution_experiment(n: int, samples: int, seed) -> dict:
    """Fraction of random involutions with cut >= n/3 - n^(3/4)."""
    rng = random.Random(seed)
    threshold = n / 3 - n ** 0.75
    cuts, edges = [], []
    for _ in range(samples):
        inv = random_involution(n, rng)
        cuts.append(cut(inv))
        edges.append(interval_edges(inv))
    hits = sum(c >= threshold for c in cuts)
    return {
        "n": n,
        "samples": samples,
        "threshold": threshold,
        "fraction": hits / samples if samples else 0.0,
        "min_cut": min(cuts, default=0),
        "mean_cut": sum(cuts) / samples if samples else 0.0,
        "min_interval_edges": min(edges, default=0),
        "cut_at_least_edges_over_n": all(c * n >= e for c, e in zip(cuts, edges)),
    }
