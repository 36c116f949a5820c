"""Oracle corpora shared by the CLI self-tests and the acceptance suite.

Every check compares an implementation route against an independent one
(brute force enumeration, direct expansion, naive counting) and returns a
``CheckResult`` instead of raising, so callers can report all outcomes.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from .abp import (Label, exp_sum_readonce, expand_abp, hadamard_abp, random_abp,
                  random_certified_abp)
from .circuit import (all_words, expand_circuit, mcoeff, op_bound, pc_circuit, pcoeff_circuit,
                      prefix_quotient, random_circuit)
from .core import NcPoly, var
from .gentry import (I2, R, R_INV, S, T, Cnf, Instruction, ProductProgram, clause_program,
                     count_sat, eval_program, naive_count)
from .graph import (Involution, LabeledDigraph, all_involutions, build_cperm_abp, cperm_brute,
                    cut, edge_var, interval_edges, near)
from .nisan import abp_complexity, hard_involution, nisan_ranks, random_involution
from .sym import perm_via_hadamard, rank_one_cperm

__all__ = [
    "CheckResult", "CHECKS", "run_check",
    "check_product_form", "check_cperm_abp", "check_expsum", "check_hadamard",
    "check_sandwich", "check_cut_near", "check_random_involutions", "check_gentry",
    "check_s3", "check_circuits", "check_sym",
    "random_bounded_graph", "random_restricted_cnf", "small_cnf_corpus",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: Dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.2f}s)"


def _timed(name: str, fn: Callable[[], Dict]) -> CheckResult:
    t0 = time.perf_counter()
    details = fn()
    passed = not details.get("failures")
    return CheckResult(name, passed, details, time.perf_counter() - t0)


# GRAPH CORPUS
# ------------

def adjacent_two_cycles(k: int) -> Involution:
    return Involution(2 * k, tuple((2 * i - 1, 2 * i) for i in range(1, k + 1)))


def check_product_form(max_k: int = 4) -> CheckResult:
    """cperm of k adjacent 2-cycles with loops equals the product of the 2x2 factors."""
    def run():
        failures = []
        for k in range(1, max_k + 1):
            got = cperm_brute(LabeledDigraph.from_involution(adjacent_two_cycles(k)))
            want = NcPoly.one()
            for i in range(1, k + 1):
                a, b = 2 * i - 1, 2 * i
                want = want * NcPoly({
                    (edge_var(a, a), edge_var(b, b)): 1,
                    (edge_var(a, b), edge_var(b, a)): 1,
                })
            if got != want or len(got) != 2 ** k or any(c != 1 for _, c in got.items()):
                failures.append({"k": k, "got": str(got)})
        return {"max_k": max_k, "failures": failures}
    return _timed("product form of adjacent 2-cycles", run)


def random_bounded_graph(rng: random.Random, n: int, max_comp: int = 3) -> LabeledDigraph:
    """Random graph whose strongly connected components have at most ``max_comp`` vertices.

    Vertices are shuffled into blocks; edges inside a block are random and
    edges between blocks only go forward in a random block order.  Labels
    are mostly distinct variables, sometimes shared or constant.
    """
    verts = list(range(1, n + 1))
    rng.shuffle(verts)
    blocks, i = [], 0
    while i < n:
        size = rng.randint(1, max_comp)
        blocks.append(verts[i:i + size])
        i += size
    rank = {v: bi for bi, blk in enumerate(blocks) for v in blk}
    shared = [var("z_1"), var("z_2")]
    edges = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            same = rank[a] == rank[b]
            if same and rng.random() < 0.7 or rank[a] < rank[b] and rng.random() < 0.15:
                roll = rng.random()
                if roll < 0.1:
                    edges[(a, b)] = Label(Fraction(rng.choice([-2, 2, 3])), None)
                elif roll < 0.2:
                    edges[(a, b)] = Label(Fraction(1), rng.choice(shared))
                else:
                    edges[(a, b)] = Label(Fraction(rng.choice([1, 1, -1, 2])), edge_var(a, b))
    return LabeledDigraph(n, edges)


def check_cperm_abp(seed: int = 0, n_random: int = 50, max_n: int = 8,
                    involution_sizes: Sequence[int] = (2, 4, 6)) -> CheckResult:
    """Expansion of the bounded-component ABP equals brute-force C-perm / C-det."""
    def run():
        rng = random.Random(seed)
        failures = []
        graphs = []
        for n in involution_sizes:
            graphs += [LabeledDigraph.from_involution(inv) for inv in all_involutions(n)]
        involution_graphs = len(graphs)
        for _ in range(n_random):
            graphs.append(random_bounded_graph(rng, rng.randint(1, max_n)))
        for idx, g in enumerate(graphs):
            for signed in (False, True):
                if expand_abp(build_cperm_abp(g, signed=signed)) != cperm_brute(g, signed=signed):
                    failures.append({"graph": idx, "signed": signed})
        return {"involution_graphs": involution_graphs, "random_graphs": n_random,
                "failures": failures}
    return _timed("bounded-component C-perm ABP", run)


# ABP CORPUS
# ----------

def _explicit_sum(f: NcPoly, ys: Sequence[int]) -> NcPoly:
    total = NcPoly.zero()
    for bits in itertools.product((0, 1), repeat=len(ys)):
        total = total + f.substitute(dict(zip(ys, bits)))
    return total


def check_expsum(seed: int = 0, instances: int = 100, max_m: int = 6) -> CheckResult:
    """Read-once exponential sum against the explicit 2^m-term sum, with the size bound."""
    def run():
        rng = random.Random(seed)
        xs = [var("a"), var("b")]
        failures, worst = [], 0.0
        for t in range(instances):
            m = rng.randint(1, max_m)
            ys = [var(f"y_{j}") for j in range(1, m + 1)]
            abp, cert = random_certified_abp(rng, ys, xs)
            out = exp_sum_readonce(abp, cert)
            worst = max(worst, out.size / abp.size)
            if out.size > 2 * abp.size or expand_abp(out) != _explicit_sum(expand_abp(abp), ys):
                failures.append({"instance": t, "m": m, "size_in": abp.size, "size_out": out.size})
        return {"instances": instances, "max_size_ratio": worst, "failures": failures}
    return _timed("read-once exponential sum", run)


def check_hadamard(seed: int = 0, instances: int = 50) -> CheckResult:
    def run():
        rng = random.Random(seed)
        xs = [var("a"), var("b"), var("c")]
        failures = []
        for t in range(instances):
            length = rng.randint(1, 5)
            a = random_abp(rng, length, 3, xs)
            b = random_abp(rng, rng.choice([length, length + 1]), 3, xs, const_prob=0.4)
            if expand_abp(hadamard_abp(a, b)) != expand_abp(a).hadamard(expand_abp(b)):
                failures.append({"instance": t})
        return {"instances": instances, "failures": failures}
    return _timed("Hadamard product of ABPs", run)


# NISAN AND CUT
# -------------

def check_sandwich(sizes: Sequence[int] = (4, 6, 8)) -> CheckResult:
    """2^cut <= B(C-perm) <= ABP nodes for every involution; exact middle rank for the hard one."""
    def run():
        failures, counted = [], 0
        for n in sizes:
            for inv in all_involutions(n):
                g = LabeledDigraph.from_involution(inv)
                b = abp_complexity(cperm_brute(g))
                nodes = build_cperm_abp(g).size
                counted += 1
                if not 2 ** cut(inv) <= b <= nodes:
                    failures.append({"involution": str(inv), "cut": cut(inv), "B": b,
                                     "nodes": nodes})
            hard = hard_involution(n)
            ranks = nisan_ranks(cperm_brute(LabeledDigraph.from_involution(hard)))
            if ranks[n // 2] != 2 ** (n // 2):
                failures.append({"hard": n, "ranks": ranks})
        return {"involutions": counted, "failures": failures}
    return _timed("Nisan sandwich over involutions", run)


def check_cut_near(seed: int = 0, samples: int = 1000, max_n: int = 40) -> CheckResult:
    def run():
        rng = random.Random(seed)
        failures = []
        for _ in range(samples):
            n = 2 * rng.randint(1, max_n // 2)
            inv = random_involution(n, rng)
            c = cut(inv)
            nr = near(LabeledDigraph.from_involution(inv))
            e = interval_edges(inv)
            if not (c <= nr and c * n >= e):
                failures.append({"involution": str(inv), "cut": c, "near": nr, "edges": e})
        return {"samples": samples, "failures": failures}
    return _timed("cut <= near and cut >= edges/n", run)


def check_random_involutions(seed: int = 0, samples: int = 200, n: int = 400,
                             min_fraction: float = 0.9) -> CheckResult:
    def run():
        rng = random.Random(seed)
        threshold = n / 3 - n ** 0.75
        hits = sum(cut(random_involution(n, rng)) >= threshold for _ in range(samples))
        frac = hits / samples
        return {"n": n, "samples": samples, "threshold": threshold, "fraction": frac,
                "failures": [] if frac >= min_fraction else [{"fraction": frac}]}
    return _timed("random involutions have large cut", run)


# GENTRY
# ------

def small_cnf_corpus(max_vars: int = 3, max_clauses: int = 3) -> List[Cnf]:
    """All CNFs of distinct width-1 or width-2 clauses on distinct variables."""
    out = []
    for m in range(1, max_vars + 1):
        lits = [s * v for v in range(1, m + 1) for s in (1, -1)]
        clauses = [(l,) for l in lits]
        clauses += [(a, b) for a, b in itertools.combinations(lits, 2) if abs(a) != abs(b)]
        for k in range(max_clauses + 1):
            for cs in itertools.combinations(clauses, k):
                out.append(Cnf(m, cs))
    return out


def random_restricted_cnf(rng: random.Random, max_vars: int = 6, max_clauses: int = 6,
                          max_occ: int = 3) -> Cnf:
    """Random 2-CNF in which each variable occurs in at most ``max_occ`` clauses."""
    m = rng.randint(1, max_vars)
    occ = {v: 0 for v in range(1, m + 1)}
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        free = [v for v in occ if occ[v] < max_occ]
        if not free:
            break
        width = min(len(free), 2 if rng.random() < 0.8 else 1)
        vs = rng.sample(free, width)
        for v in vs:
            occ[v] += 1
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Cnf(m, tuple(clauses))


def check_gentry(seed: int = 0, random_instances: int = 50, max_vars: int = 3,
                 max_clauses: int = 3) -> CheckResult:
    def run():
        rng = random.Random(seed)
        failures = []
        corpus = small_cnf_corpus(max_vars, max_clauses)
        for cnf in corpus:
            if count_sat(cnf) != naive_count(cnf):
                failures.append({"cnf": cnf.clauses, "m": cnf.m})
        longest = 0
        for _ in range(random_instances):
            cnf = random_restricted_cnf(rng)
            rep = count_sat(cnf, report=True)
            longest = max(longest, rep["max_cycle_len"])
            if rep["count"] != naive_count(cnf) or rep["max_cycle_len"] > 6:
                failures.append({"cnf": cnf.clauses, "m": cnf.m, "report": rep})
        return {"exhaustive": len(corpus), "random": random_instances,
                "max_cycle_len": longest, "failures": failures}
    return _timed("#SAT through the block barber permanent", run)


def check_s3() -> CheckResult:
    def run():
        failures = []
        relations = {
            "r^3 = I": R * R * R == I2,
            "s^2 = I": S * S == I2,
            "rs = sr^2": R * S == S * R * R,
            "t^2 = t": T * T == T,
            "trt = 0": (T * R * T).is_zero(),
            "r^-1 = r^2": R * R_INV == I2,
        }
        failures += [k for k, ok in relations.items() if not ok]
        chain = [S * (R * S) * R_INV, S * (S * R * R) * R_INV, S * S * R, R]
        if any(a != chain[0] for a in chain):
            failures.append("chain")
        if eval_program(clause_program([1, 2]), [0, 0]) != R:
            failures.append("recursive clause at (0,0)")
        interleaved = ProductProgram(I2, (Instruction(1, S, I2), Instruction(2, R, I2),
                                        Instruction(1, S, I2), Instruction(2, R_INV, I2)), 2)
        for bits in itertools.product((0, 1), repeat=2):
            want = I2 if any(bits) else R
            if eval_program(interleaved, bits) != want:
                failures.append(f"interleaved program at {bits}")
        return {"relations": sorted(relations), "failures": failures}
    return _timed("S3 relations and the falsified 2-clause", run)


# CIRCUITS
# --------

def check_circuits(seed: int = 0, instances: int = 100, max_size: int = 30,
                   max_degree: int = 5, max_len: int = 5, n_vars: int = 2) -> CheckResult:
    """mcoeff, pcoeff and the coefficient circuit against full expansion."""
    def run():
        rng = random.Random(seed)
        xs = [var(f"x_{i}") for i in range(1, n_vars + 1)]
        words = [()] + list(all_words(xs, max_len))
        failures = []
        worst = 0.0
        for t in range(instances):
            c = random_circuit(rng, rng.randint(1, max_size), max_degree, xs)
            f = expand_circuit(c)
            pc = pc_circuit(c, max_len, xs)
            for w in words:
                counter = {"ops": 0}
                got = mcoeff(c, w, counter)
                bound = op_bound(c, max(len(w), 1))
                worst = max(worst, counter["ops"] / bound)
                if got != f[w] or counter["ops"] > bound:
                    failures.append({"instance": t, "word": len(w), "route": "mcoeff"})
                if w and pc(w) != f[w]:
                    failures.append({"instance": t, "word": len(w), "route": "pc"})
                if expand_circuit(pcoeff_circuit(c, w)) != prefix_quotient(f, w):
                    failures.append({"instance": t, "word": len(w), "route": "pcoeff"})
        return {"instances": instances, "words": len(words), "max_ops_ratio": worst,
                "failures": failures[:20]}
    return _timed("circuit coefficient algorithms", run)


# SYMMETRIC FAMILY
# ----------------

def check_sym(sizes: Sequence[int] = (2, 3), rank_one_max: int = 4) -> CheckResult:
    def run():
        failures = []
        for n in sizes:
            for signed in (False, True):
                got = perm_via_hadamard(n, signed)
                want = cperm_brute(LabeledDigraph.complete(n), signed=signed)
                if got != want:
                    failures.append({"n": n, "signed": signed})
        for n in range(1, rank_one_max + 1):
            lhs, rhs = rank_one_cperm(n)
            if lhs != rhs:
                failures.append({"rank_one": n})
        return {"sizes": list(sizes), "failures": failures}
    return _timed("Hadamard route and rank-one identity", run)


CHECKS: Dict[str, Callable[..., CheckResult]] = {
    "product-form": check_product_form,
    "cperm-abp": check_cperm_abp,
    "expsum": check_expsum,
    "hadamard": check_hadamard,
    "sandwich": check_sandwich,
    "cut-near": check_cut_near,
    "random-involutions": check_random_involutions,
    "gentry": check_gentry,
    "s3": check_s3,
    "circuits": check_circuits,
    "sym": check_sym,
}


def run_check(name: str, **kwargs) -> CheckResult:
    return CHECKS[name](**kwargs)
