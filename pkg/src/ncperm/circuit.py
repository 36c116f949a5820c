"""Non-commutative arithmetic circuits and coefficient extraction.

Gates are stored in topological order (children precede parents).  Input
gates are a variable or a rational constant; internal gates are ``add`` or
``mul`` with an ordered (left, right) pair, and for ``mul`` the order is the
order of multiplication.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .core import NcPoly, Word, format_fraction, parse_fraction, ring_one, to_fraction, var, var_name

__all__ = [
    "Gate", "Circuit", "CircuitBuilder", "CircuitError",
    "eval_circuit", "expand_circuit", "coeff_tables", "mcoeff",
    "pcoeff_circuit", "prefix_quotient", "pc_circuit", "CoefficientCircuit",
    "indicator_encoding", "random_circuit", "circuit_to_json", "circuit_from_json",
    "all_words", "op_bound",
]

OP_BOUND_FACTOR = 64


class CircuitError(ValueError):
    pass


class Gate(NamedTuple):
    kind: str                      # "var" | "const" | "add" | "mul"
    var: Optional[int] = None
    value: Optional[Fraction] = None
    left: Optional[int] = None
    right: Optional[int] = None


@dataclass(frozen=True)
class Circuit:
    gates: Tuple[Gate, ...]
    output: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, g in enumerate(self.gates):
            if g.kind in ("add", "mul"):
                if g.left is None or g.right is None or not (0 <= g.left < i and 0 <= g.right < i):
                    raise CircuitError(f"gate {i}: children must be earlier gates")
            elif g.kind == "var":
                if g.var is None:
                    raise CircuitError(f"gate {i}: variable gate without a variable")
            elif g.kind == "const":
                if g.value is None:
                    raise CircuitError(f"gate {i}: constant gate without a value")
            else:
                raise CircuitError(f"gate {i}: unknown kind {g.kind!r}")
        if not 0 <= self.output < len(self.gates):
            raise CircuitError("output gate out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    def degrees(self) -> List[int]:
        """Formal degree of every gate."""
        deg: List[int] = []
        for g in self.gates:
            if g.kind == "var":
                deg.append(1)
            elif g.kind == "const":
                deg.append(0)
            elif g.kind == "add":
                deg.append(max(deg[g.left], deg[g.right]))
            else:
                deg.append(deg[g.left] + deg[g.right])
        return deg

    @property
    def degree(self) -> int:
        return self.degrees()[self.output]

    def variables(self) -> List[int]:
        return sorted({g.var for g in self.gates if g.kind == "var"})

    def reachable(self) -> List[bool]:
        live = [False] * len(self.gates)
        live[self.output] = True
        for i in range(len(self.gates) - 1, -1, -1):
            g = self.gates[i]
            if live[i] and g.kind in ("add", "mul"):
                live[g.left] = live[g.right] = True
        return live


class CircuitBuilder:
    """Hash-consing circuit builder with light constant folding.

    Gate handles are ints; ``None`` stands for the zero polynomial and is
    absorbed by ``add``/``mul``.
    """

    def __init__(self):
        self.gates: List[Gate] = []
        self._index: Dict[Gate, int] = {}

    def _make(self, g: Gate) -> int:
        i = self._index.get(g)
        if i is None:
            i = len(self.gates)
            self.gates.append(g)
            self._index[g] = i
        return i

    def var(self, v: int) -> int:
        return self._make(Gate("var", var=v))

    def const(self, c) -> Optional[int]:
        c = to_fraction(c)
        if not c:
            return None
        return self._make(Gate("const", value=c))

    def const_value(self, h: Optional[int]) -> Optional[Fraction]:
        if h is None:
            return Fraction(0)
        g = self.gates[h]
        return g.value if g.kind == "const" else None

    def add(self, a: Optional[int], b: Optional[int]) -> Optional[int]:
        if a is None:
            return b
        if b is None:
            return a
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            return self.const(ca + cb)
        return self._make(Gate("add", left=a, right=b))

    def mul(self, a: Optional[int], b: Optional[int]) -> Optional[int]:
        if a is None or b is None:
            return None
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            return self.const(ca * cb)
        if ca == 1:
            return b
        if cb == 1:
            return a
        return self._make(Gate("mul", left=a, right=b))

    def scale(self, c, a: Optional[int]) -> Optional[int]:
        return self.mul(self.const(c), a)

    def sum(self, handles) -> Optional[int]:
        out = None
        for h in handles:
            out = self.add(out, h)
        return out

    def product(self, handles) -> Optional[int]:
        out = self.const(1)
        for h in handles:
            out = self.mul(out, h)
        return out

    def build(self, output: Optional[int]) -> Circuit:
        """Circuit with the given output; unreachable gates are dropped."""
        if output is None:
            output = self._make(Gate("const", value=Fraction(0)))
        live = [False] * len(self.gates)
        live[output] = True
        for i in range(output, -1, -1):
            g = self.gates[i]
            if live[i] and g.kind in ("add", "mul"):
                live[g.left] = live[g.right] = True
        remap: Dict[int, int] = {}
        gates: List[Gate] = []
        for i, g in enumerate(self.gates[: output + 1]):
            if not live[i]:
                continue
            if g.kind in ("add", "mul"):
                g = g._replace(left=remap[g.left], right=remap[g.right])
            remap[i] = len(gates)
            gates.append(g)
        return Circuit(tuple(gates), remap[output])


# EVALUATION AND EXPANSION
# ------------------------

def eval_circuit(c: Circuit, assignment: Mapping[int, object], one=None):
    """Evaluate over any ring (Fraction, square RatMatrix, NcPoly, numpy arrays).

    Integral constants are passed as Python ints so that integer-valued
    evaluations (including vectorised numpy ones) stay on the fast path.
    """
    if one is None:
        one = ring_one(v for v in assignment.values() if not _is_array(v))
    live = c.reachable()
    vals: List[object] = [None] * c.size
    for i, g in enumerate(c.gates):
        if not live[i]:
            continue
        if g.kind == "var":
            if g.var not in assignment:
                raise CircuitError(f"variable {var_name(g.var)} is not assigned")
            vals[i] = assignment[g.var]
        elif g.kind == "const":
            x = g.value
            x = x.numerator if x.denominator == 1 else x
            vals[i] = x * one if not isinstance(one, Fraction) else x
        elif g.kind == "add":
            vals[i] = vals[g.left] + vals[g.right]
        else:
            vals[i] = vals[g.left] * vals[g.right]
    out = vals[c.output]
    return Fraction(out) if type(out) is int else out


def _is_array(x) -> bool:
    return hasattr(x, "shape") and hasattr(x, "dtype")


def expand_circuit(c: Circuit, cap: Optional[int] = None) -> NcPoly:
    """The polynomial computed at the output gate (brute-force oracle)."""
    deg = c.degrees()
    if cap is not None and deg[c.output] > cap:
        raise CircuitError(f"formal degree {deg[c.output]} exceeds cap {cap}")
    live = c.reachable()
    polys: List[Optional[NcPoly]] = [None] * c.size
    for i, g in enumerate(c.gates):
        if not live[i]:
            continue
        if g.kind == "var":
            polys[i] = NcPoly.var(g.var)
        elif g.kind == "const":
            polys[i] = NcPoly.const(g.value)
        elif g.kind == "add":
            polys[i] = polys[g.left] + polys[g.right]
        else:
            polys[i] = polys[g.left] * polys[g.right]
    return polys[c.output]


# MONOMIAL COEFFICIENTS
# ---------------------

def _subword_keys(d: int) -> List[Tuple[int, int]]:
    # all (l, k) with l < k, plus a single key (0, 0) for the empty word
    return [(0, 0)] + [(l, k) for l in range(d) for k in range(l + 1, d + 1)]


def _key(l: int, k: int) -> Tuple[int, int]:
    return (0, 0) if l == k else (l, k)


def coeff_tables(c: Circuit, m: Sequence[int], counter: Optional[Counter] = None
                 ) -> List[Optional[Dict[Tuple[int, int], Fraction]]]:
    """Per-gate tables ``T[v][(l, k)] = coefficient of m[l:k] in p_v``.

    Only keys with a nonzero value are stored; the empty subword has key
    (0, 0).  Gates that do not feed the output get ``None``.
    """
    m = tuple(m)
    d = len(m)
    deg = c.degrees()
    live = c.reachable()
    tables: List[Optional[Dict[Tuple[int, int], Fraction]]] = [None] * c.size
    ops = 0
    for i, g in enumerate(c.gates):
        if not live[i]:
            continue
        t: Dict[Tuple[int, int], Fraction] = {}
        if g.kind == "const":
            if g.value:
                t[(0, 0)] = g.value
        elif g.kind == "var":
            for l in range(d):
                if m[l] == g.var:
                    t[(l, l + 1)] = Fraction(1)
        elif g.kind == "add":
            a, b = tables[g.left], tables[g.right]
            t = dict(a)
            for k, x in b.items():
                s = t.get(k, 0) + x
                ops += 1
                if s:
                    t[k] = s
                else:
                    t.pop(k, None)
        else:
            a, b = tables[g.left], tables[g.right]
            dl, dr = deg[g.left], deg[g.right]
            if a and b:
                for (l, k) in _subword_keys(d):
                    if k - l > dl + dr:
                        continue
                    s = Fraction(0)
                    for p in range(l, k + 1):
                        if p - l > dl or k - p > dr:
                            continue
                        x = a.get(_key(l, p))
                        if x is None:
                            continue
                        y = b.get(_key(p, k))
                        if y is None:
                            continue
                        s += x * y
                        ops += 2
                    if s:
                        t[(l, k)] = s
        tables[i] = t
    if counter is not None:
        counter["ops"] += ops
    return tables


def mcoeff(c: Circuit, m: Sequence[int], counter: Optional[Counter] = None) -> Fraction:
    """Coefficient of the word ``m`` in the circuit's polynomial.

    Runs the subword dynamic programme bottom-up: every gate keeps the
    coefficients of all contiguous subwords of ``m``.  The empty word
    returns the constant term.  If ``counter`` is given, ``counter["ops"]``
    is increased by the number of rational additions and multiplications.
    """
    tables = coeff_tables(c, m, counter)
    d = len(m)
    return tables[c.output].get(_key(0, d), Fraction(0))


def op_bound(c: Circuit, d: int) -> int:
    return OP_BOUND_FACTOR * d ** 3 * c.size


# PARTIAL COEFFICIENTS
# --------------------

def prefix_quotient(f: NcPoly, m: Sequence[int]) -> NcPoly:
    """Sum of c_w * w'' over words w = m * w'' of f."""
    m = tuple(m)
    d = len(m)
    return NcPoly({w[d:]: c for w, c in f.items() if w[:d] == m})


def pcoeff_circuit(c: Circuit, m: Sequence[int]) -> Circuit:
    """Circuit for the prefix quotient of the circuit's polynomial by ``m``.

    ``P[v][l]`` is a gate for pcoeff(p_v, m[l:]); ``P[v][d]`` is a copy of v.
    For a product g*h:
        P[v][l] = sum_{p=l}^{d-1} mc(g, m[l:p]) * P[h][p]  +  P[g][l] * h
    """
    m = tuple(m)
    d = len(m)
    tables = coeff_tables(c, m)
    live = c.reachable()
    b = CircuitBuilder()
    P: List[Optional[List[Optional[int]]]] = [None] * c.size
    for i, g in enumerate(c.gates):
        if not live[i]:
            continue
        row: List[Optional[int]] = [None] * (d + 1)
        if g.kind == "const":
            row[d] = b.const(g.value)
        elif g.kind == "var":
            row[d] = b.var(g.var)
            if d and m[d - 1] == g.var:
                row[d - 1] = b.const(1)
        elif g.kind == "add":
            row = [b.add(x, y) for x, y in zip(P[g.left], P[g.right])]
        else:
            tg, pg, ph = tables[g.left], P[g.left], P[g.right]
            for l in range(d + 1):
                acc = b.mul(pg[l], ph[d])
                for p in range(l, d):
                    x = tg.get(_key(l, p))
                    if x is not None and ph[p] is not None:
                        acc = b.add(acc, b.scale(x, ph[p]))
                row[l] = acc
        P[i] = row
    return b.build(P[c.output][0])


# COEFFICIENT POLYNOMIAL
# ----------------------

@dataclass(frozen=True)
class CoefficientCircuit:
    """Circuit in the indicator variables y[(row, x)] plus its encoding helper."""
    circuit: Circuit
    d: int
    variables: Tuple[int, ...]
    y: Mapping[Tuple[int, int], int]

    def encode(self, w: Sequence[int]) -> Dict[int, int]:
        return indicator_encoding(w, self.d, self.variables, self.y)

    def __call__(self, w: Sequence[int]):
        return eval_circuit(self.circuit, self.encode(w))


def indicator_var(row: int, x: int) -> int:
    return var(f"y_{row}_{var_name(x)}")


def indicator_encoding(w: Sequence[int], d: int, variables: Sequence[int],
                       y: Optional[Mapping[Tuple[int, int], int]] = None) -> Dict[int, int]:
    """0/1 grid: row l (1-based) is one-hot at w[l-1] for l <= |w|, zero after."""
    if len(w) > d:
        raise CircuitError(f"word of length {len(w)} does not fit {d} rows")
    varset = set(variables)
    for x in w:
        if x not in varset:
            raise CircuitError(f"variable {var_name(x)} is not in the encoding alphabet")
    out = {}
    for row in range(1, d + 1):
        for x in variables:
            key = indicator_var(row, x) if y is None else y[(row, x)]
            out[key] = 1 if row <= len(w) and w[row - 1] == x else 0
    return out


def pc_circuit(c: Circuit, d: int, variables: Optional[Sequence[int]] = None) -> CoefficientCircuit:
    """Circuit over the n*d indicator variables computing the coefficient function.

    ``Q[v][(a, b)]`` is the multilinear polynomial sum_u mc(p_v, u) *
    prod_l y[a + l, u_l] over words u of length b - a placed in rows
    a+1..b.  The result is

        G * sum_{D=1}^{d} Q[out][(0, D)] * Z_D

    where Z_D = prod_{l > D} prod_x (1 - y[l, x]) forces the rows after D to
    be empty and G = prod_l prod_{x < x'} (1 - y[l, x] y[l, x']) vanishes
    when a row holds two ones.
    """
    deg = c.degrees()
    if deg[c.output] > d:
        raise CircuitError(f"formal degree {deg[c.output]} exceeds d = {d}")
    variables = tuple(sorted(set(c.variables() if variables is None else variables)))
    y = {(row, x): indicator_var(row, x) for row in range(1, d + 1) for x in variables}
    live = c.reachable()
    b = CircuitBuilder()
    Q: List[Optional[Dict[Tuple[int, int], int]]] = [None] * c.size
    for i, g in enumerate(c.gates):
        if not live[i]:
            continue
        t: Dict[Tuple[int, int], int] = {}
        if g.kind == "const":
            h = b.const(g.value)
            if h is not None:
                for a in range(d + 1):
                    t[(a, a)] = h
        elif g.kind == "var":
            if g.var in variables:
                for a in range(d):
                    t[(a, a + 1)] = b.var(y[(a + 1, g.var)])
        elif g.kind == "add":
            l, r = Q[g.left], Q[g.right]
            for k in set(l) | set(r):
                h = b.add(l.get(k), r.get(k))
                if h is not None:
                    t[k] = h
        else:
            l, r = Q[g.left], Q[g.right]
            span = deg[i]
            for a in range(d + 1):
                for bb in range(a, min(d, a + span) + 1):
                    acc = None
                    for p in range(a, bb + 1):
                        x, z = l.get((a, p)), r.get((p, bb))
                        if x is not None and z is not None:
                            acc = b.add(acc, b.mul(x, z))
                    if acc is not None:
                        t[(a, bb)] = acc
        Q[i] = t

    one = b.const(1)
    minus_one = b.const(-1)
    empty_row = {}
    for row in range(1, d + 1):
        empty_row[row] = b.product(b.add(one, b.mul(minus_one, b.var(y[(row, x)])))
                                   for x in variables)
    guard = one
    for row in range(1, d + 1):
        for j, x in enumerate(variables):
            for x2 in variables[j + 1:]:
                pair = b.mul(b.var(y[(row, x)]), b.var(y[(row, x2)]))
                guard = b.mul(guard, b.add(one, b.mul(minus_one, pair)))
    top = Q[c.output]
    total = None
    tail = one   # Z_D, built from D = d downwards
    for D in range(d, 0, -1):
        if D <= deg[c.output] and (0, D) in top:
            total = b.add(total, b.mul(top[(0, D)], tail))
        tail = b.mul(tail, empty_row[D])
    out = b.mul(guard, total)
    return CoefficientCircuit(b.build(out), d, variables, y)


# RANDOM CORPUS AND JSON
# ----------------------

def random_circuit(rng: random.Random, size: int, max_degree: int,
                   variables: Sequence[int], const_range: int = 3) -> Circuit:
    """Random circuit with exactly ``size`` gates and formal degree <= max_degree.

    The last gate is the output; it is always an internal gate when size >= 3.
    """
    if size < 1:
        raise CircuitError("size must be positive")
    gates: List[Gate] = []
    deg: List[int] = []
    n_leaves = max(1, min(size // 3 + 1, size))
    if size >= 3:
        n_leaves = min(n_leaves, size - 1)
    for k in range(n_leaves):
        if k < len(variables) or rng.random() < 0.7:
            gates.append(Gate("var", var=variables[k % len(variables)] if k < len(variables)
                              else rng.choice(variables)))
            deg.append(1)
        else:
            c = 0
            while c == 0:
                c = rng.randint(-const_range, const_range)
            gates.append(Gate("const", value=Fraction(c)))
            deg.append(0)
    while len(gates) < size:
        n = len(gates)
        for _ in range(50):
            kind = "mul" if rng.random() < 0.5 else "add"
            # favour recent gates so the output depends on most of the circuit
            a = max(0, n - 1 - int(rng.expovariate(0.3))) if rng.random() < 0.6 else rng.randrange(n)
            bb = rng.randrange(n)
            if rng.random() < 0.5:
                a, bb = bb, a
            dg = deg[a] + deg[bb] if kind == "mul" else max(deg[a], deg[bb])
            if dg <= max_degree:
                break
        else:
            kind, a, bb, dg = "add", rng.randrange(n), rng.randrange(n), None
            dg = max(deg[a], deg[bb])
        gates.append(Gate(kind, left=a, right=bb))
        deg.append(dg)
    return Circuit(tuple(gates), len(gates) - 1)


def circuit_to_json(c: Circuit) -> dict:
    gates = []
    for i, g in enumerate(c.gates):
        if g.kind == "var":
            gates.append({"id": i, "kind": "var", "var": var_name(g.var)})
        elif g.kind == "const":
            gates.append({"id": i, "kind": "const", "value": format_fraction(g.value)})
        else:
            gates.append({"id": i, "kind": g.kind, "left": g.left, "right": g.right})
    return {"gates": gates, "output": c.output}


def circuit_from_json(data: Mapping) -> Circuit:
    """Accepts gate ids of any hashable kind, in any order; rejects cycles."""
    try:
        raw = {g["id"]: g for g in data["gates"]}
        out_id = data["output"]
    except (KeyError, TypeError) as exc:
        raise CircuitError(f"circuit JSON is missing field {exc}") from exc
    if out_id not in raw:
        raise CircuitError(f"output {out_id!r} is not a gate id")
    order: List = []
    state: Dict = {}
    for root in raw:
        stack = [(root, False)]
        while stack:
            gid, done = stack.pop()
            if done:
                state[gid] = 2
                order.append(gid)
                continue
            if state.get(gid) == 2:
                continue
            if state.get(gid) == 1:
                raise CircuitError(f"circuit has a cycle through gate {gid!r}")
            if gid not in raw:
                raise CircuitError(f"reference to unknown gate {gid!r}")
            state[gid] = 1
            stack.append((gid, True))
            g = raw[gid]
            if g.get("kind") in ("add", "mul"):
                for ch in (g.get("right"), g.get("left")):
                    if state.get(ch) == 1:
                        raise CircuitError(f"circuit has a cycle through gate {ch!r}")
                    if state.get(ch) != 2:
                        stack.append((ch, False))
    pos = {gid: k for k, gid in enumerate(order)}
    gates = []
    for gid in order:
        g = raw[gid]
        kind = g.get("kind")
        if kind == "var":
            gates.append(Gate("var", var=var(str(g["var"]))))
        elif kind == "const":
            gates.append(Gate("const", value=parse_fraction(str(g["value"]))))
        elif kind in ("add", "mul"):
            gates.append(Gate(kind, left=pos[g["left"]], right=pos[g["right"]]))
        else:
            raise CircuitError(f"gate {gid!r}: unknown kind {kind!r}")
    return Circuit(tuple(gates), pos[out_id])


def all_words(variables: Sequence[int], max_len: int, min_len: int = 1):
    for k in range(min_len, max_len + 1):
        yield from _cartesian(variables, repeat=k)
