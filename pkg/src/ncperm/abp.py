"""Layered algebraic branching programs over non-commuting variables.

An edge carries a rational coefficient and either a variable or the constant
1 (``var is None``).  Edges always go from layer ``i`` to layer ``i + 1``;
the value of a path is the ordered product of its edge values.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .core import (NcPoly, RatMatrix, Word, format_fraction, parse_fraction, ring_one,
                   to_fraction, var_name, VARS)

__all__ = [
    "Label", "Edge", "Abp", "ReadOnceCertificate", "AbpError",
    "eval_abp", "expand_abp", "exp_sum_readonce", "hadamard_abp",
    "substitute_abp", "layerize", "infer_certificate",
    "abp_to_json", "abp_from_json", "random_abp", "random_certified_abp",
]

SUPPORT_GUARD = 1 << 20


class AbpError(ValueError):
    pass


class Label(NamedTuple):
    """Coefficient times a variable, or times 1 when ``var`` is None."""
    coeff: Fraction
    var: Optional[int] = None

    def __str__(self) -> str:
        if self.var is None:
            return str(self.coeff)
        name = var_name(self.var)
        return name if self.coeff == 1 else f"{self.coeff}*{name}"


class Edge(NamedTuple):
    src: int
    dst: int
    coeff: Fraction
    var: Optional[int] = None

    @property
    def label(self) -> Label:
        return Label(self.coeff, self.var)


@dataclass(frozen=True)
class Abp:
    layers: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Edge, ...]
    source: int
    sink: int
    _layer_of: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        edges = tuple(Edge(e[0], e[1], to_fraction(e[2]), e[3] if len(e) > 3 else None)
                      for e in self.edges)
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "edges", edges)
        layer_of: Dict[int, int] = {}
        for i, layer in enumerate(layers):
            for v in layer:
                if v in layer_of:
                    raise AbpError(f"node {v} appears in layers {layer_of[v]} and {i}")
                layer_of[v] = i
        if not layers:
            raise AbpError("an ABP needs at least one layer")
        if layer_of.get(self.source) != 0:
            raise AbpError(f"source {self.source} must be in layer 0")
        if layer_of.get(self.sink) != len(layers) - 1:
            raise AbpError(f"sink {self.sink} must be in the last layer")
        for e in edges:
            if e.src not in layer_of or e.dst not in layer_of:
                raise AbpError(f"edge {e} references an unknown node")
            if layer_of[e.dst] != layer_of[e.src] + 1:
                raise AbpError(f"edge {e.src}->{e.dst} does not cross exactly one layer "
                               f"({layer_of[e.src]} -> {layer_of[e.dst]})")
        object.__setattr__(self, "_layer_of", layer_of)

    @property
    def size(self) -> int:
        return len(self._layer_of)

    @property
    def length(self) -> int:
        """Number of edge layers (L)."""
        return len(self.layers) - 1

    def layer_of(self, node: int) -> int:
        return self._layer_of[node]

    def edges_by_layer(self) -> List[List[Edge]]:
        """``out[i]`` holds the edges entering layer ``i + 1``."""
        out: List[List[Edge]] = [[] for _ in range(self.length)]
        for e in self.edges:
            out[self._layer_of[e.src]].append(e)
        return out

    def variables(self) -> frozenset:
        return frozenset(e.var for e in self.edges if e.var is not None)

    def __str__(self) -> str:
        return f"Abp(layers={self.length + 1}, nodes={self.size}, edges={len(self.edges)})"


class _AbpBuilder:
    """Accumulates nodes keyed by arbitrary hashables, then emits an Abp."""

    def __init__(self, n_layers: int):
        self.layers: List[Dict[Hashable, int]] = [dict() for _ in range(n_layers)]
        self.edges: Dict[Tuple[int, int, Optional[int]], Fraction] = {}
        self._next = 0

    def node(self, layer: int, key: Hashable) -> int:
        ids = self.layers[layer]
        nid = ids.get(key)
        if nid is None:
            nid = ids[key] = self._next
            self._next += 1
        return nid

    def edge(self, src: int, dst: int, coeff, var: Optional[int]) -> None:
        if not coeff:
            return
        k = (src, dst, var)
        self.edges[k] = self.edges.get(k, 0) + coeff

    def build(self, source: int, sink: int, prune: bool = True) -> Abp:
        edges = [Edge(s, d, c, v) for (s, d, v), c in self.edges.items() if c]
        layers = [list(ids.values()) for ids in self.layers]
        if prune:
            layers, edges = _prune(layers, edges, source, sink)
        return Abp(tuple(tuple(l) for l in layers), tuple(edges), source, sink)


def _prune(layers, edges, source, sink):
    """Drop nodes not on any source-sink path (source and sink are kept)."""
    fwd = defaultdict(list)
    bwd = defaultdict(list)
    for e in edges:
        fwd[e.src].append(e.dst)
        bwd[e.dst].append(e.src)

    def reach(start, adj):
        seen, stack = {start}, [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    keep = reach(source, fwd) & reach(sink, bwd)
    keep |= {source, sink}
    layers = [[v for v in layer if v in keep] for layer in layers]
    edges = [e for e in edges if e.src in keep and e.dst in keep]
    return layers, edges


# EVALUATION
# ----------

def eval_abp(abp: Abp, assignment: Mapping[int, object], one=None):
    """Sum over source-sink paths of ordered edge-value products.

    ``assignment`` maps variable ids to ring elements (Fraction, square
    RatMatrix of one fixed dimension, NcPoly).  Computed layer by layer.
    """
    needed = abp.variables()
    missing = [v for v in needed if v not in assignment]
    if missing:
        raise AbpError(f"unassigned variable {var_name(min(missing))}")
    if one is None:
        one = ring_one(assignment.values())
    values = {v: assignment[v] for v in needed}
    acc = {abp.source: one}
    for layer_edges in abp.edges_by_layer():
        nxt = {}
        for e in layer_edges:
            a = acc.get(e.src)
            if a is None:
                continue
            w = e.coeff * one if e.var is None else e.coeff * values[e.var]
            term = a * w
            prev = nxt.get(e.dst)
            nxt[e.dst] = term if prev is None else prev + term
        acc = nxt
    result = acc.get(abp.sink)
    return 0 * one if result is None else result


def expand_abp(abp: Abp, guard: int = SUPPORT_GUARD) -> NcPoly:
    """The polynomial computed by the ABP, by sparse layer-wise accumulation."""
    acc: Dict[int, Dict[Word, Fraction]] = {abp.source: {(): Fraction(1)}}
    for layer_edges in abp.edges_by_layer():
        nxt: Dict[int, Dict[Word, Fraction]] = {}
        for e in layer_edges:
            src = acc.get(e.src)
            if not src:
                continue
            dst = nxt.setdefault(e.dst, {})
            for w, c in src.items():
                w2 = w if e.var is None else w + (e.var,)
                dst[w2] = dst.get(w2, 0) + c * e.coeff
            if len(dst) > guard:
                raise AbpError(f"support exceeds guard of {guard} words")
        acc = {v: {w: c for w, c in d.items() if c} for v, d in nxt.items()}
    return NcPoly(acc.get(abp.sink, {}))


def substitute_abp(abp: Abp, values: Mapping[int, object]) -> Abp:
    """Substitute scalars for variables: 0 deletes the edge, c rescales it."""
    edges = []
    for e in abp.edges:
        if e.var is not None and e.var in values:
            c = to_fraction(values[e.var])
            if c:
                edges.append(Edge(e.src, e.dst, e.coeff * c, None))
        else:
            edges.append(e)
    return Abp(abp.layers, tuple(edges), abp.source, abp.sink)


# READ-ONCE EXPONENTIAL SUMS
# --------------------------

@dataclass(frozen=True)
class ReadOnceCertificate:
    """Cut layers ``0 = i_0 < i_1 < ... < i_m`` and the Y-variable of each block.

    Block ``j`` (1-based) consists of the edges entering layers
    ``i_{j-1}+1 .. i_j``; among Y only ``assignment[j-1]`` may label them.
    Edges after ``i_m`` must be Y-free.
    """
    cuts: Tuple[int, ...]
    assignment: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(self.cuts))
        object.__setattr__(self, "assignment", tuple(self.assignment))
        if not self.cuts or self.cuts[0] != 0:
            raise AbpError("certificate cuts must start at 0")
        if any(a >= b for a, b in zip(self.cuts, self.cuts[1:])):
            raise AbpError("certificate cuts must be strictly increasing")
        if len(self.assignment) != len(self.cuts) - 1:
            raise AbpError("need exactly one Y-variable per block")
        if len(set(self.assignment)) != len(self.assignment):
            raise AbpError("Y-variables must be distinct across blocks")

    @property
    def m(self) -> int:
        return len(self.assignment)

    def block_of_layer(self, layer: int) -> Optional[int]:
        """Block index (0-based) for edges entering ``layer``; None past the last cut."""
        for j in range(self.m):
            if self.cuts[j] < layer <= self.cuts[j + 1]:
                return j
        return None

    def validate(self, abp: Abp) -> None:
        if self.cuts[-1] > abp.length:
            raise AbpError(f"last cut {self.cuts[-1]} exceeds ABP length {abp.length}")
        ys = set(self.assignment)
        for e in abp.edges:
            if e.var not in ys:
                continue
            layer = abp.layer_of(e.dst)
            j = self.block_of_layer(layer)
            if j is None:
                raise AbpError(f"Y-variable {var_name(e.var)} at layer {layer} "
                               f"lies after the last cut")
            if self.assignment[j] != e.var:
                raise AbpError(f"block {j + 1} (layers {self.cuts[j]}..{self.cuts[j + 1]}) "
                               f"is assigned {var_name(self.assignment[j])} but "
                               f"{var_name(e.var)} appears at layer {layer}")


def exp_sum_readonce(abp: Abp, cert: ReadOnceCertificate) -> Abp:
    """ABP for the sum over all 0/1 values of the certified Y-variables.

    Each block is copied twice (Y set to 0 and to 1) with the copies sharing
    the nodes on the two cut layers that bound the block, so the result has
    at most twice as many nodes as the input and no Y-variables.
    """
    cert.validate(abp)
    L = abp.length
    b = _AbpBuilder(L + 1)
    cut_set = set(cert.cuts)

    def node_key(v: int, copy: int):
        layer = abp.layer_of(v)
        if layer in cut_set or cert.block_of_layer(layer) is None:
            return (v, -1)
        return (v, copy)

    for e in abp.edges:
        layer = abp.layer_of(e.dst)
        j = cert.block_of_layer(layer)
        copies = (None,) if j is None else (0, 1)
        for bit in copies:
            coeff, var = e.coeff, e.var
            if j is not None and var == cert.assignment[j]:
                if bit == 0:
                    continue
                var = None
            s = b.node(abp.layer_of(e.src), node_key(e.src, bit))
            d = b.node(layer, node_key(e.dst, bit))
            b.edge(s, d, coeff, var)
    src = b.node(0, (abp.source, -1))
    snk = b.node(L, node_key(abp.sink, 0))
    return b.build(src, snk)


def infer_certificate(abp: Abp, ys: Iterable[int]) -> ReadOnceCertificate:
    """Greedy block scan: close a block just before a new Y-variable first appears.

    Fails when a Y-variable is read again after another one, when two
    Y-variables share an edge layer, or when some Y-variable never occurs.
    """
    ys = set(ys)
    per_layer: List[set] = [set() for _ in range(abp.length + 1)]
    for e in abp.edges:
        if e.var in ys:
            per_layer[abp.layer_of(e.dst)].add(e.var)
    order: List[int] = []
    cuts = [0]
    for layer, found in enumerate(per_layer):
        if len(found) > 1:
            raise AbpError(f"layer {layer} mixes Y-variables "
                           f"{sorted(var_name(v) for v in found)}")
        for v in found:
            if order and order[-1] == v:
                continue
            if v in order:
                raise AbpError(f"{var_name(v)} is read again at layer {layer}")
            if order:
                cuts.append(layer - 1)
            order.append(v)
    unused = ys - set(order)
    if unused:
        raise AbpError(f"Y-variables never read: {sorted(var_name(v) for v in unused)}; "
                       f"supply an explicit certificate")
    if order:
        cuts.append(abp.length)
    return ReadOnceCertificate(tuple(cuts), tuple(order))


# HADAMARD PRODUCT
# ----------------

def _constant_closure(abp: Abp) -> Dict[int, Dict[int, Fraction]]:
    """E[q][q'] = total weight of constant-only paths q -> q' (E[q][q] = 1)."""
    out_const = defaultdict(list)
    for e in abp.edges:
        if e.var is None:
            out_const[e.src].append(e)
    closure: Dict[int, Dict[int, Fraction]] = {}
    for layer in reversed(abp.layers):
        for q in layer:
            row = {q: Fraction(1)}
            for e in out_const[q]:
                for q2, w in closure[e.dst].items():
                    row[q2] = row.get(q2, 0) + e.coeff * w
            closure[q] = {k: v for k, v in row.items() if v}
    return closure


def hadamard_abp(a: Abp, b: Abp) -> Abp:
    """ABP computing the coefficient-wise product of the two polynomials.

    B is simulated inside A: a node of the result is a pair (node of A,
    node of B).  Every variable edge of A with letter x advances B by
    ``E * T_x`` where ``T_x`` holds B's x-labelled edges and ``E`` is the
    closure of B's constant edges; constant edges of A leave B's state
    unchanged.  The trailing ``E`` is folded into the edges entering A's sink.
    """
    closure = _constant_closure(b)
    letter_out: Dict[Tuple[int, int], Dict[int, Fraction]] = defaultdict(dict)
    for e in b.edges:
        if e.var is not None:
            row = letter_out[(e.src, e.var)]
            row[e.dst] = row.get(e.dst, 0) + e.coeff

    def step(q: int, x: int) -> Dict[int, Fraction]:
        """Row q of E * T_x."""
        out: Dict[int, Fraction] = {}
        for q1, w1 in closure[q].items():
            for q2, w2 in letter_out.get((q1, x), {}).items():
                out[q2] = out.get(q2, 0) + w1 * w2
        return {k: v for k, v in out.items() if v}

    L = a.length
    if L == 0:
        # A computes the constant 1, so the product is B's constant term
        c = closure[b.source].get(b.sink, Fraction(0))
        if c == 1:
            return Abp(((0,),), (), 0, 0)
        if c == 0:
            return Abp(((0, 1),), (), 0, 1)
        raise AbpError("cannot represent a non-unit constant with a length-0 ABP")
    bld = _AbpBuilder(L + 1)
    src = bld.node(0, (a.source, b.source))
    snk = bld.node(L, (a.sink, b.sink))
    tail = {q: closure[q].get(b.sink, Fraction(0)) for q in b._layer_of}
    frontier = {(a.source, b.source): src}
    for layer_edges in a.edges_by_layer():
        by_src = defaultdict(list)
        for e in layer_edges:
            by_src[e.src].append(e)
        nxt: Dict[Tuple[int, int], int] = {}
        for (p, q), nid in frontier.items():
            for e in by_src.get(p, ()):
                if e.var is None:
                    targets = {q: Fraction(1)}
                else:
                    targets = step(q, e.var)
                for q2, w in targets.items():
                    if e.dst == a.sink:
                        w = w * tail[q2]
                        if w:
                            bld.edge(nid, snk, e.coeff * w, e.var)
                        continue
                    key = (e.dst, q2)
                    if key not in nxt:
                        nxt[key] = bld.node(a.layer_of(e.dst), key)
                    bld.edge(nid, nxt[key], e.coeff * w, e.var)
        frontier = nxt
    return bld.build(src, snk)


# RANDOM CORPUS
# -------------

def random_abp(rng, length: int, width: int, variables: Sequence[int],
               const_prob: float = 0.2, extra_edges: float = 0.5, coeff_range: int = 3,
               layer_vars: Optional[Callable[[int], Sequence[int]]] = None) -> Abp:
    """Random layered ABP; every node gets at least one incoming edge.

    ``layer_vars(i)``, if given, supplies extra variables allowed on edges
    entering layer ``i`` (used to place Y-variables inside their blocks).
    """
    b = _AbpBuilder(length + 1)
    prev = [b.node(0, 0)]
    for i in range(1, length + 1):
        count = 1 if i == length else rng.randint(1, width)
        cur = [b.node(i, k) for k in range(count)]
        allowed = list(variables) + list(layer_vars(i) if layer_vars else ())
        for v in cur:
            sources = [rng.choice(prev)]
            sources += [u for u in prev if rng.random() < extra_edges]
            for u in sources:
                coeff = 0
                while coeff == 0:
                    coeff = rng.randint(-coeff_range, coeff_range)
                x = None if rng.random() < const_prob or not allowed else rng.choice(allowed)
                b.edge(u, v, Fraction(coeff), x)
        prev = cur
    return b.build(b.node(0, 0), prev[0])


def random_certified_abp(rng, ys: Sequence[int], variables: Sequence[int],
                         max_block: int = 2, width: int = 3, tail: int = 1):
    """Random ABP with a read-once certificate for ``ys`` (one block per Y)."""
    cuts = [0]
    for _ in ys:
        cuts.append(cuts[-1] + rng.randint(1, max_block))
    length = cuts[-1] + rng.randint(0, tail)
    cert = ReadOnceCertificate(tuple(cuts), tuple(ys))

    def block_y(i):
        j = cert.block_of_layer(i)
        return () if j is None else (ys[j], ys[j])

    return random_abp(rng, length, width, variables, layer_vars=block_y), cert


# LAYERING AND JSON
# -----------------

def layerize(nodes: Iterable[int], edges: Iterable[Sequence], source: int, sink: int) -> Abp:
    """Normalize an s-t DAG into a layered ABP.

    Nodes are placed at their longest distance from the source and long
    edges are split with 1-labelled pass-through nodes; the sink is padded
    down to the deepest layer.  Nodes not on an s-t path are dropped.
    """
    edges = [Edge(e[0], e[1], to_fraction(e[2]), e[3] if len(e) > 3 else None) for e in edges]
    nodes = set(nodes) | {source, sink}
    fwd = defaultdict(list)
    indeg = {v: 0 for v in nodes}
    for e in edges:
        fwd[e.src].append(e)
        indeg[e.dst] = indeg.get(e.dst, 0) + 1
    order, stack = [], [v for v, d in indeg.items() if d == 0]
    while stack:
        v = stack.pop()
        order.append(v)
        for e in fwd[v]:
            indeg[e.dst] -= 1
            if indeg[e.dst] == 0:
                stack.append(e.dst)
    if len(order) != len(indeg):
        raise AbpError("graph has a cycle")
    depth = {source: 0}
    for v in order:
        if v not in depth:
            continue
        for e in fwd[v]:
            depth[e.dst] = max(depth.get(e.dst, 0), depth[v] + 1)
    if sink not in depth:
        depth[sink] = 0
    L = max(depth.values())
    depth[sink] = L
    b = _AbpBuilder(L + 1)
    for e in edges:
        if e.src not in depth or e.dst not in depth:
            continue
        d0, d1 = depth[e.src], depth[e.dst]
        if d1 <= d0:
            raise AbpError(f"edge {e.src}->{e.dst} points against the layering")
        prev = b.node(d0, ("v", e.src))
        for k in range(d0 + 1, d1):
            mid = b.node(k, ("pass", e, k))
            b.edge(prev, mid, Fraction(1), None)
            prev = mid
        b.edge(prev, b.node(d1, ("v", e.dst)), e.coeff, e.var)
    return b.build(b.node(0, ("v", source)), b.node(L, ("v", sink)))


def abp_to_json(abp: Abp) -> dict:
    return {
        "layers": [list(layer) for layer in abp.layers],
        "edges": [{"from": e.src, "to": e.dst, "coeff": format_fraction(e.coeff),
                   "var": None if e.var is None else var_name(e.var)}
                  for e in abp.edges],
        "source": abp.source,
        "sink": abp.sink,
    }


def abp_from_json(data: Mapping) -> Abp:
    try:
        edges = tuple(
            Edge(int(e["from"]), int(e["to"]), parse_fraction(str(e.get("coeff", "1"))),
                 None if e.get("var") is None else VARS.intern(e["var"]))
            for e in data["edges"])
        return Abp(tuple(tuple(int(v) for v in layer) for layer in data["layers"]),
                   edges, int(data["source"]), int(data["sink"]))
    except KeyError as exc:
        raise AbpError(f"ABP JSON is missing field {exc}") from exc
