"""Edge-labelled digraphs, Cayley permanents and the bounded-component ABP.

Vertices are 1-based.  An edge label is an :class:`~ncperm.abp.Label`: a
rational coefficient times a variable, or a plain constant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .abp import Abp, Label, _AbpBuilder
from .core import NcPoly, Word, parse_fraction, var, var_name, VARS

__all__ = [
    "LabeledDigraph", "Involution", "GraphError",
    "scc_sorted", "near", "cut", "crossing_counts", "interval_edges",
    "component_covers", "permutation_sign",
    "cperm_brute", "cayley_perm_matrix", "build_cperm_abp", "cperm_abp_size_bound",
    "parse_graph", "format_graph", "parse_involution",
]

DEFAULT_MAX_COMPONENT = 6


class GraphError(ValueError):
    pass


def edge_var(i: int, j: int) -> int:
    return var(f"x_{i}_{j}")


@dataclass(frozen=True)
class LabeledDigraph:
    n: int
    edges: Mapping[Tuple[int, int], Label]

    def __post_init__(self):
        edges = {}
        for (i, j), lab in dict(self.edges).items():
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise GraphError(f"edge ({i},{j}) outside vertices 1..{self.n}")
            if not isinstance(lab, Label):
                lab = Label(Fraction(lab[0]), lab[1])
            edges[(i, j)] = lab
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "LabeledDigraph":
        """Edges labelled by fresh variables ``x_i_j``."""
        return cls(n, {(i, j): Label(Fraction(1), edge_var(i, j)) for i, j in pairs})

    @classmethod
    def from_involution(cls, inv: "Involution", self_loops: bool = True) -> "LabeledDigraph":
        pairs = []
        for a, b in inv.pairs:
            pairs += [(a, b), (b, a)]
        if self_loops:
            pairs += [(i, i) for i in range(1, inv.n + 1)]
        return cls.from_pairs(inv.n, pairs)

    @classmethod
    def complete(cls, n: int) -> "LabeledDigraph":
        return cls.from_pairs(n, itertools.product(range(1, n + 1), repeat=2))

    def successors(self, i: int) -> List[int]:
        return sorted(j for (a, j) in self.edges if a == i)

    def has_distinct_labels(self) -> bool:
        vs = [lab.var for lab in self.edges.values() if lab.var is not None]
        return len(vs) == len(set(vs))


@dataclass(frozen=True)
class Involution:
    """Fixed-point-free involution stored as sorted transpositions (a, b), a < b."""
    n: int
    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((min(a, b), max(a, b)) for a, b in self.pairs))
        seen = [x for p in pairs for x in p]
        if self.n % 2 or sorted(seen) != list(range(1, self.n + 1)) or any(a == b for a, b in pairs):
            raise GraphError(f"not a fixed-point-free involution on 1..{self.n}: {pairs}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Involution":
        """``images[i-1] = pi(i)``."""
        n = len(images)
        pairs = []
        for i, j in enumerate(images, start=1):
            if not 1 <= j <= n or images[j - 1] != i or i == j:
                raise GraphError(f"not a fixed-point-free involution: {list(images)}")
            if i < j:
                pairs.append((i, j))
        return cls(n, tuple(pairs))

    def images(self) -> List[int]:
        out = [0] * self.n
        for a, b in self.pairs:
            out[a - 1], out[b - 1] = b, a
        return out

    def __call__(self, i: int) -> int:
        return self.images()[i - 1]

    def __str__(self) -> str:
        return "".join(f"({a} {b})" for a, b in self.pairs)


def all_involutions(n: int) -> Iterator[Involution]:
    def rec(rest):
        if not rest:
            yield ()
            return
        a = rest[0]
        for k in range(1, len(rest)):
            b = rest[k]
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield ((a, b),) + tail
    for pairs in rec(list(range(1, n + 1))):
        yield Involution(n, pairs)


# GRAPH PARAMETERS
# ----------------

def scc_sorted(g: LabeledDigraph) -> List[List[int]]:
    """Strongly connected components (Tarjan), each sorted, ordered by minimum vertex."""
    adj = {i: [] for i in range(1, g.n + 1)}
    for (i, j) in g.edges:
        adj[i].append(j)
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on_stack = set()
    stack: List[int] = []
    comps: List[List[int]] = []
    counter = 0
    for root in range(1, g.n + 1):
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


def near(g: LabeledDigraph) -> int:
    return max((c[-1] - c[0] for c in scc_sorted(g)), default=0)


def crossing_counts(inv: Involution) -> List[int]:
    """``out[k-1]`` = number of transpositions (a, b) with a <= k <= b."""
    diff = [0] * (inv.n + 2)
    for a, b in inv.pairs:
        diff[a] += 1
        diff[b + 1] -= 1
    out, run = [], 0
    for k in range(1, inv.n + 1):
        run += diff[k]
        out.append(run)
    return out


def cut(inv: Involution) -> int:
    return max(crossing_counts(inv), default=0)


def interval_edges(inv: Involution) -> int:
    """Edges of the interval graph on the intervals [a, b]: intersecting pairs."""
    ivs = inv.pairs  # sorted by left endpoint
    count = 0
    for i, (a1, b1) in enumerate(ivs):
        for a2, _ in ivs[i + 1:]:
            if a2 > b1:
                break
            count += 1
    return count


# CYCLE COVERS
# ------------

def permutation_sign(succ: Mapping[int, int]) -> int:
    seen, sign = set(), 1
    for start in succ:
        if start in seen:
            continue
        length, v = 0, start
        while v not in seen:
            seen.add(v)
            v = succ[v]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def component_covers(g: LabeledDigraph, comp: Sequence[int]) -> List[Dict[int, int]]:
    """All cycle covers of the subgraph induced on ``comp``, as successor maps."""
    members = set(comp)
    options = {v: [w for w in g.successors(v) if w in members] for v in comp}
    out: List[Dict[int, int]] = []
    succ: Dict[int, int] = {}
    used = set()

    def rec(k):
        if k == len(comp):
            out.append(dict(succ))
            return
        v = comp[k]
        for w in options[v]:
            if w not in used:
                used.add(w)
                succ[v] = w
                rec(k + 1)
                used.discard(w)
        succ.pop(v, None)

    rec(0)
    return out


def cperm_brute(g: LabeledDigraph, signed: bool = False) -> NcPoly:
    """Cayley permanent (or determinant) of G by row-by-row cover enumeration.

    Each cover contributes x_{1,s(1)} x_{2,s(2)} ... x_{n,s(n)} in row order.
    """
    rows = [[(j, g.edges[(i, j)]) for j in g.successors(i)] for i in range(1, g.n + 1)]
    terms: Dict[Word, Fraction] = {}
    used = [False] * (g.n + 1)
    succ = [0] * (g.n + 1)

    def rec(i, letters, coeff):
        if i > g.n:
            c = coeff
            if signed:
                c *= permutation_sign({k: succ[k] for k in range(1, g.n + 1)})
            w = tuple(letters)
            terms[w] = terms.get(w, 0) + c
            return
        for j, lab in rows[i - 1]:
            if used[j] or not lab.coeff:
                continue
            used[j] = True
            succ[i] = j
            if lab.var is not None:
                letters.append(lab.var)
            rec(i + 1, letters, coeff * lab.coeff)
            if lab.var is not None:
                letters.pop()
            used[j] = False

    rec(1, [], Fraction(1))
    return NcPoly(terms)


def cayley_perm_matrix(m: Sequence[Sequence[object]], signed: bool = False, one=None):
    """Cayley permanent/determinant of a square matrix with ring-valued entries.

    ``None`` entries are structural zeros.  Products are taken in row order.
    Brute force over permutations with zero-pruning; meant as an oracle.
    """
    n = len(m)
    total = None
    used = [False] * n
    perm = [0] * n

    def rec(i, acc):
        nonlocal total
        if i == n:
            term = acc
            if signed and permutation_sign({k: perm[k] for k in range(n)}) < 0:
                term = -term
            total = term if total is None else total + term
            return
        for j in range(n):
            x = m[i][j]
            if used[j] or x is None:
                continue
            used[j] = True
            perm[i] = j
            rec(i + 1, x if acc is None else acc * x)
            used[j] = False

    rec(0, None)
    if total is None:
        return None if one is None else 0 * one
    return total


# BOUNDED-COMPONENT ABP
# ---------------------

def cperm_abp_size_bound(n: int, c: int, near_g: int) -> int:
    return (n + 1) * (c + 1) ** (near_g + c)


def build_cperm_abp(g: LabeledDigraph, signed: bool = False,
                    max_component: int = DEFAULT_MAX_COMPONENT) -> Abp:
    """Layered ABP for the Cayley permanent (determinant if ``signed``).

    Layer ``pos`` holds the states reached after emitting the variables of
    rows 1..pos.  A state is the tuple of successor choices still owed for
    the pending vertices: vertices beyond ``pos`` whose component has
    already been guessed, listed by component order then vertex.  Each
    choice is stored as an index into its component's vertex list.  A
    component's cycle cover is guessed exactly when ``pos`` reaches its
    minimum vertex; in signed mode the cover's sign goes into that edge.
    """
    comps = scc_sorted(g)
    for comp in comps:
        if len(comp) > max_component:
            raise GraphError(f"component {comp} has {len(comp)} vertices, "
                             f"more than the cap {max_component}")
    comp_of: Dict[int, int] = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    covers = [component_covers(g, comp) for comp in comps]
    n = g.n

    def pending_after(pos: int) -> List[int]:
        # vertices > pos whose component minimum is <= pos
        out = []
        for comp in comps:
            if comp[0] > pos:
                break
            out.extend(v for v in comp if v > pos)
        return out

    pending = [pending_after(p) for p in range(n + 1)]
    slot = [{v: k for k, v in enumerate(pend)} for pend in pending]
    bld = _AbpBuilder(n + 1)
    src = bld.node(0, ())
    frontier = {(): src}
    for pos in range(n):
        v = pos + 1
        nxt: Dict[tuple, int] = {}
        before, after = pending[pos], pending[pos + 1]

        def target(choices: Dict[int, int]) -> int:
            key = tuple(choices[u] for u in after)
            nid = nxt.get(key)
            if nid is None:
                nid = nxt[key] = bld.node(pos + 1, key)
            return nid

        ci = comp_of[v]
        comp = comps[ci]
        for state, nid in frontier.items():
            known = {u: comps[comp_of[u]][state[k]] for u, k in slot[pos].items()}
            if v in known:
                w = known.pop(v)
                lab = g.edges[(v, w)]
                choices = {u: comps[comp_of[u]].index(x) for u, x in known.items()}
                bld.edge(nid, target(choices), lab.coeff, lab.var)
                continue
            # v is the minimum of a fresh component: guess its cycle cover
            for cover in covers[ci]:
                lab = g.edges[(v, cover[v])]
                coeff = lab.coeff
                if signed:
                    coeff *= permutation_sign(cover)
                choices = {u: comps[comp_of[u]].index(x) for u, x in known.items()}
                for u in comp[1:]:
                    choices[u] = comp.index(cover[u])
                bld.edge(nid, target(choices), coeff, lab.var)
        frontier = nxt
    sink = bld.node(n, ())
    return bld.build(src, sink)


# TEXT FORMATS
# ------------

def parse_graph(text: str, source: str = "<graph>") -> LabeledDigraph:
    """First line ``n``; then ``i j NAME`` or ``i j = num/den`` per edge."""
    lines = [(k, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise GraphError(f"{source}: empty graph file, expected vertex count")
    k0, first = lines[0]
    try:
        n = int(first)
    except ValueError:
        raise GraphError(f"{source}:{k0}: expected vertex count, got {first!r}") from None
    edges: Dict[Tuple[int, int], Label] = {}
    for k, ln in lines[1:]:
        parts = ln.split()
        try:
            i, j = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            raise GraphError(f"{source}:{k}: expected 'i j NAME' or 'i j = num/den'") from None
        if len(parts) == 4 and parts[2] == "=":
            try:
                lab = Label(parse_fraction(parts[3]), None)
            except ValueError:
                raise GraphError(f"{source}:{k}: bad constant {parts[3]!r}") from None
        elif len(parts) == 3:
            lab = Label(Fraction(1), var(parts[2]))
        else:
            raise GraphError(f"{source}:{k}: expected 'i j NAME' or 'i j = num/den'")
        if (i, j) in edges:
            raise GraphError(f"{source}:{k}: duplicate edge ({i},{j})")
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"{source}:{k}: vertex outside 1..{n}")
        edges[(i, j)] = lab
    return LabeledDigraph(n, edges)


def format_graph(g: LabeledDigraph) -> str:
    out = [str(g.n)]
    for (i, j), lab in sorted(g.edges.items()):
        if lab.var is None:
            out.append(f"{i} {j} = {lab.coeff.numerator}/{lab.coeff.denominator}")
        elif lab.coeff == 1:
            out.append(f"{i} {j} {var_name(lab.var)}")
        else:
            raise GraphError("text format cannot express scaled variable labels")
    return "\n".join(out) + "\n"


def parse_involution(text: str, source: str = "<involution>") -> Involution:
    try:
        images = [int(t) for t in text.split()]
    except ValueError:
        raise GraphError(f"{source}: expected a line of integers giving pi(1..n)") from None
    try:
        return Involution.from_images(images)
    except GraphError as exc:
        raise GraphError(f"{source}: {exc}") from None
