"""Exact scalars, non-commutative polynomials and rational matrices.

Scalars are :class:`fractions.Fraction` throughout.  Variables are interned
into a process-wide :class:`VarTable`; a monomial (``Word``) is a tuple of
variable ids and order matters.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from itertools import product as _cartesian
from math import lcm
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

__all__ = [
    "VarTable", "VARS", "var", "var_name", "word", "word_names",
    "Word", "Scalar", "to_fraction", "format_fraction", "parse_fraction",
    "NcPoly", "poly_mul", "hadamard_poly",
    "RatMatrix", "mat_rank", "tensor", "ring_one",
    "poly_to_json", "poly_from_json",
]

Word = Tuple[int, ...]
Scalar = Union[int, Fraction]


# VARIABLES
# ---------

class VarTable:
    """Bidirectional map between external variable names and integer ids."""

    def __init__(self) -> None:
        self._ids: Dict[str, int] = {}
        self._names: list[str] = []
        self._lock = threading.Lock()

    def intern(self, name: str) -> int:
        vid = self._ids.get(name)
        if vid is not None:
            return vid
        with self._lock:
            vid = self._ids.get(name)
            if vid is None:
                vid = len(self._names)
                self._names.append(name)
                self._ids[name] = vid
            return vid

    def lookup(self, name: str) -> int:
        return self._ids[name]

    def name(self, vid: int) -> str:
        if not 0 <= vid < len(self._names):
            raise KeyError(f"unknown variable id {vid}")
        return self._names[vid]

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: object) -> bool:
        return name in self._ids


VARS = VarTable()


def var(name: str) -> int:
    return VARS.intern(name)


def var_name(vid: int) -> str:
    return VARS.name(vid)


def word(*names: str) -> Word:
    """``word("x1", "x2")`` -> the id tuple of the monomial x1*x2."""
    return tuple(VARS.intern(n) for n in names)


def word_names(w: Iterable[int]) -> Tuple[str, ...]:
    return tuple(VARS.name(v) for v in w)


# SCALARS
# -------

def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# POLYNOMIALS
# -----------

class NcPoly:
    """Sparse polynomial in non-commuting variables with rational coefficients.

    Immutable.  ``p[w]`` is the coefficient of the word ``w`` (0 if absent).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, Scalar] | None = None):
        clean: Dict[Word, Fraction] = {}
        if terms:
            for w, c in terms.items():
                c = to_fraction(c)
                if c:
                    clean[tuple(w)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: Dict[Word, Fraction]) -> "NcPoly":
        # trusted constructor: caller guarantees no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls) -> "NcPoly":
        return cls._wrap({})

    @classmethod
    def one(cls) -> "NcPoly":
        return cls._wrap({(): Fraction(1)})

    @classmethod
    def const(cls, c: Scalar) -> "NcPoly":
        return cls({(): c})

    @classmethod
    def var(cls, v: int | str, coeff: Scalar = 1) -> "NcPoly":
        if isinstance(v, str):
            v = VARS.intern(v)
        return cls({(v,): coeff})

    @classmethod
    def monomial(cls, w: Sequence[int], coeff: Scalar = 1) -> "NcPoly":
        return cls({tuple(w): coeff})

    @classmethod
    def parse(cls, text: str) -> "NcPoly":
        """Parse ``"2*x1*x2 - x2*x1 + 3/4"`` style text (no parentheses)."""
        terms: Dict[Word, Fraction] = {}
        s = text.replace("-", "+-")
        for chunk in s.split("+"):
            chunk = chunk.strip()
            if not chunk:
                continue
            sign = Fraction(1)
            if chunk.startswith("-"):
                sign, chunk = Fraction(-1), chunk[1:].strip()
            coeff, letters = sign, []
            for factor in chunk.split("*"):
                factor = factor.strip()
                if not factor:
                    raise ValueError(f"empty factor in {text!r}")
                if factor[0].isdigit():
                    coeff *= parse_fraction(factor)
                else:
                    letters.append(VARS.intern(factor))
            w = tuple(letters)
            terms[w] = terms.get(w, Fraction(0)) + coeff
        return cls(terms)

    # container protocol

    def __getitem__(self, w: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(w), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Word]:
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def support(self) -> frozenset:
        return frozenset(self._terms)

    @property
    def degree(self) -> int:
        """Largest word length; -1 for the zero polynomial."""
        return max((len(w) for w in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self._terms}) <= 1

    def variables(self) -> frozenset:
        return frozenset(v for w in self._terms for v in w)

    # arithmetic

    def __eq__(self, other) -> bool:
        if isinstance(other, NcPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == NcPoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction)):
            other = NcPoly.const(other)
        if not isinstance(other, NcPoly):
            return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            s = out.get(w, 0) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return NcPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self) -> "NcPoly":
        return NcPoly._wrap({w: -c for w, c in self._terms.items()})

    def __sub__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction)):
            other = NcPoly.const(other)
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "NcPoly":
        return (-self) + other

    def scale(self, c: Scalar) -> "NcPoly":
        c = to_fraction(c)
        if not c:
            return NcPoly.zero()
        return NcPoly._wrap({w: c * a for w, a in self._terms.items()})

    def __mul__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, NcPoly):
            return NotImplemented
        return poly_mul(self, other)

    def __rmul__(self, other) -> "NcPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "NcPoly":
        out = NcPoly.one()
        for _ in range(k):
            out = out * self
        return out

    def substitute(self, mapping: Mapping[int, "NcPoly | Scalar"]) -> "NcPoly":
        """Replace variables by polynomials or scalars, keeping letter order."""
        images = {v: (p if isinstance(p, NcPoly) else NcPoly.const(p))
                  for v, p in mapping.items()}
        out: Dict[Word, Fraction] = {}
        for w, c in self._terms.items():
            acc = {(): c}
            for v in w:
                img = images.get(v)
                if img is None:
                    acc = {u + (v,): a for u, a in acc.items()}
                    continue
                nxt: Dict[Word, Fraction] = {}
                for u, a in acc.items():
                    for u2, b in img._terms.items():
                        k = u + u2
                        nxt[k] = nxt.get(k, 0) + a * b
                acc = nxt
            for u, a in acc.items():
                out[u] = out.get(u, 0) + a
        return NcPoly({w: c for w, c in out.items() if c})

    def evaluate(self, assignment: Mapping[int, object], one=None):
        """Evaluate with variables mapped into a ring (Fraction, RatMatrix, ...)."""
        if one is None:
            one = ring_one(assignment.values())
        total = None
        for w, c in self._terms.items():
            term = c * one
            for v in w:
                if v not in assignment:
                    raise KeyError(f"variable {var_name(v)} is not assigned")
                term = term * assignment[v]
            total = term if total is None else total + term
        return 0 * one if total is None else total

    def hadamard(self, other: "NcPoly") -> "NcPoly":
        return hadamard_poly(self, other)

    # display

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda kv: word_names(kv[0]))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            mono = "*".join(word_names(w))
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"NcPoly({self})"


def poly_mul(p: NcPoly, q: NcPoly) -> NcPoly:
    out: Dict[Word, Fraction] = {}
    for u, a in p._terms.items():
        for v, b in q._terms.items():
            w = u + v
            out[w] = out.get(w, 0) + a * b
    return NcPoly._wrap({w: c for w, c in out.items() if c})


def hadamard_poly(f: NcPoly, g: NcPoly) -> NcPoly:
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    out = {}
    for w, a in small._terms.items():
        b = big._terms.get(w)
        if b is not None:
            out[w] = a * b
    return NcPoly._wrap(out)


def poly_to_json(p: NcPoly) -> list:
    return [{"word": list(word_names(w)), "coeff": format_fraction(c)}
            for w, c in p.sorted_terms()]


def poly_from_json(data: Sequence[Mapping]) -> NcPoly:
    terms: Dict[Word, Fraction] = {}
    for item in data:
        w = tuple(VARS.intern(n) for n in item["word"])
        terms[w] = terms.get(w, 0) + parse_fraction(str(item["coeff"]))
    return NcPoly(terms)


# MATRICES
# --------

class RatMatrix:
    """Immutable dense matrix of Fractions.

    ``*`` is the ring product (matrix product, or scaling by a scalar) so that
    square matrices can stand in for any ring element; ``@`` is an alias.
    """

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: Sequence[Sequence[Scalar]]):
        e = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        if not e:
            raise ValueError("matrix needs at least one row")
        width = len(e[0])
        if any(len(r) != width for r in e):
            raise ValueError("ragged matrix rows")
        self.rows, self.cols, self._e = len(e), width, e

    @classmethod
    def _wrap(cls, e) -> "RatMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols, m._e = len(e), len(e[0]), e
        return m

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._wrap(tuple(tuple(one if i == j else zero for j in range(n))
                               for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls._wrap(tuple((Fraction(0),) * cols for _ in range(rows)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        i, j = ij
        return self._e[i][j]

    def tolist(self) -> list:
        return [list(r) for r in self._e]

    def is_zero(self) -> bool:
        return not any(x for r in self._e for x in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self._e == other._e

    def __hash__(self) -> int:
        return hash(self._e)

    def _check_same(self, other: "RatMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"dimension mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other) -> "RatMatrix":
        if not isinstance(other, RatMatrix):
            return NotImplemented
        self._check_same(other)
        return RatMatrix._wrap(tuple(tuple(a + b for a, b in zip(r, s))
                                     for r, s in zip(self._e, other._e)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix._wrap(tuple(tuple(-a for a in r) for r in self._e))

    def __sub__(self, other) -> "RatMatrix":
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Scalar) -> "RatMatrix":
        c = to_fraction(c)
        return RatMatrix._wrap(tuple(tuple(c * a for a in r) for r in self._e))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.shape} * {other.shape}")
        cols = tuple(zip(*other._e))
        return RatMatrix._wrap(tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0))
                  for c in cols)
            for r in self._e))

    __matmul__ = __mul__

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "RatMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        out = RatMatrix.identity(self.rows)
        for _ in range(k):
            out = out * self
        return out

    def transpose(self) -> "RatMatrix":
        return RatMatrix._wrap(tuple(zip(*self._e)))

    def rank(self) -> int:
        return mat_rank(self)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._e)
        return f"RatMatrix([{body}])"


def ring_one(values: Iterable[object]):
    """Multiplicative identity of the ring the given values live in."""
    dim = None
    for v in values:
        if isinstance(v, RatMatrix):
            if v.rows != v.cols:
                raise ValueError(f"non-square matrix value {v.shape}")
            if dim == "poly":
                raise ValueError("cannot mix polynomial and matrix values")
            if dim is not None and dim != v.rows:
                raise ValueError(f"dimension mismatch: {dim} vs {v.rows}")
            dim = v.rows
        elif isinstance(v, NcPoly):
            if dim is not None and dim != "poly":
                raise ValueError("cannot mix polynomial and matrix values")
            dim = "poly"
    if dim is None:
        return Fraction(1)
    if dim == "poly":
        return NcPoly.one()
    return RatMatrix.identity(dim)


def mat_rank(m: RatMatrix | Sequence[Sequence[Scalar]]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination.

    Each row is first scaled by the lcm of its denominators so that the
    elimination runs on Python integers only.
    """
    rows = m._e if isinstance(m, RatMatrix) else m
    a = []
    for r in rows:
        r = [to_fraction(x) for x in r]
        den = lcm(*(x.denominator for x in r)) if r else 1
        a.append([x.numerator * (den // x.denominator) for x in r])
    if not a or not a[0]:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank, prev = 0, 1
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, n_rows):
            f = a[i][col]
            row_i, row_r = a[i], a[rank]
            for j in range(col + 1, n_cols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
            row_i[col] = 0
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def tensor(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """Kronecker product: block (i, j) of the result is a[i, j] * b."""
    rows = []
    for ra in a._e:
        for rb in b._e:
            rows.append(tuple(x * y for x, y in _cartesian(ra, rb)))
    return RatMatrix._wrap(tuple(rows))
