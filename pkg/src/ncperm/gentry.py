"""Counting CNF models with Cayley permanents of 2x2-block barber pole matrices.

Clauses become product programs over an S3 subgroup of 2x2 rational
matrices, a CNF becomes a product program that yields ``t`` on satisfying
assignments and 0 otherwise, and the sum of the program over all inputs is
read off a Cayley permanent whose cycle covers correspond to the inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .core import RatMatrix

__all__ = [
    "R", "R_INV", "S", "T", "I2", "ZERO2",
    "Cnf", "Instruction", "ProductProgram", "BlockBarberMatrix", "SatError",
    "clause_program", "cnf_program", "eval_program", "program_sum",
    "barber_matrix", "block_permanent", "count_sat", "naive_count", "parse_dimacs",
    "format_dimacs", "MAX_ISETS",
]

R = RatMatrix([[0, -1], [1, -1]])
S = RatMatrix([[0, 1], [1, 0]])
T = RatMatrix([[1, 0], [0, 0]])
I2 = RatMatrix.identity(2)
ZERO2 = RatMatrix.zeros(2)
R_INV = R * R

MAX_ISETS = 24


class SatError(ValueError):
    pass


def inverse2(a: RatMatrix) -> RatMatrix:
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if not det:
        raise SatError(f"singular matrix {a} has no inverse")
    return RatMatrix([[a[1, 1] / det, -a[0, 1] / det], [-a[1, 0] / det, a[0, 0] / det]])


# CNF
# ---

@dataclass(frozen=True)
class Cnf:
    """Variables 1..m; a clause is a tuple of nonzero DIMACS literals (-v means not v)."""
    m: int
    clauses: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in clauses:
            for l in c:
                if l == 0 or abs(l) > self.m:
                    raise SatError(f"literal {l} outside variables 1..{self.m}")
        object.__setattr__(self, "clauses", clauses)

    def satisfied(self, bits: Sequence[int]) -> bool:
        return all(any((bits[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)

    def occurrences(self) -> Dict[int, int]:
        occ = {v: 0 for v in range(1, self.m + 1)}
        for c in self.clauses:
            for v in {abs(l) for l in c}:
                occ[v] += 1
        return occ


def naive_count(cnf: Cnf) -> int:
    return sum(cnf.satisfied(bits) for bits in itertools.product((0, 1), repeat=cnf.m))


# PRODUCT PROGRAMS
# ----------------

class Instruction(NamedTuple):
    bit: int
    a0: RatMatrix
    a1: RatMatrix

    def inverted(self) -> "Instruction":
        return Instruction(self.bit, inverse2(self.a0), inverse2(self.a1))

    def swapped(self) -> "Instruction":
        return Instruction(self.bit, self.a1, self.a0)


@dataclass(frozen=True)
class ProductProgram:
    """start * prod_i a_{i, x[bit_i]}; bits above ``m`` are dummies with a0 == a1."""
    start: RatMatrix
    instructions: Tuple[Instruction, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        for k, ins in enumerate(self.instructions):
            if ins.bit < 1:
                raise SatError(f"instruction {k}: bit index must be >= 1")
            if ins.a0.shape != (2, 2) or ins.a1.shape != (2, 2):
                raise SatError(f"instruction {k}: matrices must be 2x2")
            if ins.bit > self.m and ins.a0 != ins.a1:
                raise SatError(f"instruction {k}: dummy bit {ins.bit} needs equal branches")

    def __len__(self) -> int:
        return len(self.instructions)

    def real_bits(self) -> List[int]:
        return sorted({ins.bit for ins in self.instructions if ins.bit <= self.m})


def _literal_instruction(lit: int, a_false: RatMatrix) -> Instruction:
    # a_false is multiplied when the literal is false, I2 when it is true
    ins = Instruction(abs(lit), a_false, I2)
    return ins if lit > 0 else ins.swapped()


def _clause_instructions(lits: Sequence[int]) -> List[Instruction]:
    if len(lits) == 1:
        return [_literal_instruction(lits[0], R)]
    inner = _clause_instructions(lits[:-1])
    b = _literal_instruction(lits[-1], S)
    return [b] + inner + [b] + [ins.inverted() for ins in inner]


def clause_program(clause: Sequence[int], m: Optional[int] = None) -> ProductProgram:
    """Program of length 2^d + 2^(d-1) - 2 returning I2 if the clause holds, else r.

    For d literals the program is b * P' * b * P'^-1 where P' handles the
    first d-1 literals, b reads the last one (s when false, I2 when true)
    and P'^-1 inverts each instruction of P' in place.
    """
    lits = [int(l) for l in clause]
    if m is None:
        m = max((abs(l) for l in lits), default=0)
    if not lits:
        return ProductProgram(R, (), m)
    return ProductProgram(I2, tuple(_clause_instructions(lits)), m)


def cnf_program(cnf: Cnf) -> ProductProgram:
    """(prod_c t * P_c) * t, yielding t on satisfying inputs and 0 otherwise.

    Each multiplication by t (and the constant r of an empty clause) is a
    constant instruction on its own fresh dummy bit.
    """
    dummy = cnf.m
    instrs: List[Instruction] = []

    def constant(a: RatMatrix) -> None:
        nonlocal dummy
        dummy += 1
        instrs.append(Instruction(dummy, a, a))

    for c in cnf.clauses:
        constant(T)
        if c:
            instrs.extend(_clause_instructions(c))
        else:
            constant(R)
    constant(T)
    return ProductProgram(I2, tuple(instrs), cnf.m)


def eval_program(pp: ProductProgram, bits: Union[Sequence[int], Mapping[int, int]]) -> RatMatrix:
    """Ordered product; ``bits`` is a 0/1 sequence for bits 1..m or a mapping."""
    if isinstance(bits, Mapping):
        get = bits.get
    else:
        seq = list(bits)
        get = lambda i: seq[i - 1] if 1 <= i <= len(seq) else None
    acc = pp.start
    for ins in pp.instructions:
        b = get(ins.bit)
        if b is None:
            if ins.bit <= pp.m:
                raise SatError(f"no value for bit {ins.bit}")
            b = 0
        acc = acc * (ins.a1 if b else ins.a0)
    return acc


def program_sum(pp: ProductProgram) -> RatMatrix:
    """Sum of the program over all assignments of the real bits 1..m."""
    total = ZERO2
    for bits in itertools.product((0, 1), repeat=pp.m):
        total = total + eval_program(pp, bits)
    return total


# BARBER POLE MATRICES
# --------------------

@dataclass(frozen=True)
class BlockBarberMatrix:
    """n' x n' matrix of 2x2 blocks supported on the diagonal and on pi_1.

    ``isets[k]`` lists the (0-based) instruction rows reading one bit, in
    program order; pi_1 maps each row to the next row of its set, cyclically.
    """
    order: int
    blocks: Mapping[Tuple[int, int], RatMatrix]
    isets: Tuple[Tuple[int, ...], ...]
    set_bits: Tuple[int, ...]
    real: Tuple[bool, ...]
    signed: bool

    def pi1(self, i: int) -> int:
        for members in self.isets:
            if i in members:
                k = members.index(i)
                return members[(k + 1) % len(members)]
        raise KeyError(i)

    def entry(self, i: int, j: int) -> RatMatrix:
        return self.blocks.get((i, j), ZERO2)

    def rows(self) -> List[List[Optional[RatMatrix]]]:
        """Dense block grid with ``None`` for structural zeros."""
        out: List[List[Optional[RatMatrix]]] = [[None] * self.order for _ in range(self.order)]
        for (i, j), a in self.blocks.items():
            out[i][j] = a
        return out

    def max_cycle_len(self, real_only: bool = False) -> int:
        return max((len(s) for s, r in zip(self.isets, self.real) if r or not real_only),
                   default=0)


def barber_matrix(pp: ProductProgram, signed: bool = False,
                  zero_pad_real: bool = False) -> BlockBarberMatrix:
    """Permuted block barber pole matrix of a product program.

    Singleton bit sets are padded with one extra instruction right after
    their only member: (I2, I2) for a real bit, so that both values of the
    bit survive, and (I2, 0) for a dummy bit, so that its constant is
    counted once.  ``zero_pad_real`` pads real bits with (I2, 0) as well,
    which drops the bit = 1 branch of such bits.  In signed mode the block
    at (i_{k,1}, i_{k,2}) carries the factor (-1)^(|I_k|-1) that cancels the determinant's cycle sign.
    """
    instrs = list(pp.instructions)
    next_dummy = max([pp.m] + [ins.bit for ins in instrs]) + 1
    if pp.start != I2:
        instrs.insert(0, Instruction(next_dummy, pp.start, pp.start))
        next_dummy += 1
    count: Dict[int, int] = {}
    for ins in instrs:
        count[ins.bit] = count.get(ins.bit, 0) + 1
    for bit, k in count.items():
        if bit > pp.m and k > 1:
            raise SatError(f"dummy bit {bit} is used by {k} instructions")
    padded: List[Tuple[Instruction, bool]] = []
    for ins in instrs:
        padded.append((ins, False))
        if count[ins.bit] == 1:
            keep = ins.bit <= pp.m and not zero_pad_real
            pad = Instruction(ins.bit, I2, I2 if keep else ZERO2)
            padded.append((pad, True))
    rows_of: Dict[int, List[int]] = {}
    for idx, (ins, _) in enumerate(padded):
        rows_of.setdefault(ins.bit, []).append(idx)
    bits = sorted(rows_of)
    isets = tuple(tuple(rows_of[b]) for b in bits)
    blocks: Dict[Tuple[int, int], RatMatrix] = {}
    for members in isets:
        k = len(members)
        for pos, i in enumerate(members):
            ins = padded[i][0]
            j = members[(pos + 1) % k]
            a1 = ins.a1
            if signed and pos == 0 and (k - 1) % 2:
                a1 = -a1
            if not ins.a0.is_zero():
                blocks[(i, i)] = ins.a0
            if not a1.is_zero():
                blocks[(i, j)] = a1
    return BlockBarberMatrix(len(padded), blocks, isets, tuple(bits),
                             tuple(b <= pp.m for b in bits), signed)


def block_permanent(M: BlockBarberMatrix, max_isets: int = MAX_ISETS) -> RatMatrix:
    """Cayley permanent (determinant if M.signed) over the barber cycle covers.

    A cycle cover picks, for each bit set independently, either all
    diagonal blocks or the whole pi_1 cycle.  Choices that hit a zero block
    are skipped.
    """
    if len(M.isets) > max_isets:
        raise SatError(f"{len(M.isets)} bit sets exceed the limit of {max_isets}; "
                       f"use the naive counter instead")
    options = []
    for members in M.isets:
        k = len(members)
        opts = []
        diag = [M.blocks.get((i, i)) for i in members]
        if all(a is not None for a in diag):
            opts.append((dict(zip(members, diag)), 1))
        cyc = [M.blocks.get((i, members[(p + 1) % k])) for p, i in enumerate(members)]
        if all(a is not None for a in cyc):
            sign = -1 if (M.signed and (k - 1) % 2) else 1
            opts.append((dict(zip(members, cyc)), sign))
        options.append(opts)
    total = ZERO2
    for choice in itertools.product(*options):
        chosen: Dict[int, RatMatrix] = {}
        sign = 1
        for picked, s in choice:
            chosen.update(picked)
            sign *= s
        acc = I2
        for i in range(M.order):
            acc = acc * chosen[i]
        total = total + (acc if sign > 0 else -acc)
    return total


def count_sat(cnf: Cnf, signed: bool = False, report: bool = False):
    """Number of satisfying assignments, read off entry (1,1) of the block permanent.

    Variables that occur in no clause are not read by the program, so each
    doubles the count.
    """
    pp = cnf_program(cnf)
    M = barber_matrix(pp, signed=signed)
    value = block_permanent(M)
    unused = cnf.m - len(pp.real_bits())
    entry = value[0, 0] * 2 ** unused
    if entry.denominator != 1 or entry < 0:
        raise SatError(f"block permanent produced a non-count entry {entry}")
    count = int(entry)
    if not report:
        return count
    return {
        "count": count,
        "program_length": len(pp),
        "block_order": M.order,
        "max_cycle_len": M.max_cycle_len(),
        "max_real_cycle_len": M.max_cycle_len(real_only=True),
        "bit_sets": len(M.isets),
    }


# DIMACS
# ------

def parse_dimacs(text: str, source: str = "<cnf>") -> Cnf:
    m = k = None
    clauses: List[Tuple[int, ...]] = []
    current: List[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise SatError(f"{source}:{lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                m, k = int(parts[2]), int(parts[3])
            except ValueError:
                raise SatError(f"{source}:{lineno}: expected integers in header") from None
            continue
        if m is None:
            raise SatError(f"{source}:{lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise SatError(f"{source}:{lineno}: expected an integer literal, got {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > m:
                raise SatError(f"{source}:{lineno}: literal {lit} exceeds {m} variables")
            else:
                current.append(lit)
    if m is None:
        raise SatError(f"{source}: missing 'p cnf' header")
    if current:
        raise SatError(f"{source}: last clause is not terminated by 0")
    if len(clauses) != k:
        raise SatError(f"{source}: header announces {k} clauses, found {len(clauses)}")
    return Cnf(m, tuple(clauses))


def format_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.m} {len(cnf.clauses)}"]
    lines += [" ".join(map(str, c + (0,))) for c in cnf.clauses]
    return "\n".join(lines) + "\n"
