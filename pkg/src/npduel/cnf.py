"""CNF formulas, DIMACS I/O, and the exhaustive satisfiability oracle.

Variables are 1-based at the boundary (``Literal.variable``, DIMACS) and
0-based inside an assignment: ``assignment[i]`` is the value of variable
``i + 1``.  Assignments are plain tuples of ``bool``.

Two integer encodings of an assignment are used in this package:

* the *basis index* (little-endian): bit ``i`` holds variable ``i + 1``.
  This is what the statevector modules use.
* the *reading order* (big-endian): the tuple read left to right as a
  binary string.  :func:`solutions` is sorted in this order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from npduel.errors import CapExceeded, InputError

__all__ = [
    "Literal",
    "CnfFormula",
    "Assignment",
    "DimacsError",
    "EXHAUSTIVE_BOUND",
    "parse_dimacs",
    "serialize_dimacs",
    "evaluate",
    "satisfying_mask",
    "count_solutions",
    "solutions",
    "assignment_from_index",
    "assignment_to_index",
    "random_ksat",
]

Assignment = tuple[bool, ...]

EXHAUSTIVE_BOUND = 24
_CHUNK_BITS = 20


class DimacsError(InputError):
    """Malformed DIMACS input."""


@dataclass(frozen=True)
class Literal:
    variable: int
    negated: bool = False

    def __post_init__(self):
        if self.variable < 1:
            raise InputError(f"variable index must be >= 1, got {self.variable}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise InputError("literal 0 is not a variable")
        return cls(abs(lit), lit < 0)

    def to_int(self) -> int:
        return -self.variable if self.negated else self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.negated)


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of disjunctive clauses over ``num_vars`` variables.

    Clauses keep the literal order and duplicates they were built with.
    ``three_sat=True`` additionally requires every clause to have exactly
    three literals.
    """

    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]
    three_sat: bool = False

    def __post_init__(self):
        if self.num_vars < 1:
            raise InputError(f"num_vars must be >= 1, got {self.num_vars}")
        clauses = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if not clauses:
            raise InputError("formula must contain at least one clause")
        for j, clause in enumerate(clauses):
            if not clause:
                raise InputError(f"clause {j} is empty")
            for lit in clause:
                if lit.variable > self.num_vars:
                    raise InputError(
                        f"clause {j}: variable {lit.variable} exceeds num_vars={self.num_vars}"
                    )
            if self.three_sat and len(clause) != 3:
                raise InputError(f"clause {j} has {len(clause)} literals; 3SAT needs exactly 3")

    @classmethod
    def from_ints(
        cls, num_vars: int, clauses: Iterable[Iterable[int]], three_sat: bool = False
    ) -> "CnfFormula":
        return cls(
            num_vars,
            tuple(tuple(Literal.from_int(x) for x in c) for c in clauses),
            three_sat,
        )

    def to_ints(self) -> list[list[int]]:
        return [[lit.to_int() for lit in c] for c in self.clauses]

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def clause_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Padded ``(variable_index0, sign, valid)`` arrays of shape (m, L).

        ``sign`` is +1 for a positive literal and -1 for a negated one.
        Padding slots have ``valid == False``.
        """
        width = max(len(c) for c in self.clauses)
        m = len(self.clauses)
        var = np.zeros((m, width), dtype=np.int64)
        sign = np.ones((m, width), dtype=np.float64)
        valid = np.zeros((m, width), dtype=bool)
        for j, clause in enumerate(self.clauses):
            for t, lit in enumerate(clause):
                var[j, t] = lit.variable - 1
                sign[j, t] = -1.0 if lit.negated else 1.0
                valid[j, t] = True
        return var, sign, valid


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text.

    Clauses may span lines.  A line starting with ``%`` ends the clause
    section (SATLIB uf-series trailer).
    """
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 1 or header[1] < 1:
                raise DimacsError(f"line {lineno}: header counts must be positive")
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: not an integer: {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(current)
                current = []
                continue
            if abs(lit) > header[0]:
                raise DimacsError(
                    f"line {lineno}: variable {abs(lit)} exceeds declared count {header[0]}"
                )
            current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("final clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(header[0], clauses)


def serialize_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {f.num_clauses}"]
    lines += [" ".join(str(x) for x in c) + " 0" for c in f.to_ints()]
    return "\n".join(lines) + "\n"


def evaluate(f: CnfFormula, assignment: Sequence[bool]) -> bool:
    if len(assignment) != f.num_vars:
        raise InputError(
            f"assignment has {len(assignment)} values, formula has {f.num_vars} variables"
        )
    return all(
        any(bool(assignment[lit.variable - 1]) != lit.negated for lit in clause)
        for clause in f.clauses
    )


def _check_bound(f: CnfFormula, bound: int) -> None:
    if f.num_vars > bound:
        raise CapExceeded(
            f"exhaustive enumeration over 2^{f.num_vars} assignments exceeds bound 2^{bound}"
        )


def _mask_chunk(f: CnfFormula, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    sat = np.ones(idx.shape, dtype=bool)
    for clause in f.clauses:
        hit = np.zeros(idx.shape, dtype=bool)
        for lit in clause:
            bit = ((idx >> (lit.variable - 1)) & 1).astype(bool)
            hit |= ~bit if lit.negated else bit
        sat &= hit
    return sat


def satisfying_mask(f: CnfFormula, bound: int = EXHAUSTIVE_BOUND) -> np.ndarray:
    """Boolean array of length 2**n; entry ``i`` is f at basis index ``i``."""
    _check_bound(f, bound)
    size = 1 << f.num_vars
    step = 1 << _CHUNK_BITS
    return np.concatenate(
        [_mask_chunk(f, s, min(s + step, size)) for s in range(0, size, step)]
    )


def count_solutions(f: CnfFormula, bound: int = EXHAUSTIVE_BOUND) -> int:
    _check_bound(f, bound)
    size = 1 << f.num_vars
    step = 1 << _CHUNK_BITS
    return int(
        sum(np.count_nonzero(_mask_chunk(f, s, min(s + step, size))) for s in range(0, size, step))
    )


def assignment_from_index(index: int, n: int) -> Assignment:
    """Little-endian basis index to assignment (bit i -> variable i+1)."""
    return tuple(bool((index >> i) & 1) for i in range(n))


def assignment_to_index(assignment: Sequence[bool]) -> int:
    return sum(1 << i for i, v in enumerate(assignment) if v)


def solutions(f: CnfFormula, bound: int = EXHAUSTIVE_BOUND) -> list[Assignment]:
    """All satisfying assignments, ascending with variable 1 as the most significant bit."""
    n = f.num_vars
    hits = np.flatnonzero(satisfying_mask(f, bound))
    # reverse the n-bit pattern so the sort key reads x1 as the high bit
    keys = np.zeros_like(hits)
    for i in range(n):
        keys |= ((hits >> i) & 1) << (n - 1 - i)
    return [assignment_from_index(int(i), n) for i in hits[np.argsort(keys, kind="stable")]]


def random_ksat(
    num_vars: int, num_clauses: int, rng: np.random.Generator, k: int = 3
) -> CnfFormula:
    """Uniform random k-SAT: k distinct variables per clause, fair random signs."""
    if k > num_vars:
        raise InputError(f"cannot draw {k} distinct variables from {num_vars}")
    clauses = []
    for _ in range(num_clauses):
        vs = rng.choice(num_vars, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k)
        clauses.append([int(v) if s else -int(v) for v, s in zip(vs, signs)])
    return CnfFormula.from_ints(num_vars, clauses, three_sat=(k == 3))
