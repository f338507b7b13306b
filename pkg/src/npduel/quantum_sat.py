"""Quantum SAT search on the statevector simulator.

Two routes are provided.  The flag-register route prepares a uniform
superposition over assignments next to a flag qubit, applies ``U_f`` and
measures the flag, so a solution appears with probability ``r / 2**n``.
The amplification route repeatedly applies the search iterate
``Q = -U S_0 U^dag S_f`` with ``U`` the Walsh-Hadamard transform, which
rotates ``U|0...0>`` toward the satisfying assignments.

The formula itself is evaluated classically per basis index; reversible
scratch qubits that a gate-level ``U_f`` would need are not simulated.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from npduel.cnf import (
    Assignment,
    CnfFormula,
    assignment_from_index,
    count_solutions,
    evaluate,
    satisfying_mask,
    serialize_dimacs,
)
from npduel.errors import CapExceeded, CrossCheckError, InputError
from npduel.statevector import (
    MAX_QUBITS,
    Marked,
    StateVector,
    basis_state,
    marked_mask,
    measure_all,
    measure_qubit,
    probability_of,
    sample_counts,
    uniform_state,
    walsh_hadamard_all,
)

__all__ = [
    "SatRegister",
    "AmplificationPlan",
    "GroverResult",
    "prepare_ohya_masuda",
    "apply_uf",
    "flag_probability",
    "sample_solution",
    "sample_solutions",
    "phase_oracle",
    "phase_flip_state",
    "q_operator",
    "plan_iterations",
    "amplify",
    "grover_search",
    "bitstring",
]

# slack for the round-half-away tie in plan_iterations: pi/(4*asin(sqrt(1/2))) - 1/2
# evaluates to 0.4999999999999999 in doubles
_TIE_EPS = 1e-9


def bitstring(assignment: Assignment) -> str:
    """Assignment as ``'x1 x2 ... xn'`` digits, variable 1 first."""
    return "".join("1" if v else "0" for v in assignment)


@dataclass(frozen=True)
class SatRegister:
    """Variables on qubits ``0..n-1``, satisfaction flag on qubit ``n``."""

    formula: CnfFormula
    state: StateVector

    def __post_init__(self):
        if self.state.num_qubits != self.formula.num_vars + 1:
            raise InputError(
                f"register needs {self.formula.num_vars + 1} qubits, state has {self.state.num_qubits}"
            )

    @property
    def flag_qubit(self) -> int:
        return self.formula.num_vars


def prepare_ohya_masuda(f: CnfFormula) -> SatRegister:
    n = f.num_vars
    if n + 1 > MAX_QUBITS:
        raise CapExceeded(f"{n} variables plus flag exceed the {MAX_QUBITS}-qubit cap")
    amps = np.zeros(1 << (n + 1), dtype=np.complex128)
    amps[: 1 << n] = uniform_state(n).amps
    return SatRegister(f, StateVector(amps, n + 1))


def apply_uf(reg: SatRegister) -> SatRegister:
    """``|x>|y> -> |x>|y XOR f(x)>`` on every basis index at once."""
    n = reg.formula.num_vars
    sat = satisfying_mask(reg.formula)
    # rows are the flag value (qubit n is the high bit)
    rows = reg.state.amps.reshape(2, 1 << n)
    out = rows.copy()
    out[0, sat] = rows[1, sat]
    out[1, sat] = rows[0, sat]
    return SatRegister(reg.formula, StateVector._wrap(out.reshape(-1)))


def flag_probability(reg: SatRegister) -> float:
    n = reg.formula.num_vars
    return probability_of(reg.state, lambda idx: (idx >> n) & 1 == 1)


def sample_solution(reg: SatRegister, rng: np.random.Generator) -> Optional[Assignment]:
    """Measure the flag; on 1 measure the variables of the collapsed state."""
    n = reg.formula.num_vars
    bit, collapsed = measure_qubit(reg.state, n, rng)
    if not bit:
        return None
    outcome = measure_all(collapsed, rng)
    assignment = assignment_from_index(outcome.basis_index & ((1 << n) - 1), n)
    if not evaluate(reg.formula, assignment):
        raise CrossCheckError(f"flag measured 1 but {bitstring(assignment)} does not satisfy f")
    return assignment


def sample_solutions(
    reg: SatRegister, shots: int, rng: np.random.Generator
) -> tuple[int, Counter]:
    """Batched :func:`sample_solution`: ``(flag_one_count, Counter of assignments)``.

    Draws the flag outcomes as one binomial and the conditional variable
    outcomes as one multinomial, which has the same distribution as
    ``shots`` independent calls.
    """
    n = reg.formula.num_vars
    probs = reg.state.probabilities().reshape(2, 1 << n)
    total = probs.sum()
    p1 = float(probs[1].sum() / total)
    hits = int(rng.binomial(shots, min(max(p1, 0.0), 1.0)))
    found: Counter = Counter()
    if hits:
        cond = probs[1] / probs[1].sum()
        counts = rng.multinomial(hits, cond)
        for i in np.flatnonzero(counts):
            assignment = assignment_from_index(int(i), n)
            if not evaluate(reg.formula, assignment):
                raise CrossCheckError(f"sampled non-solution {bitstring(assignment)}")
            found[assignment] = int(counts[i])
    return hits, found


def phase_oracle(s: StateVector, marked: Marked) -> StateVector:
    """Negate the amplitude of every marked basis state."""
    mask = marked_mask(s.num_qubits, marked)
    return StateVector._wrap(np.where(mask, -s.amps, s.amps))


def phase_flip_state(s: StateVector, t: int) -> StateVector:
    if not 0 <= t < s.dim:
        raise InputError(f"basis index {t} out of range for {s.num_qubits} qubits")
    amps = s.amps.copy()
    amps[t] = -amps[t]
    return StateVector._wrap(amps)


def q_operator(s: StateVector, marked: Marked, global_sign: bool = True) -> StateVector:
    """One search iterate: phase oracle, ``U^dag``, flip ``|0...0>``, ``U``, times -1.

    ``global_sign=False`` drops the leading -1; probabilities are unaffected.
    """
    out = phase_oracle(s, marked)
    out = walsh_hadamard_all(out)  # H is self-inverse, so U^dag = U
    out = phase_flip_state(out, 0)
    out = walsh_hadamard_all(out)
    return -out if global_sign else out


@dataclass(frozen=True)
class AmplificationPlan:
    marked_count: int
    search_space: int
    theta: float
    iterations: int

    @property
    def predicted_success(self) -> float:
        return math.sin((2 * self.iterations + 1) * self.theta) ** 2


def plan_iterations(n: int, r: int) -> AmplificationPlan:
    """Iteration count ``k = max(0, round(pi / (4 theta) - 1/2))``, ties rounded up."""
    size = 1 << n
    if r <= 0:
        raise InputError("nothing to amplify: marked count must be positive")
    if r > size:
        raise InputError(f"marked count {r} exceeds search space {size}")
    theta = math.asin(math.sqrt(r / size))
    target = math.pi / (4 * theta) - 0.5
    k = max(0, math.floor(target + 0.5 + _TIE_EPS))
    return AmplificationPlan(r, size, theta, k)


def amplify(n: int, marked: Marked, iterations: int, global_sign: bool = True) -> StateVector:
    """``Q**iterations`` applied to ``U|0...0>``."""
    mask = marked_mask(n, marked)
    s = walsh_hadamard_all(basis_state(n, 0))
    for _ in range(iterations):
        s = q_operator(s, mask, global_sign)
    return s


@dataclass
class GroverResult:
    formula: str
    n: int
    r: int
    k: Optional[int] = None
    theta: Optional[float] = None
    predicted_success: Optional[float] = None
    shots: int = 0
    success_count: int = 0
    outcome_histogram: dict[str, int] = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool:
        return self.r > 0

    @property
    def empirical_success(self) -> Optional[float]:
        return self.success_count / self.shots if self.shots else None

    def to_dict(self) -> dict:
        if not self.satisfiable:
            return {"result": "unsat", "formula": self.formula, "n": self.n, "r": 0, "shots": 0}
        return {
            "result": "sat",
            "formula": self.formula,
            "n": self.n,
            "r": self.r,
            "r_source": "exhaustive count",
            "k": self.k,
            "theta": self.theta,
            "predicted_success": self.predicted_success,
            "shots": self.shots,
            "success_count": self.success_count,
            "empirical_success": self.empirical_success,
            "outcome_histogram": dict(sorted(self.outcome_histogram.items())),
        }


def grover_search(f: CnfFormula, rng: np.random.Generator, shots: int) -> GroverResult:
    """Plan with the exact solution count, amplify, and measure ``shots`` times.

    Every shot starts from a fresh ``U|0...0>``; the prepared state is
    deterministic, so it is computed once and the ``shots`` independent
    measurements are drawn as one multinomial.
    """
    if shots < 1:
        raise InputError("shots must be >= 1")
    n = f.num_vars
    if n > MAX_QUBITS:
        raise CapExceeded(f"{n} qubits exceed the {MAX_QUBITS}-qubit cap")
    text = serialize_dimacs(f)
    r = count_solutions(f)
    if r == 0:
        return GroverResult(text, n, 0)
    plan = plan_iterations(n, r)
    sat = satisfying_mask(f)
    state = amplify(n, sat, plan.iterations)
    counts = sample_counts(state, shots, rng)
    histogram = {
        bitstring(assignment_from_index(int(i), n)): int(counts[i]) for i in np.flatnonzero(counts)
    }
    success = int(counts[sat].sum())
    return GroverResult(
        text,
        n,
        r,
        plan.iterations,
        plan.theta,
        plan.predicted_success,
        shots,
        success,
        histogram,
    )
