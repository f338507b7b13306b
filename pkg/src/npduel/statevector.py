"""Dense n-qubit statevector simulation.

Basis indices are little-endian: bit ``b`` of index ``i`` is the value of
qubit ``b``.  States are immutable values; every operation returns a new
:class:`StateVector`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from npduel.errors import CapExceeded, InputError

__all__ = [
    "MAX_QUBITS",
    "NORM_TOL",
    "UNITARY_TOL",
    "StateVector",
    "SingleQubitGate",
    "MeasurementOutcome",
    "I",
    "X",
    "Z",
    "H",
    "basis_state",
    "uniform_state",
    "apply_gate",
    "walsh_hadamard_all",
    "tensor",
    "measure_all",
    "measure_qubit",
    "sample_counts",
    "probability_of",
    "marked_mask",
    "is_entangled_2q",
    "dump_state",
    "load_dump",
]

MAX_QUBITS = 24
NORM_TOL = 1e-9
UNITARY_TOL = 1e-12

# callable over an index array, a boolean mask of length 2**n, or explicit indices
Marked = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, Iterable[int]]


def _check_qubits(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise CapExceeded(f"qubit count {n} outside [1, {MAX_QUBITS}]")


class StateVector:
    """``2**n`` complex amplitudes over an n-qubit register."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, amps, num_qubits: int | None = None, check_norm: bool = True):
        amps = np.array(amps, dtype=np.complex128).reshape(-1)
        size = amps.shape[0]
        n = size.bit_length() - 1
        if size < 2 or (1 << n) != size:
            raise InputError(f"amplitude vector length {size} is not 2**n with n >= 1")
        if num_qubits is not None and num_qubits != n:
            raise InputError(f"{size} amplitudes do not match {num_qubits} qubits")
        _check_qubits(n)
        if not np.all(np.isfinite(amps)):
            raise InputError("amplitudes must be finite")
        if check_norm and abs(np.vdot(amps, amps).real - 1.0) > NORM_TOL:
            raise InputError(f"state is not normalized (norm^2 = {np.vdot(amps, amps).real!r})")
        amps.setflags(write=False)
        self.num_qubits = n
        self.amps = amps

    @classmethod
    def _wrap(cls, amps: np.ndarray) -> "StateVector":
        # internal fast path for results of unitary operations
        obj = cls.__new__(cls)
        amps.setflags(write=False)
        obj.num_qubits = amps.shape[0].bit_length() - 1
        obj.amps = amps
        return obj

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, i):
        return self.amps[i]

    def __neg__(self) -> "StateVector":
        return StateVector._wrap(-self.amps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.num_qubits == other.num_qubits and np.array_equal(self.amps, other.amps)

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return self.num_qubits == other.num_qubits and np.allclose(
            self.amps, other.amps, rtol=0.0, atol=atol
        )

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits}, amps={self.amps!r})"


class SingleQubitGate:
    """A 2x2 unitary; unitarity is checked at construction."""

    __slots__ = ("name", "matrix")

    def __init__(self, matrix, name: str = "U"):
        m = np.array(matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise InputError(f"gate matrix must be 2x2, got {m.shape}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if err > UNITARY_TOL:
            raise InputError(f"gate {name} is not unitary (max |U^dag U - I| = {err:.3g})")
        m.setflags(write=False)
        self.name = name
        self.matrix = m

    def __repr__(self) -> str:
        return f"SingleQubitGate({self.name})"


_SQRT1_2 = 1.0 / np.sqrt(2.0)
I = SingleQubitGate([[1, 0], [0, 1]], "I")
X = SingleQubitGate([[0, 1], [1, 0]], "X")
Z = SingleQubitGate([[1, 0], [0, -1]], "Z")
H = SingleQubitGate([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], "H")


@dataclass(frozen=True)
class MeasurementOutcome:
    basis_index: int
    collapsed: StateVector


def basis_state(n: int, index: int) -> StateVector:
    _check_qubits(n)
    if not 0 <= index < (1 << n):
        raise InputError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector._wrap(amps)


def uniform_state(n: int) -> StateVector:
    """H on every qubit of |0...0>, built directly."""
    _check_qubits(n)
    return StateVector._wrap(np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def _apply_matrix(amps: np.ndarray, matrix: np.ndarray, q: int, n: int) -> np.ndarray:
    # (high bits, qubit q, low bits) in C order puts bit q on the middle axis
    view = amps.reshape(1 << (n - q - 1), 2, 1 << q)
    return np.einsum("ab,hbl->hal", matrix, view).reshape(-1)


def apply_gate(s: StateVector, gate: SingleQubitGate, q: int) -> StateVector:
    if not 0 <= q < s.num_qubits:
        raise InputError(f"qubit {q} out of range for {s.num_qubits} qubits")
    return StateVector._wrap(_apply_matrix(s.amps, gate.matrix, q, s.num_qubits))


def walsh_hadamard_all(s: StateVector) -> StateVector:
    amps = s.amps
    for q in range(s.num_qubits):
        amps = _apply_matrix(amps, H.matrix, q, s.num_qubits)
    return StateVector._wrap(amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Combined register with ``a`` on the low qubits and ``b`` on the high ones.

    Amplitude at ``i_b * 2**n_a + i_a`` is ``a[i_a] * b[i_b]``.
    """
    _check_qubits(a.num_qubits + b.num_qubits)
    return StateVector._wrap(np.kron(b.amps, a.amps))


def _sampling_probs(s: StateVector) -> np.ndarray:
    p = s.probabilities()
    return p / p.sum()


def measure_all(s: StateVector, rng: np.random.Generator) -> MeasurementOutcome:
    i = int(rng.choice(s.dim, p=_sampling_probs(s)))
    return MeasurementOutcome(i, basis_state(s.num_qubits, i))


def sample_counts(s: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Outcome counts of ``shots`` independent full measurements of ``s``."""
    return rng.multinomial(shots, _sampling_probs(s))


def measure_qubit(
    s: StateVector, q: int, rng: np.random.Generator
) -> tuple[int, StateVector]:
    if not 0 <= q < s.num_qubits:
        raise InputError(f"qubit {q} out of range for {s.num_qubits} qubits")
    bit_set = ((np.arange(s.dim) >> q) & 1).astype(bool)
    probs = s.probabilities()
    p1 = float(probs[bit_set].sum()) / float(probs.sum())
    bit = 1 if rng.random() < p1 else 0
    keep = bit_set if bit else ~bit_set
    amps = np.where(keep, s.amps, 0.0)
    amps = amps / np.sqrt(np.vdot(amps, amps).real)
    return bit, StateVector._wrap(amps)


def marked_mask(n: int, marked: Marked) -> np.ndarray:
    """Normalize a predicate, boolean mask, or index collection to a mask."""
    size = 1 << n
    if callable(marked):
        mask = np.asarray(marked(np.arange(size)), dtype=bool)
        if mask.shape != (size,):
            raise InputError("predicate must return one boolean per basis index")
        return mask
    arr = np.asarray(marked if isinstance(marked, np.ndarray) else list(marked))
    if arr.dtype == bool:
        if arr.shape != (size,):
            raise InputError(f"mask must have length {size}")
        return arr
    mask = np.zeros(size, dtype=bool)
    if arr.size:
        arr = arr.astype(np.int64)
        if arr.min() < 0 or arr.max() >= size:
            raise InputError(f"marked index out of range for {n} qubits")
        mask[arr] = True
    return mask


def probability_of(s: StateVector, predicate: Marked) -> float:
    mask = marked_mask(s.num_qubits, predicate)
    return float(np.sum(s.probabilities()[mask]))


def is_entangled_2q(s: StateVector, tol: float = 1e-9) -> bool:
    """Determinant test on the 2x2 amplitude matrix of a two-qubit state."""
    if s.num_qubits != 2:
        raise InputError(f"entanglement test needs 2 qubits, got {s.num_qubits}")
    c00, c10, c01, c11 = s.amps  # index = q0 + 2*q1
    return abs(c00 * c11 - c01 * c10) > tol


def dump_state(s: StateVector) -> str:
    """``index<TAB>re<TAB>im`` per nonzero amplitude, ascending index."""
    lines = [
        f"{i}\t{float(s.amps[i].real)!r}\t{float(s.amps[i].imag)!r}" for i in np.flatnonzero(s.amps)
    ]
    return "".join(line + "\n" for line in lines)


def load_dump(text: str, n: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    for line in text.splitlines():
        if not line.strip():
            continue
        i, re, im = line.split("\t")
        amps[int(i)] = complex(float(re), float(im))
    return StateVector(amps, n)
