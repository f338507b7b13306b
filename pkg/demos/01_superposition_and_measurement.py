"""
Superposition, entanglement and measurement
===========================================

A tour of the statevector simulator on one and two qubits.
"""

import numpy as np

from npduel.statevector import (
    H,
    StateVector,
    apply_gate,
    basis_state,
    dump_state,
    is_entangled_2q,
    measure_qubit,
    sample_counts,
    tensor,
    walsh_hadamard_all,
)

rng = np.random.default_rng(0)

# H on |0> gives equal weight to both outcomes
plus = apply_gate(basis_state(1, 0), H, 0)
print(dump_state(plus))

# all qubits through H: the uniform superposition over 2**n indices
uniform = walsh_hadamard_all(basis_state(4, 0))
print("4 qubits, amplitude", uniform.amps[0].real, "on each of", uniform.dim, "indices")

# a product state factors, so the 2x2 determinant vanishes
product = tensor(plus, basis_state(1, 1))
print("product entangled?", is_entangled_2q(product))

# (|00> + |11>)/sqrt(2) does not factor
bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
print("bell entangled?", is_entangled_2q(bell))

# measuring one half of the Bell pair fixes the other
for _ in range(3):
    bit, collapsed = measure_qubit(bell, 0, rng)
    print("qubit 0 ->", bit, "| state now", dump_state(collapsed).strip().replace("\n", "  "))

# shot statistics follow |c_i|^2
counts = sample_counts(bell, 10_000, rng)
print("10000 shots on the Bell state:", dict(enumerate(counts.tolist())))
