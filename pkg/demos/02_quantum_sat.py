"""
Quantum SAT: flag register and amplitude amplification
======================================================

The 3-variable formula (x + y + ~z)(~x + ~y)(~y + z) has four solutions
out of eight assignments.
"""

import numpy as np

from npduel.cnf import CnfFormula, count_solutions, solutions
from npduel.quantum_sat import (
    apply_uf,
    bitstring,
    flag_probability,
    grover_search,
    plan_iterations,
    prepare_ohya_masuda,
    sample_solutions,
)

rng = np.random.default_rng(0)
f = CnfFormula.from_ints(3, [[1, 2, -3], [-1, -2], [-2, 3]])
print("solutions:", [bitstring(a) for a in solutions(f)])

# %%
# Flag register: one pass of U_f marks every satisfying index at once,
# but a measurement only reveals one of them, with probability r/2^n.
reg = apply_uf(prepare_ohya_masuda(f))
print("P(flag = 1) =", flag_probability(reg), "and r/2^n =", count_solutions(f) / 2**3)
hits, found = sample_solutions(reg, 1000, rng)
print(hits, "of 1000 shots raised the flag:", {bitstring(a): c for a, c in found.items()})

# %%
# Amplification pays off when solutions are rare.  With a single solution
# among 2^n, the planned iteration count grows like sqrt(2^n).
for n in (3, 6, 10, 14):
    plan = plan_iterations(n, 1)
    print(f"n={n:2d}  k={plan.iterations:3d}  success={plan.predicted_success:.4f}")

# %%
# End to end on a formula pinned to one assignment.
unique = CnfFormula.from_ints(3, [[1], [-2], [3]])
result = grover_search(unique, rng, 2000)
print("k =", result.k, "predicted", round(result.predicted_success, 4),
      "observed", result.empirical_success)
print("histogram:", result.outcome_histogram)
