"""
Evolution strategy on random 3-SAT
==================================

The formula is relaxed to a smooth non-negative function on R^n whose
zeros at the +-1 corners are exactly the solutions.
"""

import numpy as np

from npduel.cnf import CnfFormula, count_solutions, evaluate, random_ksat
from npduel.es_sat import EsConfig, run_es, transform_fitness

f = CnfFormula.from_ints(3, [[1, 2, -3], [-1, -2], [-2, 3]])
for corner in ([1, 1, 1], [1, -1, -1], [-1, 1, 1]):
    print(corner, "->", transform_fitness(f, corner))

# %%
# A satisfiable 20-variable, 91-clause instance (the uf20-91 shape).
rng = np.random.default_rng(7)
while True:
    g = random_ksat(20, 91, rng)
    if count_solutions(g):
        break

trace_every = 25


def show(pop, step):
    if pop.generation % trace_every == 0:
        print(f"gen {pop.generation:4d}  best {pop.fitness.min():.4f}  "
              f"median sigma {np.median(pop.sigma):.3g}")


result = run_es(g, EsConfig(), 1, callback=show)
print("solved:", result.solved, "after", result.generations, "generations,",
      result.evaluations, "evaluations,", result.restarts, "restarts")
if result.solved:
    print("verified:", evaluate(g, result.assignment))

# %%
# Without recombination the same seed takes a different path.
plain = run_es(g, EsConfig(recombination="none"), 1)
print("no recombination: solved", plain.solved, "in", plain.generations, "generations")
