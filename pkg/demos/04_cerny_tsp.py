"""
Cerny's slit machine for the travelling salesman
================================================

Every trajectory through the slit walls is enumerated, illegal ones are
filtered and the rest land on length detectors.
"""

import numpy as np

from npduel.cerny_tsp import (
    TspInstance,
    brute_force_tsp,
    enumerate_trajectories,
    filter_legal,
    random_instance,
    run_cerny_machine,
    split_streams,
)

# four cities on a unit square
square = TspInstance(np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]]))
kets = enumerate_trajectories(square)
print(len(kets), "trajectories, e.g.", kets[0])

legal = filter_legal(kets)
print(len(legal), "survive the filter:", [ket.slits for ket in legal])

bank = split_streams(legal)
for k, (count, p) in sorted(bank.streams.items()):
    print(f"detector {k}: {count} tours, probability {p:.3f}")
print("shortest fired:", bank.min_fired, "| brute force:", brute_force_tsp(square).min_length)

# %%
# The enumeration grows as (m-1)^(m-1) while the answer space is (m-1)!.
rng = np.random.default_rng(3)
for m in range(3, 9):
    report = run_cerny_machine(random_instance(m, rng))
    print(f"m={m}  trajectories={report.trajectories:>8}  legal={report.legal:>5}  "
          f"min={report.min_fired}  grover steps={report.grover_cost}")
print(report.grover_cost_note)
