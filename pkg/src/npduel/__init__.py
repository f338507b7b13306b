"""Quantum and evolutionary search for SAT and TSP, cross-checked against exhaustive oracles.

Modules:

* :mod:`npduel.cnf` -- CNF formulas, DIMACS I/O, exhaustive solution counting
* :mod:`npduel.statevector` -- dense n-qubit statevector simulation
* :mod:`npduel.quantum_sat` -- flag-register sampling and amplitude amplification
* :mod:`npduel.es_sat` -- (15,100)-ES on the real-valued SAT relaxation
* :mod:`npduel.cerny_tsp` -- slit-array TSP machine and brute-force tours
* :mod:`npduel.cli` -- the ``npduel`` command
"""

__version__ = "0.1.0"
