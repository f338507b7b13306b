"""Simulation of Cerny's slit-array TSP machine, with a brute-force oracle.

City 1 is both source and detector end.  The machine has one wall per
remaining city and ``m - 1`` slits per wall; a trajectory picks one slit
(a city label in ``2..m``) on every wall, so there are ``(m-1)**(m-1)``
trajectories.  Each ket carries

* ``k``: the accumulated tour length, ``d(1, s1) + sum d(s_i, s_i+1) + d(s_last, 1)``
* ``c_2..c_m``: visited flags, set when a slit for that city is crossed
* ``p``: a control quantum number, carried as the constant 0

A filter keeps kets with every flag set (the pigeonhole principle makes
these exactly the permutations), and the survivors are split into streams
by ``k``.  The detector for length ``M`` fires iff some tour has length
``M``.

The physical machine does this in one pass; here it is explicit
enumeration, so the cost is exponential in ``m``.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from npduel.errors import CapExceeded, CrossCheckError, InputError

__all__ = [
    "ENUMERATION_CAP",
    "ORACLE_CAP",
    "TspInstance",
    "TrajectoryKet",
    "Trajectories",
    "DetectorBank",
    "MachineReport",
    "BruteForceResult",
    "tour_length",
    "enumerate_trajectories",
    "filter_legal",
    "split_streams",
    "brute_force_tsp",
    "run_cerny_machine",
    "grover_tour_cost",
    "random_instance",
]

ENUMERATION_CAP = 10**7
ORACLE_CAP = math.factorial(9)  # permutations, i.e. m <= 10


@dataclass(frozen=True, eq=False)
class TspInstance:
    """``m`` cities with integer distances; ``d[i-1, j-1]`` is ``d(i, j)``."""

    d: np.ndarray
    asymmetric: bool = False

    def __post_init__(self):
        d = np.array(self.d)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] < 3:
            raise InputError(f"need at least 3 cities, got {d.shape[0]}")
        if not np.issubdtype(d.dtype, np.integer):
            if not np.all(np.isfinite(d)) or np.any(d != np.round(d)):
                raise InputError("distances must be integers")
        d = d.astype(np.int64)
        if np.any(np.diag(d) != 0):
            raise InputError("d(i, i) must be 0")
        off = ~np.eye(d.shape[0], dtype=bool)
        if np.any(d[off] < 1):
            raise InputError("off-diagonal distances must be >= 1")
        if not self.asymmetric and not np.array_equal(d, d.T):
            raise InputError("distance matrix is not symmetric (pass asymmetric=True)")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def m(self) -> int:
        return self.d.shape[0]

    def dist(self, i: int, j: int) -> int:
        return int(self.d[i - 1, j - 1])

    @property
    def max_length_bound(self) -> int:
        """``NL``: m times the largest off-diagonal distance."""
        off = ~np.eye(self.m, dtype=bool)
        return int(self.m * self.d[off].max())

    @classmethod
    def from_json(cls, text: str) -> "TspInstance":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid TSP JSON: {exc}") from None
        if not isinstance(obj, dict) or "d" not in obj:
            raise InputError('TSP JSON must be an object with keys "m" and "d"')
        try:
            d = np.array(obj["d"], dtype=np.int64)
        except (TypeError, ValueError):
            raise InputError("TSP JSON 'd' must be a matrix of integers") from None
        if "m" in obj and obj["m"] != d.shape[0]:
            raise InputError(f"'m' = {obj['m']} does not match a {d.shape[0]}-row matrix")
        return cls(d, bool(obj.get("asymmetric", False)))

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "d": self.d.tolist()})


def tour_length(t: TspInstance, order) -> int:
    """Length of the closed tour ``1 -> order... -> 1`` (``order`` excludes city 1)."""
    cities = [1, *order, 1]
    return sum(t.dist(a, b) for a, b in zip(cities, cities[1:]))


@dataclass(frozen=True)
class TrajectoryKet:
    slits: tuple[int, ...]
    k: int
    c: tuple[int, ...]
    amplitude: complex
    p: int = 0


class Trajectories:
    """A superposition of trajectory kets stored column-wise.

    ``slits[j]`` is the city label chosen on each wall, ``visited[j]`` the
    flags ``c_2..c_m``.  Rows are in lexicographic slit order.
    """

    def __init__(self, m, slits, k, visited, amplitudes):
        self.m = m
        self.slits = slits
        self.k = k
        self.visited = visited
        self.amplitudes = amplitudes

    def __len__(self) -> int:
        return self.k.shape[0]

    def __getitem__(self, j: int) -> TrajectoryKet:
        return TrajectoryKet(
            tuple(int(s) for s in self.slits[j]),
            int(self.k[j]),
            tuple(int(c) for c in self.visited[j]),
            complex(self.amplitudes[j]),
        )

    def __iter__(self) -> Iterator[TrajectoryKet]:
        for j in range(len(self)):
            yield self[j]

    def find(self, slits) -> Optional[TrajectoryKet]:
        hit = np.flatnonzero(np.all(self.slits == np.asarray(slits), axis=1))
        return self[int(hit[0])] if hit.size else None

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def _trajectory_count(m: int) -> int:
    return (m - 1) ** (m - 1)


def enumerate_trajectories(t: TspInstance, cap: int = ENUMERATION_CAP) -> Trajectories:
    m = t.m
    count = _trajectory_count(m)
    if count > cap:
        raise CapExceeded(f"{m} cities give {count} trajectories, above the cap of {cap}")
    walls = m - 1
    # digit j of the row number (most significant first) picks the slit on wall j
    rows = np.arange(count, dtype=np.int64)
    slits = np.empty((count, walls), dtype=np.int64)
    for j in range(walls):
        slits[:, j] = (rows // (walls ** (walls - 1 - j))) % walls + 2
    d = t.d
    k = d[0, slits[:, 0] - 1] + d[slits[:, -1] - 1, 0]
    for j in range(walls - 1):
        k = k + d[slits[:, j] - 1, slits[:, j + 1] - 1]
    visited = np.zeros((count, walls), dtype=np.int8)
    np.put_along_axis(visited, slits - 2, 1, axis=1)
    amps = np.full(count, 1.0 / math.sqrt(count), dtype=np.complex128)
    return Trajectories(m, slits, k, visited, amps)


def filter_legal(kets: Trajectories) -> Trajectories:
    """Drop kets with any unvisited city and renormalize the survivors."""
    keep = np.all(kets.visited == 1, axis=1)
    amps = kets.amplitudes[keep]
    amps = amps / math.sqrt(float(np.sum(np.abs(amps) ** 2)))
    return Trajectories(kets.m, kets.slits[keep], kets.k[keep], kets.visited[keep], amps)


@dataclass(frozen=True)
class DetectorBank:
    """Stream ``k`` -> (ket count, probability mass)."""

    streams: dict[int, tuple[int, float]]
    max_length: int

    def fired(self, length: int) -> bool:
        return length in self.streams

    @property
    def fired_lengths(self) -> list[int]:
        return sorted(self.streams)

    @property
    def min_fired(self) -> Optional[int]:
        return min(self.streams) if self.streams else None


def split_streams(kets: Trajectories, max_length: Optional[int] = None) -> DetectorBank:
    """Group kets by their exact integer ``k``."""
    values, inverse = np.unique(kets.k, return_inverse=True)
    mass = np.bincount(inverse, weights=np.abs(kets.amplitudes) ** 2, minlength=values.size)
    counts = np.bincount(inverse, minlength=values.size)
    streams = {int(v): (int(c), float(p)) for v, c, p in zip(values, counts, mass)}
    if max_length is None:
        max_length = int(values.max()) if values.size else 0
    return DetectorBank(streams, max_length)


@dataclass(frozen=True)
class BruteForceResult:
    min_length: int
    tour: tuple[int, ...]
    lengths: Counter


def brute_force_tsp(t: TspInstance, cap: int = ORACLE_CAP) -> BruteForceResult:
    """Every permutation of ``2..m`` after city 1; ties keep the first in lexicographic order."""
    count = math.factorial(t.m - 1)
    if count > cap:
        raise CapExceeded(f"{t.m} cities give {count} tours, above the brute-force cap of {cap}")
    best, best_tour = None, None
    lengths: Counter = Counter()
    for order in itertools.permutations(range(2, t.m + 1)):
        length = tour_length(t, order)
        lengths[length] += 1
        if best is None or length < best:
            best, best_tour = length, (1, *order)
    return BruteForceResult(best, best_tour, lengths)


def grover_tour_cost(m: int) -> int:
    """``ceil(pi/4 * sqrt((m-1)!))`` search steps to pick the minimum out of the tours."""
    return math.ceil(math.pi / 4 * math.sqrt(math.factorial(m - 1)))


@dataclass
class MachineReport:
    trajectories: int
    legal: int
    detectors: DetectorBank
    grover_cost: int

    @property
    def min_fired(self) -> Optional[int]:
        return self.detectors.min_fired

    @property
    def grover_cost_note(self) -> str:
        return (
            f"detectors reveal which lengths exist; extracting the minimal tour from the "
            f"superposition of {self.legal} routes still needs about {self.grover_cost} "
            f"Grover steps (ceil(pi/4 * sqrt({self.legal}))). Simulation cost here is "
            f"{self.trajectories} enumerated trajectories."
        )

    def to_dict(self) -> dict:
        return {
            "trajectories": self.trajectories,
            "legal": self.legal,
            "streams": [
                {"k": k, "count": c, "probability": p}
                for k, (c, p) in sorted(self.detectors.streams.items())
            ],
            "min_fired": self.min_fired,
            "max_length_bound": self.detectors.max_length,
            "grover_cost": self.grover_cost,
            "grover_cost_note": self.grover_cost_note,
        }


def run_cerny_machine(t: TspInstance, cap: int = ENUMERATION_CAP) -> MachineReport:
    kets = enumerate_trajectories(t, cap)
    legal = filter_legal(kets)
    expected = math.factorial(t.m - 1)
    if len(legal) != expected:
        raise CrossCheckError(f"{len(legal)} legal kets, expected (m-1)! = {expected}")
    bank = split_streams(legal, t.max_length_bound)
    return MachineReport(len(kets), len(legal), bank, grover_tour_cost(t.m))


def random_instance(
    m: int, rng: np.random.Generator, low: int = 1, high: int = 20, symmetric: bool = True
) -> TspInstance:
    d = rng.integers(low, high + 1, size=(m, m))
    if symmetric:
        d = np.triu(d, 1)
        d = d + d.T
    np.fill_diagonal(d, 0)
    return TspInstance(d, asymmetric=not symmetric)
