"""(mu, lambda) evolution strategy for SAT on a real-valued relaxation.

Each positive literal ``x_i`` becomes ``(y_i - 1)**2`` and each negated
literal becomes ``(y_i + 1)**2``.  A clause (a disjunction) is the product
of its literal terms and the formula (a conjunction) is the sum of its
clause values.  The result is non-negative and vanishes at a corner
``y in {-1, +1}**n`` exactly when that corner, read with ``+1`` as true,
satisfies the formula.

The strategy uses one self-adapted step size per individual (lognormal
rule, clamped to ``[sigma_floor, sigma_cap]``), optional discrete/
intermediate recombination, and comma selection.  The landscape has
non-corner local minima where sigma collapses, so a run that stops
improving is re-initialized inside the same generation budget.  Success
is declared only after the best individual's decoded assignment passes
:func:`npduel.cnf.evaluate`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from npduel.cnf import Assignment, CnfFormula, evaluate
from npduel.errors import InputError

__all__ = [
    "RECOMBINATION_MODES",
    "EsConfig",
    "EsIndividual",
    "EsPopulation",
    "EsStep",
    "EsResult",
    "transform_fitness",
    "transform_fitness_batch",
    "decode",
    "mutate",
    "recombine",
    "initial_population",
    "step",
    "run_es",
]

RECOMBINATION_MODES = ("discrete_object_intermediate_sigma", "none")


@dataclass(frozen=True)
class EsConfig:
    mu: int = 15
    lam: int = 100
    sigma_cap: float = 3.0
    sigma_floor: float = 1e-8
    sigma_init: float = 1.0
    init_range: tuple[float, float] = (-1.0, 1.0)
    tau: Optional[float] = None  # None -> 1/sqrt(n)
    max_generations: int = 1000
    recombination: str = "discrete_object_intermediate_sigma"
    # re-initialize after this many generations without a relative gain of restart_tol
    restart_window: Optional[int] = 50
    restart_tol: float = 0.01

    def __post_init__(self):
        if not 0 < self.mu < self.lam:
            raise InputError(f"need 0 < mu < lambda, got mu={self.mu}, lambda={self.lam}")
        if self.sigma_cap <= 0 or not 0 < self.sigma_floor <= self.sigma_cap:
            raise InputError("need 0 < sigma_floor <= sigma_cap")
        if not 0 < self.sigma_init <= self.sigma_cap:
            raise InputError("initial sigma must lie in (0, sigma_cap]")
        if self.max_generations < 0:
            raise InputError("max_generations must be >= 0")
        if self.recombination not in RECOMBINATION_MODES:
            raise InputError(
                f"recombination must be one of {RECOMBINATION_MODES}, got {self.recombination!r}"
            )
        if self.recombination != "none" and self.mu < 2:
            raise InputError("recombination needs at least two parents")
        if self.restart_window is not None and self.restart_window < 1:
            raise InputError("restart_window must be >= 1 or None")

    def tau_for(self, n: int) -> float:
        return 1.0 / math.sqrt(n) if self.tau is None else self.tau


@dataclass
class EsIndividual:
    y: np.ndarray
    sigma: float


@dataclass
class EsPopulation:
    y: np.ndarray  # (mu, n)
    sigma: np.ndarray  # (mu,)
    fitness: np.ndarray  # (mu,)
    generation: int = 0

    def __len__(self) -> int:
        return self.y.shape[0]

    def individuals(self) -> list[EsIndividual]:
        return [EsIndividual(self.y[i].copy(), float(self.sigma[i])) for i in range(len(self))]


@dataclass
class EsStep:
    """One generation: the offspring pool and which rows became parents.

    ``restarted`` marks a generation whose selected parents were discarded
    for a fresh random population; ``parents`` is then that population.
    """

    parents: EsPopulation
    offspring_y: np.ndarray
    offspring_sigma: np.ndarray
    offspring_fitness: np.ndarray
    selected: np.ndarray
    restarted: bool = False


def _literal_tables(f: CnfFormula):
    var, sign, valid = f.clause_arrays()
    return var, sign, ~valid


def _fitness_rows(tables, y: np.ndarray) -> np.ndarray:
    var, sign, pad = tables
    terms = (y[:, var] - sign) ** 2  # (rows, clauses, width)
    terms[:, pad] = 1.0
    return terms.prod(axis=2).sum(axis=1)


def transform_fitness_batch(f: CnfFormula, y: np.ndarray) -> np.ndarray:
    """Row-wise :func:`transform_fitness` for an array of shape (rows, n)."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or y.shape[1] != f.num_vars:
        raise InputError(f"expected shape (rows, {f.num_vars}), got {y.shape}")
    return _fitness_rows(_literal_tables(f), y)


def transform_fitness(f: CnfFormula, y) -> float:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (f.num_vars,):
        raise InputError(f"expected {f.num_vars} object parameters, got shape {y.shape}")
    return float(_fitness_rows(_literal_tables(f), y[None, :])[0])


def decode(y) -> Assignment:
    """``y_i >= 0`` decodes to true (0 itself counts as true)."""
    return tuple(bool(v >= 0.0) for v in np.asarray(y, dtype=np.float64))


def _adapt_sigma(sigma, g, tau: float, cfg: EsConfig):
    return np.clip(sigma * np.exp(tau * g), cfg.sigma_floor, cfg.sigma_cap)


def mutate(
    ind: EsIndividual, cfg: EsConfig, rng: np.random.Generator, tau: Optional[float] = None
) -> EsIndividual:
    """Lognormal step-size update, then an isotropic Gaussian step with the new sigma."""
    y = np.asarray(ind.y, dtype=np.float64)
    tau = cfg.tau_for(y.shape[0]) if tau is None else tau
    sigma = float(_adapt_sigma(ind.sigma, rng.standard_normal(), tau, cfg))
    return EsIndividual(y + sigma * rng.standard_normal(y.shape[0]), sigma)


def recombine(
    parents: tuple[EsIndividual, EsIndividual], rng: np.random.Generator
) -> EsIndividual:
    """Discrete recombination of object parameters, intermediate of sigma."""
    a, b = parents
    ya, yb = np.asarray(a.y, dtype=np.float64), np.asarray(b.y, dtype=np.float64)
    take_b = rng.random(ya.shape[0]) < 0.5
    return EsIndividual(np.where(take_b, yb, ya), 0.5 * (a.sigma + b.sigma))


def initial_population(f: CnfFormula, cfg: EsConfig, rng: np.random.Generator) -> EsPopulation:
    lo, hi = cfg.init_range
    y = rng.uniform(lo, hi, size=(cfg.mu, f.num_vars))
    sigma = np.full(cfg.mu, cfg.sigma_init)
    return EsPopulation(y, sigma, transform_fitness_batch(f, y), 0)


def _vary(pop: EsPopulation, cfg: EsConfig, rng: np.random.Generator, tau: float):
    # all draws happen here, in a fixed order, before any evaluation
    mu, n = pop.y.shape
    lam = cfg.lam
    if cfg.recombination == "none":
        pick = rng.integers(mu, size=lam)
        y, sigma = pop.y[pick], pop.sigma[pick]
    else:
        first = rng.integers(mu, size=lam)
        second = rng.integers(mu - 1, size=lam)
        second += second >= first  # two distinct parents
        take_second = rng.random((lam, n)) < 0.5
        y = np.where(take_second, pop.y[second], pop.y[first])
        sigma = 0.5 * (pop.sigma[first] + pop.sigma[second])
    sigma = _adapt_sigma(sigma, rng.standard_normal(lam), tau, cfg)
    y = y + sigma[:, None] * rng.standard_normal((lam, n))
    return y, sigma


def step(
    pop: EsPopulation,
    f: CnfFormula,
    cfg: EsConfig,
    rng: np.random.Generator,
    _tables=None,
) -> EsStep:
    """Produce lambda offspring and keep the best mu of them (parents are discarded)."""
    tables = _literal_tables(f) if _tables is None else _tables
    y, sigma = _vary(pop, cfg, rng, cfg.tau_for(f.num_vars))
    fitness = _fitness_rows(tables, y)
    selected = np.argsort(fitness, kind="stable")[: cfg.mu]
    parents = EsPopulation(y[selected], sigma[selected], fitness[selected], pop.generation + 1)
    return EsStep(parents, y, sigma, fitness, selected)


@dataclass
class EsResult:
    solved: bool
    assignment: Optional[Assignment]
    generations: int
    evaluations: int
    best_fitness_per_generation: list[float]
    config: EsConfig
    seed: Optional[int] = None
    restarts: int = 0
    final: Optional[EsPopulation] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["init_range"] = list(cfg["init_range"])
        return {
            "solved": self.solved,
            "assignment": None if self.assignment is None else [int(v) for v in self.assignment],
            "generations": self.generations,
            "evaluations": self.evaluations,
            "best_fitness_per_generation": [float(v) for v in self.best_fitness_per_generation],
            "restarts": self.restarts,
            "config_echo": cfg,
            "seed": self.seed,
        }


def run_es(
    f: CnfFormula,
    cfg: EsConfig = EsConfig(),
    rng: Union[np.random.Generator, int, None] = None,
    callback: Optional[Callable[[EsPopulation, Optional[EsStep]], None]] = None,
) -> EsResult:
    """Run until the best individual decodes to a solution or the budget is spent.

    The initial population is generation 0 and is checked before any
    variation, so ``max_generations=0`` still tests the best initializer.
    ``callback(population, step)`` is called once per generation, with
    ``step=None`` for generation 0.
    """
    seed = rng if isinstance(rng, (int, np.integer)) else None
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    tables = _literal_tables(f)

    pop = initial_population(f, cfg, rng)
    evaluations = cfg.mu
    trace = [float(pop.fitness.min())]
    if callback:
        callback(pop, None)

    def check(p: EsPopulation) -> Optional[Assignment]:
        candidate = decode(p.y[int(np.argmin(p.fitness))])
        return candidate if evaluate(f, candidate) else None

    found = check(pop)
    reference, improved_at, restarts = float(pop.fitness.min()), 0, 0
    while found is None and pop.generation < cfg.max_generations:
        result = step(pop, f, cfg, rng, tables)
        pop = result.parents
        evaluations += cfg.lam
        best = float(pop.fitness[0])
        found = check(pop)
        if best < reference * (1.0 - cfg.restart_tol):
            reference, improved_at = best, pop.generation
        elif (
            found is None
            and cfg.restart_window is not None
            and pop.generation - improved_at >= cfg.restart_window
        ):
            pop = initial_population(f, cfg, rng)
            pop.generation = result.parents.generation
            evaluations += cfg.mu
            reference, improved_at = float(pop.fitness.min()), pop.generation
            best = min(best, reference)
            restarts += 1
            result.parents, result.restarted = pop, True
            found = check(pop)
        trace.append(best)
        if callback:
            callback(pop, result)

    return EsResult(
        found is not None, found, pop.generation, evaluations, trace, cfg,
        None if seed is None else int(seed), restarts, pop,
    )
