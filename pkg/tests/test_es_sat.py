import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from npduel.cnf import CnfFormula, evaluate, random_ksat
from npduel.errors import InputError
from npduel.es_sat import (
    EsConfig,
    EsIndividual,
    decode,
    initial_population,
    mutate,
    recombine,
    run_es,
    step,
    transform_fitness,
    transform_fitness_batch,
)


def reference_fitness(clauses, y):
    """Direct transcription: positive literal (y-1)^2, negated (y+1)^2; product per clause, sum over clauses."""
    total = 0.0
    for c in clauses:
        term = 1.0
        for lit in c:
            v = y[abs(lit) - 1]
            term *= (v - 1) ** 2 if lit > 0 else (v + 1) ** 2
        total += term
    return total


class FixedNormals:
    """Stand-in generator returning scripted standard normals."""

    def __init__(self, sigma_draw, object_draws):
        self.sigma_draw = sigma_draw
        self.object_draws = np.asarray(object_draws, dtype=float)

    def standard_normal(self, size=None):
        return self.sigma_draw if size is None else self.object_draws[:size]


class TestTransform:
    @pytest.mark.parametrize(
        "y, expected", [((1, -1, 1), 0.0), ((1, 1, 1), 16.0), ((-1, -1, -1), 0.0)]
    )
    def test_sigma_corners(self, sigma, y, expected):
        assert transform_fitness(sigma, y) == expected

    def test_length_mismatch(self, sigma):
        with pytest.raises(InputError):
            transform_fitness(sigma, [1.0, 2.0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_matches_reference_and_nonnegative(self, n, seed):
        rng = np.random.default_rng(seed)
        f = CnfFormula.from_ints(
            n, [[int(v) * int(s) for v, s in zip(rng.integers(1, n + 1, size=k), rng.choice([-1, 1], size=k))]
                for k in rng.integers(1, 5, size=int(rng.integers(1, 12)))]
        )
        y = rng.normal(scale=2.0, size=(5, n))
        got = transform_fitness_batch(f, y)
        assert np.all(got >= 0)
        for row, value in zip(y, got):
            assert value == pytest.approx(reference_fitness(f.to_ints(), row), rel=1e-12)
            assert transform_fitness(f, row) == pytest.approx(value, rel=1e-12)

    def test_corner_zero_iff_satisfied(self):
        rng = np.random.default_rng(1)
        for n in range(1, 9):
            f = random_ksat(n, 3 * n, rng, k=min(3, n))
            for corner in itertools.product([-1.0, 1.0], repeat=n):
                assert (transform_fitness(f, corner) == 0.0) == evaluate(f, decode(corner))


class TestDecode:
    def test_examples(self):
        assert decode([0.3, -0.7, 1.2]) == (True, False, True)
        assert decode([0, 0, 0]) == (True, True, True)
        assert decode([-1, -1, -1]) == (False, False, False)


class TestMutate:
    def test_sigma_clamped_at_cap(self):
        out = mutate(EsIndividual(np.zeros(3), 3.0), EsConfig(), FixedNormals(0.7, [1, 2, 3]))
        assert out.sigma == 3.0
        assert np.allclose(out.y, [3, 6, 9])

    def test_lognormal_rule(self):
        cfg = EsConfig(tau=0.5)
        out = mutate(EsIndividual(np.ones(2), 1.0), cfg, FixedNormals(-1.0, [0.5, -0.5]))
        assert out.sigma == pytest.approx(math.exp(-0.5))
        assert np.allclose(out.y, 1 + out.sigma * np.array([0.5, -0.5]))

    def test_sigma_floor(self):
        cfg = EsConfig(tau=10.0)
        out = mutate(EsIndividual(np.ones(2), 1e-8), cfg, FixedNormals(-5.0, [0, 0]))
        assert out.sigma == cfg.sigma_floor

    def test_tau_zero_keeps_sigma(self, rng):
        ind = EsIndividual(np.zeros(4), 0.37)
        for _ in range(20):
            assert mutate(ind, EsConfig(tau=0.0), rng).sigma == 0.37

    def test_reproducible(self):
        ind = EsIndividual(np.zeros(5), 1.0)
        a = mutate(ind, EsConfig(), np.random.default_rng(9))
        b = mutate(ind, EsConfig(), np.random.default_rng(9))
        assert a.sigma == b.sigma and np.array_equal(a.y, b.y)


class TestRecombine:
    def test_identical_parents(self, rng):
        p = EsIndividual(np.array([0.1, -0.2, 0.3]), 1.2)
        child = recombine((p, p), rng)
        assert np.array_equal(child.y, p.y) and child.sigma == 1.2

    def test_sigma_mean(self, rng):
        child = recombine((EsIndividual(np.zeros(2), 1.0), EsIndividual(np.ones(2), 2.0)), rng)
        assert child.sigma == 1.5

    def test_genes_come_from_parents(self, rng):
        a, b = EsIndividual(np.arange(6.0), 1.0), EsIndividual(-np.arange(6.0) - 10, 1.0)
        seen = set()
        for _ in range(200):
            child = recombine((a, b), rng)
            for i, g in enumerate(child.y):
                assert g in (a.y[i], b.y[i])
                seen.add((i, g == a.y[i]))
        assert len(seen) == 12  # every gene was taken from each parent at some point


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"mu": 100, "lam": 100}, {"sigma_cap": 0}, {"sigma_init": 4.0},
         {"recombination": "blend"}, {"max_generations": -1}, {"restart_window": 0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InputError):
            EsConfig(**kwargs)

    def test_defaults(self):
        cfg = EsConfig()
        assert (cfg.mu, cfg.lam, cfg.sigma_cap, cfg.init_range) == (15, 100, 3.0, (-1.0, 1.0))
        assert cfg.tau_for(16) == 0.25


class TestStep:
    @pytest.mark.parametrize("mode", ["discrete_object_intermediate_sigma", "none"])
    def test_comma_selection(self, mode, rng):
        f = random_ksat(10, 40, rng)
        cfg = EsConfig(recombination=mode)
        pop = initial_population(f, cfg, rng)
        assert len(pop) == 15 and np.all((pop.y >= -1) & (pop.y <= 1))
        for g in range(1, 30):
            result = step(pop, f, cfg, rng)
            assert result.offspring_y.shape == (100, 10)
            assert np.array_equal(result.parents.y, result.offspring_y[result.selected])
            assert np.array_equal(result.parents.sigma, result.offspring_sigma[result.selected])
            assert np.all(result.parents.fitness <= np.sort(result.offspring_fitness)[14])
            assert len(result.parents) == 15 and result.parents.generation == g
            assert np.all(result.offspring_sigma <= 3.0)
            pop = result.parents


class TestRunEs:
    def test_sigma_formula_many_seeds(self, sigma):
        solved = 0
        for seed in range(1, 21):
            result = run_es(sigma, EsConfig(), seed)
            solved += result.solved
            if result.solved:
                assert evaluate(sigma, result.assignment)
        assert solved >= 19

    def test_contradiction_exhausts_budget(self, contradiction):
        result = run_es(contradiction, EsConfig(max_generations=120), 3)
        assert not result.solved and result.assignment is None
        assert result.generations == 120
        assert len(result.best_fitness_per_generation) == 121

    def test_zero_generations_checks_initializer(self, rng):
        f = random_ksat(20, 91, np.random.default_rng(2))
        result = run_es(f, EsConfig(max_generations=0), 5)
        assert result.generations == 0 and result.evaluations == 15
        assert len(result.best_fitness_per_generation) == 1

    def test_invariants_every_generation(self):
        f = random_ksat(20, 91, np.random.default_rng(11))
        seen = {"restarts": 0, "generations": 0}

        def check(pop, result):
            assert len(pop) == 15
            assert np.all(pop.sigma <= 3.0) and np.all(pop.sigma > 0)
            if result is None:
                return
            seen["generations"] += 1
            assert result.offspring_y.shape[0] == 100
            if result.restarted:
                seen["restarts"] += 1
            else:
                assert np.array_equal(pop.y, result.offspring_y[result.selected])

        result = run_es(f, EsConfig(max_generations=300), 1, check)
        assert seen["generations"] == result.generations
        assert seen["restarts"] == result.restarts

    def test_restart_disabled(self):
        f = random_ksat(20, 91, np.random.default_rng(11))
        result = run_es(f, EsConfig(max_generations=200, restart_window=None), 1)
        assert result.restarts == 0

    def test_deterministic(self, rng):
        f = random_ksat(12, 50, rng)
        a = run_es(f, EsConfig(max_generations=150), 42)
        b = run_es(f, EsConfig(max_generations=150), 42)
        assert a.to_dict() == b.to_dict()

    def test_record(self, sigma):
        d = run_es(sigma, EsConfig(), 7).to_dict()
        assert set(d) >= {"solved", "assignment", "generations", "evaluations",
                          "best_fitness_per_generation", "config_echo", "seed"}
        assert d["seed"] == 7 and d["config_echo"]["mu"] == 15
