from collections import Counter

import numpy as np
import pytest

from oashrink.ga import GaConfig, Population, RunReport, run_ga, steady_state_step
from oashrink.oa import OrthogonalArray, is_orthogonal_array, parity_check_array, remove_rows, replicate_and_shuffle
from oashrink.operators import random_balanced_mask
from oashrink.oracle import verify_ga_result


def make_population(fitness, n=8, p=4, seed=0):
    rng = np.random.default_rng(seed)
    masks = np.array([random_balanced_mask(n, p, rng) for _ in fitness])
    return Population(masks, np.array(fitness, dtype=float))


SMALL = dict(population_size=3, tournament_size=3)


class TestConfig:
    def test_defaults(self):
        c = GaConfig()
        assert (c.population_size, c.tournament_size, c.mutation_probability, c.evaluation_budget) == (500, 3, 0.2, 100_000)
        assert c.crossover_variant == "map_of_ones" and c.minkowski_exponent == 2.0
        assert not c.replace_only_if_better

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(population_size=2),
            dict(tournament_size=501),
            dict(mutation_probability=1.5),
            dict(evaluation_budget=10),
            dict(crossover_variant="one_point"),
            dict(minkowski_exponent=0.5),
            dict(seed=-1),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            GaConfig(**kwargs)

    def test_dict_round_trip(self):
        c = GaConfig(seed=99, crossover_variant="counter_based")
        assert GaConfig.from_dict(c.to_dict()) == c


class TestSteadyStateStep:
    def test_zero_member_never_replaced(self):
        cfg = GaConfig(population_size=5, evaluation_budget=5, mutation_probability=0.5)
        rng = np.random.default_rng(0)
        pop = make_population([0.0, 3.0, 3.0, 4.0, 5.0])
        elite = pop.masks[0].copy()
        for _ in range(300):
            replaced, _ = steady_state_step(pop, lambda m: 6.0, cfg, rng)
            assert replaced != 0
        assert np.array_equal(pop.masks[0], elite)

    def test_child_replaces_worst_unconditionally(self):
        cfg = GaConfig(evaluation_budget=3, **SMALL)
        pop = make_population([1.0, 2.0, 3.0])
        replaced, value = steady_state_step(pop, lambda m: 100.0, cfg, np.random.default_rng(0))
        assert replaced == 2 and value == 100.0
        assert pop.fitness.tolist() == [1.0, 2.0, 100.0]
        assert pop.evaluations == 1

    def test_replace_only_if_better(self):
        cfg = GaConfig(evaluation_budget=3, replace_only_if_better=True, **SMALL)
        pop = make_population([1.0, 2.0, 3.0])
        replaced, _ = steady_state_step(pop, lambda m: 100.0, cfg, np.random.default_rng(0))
        assert replaced == -1 and pop.fitness.tolist() == [1.0, 2.0, 3.0]
        assert pop.evaluations == 1
        replaced, _ = steady_state_step(pop, lambda m: 0.5, cfg, np.random.default_rng(0))
        assert replaced == 2 and pop.fitness.tolist() == [1.0, 2.0, 0.5]

    def test_uniform_tie_break(self):
        cfg = GaConfig(evaluation_budget=3, **SMALL)
        rng = np.random.default_rng(4)
        hits = Counter()
        for _ in range(3000):
            pop = make_population([2.0, 2.0, 2.0])
            replaced, _ = steady_state_step(pop, lambda m: 2.0, cfg, rng)
            hits[replaced] += 1
        assert set(hits) == {0, 1, 2}
        assert all(800 < c < 1200 for c in hits.values())

    def test_child_keeps_weight(self):
        cfg = GaConfig(population_size=10, evaluation_budget=10, mutation_probability=1.0)
        pop = make_population([float(i) for i in range(10)], n=16, p=8)
        rng = np.random.default_rng(1)
        for _ in range(200):
            steady_state_step(pop, lambda m: 1.0, cfg, rng)
        assert (pop.masks.sum(axis=1) == 8).all()


class TestRunGa:
    def test_t2_instance(self, t2_instance):
        r = run_ga(t2_instance, 1, GaConfig(seed=1))
        assert r.success and r.best_fitness == 0.0
        assert is_orthogonal_array(remove_rows(t2_instance, r.best_mask))
        assert verify_ga_result(t2_instance, 1, r)

    def test_budget_equals_population(self):
        arr = replicate_and_shuffle(parity_check_array(4), 3, seed=0)
        cfg = GaConfig(population_size=20, evaluation_budget=20, seed=3)
        r = run_ga(arr, 1, cfg)
        assert r.evaluations_used == 20
        assert r.best_mask.weight == 32

    def test_budget_accounting(self):
        arr = replicate_and_shuffle(parity_check_array(4), 4, seed=0)
        cfg = GaConfig(population_size=50, evaluation_budget=400, seed=5)
        r = run_ga(arr, 2, cfg)
        assert r.evaluations_used <= 400
        if not r.success:
            assert r.evaluations_used == 400

    def test_no_early_stop_spends_budget(self, t2_instance):
        r = run_ga(t2_instance, 1, GaConfig(population_size=20, evaluation_budget=300, early_stop=False))
        assert r.success and r.evaluations_used == 300

    def test_trace_non_increasing(self):
        arr = replicate_and_shuffle(parity_check_array(4), 4, seed=0)
        r = run_ga(arr, 2, GaConfig(population_size=100, evaluation_budget=3000, seed=2))
        idx = [i for i, _ in r.fitness_trace]
        vals = [f for _, f in r.fitness_trace]
        assert idx == sorted(idx) and idx[0] == 1
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] == r.best_fitness

    @pytest.mark.parametrize("variant", ["map_of_ones", "counter_based"])
    def test_deterministic(self, variant):
        arr = replicate_and_shuffle(parity_check_array(4), 3, seed=0)
        cfg = GaConfig(population_size=60, evaluation_budget=2000, seed=17, crossover_variant=variant)
        a, b = run_ga(arr, 2, cfg), run_ga(arr, 2, cfg)
        assert a.to_dict() == b.to_dict()

    def test_rejects_non_binary(self):
        arr = OrthogonalArray([[a, b] for a in range(3) for b in range(3)] * 2, alphabet=3, strength=2)
        with pytest.raises(ValueError, match="binary"):
            run_ga(arr, 1, GaConfig(population_size=5, evaluation_budget=5))

    def test_rejects_bad_target(self, t2_instance):
        with pytest.raises(ValueError):
            run_ga(t2_instance, 2)

    def test_report_round_trip(self, t3_instance):
        r = run_ga(t3_instance, 1, GaConfig(population_size=30, evaluation_budget=500, seed=8))
        assert RunReport.from_dict(r.to_dict()) == r
