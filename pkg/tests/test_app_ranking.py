import itertools

import numpy as np
import pytest

from greedyonline.apps import ranking
from greedyonline.apps.monotone_sm import CoverageFunction
from greedyonline.core import offline_ig_run, validate_distribution
from greedyonline.errors import BadParams


def coverage_levels_fixture():
    # n=2, lambda=(0.5, 0.5), f1 = f2 with f({1})=0.7, f({2})=0.4, f({1,2})=0.8
    inc = np.array([[1, 1, 0, 0], [0, 0, 1, 0]], dtype=bool)
    w = np.array([0.3, 0.4, 0.4, 0.0])  # f({1}) = 0.7, f({2}) = 0.4, union 1.1 -> cap
    # use explicit weights achieving the stated values:
    # f({1}) = 0.7, f({2}) = 0.4, f({1,2}) = 0.8 -> overlap of 0.3
    inc = np.array([[1, 1, 0], [0, 1, 1]], dtype=bool)
    w = np.array([0.4, 0.3, 0.1])
    cov = CoverageFunction(inc, w)
    assert cov((0,)) == pytest.approx(0.7)
    assert cov((1,)) == pytest.approx(0.4)
    assert cov((0, 1)) == pytest.approx(0.8)
    levels = [ranking.CoverageLevel(cov), ranking.CoverageLevel(cov)]
    return ranking.SequentialObjective([0.5, 0.5], levels)


def test_eval_ranking_example():
    obj = coverage_levels_fixture()
    assert ranking.eval_ranking(obj, (1, 2)) == pytest.approx(0.75)
    assert ranking.eval_ranking(obj, (0, 0)) == 0.0
    # brute force confirms (1, 2) optimal over all 2-slot rankings
    best = max(
        itertools.product(range(3), repeat=2), key=lambda p: ranking.eval_ranking(obj, p)
    )
    assert ranking.eval_ranking(obj, best) == pytest.approx(
        ranking.eval_ranking(obj, (1, 2))
    )


def test_rank_payoff_examples():
    obj = coverage_levels_fixture()
    y = obj.position_marginals(())
    np.testing.assert_allclose(y, [0.5 * 0.7 + 0.5 * 0.7, 0.5 * 0.4 + 0.5 * 0.4])
    p = ranking.rank_payoff(np.array([1.0, 0.0]), (), obj)
    np.testing.assert_allclose(p, [0.0, 0.3])
    # point mass on the argmax makes the payoff nonnegative
    assert p.min() >= 0
    # constant objective gives the zero payoff
    zero_levels = [ranking.FerreiraLevel(np.zeros((1, 2)), np.ones(1))] * 2
    zero_obj = ranking.SequentialObjective([0.5, 0.5], zero_levels)
    np.testing.assert_allclose(
        ranking.rank_payoff(np.array([0.5, 0.5]), (), zero_obj), np.zeros(2)
    )


def test_explore_sample_formula():
    rng = np.random.default_rng(0)
    theta = np.array([0.5, 0.5])
    for _ in range(30):
        s = ranking.rank_explore_sample(theta, (), rng)
        j = s.z_exp[0] - 1
        want = 2 * (0.5 * np.ones(2) - np.eye(2)[j])
        np.testing.assert_allclose(s.w_exp, want)


def test_unbiasedness_exact_over_support():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        obj = ranking.random_population(n, rng)
        prefix = tuple(
            int(rng.integers(1, n + 1)) for _ in range(int(rng.integers(0, n)))
        )
        theta = validate_distribution(rng.random(n) + 1e-6)
        est = np.zeros(n)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            w = n * (theta[j] * np.ones(n) - e)
            est += ranking.eval_ranking(obj, prefix + (j + 1,)) * w / n
        np.testing.assert_allclose(
            est, ranking.rank_payoff(theta, prefix, obj), atol=1e-12
        )


def test_ferreira_population_values():
    # single user, q = (0.5, 0.5), window 2
    obj = ranking.sample_user_population(
        "ferreira",
        {"users": [{"q": [0.5, 0.5], "window": 2, "weight": 1.0}]},
        np.random.default_rng(0),
    )
    assert obj.levels[1].value(frozenset({1, 2})) == pytest.approx(0.75)
    assert ranking.eval_ranking(obj, (1, 2)) == pytest.approx(0.75)
    # all-zero click probabilities: objective identically zero
    obj0 = ranking.sample_user_population(
        "ferreira",
        {"users": [{"q": [0.0, 0.0], "window": 1, "weight": 1.0}]},
        np.random.default_rng(0),
    )
    for p in itertools.product(range(3), repeat=2):
        assert ranking.eval_ranking(obj0, p) == 0.0
    # q_i = 1 somewhere: any ranking showing i within the window clicks surely
    obj1 = ranking.sample_user_population(
        "ferreira",
        {"users": [{"q": [1.0, 0.2], "window": 1, "weight": 1.0}]},
        np.random.default_rng(0),
    )
    assert obj1.levels[0].value(frozenset({1})) == pytest.approx(1.0)


def test_bad_population_params():
    with pytest.raises(BadParams):
        ranking.sample_user_population(
            "ferreira",
            {"users": [{"q": [1.5, 0.0], "window": 1, "weight": 1.0}]},
            np.random.default_rng(0),
        )


def test_ferreira_kappa_monotone_submodular():
    rng = np.random.default_rng(2)
    for _ in range(5):
        n = int(rng.integers(2, 7))
        q = rng.random(n)

        def kappa(S):
            if not S:
                return 0.0
            return 1.0 - np.prod([1 - q[i] for i in S])

        subsets = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)]
        for S in subsets:
            for T in subsets:
                assert kappa(S | T) + kappa(S & T) <= kappa(S) + kappa(T) + 1e-12
                if S <= T:
                    assert kappa(S) <= kappa(T) + 1e-12


def test_offline_greedy_beats_half_opt():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        obj = ranking.random_population(n, rng)
        inst = ranking.make_instance(n)
        z = offline_ig_run(inst, obj, inst.exact_optimizer, rng)
        opt = max(
            ranking.eval_ranking(obj, p)
            for p in itertools.product(range(n + 1), repeat=n)
        )
        assert ranking.eval_ranking(obj, z) >= 0.5 * opt - 1e-9


def test_population_json_roundtrip():
    rng = np.random.default_rng(4)
    obj = ranking.random_population(3, rng)
    clone = ranking.population_from_json(ranking.population_to_json(obj))
    for p in itertools.product(range(4), repeat=3):
        assert ranking.eval_ranking(obj, p) == pytest.approx(
            ranking.eval_ranking(clone, p)
        )


def test_bernoulli_feedback_mean_matches_value():
    rng = np.random.default_rng(5)
    obj = ranking.random_population(3, rng)
    pi = (1, 2, 3)
    value = ranking.eval_ranking(obj, pi)
    draws = (rng.random(10_000) < value).mean()
    sigma = np.sqrt(value * (1 - value) / 10_000)
    assert abs(draws - value) <= 3 * sigma + 1e-12
