import itertools
import math

import numpy as np
import pytest

from greedyonline.blackwell import (
    BlackwellState,
    HedgeState,
    MarginalPolytope,
    OloState,
    algb_step,
    ftrl_next,
    hedge_step,
    project_K,
    proportional_response,
    q_for_dimension,
    saddle_response,
)
from greedyonline.apps.nsm import zeta_matrix


def grid_project_oracle(x, step=1e-3):
    """Brute-force projection onto K for d <= 3: scan a grid of K."""
    d = x.size
    axis = np.arange(-1.0, 0.0 + step / 2, step)
    best, best_d = None, np.inf
    for cand in itertools.product(axis, repeat=d):
        c = np.array(cand)
        if c @ c > 1.0 + 1e-12:
            continue
        dist = float(((c - x) ** 2).sum())
        if dist < best_d:
            best, best_d = c, dist
    return best


def test_project_K_examples():
    np.testing.assert_allclose(project_K(np.array([0.5, -2.0])), [0.0, -1.0])
    np.testing.assert_allclose(project_K(np.array([-0.3, -0.4])), [-0.3, -0.4])
    np.testing.assert_allclose(project_K(np.array([1.0, 1.0])), [0.0, 0.0])


def test_project_K_matches_grid_oracle():
    # the returned point must be feasible and at least as close as every grid
    # point of K; on a fine 2-d grid it must agree coordinatewise
    rng = np.random.default_rng(0)
    for _ in range(100):
        d = int(rng.integers(1, 4))
        x = rng.uniform(-2, 2, size=d)
        got = project_K(x)
        assert np.all(got <= 1e-12) and got @ got <= 1.0 + 1e-12
        want = grid_project_oracle(x, step=5e-2)
        assert ((got - x) ** 2).sum() <= ((want - x) ** 2).sum() + 1e-6
    for x in ([0.5, -2.0], [-1.5, -1.5], [0.2, -0.4]):
        got = project_K(np.array(x))
        want = grid_project_oracle(np.array(x), step=1e-3)
        assert np.abs(got - want).max() <= 1e-3 + 1e-6


def test_q_exponent_stays_in_range():
    for d in (1, 2, 4, 5, 6, 7, 8, 32, 1000):
        q = q_for_dimension(d)
        assert 1.0 < q <= 2.0


def test_ftrl_closed_form_examples():
    st = OloState.create(2, 1.0, 1)
    st.q_exponent, st.eta = 2.0, 1.0
    st.cum_loss = np.zeros(2)
    np.testing.assert_allclose(ftrl_next(st), [0.0, 0.0])
    st.cum_loss = np.array([1.0, 1.0])
    np.testing.assert_allclose(ftrl_next(st), [-1 / math.sqrt(2), -1 / math.sqrt(2)])
    st.cum_loss = np.array([-1.0, 1.0])
    np.testing.assert_allclose(ftrl_next(st), [0.0, -1.0])


def test_ftrl_matches_grid_search_for_small_q():
    # independent oracle: exhaustive grid over K
    rng = np.random.default_rng(1)
    for _ in range(8):
        d = 2
        st = OloState.create(d, 1.0, 100)
        st.q_exponent = 1.5
        st.cum_loss = rng.uniform(-3, 3, size=d)
        got = ftrl_next(st)
        f_got = float(st.cum_loss @ got) + 0.5 * np.linalg.norm(got, ord=1.5) ** 2 / st.eta
        best = np.inf
        axis = np.arange(-1.0, 0.001, 0.005)
        for cand in itertools.product(axis, repeat=d):
            c = np.array(cand)
            if c @ c > 1.0:
                continue
            val = float(st.cum_loss @ c) + 0.5 * np.linalg.norm(c, ord=1.5) ** 2 / st.eta
            best = min(best, val)
        assert f_got <= best + 1e-4


def test_proportional_response():
    np.testing.assert_allclose(
        proportional_response(np.array([-0.2, -0.8])), [0.2, 0.8]
    )
    np.testing.assert_allclose(proportional_response(np.zeros(2)), [0.5, 0.5])


def test_proportional_identity_pure_form():
    # <w, theta^T y 1 - y> = 0 for w in K, any y
    rng = np.random.default_rng(2)
    for d in (2, 8, 32):
        for _ in range(1000 // 3 + 1):
            w = project_K(rng.uniform(-1, 1, size=d))
            theta = proportional_response(w)
            y = rng.random(d)
            p = float(theta @ y) - y
            assert abs(float(w @ p)) <= 1e-12


def test_algb_step_first_query_uniform():
    st = BlackwellState.create(d=4, D_p=1.0, horizon=10)
    np.testing.assert_allclose(st.current_theta, np.full(4, 0.25))


def test_algb_step_concentrates_on_shortfall():
    st = BlackwellState.create(d=2, D_p=1.0, horizon=10)
    theta = algb_step(st, np.array([-1.0, 1.0]))
    # coordinate 1 fell short, so the response concentrates there
    assert theta[0] == pytest.approx(1.0)


def test_algb_empirical_approachability_bound():
    # adversary plays constant y; bound shape from the engine contract
    T, d = 10_000, 2
    st = BlackwellState.create(d=d, D_p=1.0, horizon=T)
    y = np.array([0.9, 0.1])
    cum = np.zeros(d)
    for _ in range(T):
        th = st.current_theta
        p = float(th @ y) - y
        cum += p
        algb_step(st, p)
    dinf = max(0.0, -(cum / T).min())
    assert dinf <= 3.0 * 1.0 * math.sqrt(math.log(2) / T)


def test_saddle_m1_trivial():
    assert saddle_response(np.array([-0.5]), MarginalPolytope(1)) == pytest.approx([1.0])


def brute_saddle_value(u, theta, m, steps):
    grid = np.linspace(-1, 1, steps)
    best = -np.inf
    for a_rest in itertools.product(grid, repeat=m - 1):
        alpha = np.array((0.0,) + a_rest)
        for b_rest in itertools.product(grid, repeat=m - 1):
            beta = np.array(b_rest + (0.0,))
            if np.any(np.diff(alpha) - np.diff(beta) < -1e-12):
                continue
            inner = zeta_matrix(alpha, beta) @ theta - 0.5 * float(
                theta @ (alpha + beta)
            )
            best = max(best, float(u @ inner))
    return best


def test_saddle_certified_against_grid_oracle():
    rng = np.random.default_rng(3)
    for m in (2, 3):
        poly = MarginalPolytope(m)
        for _ in range(15):
            w = -rng.random(m)
            theta = saddle_response(w, poly)
            u = w / w.sum()
            val = brute_saddle_value(u, theta, m, steps=9 if m == 2 else 5)
            assert val <= 1e-6


def test_saddle_uniform_theta_oracle_check():
    # m=2, u=(0.5, 0.5): compare against exhaustive theta grid x A_2 vertices
    poly = MarginalPolytope(2)
    u = np.array([0.5, 0.5])
    theta = saddle_response(np.array([-0.5, -0.5]), poly)
    vertices = [(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]

    def val(th):
        best = -np.inf
        for a2, b1 in vertices:
            alpha = np.array([0.0, a2])
            beta = np.array([b1, 0.0])
            inner = zeta_matrix(alpha, beta) @ th - 0.5 * float(th @ (alpha + beta))
            best = max(best, float(u @ inner))
        return best

    got = val(theta)
    grid_best = min(val(np.array([s, 1 - s])) for s in np.arange(0, 1.0001, 0.01))
    assert got <= grid_best + 1e-9
    assert got <= 1e-6


def test_hedge_stays_uniform_on_equal_rewards():
    st = HedgeState.create(3, 100)
    for _ in range(10):
        theta = hedge_step(st, np.array([0.4, 0.4, 0.4]))
    np.testing.assert_allclose(theta, np.full(3, 1 / 3))


def test_hedge_concentrates():
    T = 100
    st = HedgeState.create(2, T)
    for _ in range(T):
        theta = hedge_step(st, np.array([1.0, 0.0]))
    # closed form: e^(rate*T) / (e^(rate*T) + 1)
    expect = 1.0 / (1.0 + math.exp(-st.rate * T))
    assert theta[0] == pytest.approx(expect, abs=1e-12)
    assert theta[0] > 0.99


def test_hedge_regret_bound_on_random_streams():
    rng = np.random.default_rng(4)
    for m in (2, 5):
        T = 2000
        st = HedgeState.create(m, T)
        total = 0.0
        cum = np.zeros(m)
        theta = st.current_theta
        for _ in range(T):
            r = rng.random(m)
            total += float(theta @ r)
            cum += r
            theta = hedge_step(st, r)
        regret = cum.max() - total
        assert regret <= math.sqrt(T * math.log(m) / 2) + 1


def test_hedge_and_algb_regret_within_2x():
    # engine cross-check on identical pure-form streams
    rng = np.random.default_rng(5)
    ratios = []
    for seed in range(5):
        d, T = 8, 4096
        stream = np.random.default_rng(seed).random((T, d))
        # hedge
        hs = HedgeState.create(d, T)
        th = hs.current_theta
        hedge_total = 0.0
        for t in range(T):
            hedge_total += float(th @ stream[t])
            th = hedge_step(hs, stream[t])
        # blackwell
        bs = BlackwellState.create(d=d, D_p=1.0, horizon=T)
        algb_total = 0.0
        for t in range(T):
            th = bs.current_theta
            algb_total += float(th @ stream[t])
            algb_step(bs, float(th @ stream[t]) - stream[t])
        best = stream.sum(axis=0).max()
        r_hedge = max(best - hedge_total, 1e-9)
        r_algb = max(best - algb_total, 1e-9)
        ratios.append(r_algb / r_hedge)
    mean_ratio = float(np.mean(ratios))
    assert 0.5 <= mean_ratio <= 2.0
