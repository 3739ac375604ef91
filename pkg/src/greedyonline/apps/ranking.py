"""Sequential submodular maximization for product ranking.

The objective is f(pi) = sum_i lambda_i f_i({pi_1..pi_i}) with monotone
submodular per-patience-level functions f_i.  Points are prefix tuples of
placed items (1-based item ids; 0 is the empty slot and never placed by the
greedy chain, though full rankings may carry zeros).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..core import (
    APP_TAGS,
    ExplorationSample,
    GreedyInstance,
    ObjectiveOracle,
    Point,
    sample_index,
)
from ..errors import BadParams
from .monotone_sm import CoverageFunction

GAMMA = 0.5
TAG = APP_TAGS["ranking"]


class FerreiraLevel:
    """One patience level of the independent-click user model.

    Users with attention window equal to this level click on an examined item
    i independently with probability q_{u,i}; the level value on a shown set
    S is the weighted average of 1 - prod_{i in S}(1 - q_{u,i}).
    """

    def __init__(self, click_probs: np.ndarray, user_weights: np.ndarray):
        q = np.atleast_2d(np.asarray(click_probs, dtype=float))
        w = np.asarray(user_weights, dtype=float)
        if np.any(q < 0) or np.any(q > 1):
            raise BadParams("click probabilities must lie in [0, 1]")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise BadParams("user weights must be a distribution")
        self.q = q
        self.w = w
        self.n = q.shape[1]

    def value(self, items: frozenset) -> float:
        if not items:
            return 0.0
        idx = [i - 1 for i in items]
        none_click = np.prod(1.0 - self.q[:, idx], axis=1)
        return float(self.w @ (1.0 - none_click))

    def marginals(self, items: frozenset) -> np.ndarray:
        """value(items u {j}) - value(items) for every 1-based item j."""
        if items:
            idx = [i - 1 for i in items]
            base = np.prod(1.0 - self.q[:, idx], axis=1)
        else:
            base = np.ones(self.q.shape[0])
        gain = self.q * base[:, None]  # users x items
        out = self.w @ gain
        out[[i - 1 for i in items]] = 0.0
        return out


class CoverageLevel:
    """A patience level backed by a weighted coverage set function."""

    def __init__(self, cov: CoverageFunction):
        self.cov = cov
        self.n = cov.n

    def value(self, items: frozenset) -> float:
        return self.cov(tuple(i - 1 for i in items))

    def marginals(self, items: frozenset) -> np.ndarray:
        out = self.cov.marginals(tuple(i - 1 for i in items))
        for i in items:
            out[i - 1] = 0.0
        return out


class SequentialObjective(ObjectiveOracle):
    """lambda-weighted stack of monotone submodular level functions."""

    name = "sequential"

    def __init__(self, lam: Sequence[float], levels: List):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0) or lam.sum() > 1.0 + 1e-9:
            raise BadParams("patience distribution must be nonnegative, sum <= 1")
        if len(levels) != lam.size:
            raise BadParams("one level function per patience level")
        self.lam = lam
        self.levels = levels
        self.n = lam.size

    def __call__(self, pi: Point) -> float:
        return eval_ranking(self, pi)

    def position_marginals(self, prefix: Point) -> np.ndarray:
        """y_j = f(prefix + j e_i) - f(prefix) for the next position i."""
        i = len(prefix) + 1
        shown = frozenset(p for p in prefix if p != 0)
        y = np.zeros(self.n)
        for a in range(i - 1, self.n):
            if self.lam[a] > 0:
                y += self.lam[a] * self.levels[a].marginals(shown)
        return y


def eval_ranking(obj: SequentialObjective, pi: Point) -> float:
    """Objective value of a (possibly partial) ranking; empty slots ignored."""
    total = 0.0
    shown: set = set()
    for i in range(obj.n):
        if i < len(pi) and pi[i] != 0:
            shown.add(pi[i])
        if obj.lam[i] > 0:
            total += obj.lam[i] * obj.levels[i].value(frozenset(shown))
    return total


def rank_payoff(theta: np.ndarray, prefix: Point, f: SequentialObjective) -> np.ndarray:
    y = f.position_marginals(prefix)
    return float(theta @ y) - y


def rank_local_update(theta: np.ndarray, prefix: Point, rng: np.random.Generator) -> Point:
    j = sample_index(theta, rng)
    return prefix + (j + 1,)


def rank_explore_sample(
    theta: np.ndarray, prefix: Point, rng: np.random.Generator
) -> ExplorationSample:
    n = theta.size
    j = int(rng.integers(n))
    e = np.zeros(n)
    e[j] = 1.0
    w = n * (theta[j] * np.ones(n) - e)
    return ExplorationSample(w, prefix + (j + 1,))


def rank_exact_optimizer(prefix: Point, f: SequentialObjective) -> np.ndarray:
    y = f.position_marginals(prefix)
    theta = np.zeros(y.size)
    theta[int(np.argmax(y))] = 1.0
    return theta


def sample_user_population(
    model: str, params: dict, rng: np.random.Generator
) -> SequentialObjective:
    """Build a sequential objective from a user-population model.

    ``ferreira``: params carry per-user click probabilities and attention
    windows; levels aggregate users by window.  ``asadpour``: params carry an
    explicit patience distribution plus arbitrary monotone submodular levels
    (coverage-backed here).
    """
    if model == "ferreira":
        users = params["users"]  # [{"q": [...], "window": k, "weight": w}]
        n = len(users[0]["q"])
        weights = np.array([u.get("weight", 1.0) for u in users], dtype=float)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise BadParams("user weights must be nonnegative with positive mass")
        weights = weights / weights.sum()
        lam = np.zeros(n)
        levels: List = []
        for i in range(1, n + 1):
            members = [k for k, u in enumerate(users) if u["window"] == i]
            mass = float(weights[members].sum()) if members else 0.0
            lam[i - 1] = mass
            if members:
                q = np.array([users[k]["q"] for k in members], dtype=float)
                levels.append(FerreiraLevel(q, weights[members] / mass))
            else:
                levels.append(FerreiraLevel(np.zeros((1, n)), np.ones(1)))
        return SequentialObjective(lam, levels)
    if model == "asadpour":
        lam = np.asarray(params["lambda"], dtype=float)
        levels = [CoverageLevel(cov) for cov in params["levels"]]
        return SequentialObjective(lam, levels)
    raise BadParams(f"unknown population model {model!r}")


def random_population(n: int, rng: np.random.Generator, n_users: int = 3) -> SequentialObjective:
    users = [
        {
            "q": rng.uniform(0.05, 0.95, size=n).tolist(),
            "window": int(rng.integers(1, n + 1)),
            "weight": float(rng.uniform(0.2, 1.0)),
        }
        for _ in range(n_users)
    ]
    return sample_user_population("ferreira", {"users": users}, rng)


def population_to_json(obj: SequentialObjective) -> str:
    levels = []
    for lev in obj.levels:
        if isinstance(lev, FerreiraLevel):
            levels.append({"kind": "ferreira", "q": lev.q.tolist(), "w": lev.w.tolist()})
        else:
            levels.append({"kind": "coverage", "cov": lev.cov.to_json()})
    return json.dumps({"lambda": obj.lam.tolist(), "levels": levels})


def population_from_json(payload: str) -> SequentialObjective:
    data = json.loads(payload)
    levels: List = []
    for lev in data["levels"]:
        if lev["kind"] == "ferreira":
            levels.append(FerreiraLevel(np.array(lev["q"]), np.array(lev["w"])))
        else:
            levels.append(CoverageLevel(CoverageFunction.from_json(lev["cov"])))
    return SequentialObjective(np.array(data["lambda"]), levels)


def make_instance(n: int) -> GreedyInstance:
    def check_feasible(pi: Point) -> bool:
        return len(pi) <= n and all(0 <= p <= n for p in pi)

    return GreedyInstance(
        name="ranking",
        tag=TAG,
        N=n,
        d_payoff=n,
        init_point=(),
        payoff_fn=rank_payoff,
        local_update=rank_local_update,
        explore_sampler=rank_explore_sample,
        D_p=2.0,
        D_phat=2.0 * n,
        responder="proportional",
        check_feasible=check_feasible,
        exact_optimizer=rank_exact_optimizer,
        gamma=GAMMA,
        delta=0.5,
    )


def enumerate_feasible(n: int):
    """All full rankings (with duplicates and empty slots permitted)."""
    from itertools import product

    return [tuple(p) for p in product(range(n + 1), repeat=n)]


def random_oracle(params: dict, rng: np.random.Generator) -> SequentialObjective:
    return random_population(params["n"], rng, params.get("n_users", 3))


def phase_pair(params: dict, rng: np.random.Generator):
    """Two populations with the top-2 single items swapped everywhere."""
    f_a = random_population(params["n"], rng, params.get("n_users", 3))
    singles = f_a.position_marginals(())
    a, b = (int(i) for i in np.argsort(singles)[::-1][:2])
    levels_b: List = []
    for lev in f_a.levels:
        q = lev.q.copy()
        q[:, [a, b]] = q[:, [b, a]]
        levels_b.append(FerreiraLevel(q, lev.w.copy()))
    return f_a, SequentialObjective(f_a.lam.copy(), levels_b)
