"""Monotone submodular maximization under a cardinality constraint.

Points are sorted tuples of chosen elements.  The payoff of a distribution
theta over elements is the pure form (theta . y) 1 - y, where y holds the
marginal gains of each element at the current set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
import numpy as np

from ..core import (
    APP_TAGS,
    ExplorationSample,
    GreedyInstance,
    ObjectiveOracle,
    Point,
    sample_index,
)

GAMMA = 1.0 - 1.0 / np.e
TAG = APP_TAGS["monotone-sm"]


class CoverageFunction(ObjectiveOracle):
    """Weighted coverage: f(S) = total weight of universe items covered by S.

    Monotone and submodular by construction; weights are normalized so the
    range is within [0, 1].
    """

    def __init__(self, incidence: np.ndarray, weights: np.ndarray, name: str = "coverage"):
        inc = np.asarray(incidence, dtype=bool)
        w = np.asarray(weights, dtype=float)
        if inc.ndim != 2 or w.shape != (inc.shape[1],):
            raise ValueError("incidence must be (n, universe), weights (universe,)")
        if np.any(w < 0):
            raise ValueError("coverage weights must be nonnegative")
        total = w.sum()
        if total > 1.0 + 1e-12:
            w = w / total
        self.incidence = inc
        self.weights = w
        self.n = inc.shape[0]
        self.name = name

    def __call__(self, z: Point) -> float:
        if not z:
            return 0.0
        covered = self.incidence[list(z)].any(axis=0)
        return float(self.weights[covered].sum())

    def batch_values(self, points) -> np.ndarray:
        """Vectorized evaluation over many element-set points."""
        mask = np.zeros((len(points), self.n), dtype=bool)
        for r, z in enumerate(points):
            mask[r, list(z)] = True
        covered = mask @ self.incidence.astype(np.float64) > 0
        return covered @ self.weights

    def marginals(self, z: Point) -> np.ndarray:
        """f(z u {j}) - f(z) for every element j, in one pass."""
        if z:
            covered = self.incidence[list(z)].any(axis=0)
            uncovered_w = np.where(covered, 0.0, self.weights)
        else:
            uncovered_w = self.weights
        return self.incidence @ uncovered_w

    def to_json(self) -> str:
        return json.dumps(
            {
                "universe": int(self.incidence.shape[1]),
                "sets": [np.flatnonzero(row).tolist() for row in self.incidence],
                "weights": self.weights.tolist(),
            }
        )

    @classmethod
    def from_json(cls, payload: str) -> "CoverageFunction":
        data = json.loads(payload)
        inc = np.zeros((len(data["sets"]), data["universe"]), dtype=bool)
        for j, items in enumerate(data["sets"]):
            inc[j, items] = True
        return cls(inc, np.array(data["weights"]))


def random_coverage(
    n: int, rng: np.random.Generator, universe: int | None = None
) -> CoverageFunction:
    """Random coverage instance: random sets, random weights summing to one."""
    u = universe if universe is not None else 2 * n
    inc = rng.random((n, u)) < 0.45
    for j in range(n):  # no useless empty sets
        if not inc[j].any():
            inc[j, rng.integers(u)] = True
    w = rng.random(u)
    w = w / w.sum()
    return CoverageFunction(inc, w)


def sm_payoff(theta: np.ndarray, z: Point, f: CoverageFunction) -> np.ndarray:
    y = f.marginals(z)
    return float(theta @ y) - y


def sm_local_update(theta: np.ndarray, z: Point, rng: np.random.Generator) -> Point:
    j = sample_index(theta, rng)
    if j in z:
        return z  # set semantics: resampling a chosen element changes nothing
    return tuple(sorted(z + (j,)))


def sm_explore_sample(
    theta: np.ndarray, z: Point, rng: np.random.Generator
) -> ExplorationSample:
    n = theta.size
    j = int(rng.integers(n))
    w = n * (theta[j] * np.ones(n) - _unit(n, j))
    z_exp = z if j in z else tuple(sorted(z + (j,)))
    return ExplorationSample(w, z_exp)


def sm_exact_optimizer(z: Point, f: CoverageFunction) -> np.ndarray:
    """Point mass on the highest-marginal element (lowest index on ties)."""
    y = f.marginals(z)
    theta = np.zeros(y.size)
    theta[int(np.argmax(y))] = 1.0
    return theta


def _unit(n: int, j: int) -> np.ndarray:
    e = np.zeros(n)
    e[j] = 1.0
    return e


@dataclass(frozen=True)
class CardinalityInstance:
    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")


def make_instance(n: int, k: int) -> GreedyInstance:
    spec = CardinalityInstance(n, k)

    def check_feasible(z: Point) -> bool:
        return (
            len(z) <= spec.k
            and len(set(z)) == len(z)
            and all(0 <= j < spec.n for j in z)
        )

    return GreedyInstance(
        name="monotone-sm",
        tag=TAG,
        N=spec.k,
        d_payoff=spec.n,
        init_point=(),
        payoff_fn=sm_payoff,
        local_update=sm_local_update,
        explore_sampler=sm_explore_sample,
        D_p=2.0,
        D_phat=2.0 * spec.n,
        responder="proportional",
        check_feasible=check_feasible,
        exact_optimizer=sm_exact_optimizer,
        gamma=GAMMA,
        delta=1.0,
    )


def enumerate_feasible(n: int, k: int):
    """All subsets of size exactly k (monotone objectives never prefer fewer)."""
    from itertools import combinations

    return [tuple(c) for c in combinations(range(n), k)]


def random_oracle(params: dict, rng: np.random.Generator) -> CoverageFunction:
    return random_coverage(params["n"], rng, params.get("universe"))


def phase_pair(params: dict, rng: np.random.Generator):
    """Two oracles whose top-2 singleton elements are swapped."""
    f_a = random_coverage(params["n"], rng, params.get("universe"))
    singles = f_a.marginals(())
    top = np.argsort(singles)[::-1][:2]
    inc = f_a.incidence.copy()
    inc[[top[0], top[1]]] = inc[[top[1], top[0]]]
    f_b = CoverageFunction(inc, f_a.weights.copy())
    return f_a, f_b
