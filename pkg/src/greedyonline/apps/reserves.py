"""Maximizing multiple reserves in second-price auctions.

Points are prefix tuples of grid indices (bidder i's reserve is decided by
subproblem i).  The exploration sampler probes synthetic uniform reserve
vectors, one of 2m branches, relying on the identity
q_i(r) = f(r 1, v) - f(r (1 - e_i), v) for the winning bidder's
revenue-from-reserves curve.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

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

GAMMA = 0.5
TAG = APP_TAGS["mmr"]


@dataclass(frozen=True)
class PriceGrid:
    """Feasible reserve prices 0 = rho_1 < rho_2 < ... < rho_m <= 1."""

    rho: tuple

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=float)
        if r.size < 1 or r[0] != 0.0:
            raise BadParams("grid must start at zero")
        if np.any(np.diff(r) <= 0) or r[-1] > 1.0:
            raise BadParams("grid must be strictly increasing within [0, 1]")

    @property
    def m(self) -> int:
        return len(self.rho)

    def values(self) -> np.ndarray:
        return np.asarray(self.rho, dtype=float)


def uniform_grid(m: int) -> PriceGrid:
    """m equally spaced levels {0, 1/(m-1), ..., 1} (just {0} for m = 1)."""
    if m == 1:
        return PriceGrid((0.0,))
    return PriceGrid(tuple(np.linspace(0.0, 1.0, m)))


def discretize_reserves(m: int) -> PriceGrid:
    """Rounding grid of the continuous-benchmark wrapper: {0, 1/m, ..., 1}.

    Rounding any reserve vector down onto it costs at most 1/m revenue per
    round against the continuous benchmark.
    """
    if m < 1:
        raise BadParams("need m >= 1")
    return PriceGrid(tuple(i / m for i in range(m + 1)))


def auction_revenue(r: Sequence[float], v: Sequence[float]) -> float:
    """Second-price-with-reserves revenue for reserve vector r and bids v.

    The winner is the highest-valuation bidder among those clearing their
    reserve (lowest index on ties) and pays max(own reserve, second-highest
    clearing valuation).
    """
    best = second = -1.0
    winner = -1
    for j, (vj, rj) in enumerate(zip(v, r)):
        if vj < rj:
            continue
        if vj > best:
            second = best
            best = vj
            winner = j
        elif vj > second:
            second = vj
    if winner < 0:
        return 0.0
    return max(r[winner], second if second > 0.0 else 0.0)


def revenue_from_reserves(i: int, r: float, v: Sequence[float]) -> float:
    """Bidder i's revenue-from-reserves curve (1-based bidder index).

    Equals r when i has the (lowest-index) highest valuation and r lies in
    [second-highest valuation, v_i]; zero otherwise.
    """
    v = np.asarray(v, dtype=float)
    j_star = int(np.argmax(v))
    if j_star != i - 1:
        return 0.0
    others = np.delete(v, j_star)
    v_hat = float(others.max()) if others.size else 0.0
    return r if v_hat <= r <= v[j_star] else 0.0


class RevenueOracle(ObjectiveOracle):
    """Round objective: revenue of a grid-indexed reserve vector against a
    fixed valuation profile."""

    name = "revenue"

    def __init__(self, v: Sequence[float], grid: PriceGrid):
        v = np.asarray(v, dtype=float)
        if np.any(v < 0) or np.any(v > 1):
            raise BadParams("valuations must lie in [0, 1]")
        self.v = v
        self.grid = grid
        self.rho = grid.values()

    def __call__(self, z: Point) -> float:
        return auction_revenue(self.rho[list(z)], self.v)

    def batch_values(self, points) -> np.ndarray:
        """Vectorized revenue over many grid-indexed reserve vectors."""
        R = self.rho[np.asarray(points, dtype=int)]
        v = self.v
        masked = np.where(v[None, :] >= R, v[None, :], -1.0)
        winner_val = masked.max(axis=1)
        winner_idx = masked.argmax(axis=1)
        if v.size >= 2:
            second = np.maximum(np.sort(masked, axis=1)[:, -2], 0.0)
        else:
            second = np.zeros(R.shape[0])
        r_win = R[np.arange(R.shape[0]), winner_idx]
        return np.where(winner_val >= 0.0, np.maximum(r_win, second), 0.0)

    def q_curve(self, i: int) -> np.ndarray:
        """q_i(rho_j) over the whole grid, for 1-based bidder i."""
        j_star = int(np.argmax(self.v))
        if j_star != i - 1:
            return np.zeros(self.grid.m)
        others = np.delete(self.v, j_star)
        v_hat = float(others.max()) if others.size else 0.0
        y = np.where((self.rho >= v_hat) & (self.rho <= self.v[j_star]), self.rho, 0.0)
        return y


def mmr_payoff(theta: np.ndarray, prefix: Point, f: RevenueOracle) -> np.ndarray:
    i = len(prefix) + 1
    y = f.q_curve(i)
    return float(theta @ y) - y


def mmr_local_update(theta: np.ndarray, prefix: Point, rng: np.random.Generator) -> Point:
    return prefix + (sample_index(theta, rng),)


def mmr_explore_sample_for(n: int):
    def sampler(theta: np.ndarray, prefix: Point, rng: np.random.Generator):
        m = theta.size
        i = len(prefix) + 1  # 1-based bidder being probed
        j = int(rng.integers(m))
        e = np.zeros(m)
        e[j] = 1.0
        w = 2.0 * m * (theta[j] * np.ones(m) - e)
        if rng.random() < 0.5:
            z_exp = (j,) * n  # reserves rho_j for everyone
            return ExplorationSample(w, z_exp)
        z_exp = tuple(0 if b == i - 1 else j for b in range(n))  # rho_j(1 - e_i)
        return ExplorationSample(-w, z_exp)

    return sampler


def mmr_finalize_for(n: int):
    def finalize(z: Point, rng: np.random.Generator) -> Point:
        if rng.random() < 0.5:
            return (0,) * n
        return z

    return finalize


def mmr_exact_optimizer(prefix: Point, f: RevenueOracle) -> np.ndarray:
    y = f.q_curve(len(prefix) + 1)
    theta = np.zeros(y.size)
    theta[int(np.argmax(y))] = 1.0
    return theta


def make_instance(n: int, m: int) -> GreedyInstance:
    grid = uniform_grid(m)

    def check_feasible(z: Point) -> bool:
        return len(z) <= n and all(0 <= j < grid.m for j in z)

    return GreedyInstance(
        name="mmr",
        tag=TAG,
        N=n,
        d_payoff=grid.m,
        init_point=(),
        payoff_fn=mmr_payoff,
        local_update=mmr_local_update,
        explore_sampler=mmr_explore_sample_for(n),
        D_p=2.0,
        D_phat=2.0 * grid.m,
        responder="proportional",
        finalize=mmr_finalize_for(n),
        check_feasible=check_feasible,
        exact_optimizer=mmr_exact_optimizer,
        gamma=GAMMA,
        delta=0.5,
    )


def enumerate_feasible(n: int, m: int):
    from itertools import product

    return [tuple(z) for z in product(range(m), repeat=n)]


def random_oracle(params: dict, rng: np.random.Generator) -> RevenueOracle:
    grid = uniform_grid(params["m"])
    family = params.get("family")
    if family in ("one-strong", "one-strong-uniform"):
        # A single serious bidder; the all-zeros fallback of the finalize
        # coin earns nothing, so the half-discounted benchmark stays tight.
        # "one-strong" draws the value from the equal-revenue distribution on
        # [rho_2, 1] (every reserve level earns the same expected revenue,
        # maximal hindsight wandering); "one-strong-uniform" draws it
        # uniformly on [rho_2, 1] (middle levels tied, the top one useless,
        # so exploration probes genuinely cost revenue).
        c = grid.rho[1] if grid.m > 1 else 0.5
        v = np.zeros(params["n"])
        if family == "one-strong":
            u = rng.random()
            v[0] = min(1.0, c / (1.0 - u)) if u < 1.0 else 1.0
        else:
            v[0] = rng.uniform(c, 1.0)
        return RevenueOracle(v, grid)
    return RevenueOracle(rng.random(params["n"]), grid)


def phase_pair(params: dict, rng: np.random.Generator):
    """Two profiles with the top-2 bidders' valuations swapped."""
    grid = uniform_grid(params["m"])
    v = rng.random(params["n"])
    order = np.argsort(v)[::-1]
    v2 = v.copy()
    if v.size >= 2:
        v2[[order[0], order[1]]] = v2[[order[1], order[0]]]
    return RevenueOracle(v, grid), RevenueOracle(v2, grid)


def load_valuations_csv(path: str) -> np.ndarray:
    """Replay input: one valuation profile per row."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append([float(x) for x in row])
    return np.asarray(rows, dtype=float)
