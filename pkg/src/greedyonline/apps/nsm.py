"""Non-monotone submodular maximization on a discrete lattice (bi-greedy).

Points are prefix tuples of decided grid indices; coordinates beyond the
frontier sit at rho_1 in the lower context and rho_m in the upper context.
The per-subproblem parameter is a distribution over the m grid levels for
the frontier coordinate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from ..core import (
    APP_TAGS,
    ExplorationSample,
    GreedyInstance,
    ObjectiveOracle,
    Point,
    sample_index,
)
from ..errors import BadParams, LpInfeasible

GAMMA = 0.5
TAG = APP_TAGS["nsm"]
FEAS_TOL = 1e-9


class LatticeOracle(ObjectiveOracle):
    """Discrete function on {rho_1 < ... < rho_m}^n with values in [0, 1].

    Weak-DR submodularity of the supplied evaluator is assumed; test families
    spot-check the lattice inequality on random pairs.
    """

    name = "lattice"

    def __init__(self, rho: Sequence[float], n: int, fn: Callable[[tuple], float],
                 meta: dict | None = None):
        rho = np.asarray(rho, dtype=float)
        if rho.size < 1 or np.any(np.diff(rho) <= 0):
            raise BadParams("rho must be strictly increasing")
        self.rho = rho
        self.m = rho.size
        self.n = n
        self.fn = fn
        self.meta = meta or {}

    def __call__(self, z: Point) -> float:
        assert len(z) == self.n
        return float(self.fn(z))

    def to_json(self) -> str:
        if self.m**self.n > 10**6:
            raise BadParams("dense serialization limited to m^n <= 1e6")
        table = {
            ",".join(map(str, idx)): self.fn(idx)
            for idx in product(range(self.m), repeat=self.n)
        }
        return json.dumps(
            {"m": self.m, "n": self.n, "rho": self.rho.tolist(), "table": table}
        )

    @classmethod
    def from_json(cls, payload: str) -> "LatticeOracle":
        data = json.loads(payload)
        if "table" in data:
            table = {
                tuple(int(i) for i in key.split(",")): val
                for key, val in data["table"].items()
            }
            return cls(data["rho"], data["n"], lambda z: table[tuple(z)])
        rng = np.random.default_rng(data["seed"])
        return random_oracle(
            {"n": data["n"], "m": data["m"], "family": data.get("family")}, rng
        )

    @staticmethod
    def family_json(n: int, m: int, seed: int, family: str | None = None) -> str:
        """Seed-based serialization for instances too large for the table."""
        return json.dumps({"n": n, "m": m, "seed": seed, "family": family})


@dataclass(frozen=True)
class BiGreedyState:
    """Lower/upper bound view of a decided prefix: both bounds carry the
    decided coordinates, then rho_1 (lower) or rho_m (upper) beyond the
    frontier.  The upper point is always reconstructible from the lower."""

    decided: tuple
    n: int
    m: int

    @property
    def frontier(self) -> int:
        return len(self.decided) + 1  # 1-based coordinate being decided

    @property
    def lower(self) -> tuple:
        return self.decided + (0,) * (self.n - len(self.decided))

    @property
    def upper(self) -> tuple:
        return self.decided + (self.m - 1,) * (self.n - len(self.decided))


def _contexts(z: Point, n: int, m: int):
    i = len(z)  # 0-based frontier: coordinate i (0-based) is being decided
    lower_tail = (0,) * (n - i - 1)
    upper_tail = (m - 1,) * (n - i - 1)
    return i, lower_tail, upper_tail


def nsm_marginals(z: Point, f: LatticeOracle):
    """Lower and upper marginal curves of the frontier coordinate.

    alpha[k] = f(rho_k, lower_-i) - f(lower), beta[k] = f(rho_k, upper_-i) -
    f(upper); alpha[0] = beta[m-1] = 0 exactly.
    """
    m = f.m
    i, lo_tail, up_tail = _contexts(z, f.n, m)
    a = np.array([f.fn(z + (k,) + lo_tail) for k in range(m)], dtype=float)
    b = np.array([f.fn(z + (k,) + up_tail) for k in range(m)], dtype=float)
    return a - a[0], b - b[m - 1]


def zeta_matrix(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Z[j, k] = zeta(rho_j, rho_k): alpha gap when rho_j >= rho_k, beta gap
    when rho_j <= rho_k (both zero on the diagonal)."""
    m = alpha.size
    jj, kk = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    return np.where(jj > kk, alpha[:, None] - alpha[None, :], 0.0) + np.where(
        jj < kk, beta[:, None] - beta[None, :], 0.0
    )


def nsm_payoff(theta: np.ndarray, z: Point, f: LatticeOracle) -> np.ndarray:
    alpha, beta = nsm_marginals(z, f)
    return payoff_from_marginals(theta, alpha, beta)


def payoff_from_marginals(
    theta: np.ndarray, alpha: np.ndarray, beta: np.ndarray
) -> np.ndarray:
    base = 0.5 * float(theta @ (alpha + beta))
    return base - zeta_matrix(alpha, beta) @ theta


def nsm_local_optimize(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Parameter choice of the offline bi-greedy subproblem.

    With z_l the best level in the upper context and z_u the best in the
    lower context: a point mass on z_l works when z_u <= z_l; otherwise a
    feasibility LP finds a distribution supported on [z_l, z_u] whose payoff
    is nonnegative on that window (which extends to all levels).
    """
    m = alpha.size
    k_l = int(np.argmax(beta))
    k_u = int(np.argmax(alpha))
    if k_u <= k_l:
        theta = np.zeros(m)
        theta[k_l] = 1.0
        return _certify(theta, alpha, beta)
    window = list(range(k_l, k_u + 1))
    coeff = 0.5 * (alpha + beta)[None, :] - zeta_matrix(alpha, beta)  # payoff = C theta
    C = coeff[np.ix_(window, window)]
    nw = len(window)
    res = linprog(
        np.zeros(nw),
        A_ub=-C,
        b_ub=np.zeros(nw),
        A_eq=np.ones((1, nw)),
        b_eq=[1.0],
        bounds=[(0.0, None)] * nw,
        method="highs",
    )
    if not res.success:
        raise LpInfeasible(
            "no feasible parameter distribution; input is not submodular"
        )
    theta = np.zeros(m)
    theta[window] = np.maximum(res.x, 0.0)
    theta /= theta.sum()
    return _certify(theta, alpha, beta)


def _certify(theta: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    payoff = payoff_from_marginals(theta, alpha, beta)
    if payoff.min() < -FEAS_TOL:
        raise LpInfeasible(
            f"parameter certification failed: min payoff {payoff.min():.3e}"
        )
    return theta


def nsm_exact_optimizer(z: Point, f: LatticeOracle) -> np.ndarray:
    alpha, beta = nsm_marginals(z, f)
    return nsm_local_optimize(alpha, beta)


def nsm_local_update(theta: np.ndarray, z: Point, rng: np.random.Generator) -> Point:
    return z + (sample_index(theta, rng),)


def explore_weight_lower(theta: np.ndarray, k: int) -> np.ndarray:
    """Weight vector of the (rho_k, lower context) exploration branch."""
    m = theta.size
    w = np.full(m, 0.5 * theta[k])
    w[k + 1 :] += theta[k]
    w[k] -= theta[:k].sum()
    return 4.0 * m * w


def explore_weight_upper(theta: np.ndarray, k: int) -> np.ndarray:
    """Weight vector of the (rho_k, upper context) exploration branch."""
    m = theta.size
    w = np.full(m, 0.5 * theta[k])
    w[:k] += theta[k]
    w[k] -= theta[k + 1 :].sum()
    return 4.0 * m * w


def nsm_explore_sampler_for(n: int, m: int):
    """One of 2 + 2m branches probing the two context corners and every
    frontier level in both contexts."""


    def sampler(theta: np.ndarray, z: Point, rng: np.random.Generator):
        i = len(z)
        lo_tail = (0,) * (n - i - 1)
        up_tail = (m - 1,) * (n - i - 1)
        u = rng.random()
        if u < 0.25:
            return ExplorationSample(-2.0 * np.ones(m), z + (0,) + lo_tail)
        if u < 0.5:
            return ExplorationSample(-2.0 * np.ones(m), z + (m - 1,) + up_tail)
        k = int(rng.integers(m))
        if u < 0.75:
            return ExplorationSample(explore_weight_lower(theta, k), z + (k,) + lo_tail)
        return ExplorationSample(explore_weight_upper(theta, k), z + (k,) + up_tail)

    return sampler


def make_instance(n: int, m: int) -> GreedyInstance:
    def check_feasible(z: Point) -> bool:
        return len(z) <= n and all(0 <= k < m for k in z)

    return GreedyInstance(
        name="nsm",
        tag=TAG,
        N=n,
        d_payoff=m,
        init_point=(),
        payoff_fn=nsm_payoff,
        local_update=nsm_local_update,
        explore_sampler=nsm_explore_sampler_for(n, m),
        D_p=3.0,
        D_phat=6.0 * m,
        responder="saddle-lp",
        check_feasible=check_feasible,
        exact_optimizer=nsm_exact_optimizer,
        gamma=GAMMA,
        delta=0.5,
    )


# ---------------------------------------------------------------------------
# Test families and domain wrappers


class MultilinearLattice(LatticeOracle):
    """Cut-plus-modular family: pairwise terms x_u + x_v - 2 x_u x_v (the
    multilinear cut form, submodular), a modular part, and concave
    per-coordinate bumps; affinely rescaled into [0, 1]."""

    def __init__(self, rho, W: np.ndarray, mu: np.ndarray, conc: float):
        rho = np.asarray(rho, dtype=float)
        n = mu.size
        lo = float(np.minimum(mu, 0.0).sum())
        hi = (
            float(np.triu(W, 1).sum())
            + float(np.maximum(mu, 0.0).sum())
            + conc * n / 4.0
        )
        span = max(hi - lo, 1e-12)
        self.W, self.mu, self.conc, self._lo, self._span = W, mu, conc, lo, span

        def fn(z: tuple) -> float:
            x = rho[list(z)]
            pair = x[:, None] + x[None, :] - 2.0 * np.outer(x, x)
            raw = (
                float(np.triu(W * pair, 1).sum())
                + float(mu @ x)
                + conc * float((x * (1.0 - x)).sum())
            )
            return (raw - lo) / span

        super().__init__(rho, n, fn, meta={"family": "cut-plus-modular"})


def random_lattice(n: int, m: int, rng: np.random.Generator) -> LatticeOracle:
    """Random verified-submodular instance of the cut-plus-modular family."""
    rho = np.linspace(0.0, 1.0, m) if m > 1 else np.array([0.0])
    W = rng.uniform(0.0, 1.0, size=(n, n))
    W = np.triu(W, 1)
    mu = rng.uniform(-1.0, 1.0, size=n)
    conc = float(rng.uniform(0.0, 1.0))
    return MultilinearLattice(rho, W, mu, conc)


def coverage_complement(n: int, rng: np.random.Generator) -> LatticeOracle:
    """Non-monotone set family: half coverage of S plus half coverage of the
    complement of S (both submodular, the mix non-monotone); m = 2."""
    from .monotone_sm import random_coverage

    cov1 = random_coverage(n, rng)
    cov2 = random_coverage(n, rng)

    def set_fn(elems: tuple) -> float:
        comp = tuple(j for j in range(n) if j not in elems)
        return 0.5 * cov1(elems) + 0.5 * cov2(comp)

    return set_function_wrapper(set_fn, n)


def fanout_cut(n: int, rng: np.random.Generator) -> LatticeOracle:
    """Single-source directed cut with random edge weights:
    f(x) = sum_v c_v x_1 (1 - x_v), normalized.  Submodular and non-monotone;
    the bi-greedy chain is half-tight on this family, which makes it the
    right benchmark family for bandit regret scaling."""
    c = rng.uniform(0.3, 1.0, size=n - 1)
    s = float(c.sum())

    def set_fn(elems: tuple) -> float:
        if 0 not in elems:
            return 0.0
        return float(sum(c[v - 1] for v in range(1, n) if v not in elems)) / s

    return set_function_wrapper(set_fn, n)


def set_function_wrapper(set_oracle: Callable[[tuple], float], n: int) -> LatticeOracle:
    """Embed a set function as a lattice oracle with levels {0, 1}."""
    return LatticeOracle(
        [0.0, 1.0],
        n,
        lambda z: set_oracle(tuple(j for j, v in enumerate(z) if v == 1)),
        meta={"family": "set"},
    )


def lipschitz_grid_wrapper(
    continuous_fn: Callable[[np.ndarray], float], L: float, m: int, n: int
) -> LatticeOracle:
    """Grid a coordinate-wise L-Lipschitz function on {0, 1/m, ..., 1}^n;
    the grid optimum trails the continuous one by at most L*n/m."""
    rho = np.array([i / m for i in range(m + 1)])
    return LatticeOracle(
        rho,
        n,
        lambda z: continuous_fn(rho[list(z)]),
        meta={"family": "lipschitz", "L": L},
    )


def enumerate_feasible(n: int, m: int):
    return [tuple(z) for z in product(range(m), repeat=n)]


def random_oracle(params: dict, rng: np.random.Generator) -> LatticeOracle:
    family = params.get("family")
    if family == "coverage-complement":
        return coverage_complement(params["n"], rng)
    if family == "fanout-cut":
        return fanout_cut(params["n"], rng)
    return random_lattice(params["n"], params["m"], rng)


def phase_pair(params: dict, rng: np.random.Generator):
    """Two lattice functions with the two highest-impact coordinates swapped."""
    f_a = random_lattice(params["n"], params["m"], rng)
    n, m = params["n"], params["m"]
    base = (0,) * n
    impact = [
        f_a.fn(tuple(m - 1 if j == u else 0 for j in range(n))) - f_a.fn(base)
        for u in range(n)
    ]
    a, b = (int(i) for i in np.argsort(impact)[::-1][:2])

    def swapped(z: tuple) -> float:
        zz = list(z)
        zz[a], zz[b] = zz[b], zz[a]
        return f_a.fn(tuple(zz))

    f_b = LatticeOracle(f_a.rho, n, swapped, meta=dict(f_a.meta))
    return f_a, f_b
