"""Shared abstractions for the offline-to-online transformation.

A feasible point is encoded application-side as a plain tuple of integers
(element set, ranking prefix, reserve-index prefix, lattice prefix).  The
generic machinery below only threads points through the per-subproblem
callables of a :class:`GreedyInstance`, so it never inspects them.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BadSimplexPoint, InfeasibleTheta

# Tolerance for "payoff lands in the positive orthant" checks.
PAYOFF_TOL = 1e-9
# Tolerance for simplex membership.
SIMPLEX_TOL = 1e-12

# A feasible point: application-specific tuple of integers.
Point = tuple

# Application tag bytes for the canonical point encoding.
APP_TAGS = {"monotone-sm": 1, "ranking": 2, "mmr": 3, "nsm": 4}


def encode_point(tag: int, indices: Sequence[int]) -> bytes:
    """Canonical byte encoding: application tag byte + little-endian u32 list."""
    return struct.pack("<B", tag) + b"".join(
        struct.pack("<I", int(i)) for i in indices
    )


@dataclass(frozen=True)
class FeasiblePoint:
    """A feasibility-checked point, used at logging boundaries."""

    tag: int
    indices: tuple

    def encode(self) -> bytes:
        return encode_point(self.tag, self.indices)


def validate_distribution(weights) -> np.ndarray:
    """Validate and normalize a weight vector into a distribution.

    Returns a fresh array summing to one.  Raises :class:`BadSimplexPoint` on
    negative entries, non-finite entries, or zero total mass.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise BadSimplexPoint(f"expected a 1-d weight vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise BadSimplexPoint("non-finite weight")
    if np.any(w < 0):
        raise BadSimplexPoint(f"negative weight in {w}")
    total = float(w.sum())
    if total <= 0.0:
        raise BadSimplexPoint("zero total mass")
    if abs(total - 1.0) > SIMPLEX_TOL:
        w = w / total
    return w


def payoff_nonneg_slack(v: np.ndarray) -> float:
    """l-infinity distance of a vector to the positive orthant.

    Zero iff every coordinate is nonnegative.
    """
    m = float(np.min(v))
    return -m if m < 0.0 else 0.0


def sample_index(theta: np.ndarray, rng: np.random.Generator) -> int:
    """Draw an index from a distribution (inverse-CDF; cheap in hot loops)."""
    u = rng.random()
    c = np.cumsum(theta)
    return int(min(np.searchsorted(c, u, side="right"), theta.size - 1))


class ObjectiveOracle:
    """Evaluator mapping a feasible point to a value in [0, 1]."""

    name = "oracle"

    def __call__(self, z: Point) -> float:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class ExplorationSample:
    """A randomized probe: playing ``z_exp`` and scaling the observed value by
    ``w_exp`` gives an unbiased estimate of the payoff vector."""

    w_exp: np.ndarray
    z_exp: Point


@dataclass
class GreedyInstance:
    """An application's offline description, consumed by the orchestrators.

    ``payoff_fn``, ``local_update`` and ``explore_sampler`` derive the
    subproblem index from the partial point they receive (all four
    applications build their point left to right).
    """

    name: str
    tag: int
    N: int
    d_payoff: int
    init_point: Point
    payoff_fn: Callable[[np.ndarray, Point, ObjectiveOracle], np.ndarray]
    local_update: Callable[[np.ndarray, Point, np.random.Generator], Point]
    explore_sampler: Callable[
        [np.ndarray, Point, np.random.Generator], ExplorationSample
    ]
    D_p: float
    D_phat: float
    responder: str = "proportional"  # "proportional" | "saddle-lp"
    finalize: Optional[Callable[[Point, np.random.Generator], Point]] = None
    check_feasible: Callable[[Point], bool] = field(default=lambda z: True)
    # Exact per-subproblem parameter chooser of the offline algorithm.
    exact_optimizer: Optional[
        Callable[[Point, ObjectiveOracle], np.ndarray]
    ] = None
    gamma: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.D_p <= 0 or self.D_phat <= 0:
            raise ValueError("payoff diameters must be positive")

    def point(self, indices: Sequence[int]) -> FeasiblePoint:
        """Feasibility-checked point for logging boundaries."""
        t = tuple(int(i) for i in indices)
        if not self.check_feasible(t):
            raise ValueError(f"{t} is not feasible for {self.name}")
        return FeasiblePoint(self.tag, t)


def offline_ig_run(
    instance: GreedyInstance,
    f: ObjectiveOracle,
    local_optimizer: Callable[[Point, ObjectiveOracle], np.ndarray],
    rng: np.random.Generator,
    return_trace: bool = False,
):
    """Run the offline iterative-greedy chain on a single objective.

    Each subproblem asks ``local_optimizer`` for an update parameter whose
    payoff is coordinatewise nonnegative (tolerance ``PAYOFF_TOL``), then
    advances the point through ``local_update``.  Deterministic for a fixed
    ``rng`` state.
    """
    z = instance.init_point
    trace = []
    for _ in range(instance.N):
        theta = local_optimizer(z, f)
        p = instance.payoff_fn(theta, z, f)
        slack = payoff_nonneg_slack(p)
        if slack > PAYOFF_TOL:
            raise InfeasibleTheta(
                f"{instance.name}: optimizer payoff slack {slack:.3e} > {PAYOFF_TOL}"
            )
        z = instance.local_update(theta, z, rng)
        assert instance.check_feasible(z)
        trace.append((theta, z))
    if instance.finalize is not None:
        z = instance.finalize(z, rng)
        assert instance.check_feasible(z)
    if return_trace:
        return z, trace
    return z
