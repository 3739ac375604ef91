"""The two orchestrators: a full-information chain of N Blackwell learners,
and a bandit chain with exploration interruption."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .bandit import BanditState, algbb_begin_round, algbb_feed
from .blackwell import (
    BlackwellState,
    MarginalPolytope,
    algb_step,
    proportional_response,
    saddle_response,
)
from .core import GreedyInstance, ObjectiveOracle, Point
from .errors import BanditContractViolation


def make_responder(instance: GreedyInstance) -> Callable[[np.ndarray], np.ndarray]:
    if instance.responder == "proportional":
        return proportional_response
    if instance.responder == "saddle-lp":
        polytope = MarginalPolytope(instance.d_payoff)
        return lambda w: saddle_response(w, polytope)
    raise ValueError(f"unknown responder tag {instance.responder!r}")


@dataclass
class RoundTrace:
    """Per-round record kept by the harness."""

    chosen_point: Point
    reward: float
    exploring_subproblem: Optional[int]  # 1-based; None when no exploration
    thetas: List[np.ndarray]


@dataclass
class OnlineIgState:
    instance: GreedyInstance
    learners: List[BlackwellState]
    round: int = 0

    @classmethod
    def create(cls, instance: GreedyInstance, horizon: int, anytime: bool = False):
        respond = make_responder(instance)
        learners = [
            BlackwellState.create(
                d=instance.d_payoff,
                D_p=instance.D_p,
                horizon=horizon,
                respond=respond,
                anytime=anytime,
            )
            for _ in range(instance.N)
        ]
        return cls(instance=instance, learners=learners)


def online_ig_round(
    state: OnlineIgState, f_t: ObjectiveOracle, rng: np.random.Generator
) -> RoundTrace:
    """One full-information round.

    Subproblem i plays its learner's current action, the chain builds the
    point left to right, and after the adversary's function is revealed every
    learner i is fed the payoff evaluated at the point it actually saw,
    z_t^(i-1).
    """
    inst = state.instance
    z = inst.init_point
    prefixes = [z]
    thetas: List[np.ndarray] = []
    for i in range(inst.N):
        theta = state.learners[i].current_theta
        thetas.append(theta)
        z = inst.local_update(theta, z, rng)
        prefixes.append(z)
    if inst.finalize is not None:
        z = inst.finalize(z, rng)
    reward = float(f_t(z))
    assert -1e-12 <= reward <= 1.0 + 1e-12
    for i in range(inst.N):
        payoff = inst.payoff_fn(thetas[i], prefixes[i], f_t)
        algb_step(state.learners[i], payoff)
    state.round += 1
    return RoundTrace(z, reward, None, thetas)


class SingleEvaluationOracle:
    """Enforces the bandit contract: one objective evaluation per round."""

    def __init__(self, value_oracle: Callable[[Point], float]):
        self._oracle = value_oracle
        self.calls = 0

    def __call__(self, z: Point) -> float:
        self.calls += 1
        if self.calls > 1:
            raise BanditContractViolation("value oracle queried twice in one round")
        return float(self._oracle(z))


@dataclass
class BanditIgState:
    instance: GreedyInstance
    learners: List[BanditState]
    round: int = 0

    @classmethod
    def create(
        cls,
        instance: GreedyInstance,
        horizon: int,
        rng: np.random.Generator,
        q_explore: Optional[float] = None,
    ):
        respond = make_responder(instance)
        learners = [
            BanditState.create(
                d=instance.d_payoff,
                D_p=instance.D_p,
                D_phat=instance.D_phat,
                T=horizon,
                rng=np.random.default_rng(child),
                respond=respond,
                q_explore=q_explore,
            )
            for child in np.random.SeedSequence(
                entropy=rng.integers(0, 2**63 - 1)
            ).spawn(instance.N)
        ]
        return cls(instance=instance, learners=learners)


def bandit_ig_round(
    state: BanditIgState,
    value_oracle: Callable[[Point], float],
    rng: np.random.Generator,
) -> RoundTrace:
    """One bandit round.

    Learners are visited in order; the first one whose coin comes up explore
    interrupts the chain: its exploration point is played, the single allowed
    oracle evaluation is spent there, and the scaled estimate goes to that
    learner only.  Otherwise the finished point is played and the observation
    is discarded.  The oracle must be evaluated exactly once per round.
    """
    inst = state.instance
    oracle_once = SingleEvaluationOracle(value_oracle)
    z = inst.init_point
    thetas: List[np.ndarray] = []
    for i in range(inst.N):
        theta, explore = algbb_begin_round(state.learners[i])
        thetas.append(theta)
        if explore:
            sample = inst.explore_sampler(theta, z, rng)
            v = oracle_once(sample.z_exp)
            assert -1e-12 <= v <= 1.0 + 1e-12
            algbb_feed(state.learners[i], v * sample.w_exp)
            state.round += 1
            return RoundTrace(sample.z_exp, v, i + 1, thetas)
        z = inst.local_update(theta, z, rng)
    if inst.finalize is not None:
        z = inst.finalize(z, rng)
    v = oracle_once(z)  # observed and ignored as feedback
    assert -1e-12 <= v <= 1.0 + 1e-12
    state.round += 1
    return RoundTrace(z, v, None, thetas)
