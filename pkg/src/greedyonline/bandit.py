"""Bandit approachability: coin-flip exploration around a full-information
Blackwell learner, with scaled unbiased feedback and horizon-tuned
exploration probability.  An opt-in doubling wrapper handles unknown
horizons."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .blackwell import BlackwellState, algb_step, proportional_response
from .errors import FeedWithoutExplore


def tune_q(D_p: float, D_phat: float, d: int, T: int) -> float:
    """Exploration probability balancing approachability and exploration cost:
    D_p^(-2/3) * D_phat^(2/3) * (ln d)^(1/3) * T^(-1/3), clamped to [1/T, 1].
    """
    if min(D_p, D_phat, T) <= 0 or d < 2:
        raise ValueError("tune_q needs positive diameters and horizon, d >= 2")
    val = (
        D_p ** (-2.0 / 3.0)
        * D_phat ** (2.0 / 3.0)
        * math.log(d) ** (1.0 / 3.0)
        * T ** (-1.0 / 3.0)
    )
    return min(1.0, max(1.0 / T, val))


@dataclass
class BanditState:
    """One bandit learner: inner full-information state, exploration coin,
    and the last suggested action (replayed on non-exploration rounds)."""

    inner: BlackwellState
    q_explore: float
    rng: np.random.Generator
    current_theta: np.ndarray
    explored_count: int = 0
    awaiting_feed: bool = False

    @classmethod
    def create(
        cls,
        d: int,
        D_p: float,
        D_phat: float,
        T: int,
        rng: np.random.Generator,
        respond: Callable[[np.ndarray], np.ndarray] = proportional_response,
        q_explore: Optional[float] = None,
    ) -> "BanditState":
        q = tune_q(D_p, D_phat, d, T) if q_explore is None else q_explore
        # The inner learner sees scaled estimates with norm up to D_phat/q,
        # on roughly q*T of the rounds.  q = 0 is a degenerate never-explore
        # mode where the inner tuning is irrelevant.
        inner = BlackwellState.create(
            d=d,
            D_p=D_phat / q if q > 0 else D_phat,
            horizon=max(1, round(q * T)),
            respond=respond,
        )
        return cls(
            inner=inner,
            q_explore=q,
            rng=rng,
            current_theta=inner.current_theta,
        )


def algbb_begin_round(state: BanditState):
    """Return the action to play this round and an exploration signal.

    The action is frozen between explorations; the coin is the state's own.
    """
    if state.awaiting_feed:
        raise FeedWithoutExplore(
            "previous exploration round was never fed its estimate"
        )
    explore = bool(state.rng.random() < state.q_explore)
    if explore:
        state.awaiting_feed = True
        state.explored_count += 1
    return state.current_theta, explore


def algbb_feed(state: BanditState, phat: np.ndarray) -> None:
    """Forward an unbiased payoff estimate, scaled by 1/q, to the inner
    learner and refresh the suggested action.  Only legal right after an
    exploration round."""
    if not state.awaiting_feed:
        raise FeedWithoutExplore("feed on a non-exploration round")
    state.awaiting_feed = False
    state.current_theta = algb_step(state.inner, np.asarray(phat) / state.q_explore)


class DoublingBandit:
    """Unknown-horizon wrapper: runs a fresh learner per power-of-two horizon
    guess (1, 2, 4, ...), each guess lasting that many rounds."""

    def __init__(self, factory: Callable[[int], BanditState]):
        self.factory = factory
        self.guess = 1
        self.rounds_in_epoch = 0
        self.round = 0
        self.state = factory(1)
        self.restart_rounds = [1]
        self.guesses = [1]

    def begin_round(self):
        self.round += 1
        if self.rounds_in_epoch >= self.guess:
            self.guess *= 2
            self.rounds_in_epoch = 0
            self.state = self.factory(self.guess)
            self.restart_rounds.append(self.round)
            self.guesses.append(self.guess)
        self.rounds_in_epoch += 1
        return algbb_begin_round(self.state)

    def feed(self, phat: np.ndarray) -> None:
        algbb_feed(self.state, phat)


def doubling_wrap(factory: Callable[[int], BanditState]) -> DoublingBandit:
    """Wrap a horizon-indexed learner factory with the doubling trick."""
    return DoublingBandit(factory)
