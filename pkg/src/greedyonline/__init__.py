"""Offline iterative-greedy approximation algorithms turned into no-regret
online learners via approachability of the positive orthant, in full
information and bandit feedback, with four combinatorial applications."""

from .bandit import BanditState, algbb_begin_round, algbb_feed, doubling_wrap, tune_q
from .blackwell import (
    BlackwellState,
    HedgeState,
    MarginalPolytope,
    OloState,
    algb_step,
    ftrl_next,
    hedge_step,
    project_K,
    proportional_response,
    saddle_response,
)
from .core import (
    ExplorationSample,
    FeasiblePoint,
    GreedyInstance,
    ObjectiveOracle,
    offline_ig_run,
    payoff_nonneg_slack,
    validate_distribution,
)
from .meta import (
    BanditIgState,
    OnlineIgState,
    RoundTrace,
    bandit_ig_round,
    online_ig_round,
)

__all__ = [
    "BanditState",
    "algbb_begin_round",
    "algbb_feed",
    "doubling_wrap",
    "tune_q",
    "BlackwellState",
    "HedgeState",
    "MarginalPolytope",
    "OloState",
    "algb_step",
    "ftrl_next",
    "hedge_step",
    "project_K",
    "proportional_response",
    "saddle_response",
    "ExplorationSample",
    "FeasiblePoint",
    "GreedyInstance",
    "ObjectiveOracle",
    "offline_ig_run",
    "payoff_nonneg_slack",
    "validate_distribution",
    "BanditIgState",
    "OnlineIgState",
    "RoundTrace",
    "bandit_ig_round",
    "online_ig_round",
]
