"""Oblivious adversary generation: the whole objective sequence is
materialized from the seed before the run begins."""

from __future__ import annotations

from typing import List

import numpy as np

from .. import apps
from ..errors import ConfigError


def generate_adversary(spec: dict, app: str, params: dict, T: int, seed) -> List:
    """Materialize f_1..f_T for an oblivious adversary.

    Kinds: ``iid-random`` (fresh instance per round), ``alternating``
    (period-2 over two random instances), ``phase-shift`` (the favored
    element flips at T/2), and ``replay`` (mmr valuation CSV).
    """
    kind = spec.get("kind", "alternating")
    rng = np.random.default_rng(seed)
    if kind == "iid-random":
        return [apps.random_oracle(app, params, rng) for _ in range(T)]
    if kind == "alternating":
        f_a = apps.random_oracle(app, params, rng)
        f_b = apps.random_oracle(app, params, rng)
        return [f_a if t % 2 == 0 else f_b for t in range(T)]
    if kind == "phase-shift":
        f_a, f_b = apps.phase_pair(app, params, rng)
        return [f_a if t < T // 2 else f_b for t in range(T)]
    if kind == "replay":
        if app != "mmr":
            raise ConfigError("replay adversary only supports the mmr app")
        from ..apps.reserves import RevenueOracle, load_valuations_csv, uniform_grid

        profiles = load_valuations_csv(spec["path"])
        if profiles.shape[0] < T:
            raise ConfigError(f"replay file has {profiles.shape[0]} rows < T={T}")
        grid = uniform_grid(params["m"])
        return [RevenueOracle(profiles[t], grid) for t in range(T)]
    raise ConfigError(f"unknown adversary kind {kind!r}")
