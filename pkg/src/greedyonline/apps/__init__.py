"""Application registry: the four instantiations of the framework."""

from __future__ import annotations

import numpy as np

from ..core import GreedyInstance
from ..errors import ConfigError
from . import monotone_sm, nsm, ranking, reserves

_MODULES = {
    "monotone-sm": monotone_sm,
    "ranking": ranking,
    "mmr": reserves,
    "nsm": nsm,
}

# Brute-force enumerability guards, per application.
ENUM_LIMITS = {
    "monotone-sm": lambda p: p["n"] <= 12,
    "ranking": lambda p: p["n"] <= 7,
    "mmr": lambda p: p["m"] ** p["n"] <= 10**6,
    "nsm": lambda p: p["m"] ** p["n"] <= 10**6,
}


def app_module(app: str):
    try:
        return _MODULES[app]
    except KeyError:
        raise ConfigError(f"unknown app {app!r}; expected one of {sorted(_MODULES)}")


def make_instance(app: str, params: dict) -> GreedyInstance:
    mod = app_module(app)
    try:
        if app == "monotone-sm":
            return mod.make_instance(params["n"], params["k"])
        if app == "ranking":
            return mod.make_instance(params["n"])
        return mod.make_instance(params["n"], params["m"])
    except KeyError as exc:
        raise ConfigError(f"missing app parameter {exc} for {app!r}")


def enumerate_feasible(app: str, params: dict):
    mod = app_module(app)
    if app == "monotone-sm":
        return mod.enumerate_feasible(params["n"], params["k"])
    if app == "ranking":
        return mod.enumerate_feasible(params["n"])
    return mod.enumerate_feasible(params["n"], params["m"])


def random_oracle(app: str, params: dict, rng: np.random.Generator):
    return app_module(app).random_oracle(params, rng)


def phase_pair(app: str, params: dict, rng: np.random.Generator):
    return app_module(app).phase_pair(params, rng)
