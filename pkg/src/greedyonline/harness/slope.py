"""Log-log scaling-slope fits for regret curves."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateFit

REGRET_FLOOR = 1e-9


def fit_slope(points) -> float:
    """Least-squares slope of log(regret) against log(T).

    Expects at least four geometrically spaced horizons; nonpositive regrets
    are clamped at ``REGRET_FLOOR`` before taking logs.
    """
    pts = sorted((float(t), float(r)) for t, r in points)
    if len(pts) < 4:
        raise DegenerateFit(f"need >= 4 horizons, got {len(pts)}")
    ts = np.array([t for t, _ in pts])
    rs = np.maximum(np.array([r for _, r in pts]), REGRET_FLOOR)
    slope, _ = np.polyfit(np.log(ts), np.log(rs), 1)
    return float(slope)
