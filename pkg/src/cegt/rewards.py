"""Per-vehicle step reward: safety + efficiency + cooperation + causal adjustment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RewardBreakdown:
    safety: float
    efficiency: float
    cooperation: float
    causal: float

    @property
    def total(self) -> float:
        return total_reward(self)


def safety_reward(gap: float, base: float) -> float:
    """base / max(gap, 1); the lead vehicle (gap = inf) earns 0."""
    if math.isinf(gap) and gap > 0:
        return 0.0
    return base / max(gap, 1.0)


def efficiency_reward(v_i: float, all_v: Sequence[float], base: float) -> float:
    v_avg = float(np.mean(all_v))
    if v_avg == 0.0:
        return 0.0
    return base * v_i / v_avg


def cooperation_reward(n: int, gamma: float, lam: float, collision_hist: Sequence[int],
                       rng: np.random.Generator) -> float:
    """(N-1) * gamma * (-lam * u), u uniform over the historical collision-count range.

    One uniform draw is consumed even for an empty history.
    """
    lo, hi = (min(collision_hist), max(collision_hist)) if len(collision_hist) else (0, 0)
    u = rng.uniform(lo, hi)
    return (n - 1) * gamma * (-lam * u) + 0.0  # no negative zero


def total_reward(b: RewardBreakdown) -> float:
    return b.safety + b.efficiency + b.cooperation + b.causal
