"""Correlation-based causal influence and the causal adjustment term."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import RunHistory, VehicleHistory


@dataclass(frozen=True)
class CausalSnapshot:
    influence: tuple[float, ...]
    mean_influence: float
    effectiveness: float = 0.0
    adjustment_per_vehicle: tuple[float, ...] = ()


def pearson_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation in deviation form; 0 when undefined.

    Fewer than two samples or a zero-variance series gives 0 (no evidence
    either way).
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        return 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def causal_influence(h: VehicleHistory, t: int, w_c: float, window: int = 0) -> float:
    """w_c * corr(positions / t, reward history) over steps 1..t-1."""
    if t < 2:
        return 0.0
    p = np.asarray(h.positions[: t - 1], dtype=float) / t
    r = np.asarray(h.step_rewards[: t - 1], dtype=float)
    if window:
        p, r = p[-window:], r[-window:]
    return w_c * pearson_correlation(p, r)


def causal_influence_vector(rh: RunHistory, t: int, w_c: float, window: int = 0) -> list[float]:
    return [causal_influence(h, t, w_c, window) for h in rh.per_vehicle]


def causal_effectiveness(step_rewards: Sequence[float], cm: float, mean_influence: float,
                         total_rewards_hist: Sequence[float]) -> float:
    """Mean step reward times (cm + mean influence), over the mean past total reward."""
    if len(total_rewards_hist) == 0 or len(step_rewards) == 0:
        return 0.0
    denom = float(np.mean(total_rewards_hist))
    if denom == 0.0:
        return 0.0
    return float(np.mean(step_rewards)) * (cm + mean_influence) / denom


def causal_adjustment(cm: float, mean_influence_prev: float, rng: np.random.Generator) -> float:
    """cm * z + previous mean influence, z standard normal.

    Always consumes one draw so streams stay aligned when cm is 0.
    """
    z = rng.standard_normal()
    return cm * z + mean_influence_prev
