"""Speed selection by imitation or mutation, gated by the causal adjustment.

``select_speed_cegt`` draws the imitation probability from a sigmoid of the
causal adjustment; ``select_speed_egt`` is the ablation with a fixed rate.
Every decision consumes exactly one draw from each of the vehicle's causal,
branch and imitation streams, so two strategies run on the same seed see
identical random numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .causal import causal_adjustment
from .config import SimConfig
from .core import RngStreams, RunHistory, WorldState, clamp
from .safety import front_neighbors

IMITATION = "imitation"
MUTATION = "mutation"


@dataclass(frozen=True)
class StrategyDecision:
    vehicle_id: int
    mode: str
    chosen_speed: float
    best_trial_reward: float
    p_imitation: float
    a_causal: float


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def imitation_mutation_probabilities(a_causal: float, alpha: float, beta: float) -> tuple[float, float]:
    p_im = sigmoid(beta * (a_causal - alpha))
    return p_im, 1.0 - p_im


def imitation_target(last_rewards: Sequence[float], i: int) -> int | None:
    """Index of the best-rewarded other vehicle (lowest index on ties), None if alone."""
    best = None
    for j, r in enumerate(last_rewards):
        if j != i and (best is None or r > last_rewards[best]):
            best = j
    return best


def imitate_speed(target_v: float, sigma: float, rng: np.random.Generator,
                  v_min: float = -math.inf, v_max: float = math.inf) -> float:
    eps = sigma * rng.standard_normal()
    return clamp(target_v + eps, v_min, v_max)


def speed_grid(v: float, span: float, step: float, v_min: float, v_max: float) -> np.ndarray:
    """Feasible trial speeds v - span .. v + span in increments of step, ascending."""
    k = int(round(span / step))
    grid = v + step * np.arange(-k, k + 1)
    return grid[(grid >= v_min) & (grid <= v_max)]


def trial_rewards(world: WorldState, i: int, trials: np.ndarray, cfg: SimConfig,
                  coop: float = 0.0, a_causal: float = 0.0,
                  front: np.ndarray | None = None) -> np.ndarray:
    """Temp reward of vehicle i for each trial speed, everyone else on current speeds.

    Positions are projected one step ahead; vehicle i moves with its trial speed.
    """
    x, y, v = world.arrays()
    if front is None:
        front = front_neighbors(x, y, cfg.lane_width)
    trials = np.asarray(trials, dtype=float)
    x_i = x[i] + trials * cfg.dt
    j = front[i]
    if j >= 0:
        gap = x[j] + v[j] * cfg.dt - x_i
        safety = cfg.r_safety_base / np.maximum(gap, 1.0)
    else:
        safety = np.zeros_like(trials)
    v_avg = (v.sum() - v[i] + trials) / len(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        eff = np.where(v_avg == 0.0, 0.0, cfg.r_efficiency_base * trials / v_avg)
    return safety + eff + coop + a_causal


def mutation_search(world: WorldState, rh: RunHistory | None, i: int, a_causal: float,
                    coop_draw: float, cfg: SimConfig,
                    front: np.ndarray | None = None) -> tuple[float, float]:
    """Best (speed, temp reward) over the mutation grid; ties go to the lowest speed."""
    v = world.vehicles[i].v
    grid = speed_grid(v, cfg.mutation_span, cfg.mutation_step, cfg.v_min, cfg.v_max)
    if grid.size == 0:
        grid = np.array([clamp(v, cfg.v_min, cfg.v_max)])
    r = trial_rewards(world, i, grid, cfg, coop_draw, a_causal, front)
    k = int(np.argmax(r))  # first maximum = lowest speed
    return float(grid[k]), float(r[k])


def _select(world, rh, i, cfg, streams, coop_draw, cegt: bool, front) -> StrategyDecision:
    a = causal_adjustment(cfg.cm, rh.prev_mean_influence, streams.causal[i])
    if cegt:
        p_im, _ = imitation_mutation_probabilities(a, cfg.alpha, cfg.beta)
    else:
        p_im, a = cfg.p_imitation_fixed, 0.0
    r_branch = streams.branch[i].uniform()
    j = imitation_target(rh.last_rewards, i)
    v_target = world.vehicles[j].v if j is not None else world.vehicles[i].v
    v_imit = imitate_speed(v_target, cfg.sigma_imit, streams.imitation[i], cfg.v_min, cfg.v_max)

    if r_branch < p_im and j is not None:
        mode = IMITATION
        best_v = v_imit
        best_r = float(trial_rewards(world, i, np.array([v_imit]), cfg, coop_draw, a, front)[0])
    else:
        mode = MUTATION
        best_v, best_r = mutation_search(world, rh, i, a, coop_draw, cfg, front)
    chosen = max(min(best_v, cfg.v_max), cfg.v_min)
    return StrategyDecision(world.vehicles[i].id, mode, chosen, best_r, p_im, a)


def select_speed_cegt(world: WorldState, rh: RunHistory, i: int, cfg: SimConfig,
                      streams: RngStreams, coop_draw: float = 0.0,
                      front: np.ndarray | None = None) -> StrategyDecision:
    return _select(world, rh, i, cfg, streams, coop_draw, True, front)


def select_speed_egt(world: WorldState, rh: RunHistory, i: int, cfg: SimConfig,
                     streams: RngStreams, coop_draw: float = 0.0,
                     front: np.ndarray | None = None) -> StrategyDecision:
    return _select(world, rh, i, cfg, streams, coop_draw, False, front)
