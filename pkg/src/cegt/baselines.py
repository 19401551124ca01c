"""Nash (iterated best response) and Stackelberg (front-to-back) speed baselines.

Both use the self-interested payoff safety + efficiency on the same action
grid as the mutation search, and no randomness.
"""

from __future__ import annotations

import numpy as np

from .config import BaselineConfig, SimConfig
from .core import RunHistory, WorldState
from .safety import front_neighbors


def payoff(world: WorldState, i: int, trials: np.ndarray, speeds: np.ndarray, cfg: SimConfig,
           front: np.ndarray) -> np.ndarray:
    """Payoff of vehicle i for each trial speed, others playing ``speeds``."""
    x = np.array([s.x for s in world.vehicles], dtype=float)
    trials = np.asarray(trials, dtype=float)
    j = front[i]
    if j >= 0:
        gap = x[j] + speeds[j] * cfg.dt - (x[i] + trials * cfg.dt)
        safety = cfg.r_safety_base / np.maximum(gap, 1.0)
    else:
        safety = np.zeros_like(trials)
    v_avg = (speeds.sum() - speeds[i] + trials) / len(speeds)
    with np.errstate(divide="ignore", invalid="ignore"):
        eff = np.where(v_avg == 0.0, 0.0, cfg.r_efficiency_base * trials / v_avg)
    return safety + eff


def action_grid(v: float, cfg: SimConfig, bcfg: BaselineConfig) -> np.ndarray:
    k = int(round(bcfg.action_grid_span / bcfg.action_grid_step))
    grid = v + bcfg.action_grid_step * np.arange(-k, k + 1)
    grid = grid[(grid >= cfg.v_min) & (grid <= cfg.v_max)]
    if grid.size == 0:
        grid = np.array([min(max(v, cfg.v_min), cfg.v_max)])
    return grid


def best_response(world, i, speeds, cfg, bcfg, front) -> float:
    """Grid argmax of vehicle i's payoff; ties go to the highest speed."""
    grid = action_grid(world.vehicles[i].v, cfg, bcfg)
    r = payoff(world, i, grid, speeds, cfg, front)
    return float(grid[len(grid) - 1 - int(np.argmax(r[::-1]))])


def nash_select(world: WorldState, rh: RunHistory | None, cfg: SimConfig,
                bcfg: BaselineConfig | None = None) -> list[float]:
    bcfg = bcfg or BaselineConfig()
    x, y, v = world.arrays()
    front = front_neighbors(x, y, cfg.lane_width)
    speeds = v.copy()
    for _ in range(bcfg.nash_max_iters):
        moved = 0.0
        for i in range(world.n):
            new = best_response(world, i, speeds, cfg, bcfg, front)
            moved = max(moved, abs(new - speeds[i]))
            speeds[i] = new
        if moved <= bcfg.nash_tol:
            break
    return [float(s) for s in speeds]


def stackelberg_select(world: WorldState, rh: RunHistory | None, cfg: SimConfig,
                       bcfg: BaselineConfig | None = None) -> list[float]:
    bcfg = bcfg or BaselineConfig()
    x, y, v = world.arrays()
    front = front_neighbors(x, y, cfg.lane_width)
    speeds = v.copy()
    for i in range(world.n):
        speeds[i] = best_response(world, i, speeds, cfg, bcfg, front)
    return [float(s) for s in speeds]
