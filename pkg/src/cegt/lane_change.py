"""Quintic lateral trajectories for lane changes."""

from __future__ import annotations

import numpy as np

from .config import SimConfig
from .core import LaneChangePlan, WorldState
from .safety import effective_lane


def boundary_matrix(T: float) -> np.ndarray:
    """Rows: y, y', y'' at 0 then at T, for coefficients a0..a5."""
    return np.array([
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 2, 0, 0, 0],
        [1, T, T**2, T**3, T**4, T**5],
        [0, 1, 2 * T, 3 * T**2, 4 * T**3, 5 * T**4],
        [0, 0, 2, 6 * T, 12 * T**2, 20 * T**3],
    ], dtype=float)


def solve_quintic(y0: float, yf: float, T: float, dy0: float = 0.0, ddy0: float = 0.0,
                  dyf: float = 0.0, ddyf: float = 0.0) -> tuple[float, ...]:
    """Coefficients a0..a5 meeting position/velocity/acceleration at both ends."""
    if not T > 0:
        raise ValueError("T must be > 0")
    # solve in normalised time s = tau/T for conditioning, then rescale
    rhs = np.array([y0, dy0 * T, ddy0 * T**2, yf, dyf * T, ddyf * T**2], dtype=float)
    b = np.linalg.solve(boundary_matrix(1.0), rhs)
    return tuple(float(bk / T**k) for k, bk in enumerate(b))


def eval_poly(coeffs, tau: float) -> tuple[float, float, float]:
    a0, a1, a2, a3, a4, a5 = coeffs
    y = a0 + tau * (a1 + tau * (a2 + tau * (a3 + tau * (a4 + tau * a5))))
    dy = a1 + tau * (2 * a2 + tau * (3 * a3 + tau * (4 * a4 + tau * 5 * a5)))
    ddy = 2 * a2 + tau * (6 * a3 + tau * (12 * a4 + tau * 20 * a5))
    return y, dy, ddy


def eval_trajectory(plan: LaneChangePlan, tau: float) -> tuple[float, float, float]:
    """(y, y', y'') at time tau into the maneuver, tau clamped to [0, T]."""
    return eval_poly(plan.coeffs, min(max(tau, 0.0), plan.T))


def make_plan(y0: float, source_lane: int, target_lane: int, t_start: float,
              cfg: SimConfig) -> LaneChangePlan:
    # + for a left change (towards higher lane index), - for right
    yf = y0 + (target_lane - source_lane) * cfg.lane_width
    return LaneChangePlan(coeffs=solve_quintic(y0, yf, cfg.t_lc), t_start=t_start, T=cfg.t_lc,
                          y0=y0, yf=yf, source_lane=source_lane, target_lane=target_lane)


def lane_change_feasible(world: WorldState, i: int, target_lane: int, d_safe: float,
                         lane_width: float = 3.75) -> bool:
    """True iff nobody in (or moving into) target_lane is within d_safe of vehicle i.

    i is a 0-based index into world.vehicles.
    """
    me = world.vehicles[i]
    if abs(target_lane - me.lane) != 1:
        return False
    for j, other in enumerate(world.vehicles):
        if j == i:
            continue
        in_target = (
            other.lane == target_lane
            or effective_lane(other.y, lane_width) == target_lane
            or (other.lane_change is not None and other.lane_change.target_lane == target_lane)
        )
        if in_target and not abs(other.x - me.x) > d_safe:
            return False
    return True


def pick_target_lane(lane: int, n_lanes: int) -> int | None:
    if lane + 1 < n_lanes:
        return lane + 1
    if lane - 1 >= 0:
        return lane - 1
    return None


def maybe_initiate(world: WorldState, i: int, cfg: SimConfig, rng: np.random.Generator,
                   t_start: float | None = None) -> LaneChangePlan | None:
    """Random lane-change trigger with a spacing check.

    One uniform is consumed per call whether or not the vehicle can change.
    """
    r_lane = rng.uniform()
    me = world.vehicles[i]
    if not me.lc_eligible or me.lane_change is not None:
        return None
    if not r_lane < cfg.p_lane:
        return None
    target = pick_target_lane(me.lane, cfg.n_lanes)
    if target is None or not lane_change_feasible(world, i, target, cfg.d_safe, cfg.lane_width):
        return None
    t0 = world.sim_time if t_start is None else t_start
    return make_plan(me.y, me.lane, target, t0, cfg)
