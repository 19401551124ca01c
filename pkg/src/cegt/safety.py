"""Time-to-collision, collision detection and collision response."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import SimConfig
from .core import WorldState

INF = math.inf


@dataclass(frozen=True)
class CollisionEvent:
    step: int
    pair: tuple[int, int]  # vehicle ids, i < j
    gap: float


@dataclass(frozen=True)
class TtcRecord:
    step: int
    pair: tuple[int, int]  # (rear id, front id)
    value: float
    signed_value: float


def ttc(x_i: float, x_j: float, v_i: float, v_j: float, veh_length: float) -> tuple[float, float]:
    """(strict, signed) TTC of rear vehicle i behind front vehicle j.

    The strict value is inf unless i is closing in. The signed value equals
    it while closing and keeps the (negative-speed) ratio for opening pairs,
    unless they open slower than 1e-6 m/s.
    """
    dv = v_i - v_j
    num = x_j - x_i - veh_length
    strict = num / dv if dv > 0 else INF
    signed = strict if dv > 0 else (num / dv if dv < -1e-6 else INF)
    return strict, signed


def laterally_close(y_i: float, y_j: float, lane_width: float) -> bool:
    return abs(y_i - y_j) < lane_width


def effective_lane(y: float, lane_width: float) -> int:
    """Index of the lane centre nearest to lateral position y."""
    return int(math.floor(y / lane_width + 0.5))


def front_neighbors(x: np.ndarray, y: np.ndarray, lane_width: float) -> np.ndarray:
    """For each vehicle, index of the nearest laterally-close vehicle ahead (-1 if none).

    Equal positions resolve by vehicle order: the lower index counts as ahead.
    """
    n = len(x)
    out = np.full(n, -1, dtype=int)
    for i in range(n):
        best = -1
        for j in range(n):
            if j == i or abs(y[i] - y[j]) >= lane_width:
                continue
            ahead = x[j] > x[i] or (x[j] == x[i] and j < i)
            if ahead and (best < 0 or x[j] < x[best] or (x[j] == x[best] and j > best)):
                best = j
        out[i] = best
    return out


def front_gaps(x: np.ndarray, front: np.ndarray) -> np.ndarray:
    """Centre-to-centre distance to the front neighbour; inf for lead vehicles."""
    return np.where(front >= 0, x[np.maximum(front, 0)] - x, INF)


def ttc_records(world: WorldState, cfg: SimConfig) -> list[TtcRecord | None]:
    """TTC of each vehicle to its front neighbour (None for lead vehicles)."""
    x, y, v = world.arrays()
    front = front_neighbors(x, y, cfg.lane_width)
    out: list[TtcRecord | None] = []
    for i, j in enumerate(front):
        if j < 0:
            out.append(None)
            continue
        strict, signed = ttc(x[i], x[j], v[i], v[j], cfg.veh_length)
        out.append(TtcRecord(world.t, (i + 1, int(j) + 1), strict, signed))
    return out


def detect_collisions(world: WorldState, cfg: SimConfig) -> list[CollisionEvent]:
    """Every pair that is laterally within a lane width and longitudinally within d_safe."""
    x, y, _ = world.arrays()
    events = []
    n = world.n
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(x[i] - x[j])
            if laterally_close(y[i], y[j], cfg.lane_width) and gap < cfg.d_safe:
                events.append(CollisionEvent(world.t, (i + 1, j + 1), float(gap)))
    return events


def apply_collision_response(world: WorldState, rewards: Sequence[float],
                             events: Sequence[CollisionEvent], cfg: SimConfig):
    """Penalise both parties of each event and slow the rear one to the front one's speed."""
    rewards = list(rewards)
    if not events:
        return world, rewards
    speeds = [s.v for s in world.vehicles]
    for ev in events:
        a, b = ev.pair[0] - 1, ev.pair[1] - 1
        rewards[a] += cfg.p_collision
        rewards[b] += cfg.p_collision
        xa, xb = world.vehicles[a].x, world.vehicles[b].x
        rear, front = (a, b) if (xa < xb or (xa == xb and a > b)) else (b, a)
        speeds[rear] = min(speeds[rear], speeds[front])
    vehicles = tuple(dataclasses.replace(s, v=v) for s, v in zip(world.vehicles, speeds))
    return dataclasses.replace(world, vehicles=vehicles), rewards


def eq27_gate(lane_i: float, lane_j: float, eps_lane: float) -> bool:
    """Lane-index form of the proximity gate."""
    return abs(lane_i - lane_j) < eps_lane
