"""Domain types, random substreams, kinematics and scenario initialization."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import SCENARIOS, ConfigError, SimConfig

# Stable ids for the per-purpose random substreams. Never renumber: doing so
# changes every seeded result.
STREAM_SCENARIO = 0
STREAM_CAUSAL = 1
STREAM_BRANCH = 2
STREAM_IMITATION = 3
STREAM_COOPERATION = 4
STREAM_LANE = 5


def substream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    """Independent generator keyed by (seed, purpose, index).

    Keys are hierarchical, so adding a vehicle or a purpose never perturbs the
    streams of the others.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(purpose, index)))


class RngStreams:
    """All random substreams used by one simulation run."""

    def __init__(self, seed: int, n_vehicles: int):
        self.seed = seed
        self.scenario = substream(seed, STREAM_SCENARIO)
        self.cooperation = substream(seed, STREAM_COOPERATION)
        self.causal = [substream(seed, STREAM_CAUSAL, i) for i in range(n_vehicles)]
        self.branch = [substream(seed, STREAM_BRANCH, i) for i in range(n_vehicles)]
        self.imitation = [substream(seed, STREAM_IMITATION, i) for i in range(n_vehicles)]
        self.lane = [substream(seed, STREAM_LANE, i) for i in range(n_vehicles)]


@dataclass(frozen=True)
class LaneChangePlan:
    coeffs: tuple[float, ...]
    t_start: float
    T: float
    y0: float
    yf: float
    source_lane: int
    target_lane: int


@dataclass(frozen=True)
class VehicleState:
    id: int  # 1-based, vehicle 1 starts farthest ahead
    x: float
    y: float
    v: float
    lane: int
    lane_change: Optional[LaneChangePlan] = None
    lc_eligible: bool = False


@dataclass(frozen=True)
class WorldState:
    vehicles: tuple[VehicleState, ...]
    t: int = 1
    sim_time: float = 0.0

    @property
    def n(self) -> int:
        return len(self.vehicles)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x, y, v) as float arrays in vehicle order."""
        x = np.array([s.x for s in self.vehicles], dtype=float)
        y = np.array([s.y for s in self.vehicles], dtype=float)
        v = np.array([s.v for s in self.vehicles], dtype=float)
        return x, y, v


@dataclass
class VehicleHistory:
    positions: list[float] = field(default_factory=list)
    step_rewards: list[float] = field(default_factory=list)
    causal_influence: list[float] = field(default_factory=list)


@dataclass
class RunHistory:
    """Everything earlier steps leave behind for later decisions.

    ``append`` returns a new history; existing instances are never mutated.
    """

    per_vehicle: tuple[VehicleHistory, ...]
    total_rewards: list[float] = field(default_factory=list)
    collisions_per_step: list[int] = field(default_factory=list)
    cumulative_collisions: int = 0

    @classmethod
    def empty(cls, n: int) -> "RunHistory":
        return cls(per_vehicle=tuple(VehicleHistory() for _ in range(n)))

    def __len__(self) -> int:
        return len(self.collisions_per_step)

    @property
    def last_rewards(self) -> list[float]:
        return [h.step_rewards[-1] if h.step_rewards else 0.0 for h in self.per_vehicle]

    @property
    def prev_mean_influence(self) -> float:
        if not self.per_vehicle[0].causal_influence:
            return 0.0
        return float(np.mean([h.causal_influence[-1] for h in self.per_vehicle]))

    def append(self, positions, step_rewards, influence, n_collisions: int) -> "RunHistory":
        per_vehicle = tuple(
            VehicleHistory(
                positions=h.positions + [float(p)],
                step_rewards=h.step_rewards + [float(r)],
                causal_influence=h.causal_influence + [float(c)],
            )
            for h, p, r, c in zip(self.per_vehicle, positions, step_rewards, influence)
        )
        return RunHistory(
            per_vehicle=per_vehicle,
            total_rewards=self.total_rewards + [float(np.sum(step_rewards))],
            collisions_per_step=self.collisions_per_step + [int(n_collisions)],
            cumulative_collisions=self.cumulative_collisions + int(n_collisions),
        )


def clamp(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


def step_kinematics(s: VehicleState, a: float, dt: float, v_min: float = -np.inf,
                    v_max: float = np.inf) -> VehicleState:
    """Advance one vehicle by dt: position with the current speed, then speed."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    return dataclasses.replace(s, x=s.x + s.v * dt, v=clamp(s.v + a * dt, v_min, v_max))


def init_scenario(cfg: SimConfig, case: str, rng: np.random.Generator) -> WorldState:
    """Random initial world for a scenario.

    case1: N vehicles in one lane. case2: same, plus a second lane and one
    vehicle (the second from the back) eligible to move into it.
    """
    if case not in SCENARIOS:
        raise ConfigError(f"unknown scenario {case!r}")
    if case == "case2" and cfg.n_lanes < 2:
        raise ConfigError("case2 needs n_lanes >= 2")
    n = cfg.n_vehicles
    speeds = rng.uniform(*cfg.init_v_range, size=n)
    gaps = rng.uniform(*cfg.init_gap_range, size=max(n - 1, 0))
    # vehicle 1 leads; each follower sits one gap behind its predecessor
    xs = np.concatenate([[0.0], -np.cumsum(gaps)])
    xs -= xs[-1]
    eligible = n - 2 if (case == "case2" and n >= 2) else -1
    vehicles = tuple(
        VehicleState(id=k + 1, x=float(xs[k]), y=0.0,
                     v=clamp(float(speeds[k]), cfg.v_min, cfg.v_max), lane=0,
                     lc_eligible=(k == eligible))
        for k in range(n)
    )
    return WorldState(vehicles=vehicles, t=1, sim_time=0.0)
