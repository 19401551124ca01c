"""Per-step simulation loop, single runs and seeded batches."""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import nash_select, stackelberg_select
from .causal import CausalSnapshot, causal_effectiveness, causal_influence_vector
from .config import STRATEGIES, BaselineConfig, ConfigError, SimConfig, config_hash
from .core import RngStreams, RunHistory, WorldState, init_scenario, step_kinematics
from .lane_change import eval_trajectory, maybe_initiate
from .rewards import RewardBreakdown, cooperation_reward, efficiency_reward, safety_reward
from .safety import (CollisionEvent, TtcRecord, apply_collision_response, detect_collisions,
                     front_gaps, front_neighbors, ttc_records)
from .strategy import StrategyDecision, select_speed_cegt, select_speed_egt

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepRecord:
    step: int
    sim_time: float  # end-of-step time
    x: tuple[float, ...]
    y: tuple[float, ...]
    v: tuple[float, ...]
    lanes: tuple[int, ...]
    lane_change_active: tuple[bool, ...]
    rewards: tuple[RewardBreakdown, ...]
    penalties: tuple[float, ...]
    step_rewards: tuple[float, ...]  # component sum + penalties
    causal: CausalSnapshot
    ttc: tuple[TtcRecord | None, ...]
    collisions: tuple[CollisionEvent, ...]
    decisions: tuple[StrategyDecision, ...] = ()

    @property
    def total_reward(self) -> float:
        return float(sum(self.step_rewards))


@dataclass
class TraceLog:
    scenario: str
    strategy: str
    seed: int
    config_hash: str
    cfg: SimConfig
    initial: WorldState | None = None
    records: list[StepRecord] = field(default_factory=list)

    @property
    def n_steps(self) -> int:
        return len(self.records)

    @property
    def total_collisions(self) -> int:
        return sum(len(r.collisions) for r in self.records)


def _select_speeds(world, rh, cfg, strategy, streams, coop, bcfg):
    if strategy in ("cegt", "egt"):
        x, y, _ = world.arrays()
        front = front_neighbors(x, y, cfg.lane_width)
        select = select_speed_cegt if strategy == "cegt" else select_speed_egt
        decisions = tuple(select(world, rh, i, cfg, streams, coop, front) for i in range(world.n))
        return [d.chosen_speed for d in decisions], [d.a_causal for d in decisions], decisions
    if strategy == "nash":
        return nash_select(world, rh, cfg, bcfg), [0.0] * world.n, ()
    if strategy == "stackelberg":
        return stackelberg_select(world, rh, cfg, bcfg), [0.0] * world.n, ()
    raise ConfigError(f"unknown strategy {strategy!r}")


def step(world: WorldState, rh: RunHistory, cfg: SimConfig, strategy: str, streams: RngStreams,
         bcfg: BaselineConfig | None = None) -> tuple[WorldState, RunHistory, StepRecord]:
    """Advance the world one step.

    Order: causal snapshot, simultaneous speed decisions on the frozen world,
    kinematics, lateral motion, lane-change triggers, rewards, collisions,
    history.
    """
    bcfg = bcfg or BaselineConfig()
    t, n = world.t, world.n

    influence = causal_influence_vector(rh, t, cfg.w_c, cfg.causal_window)
    mean_influence = float(np.mean(influence))
    coop = cooperation_reward(n, cfg.gamma, cfg.lam, rh.collisions_per_step, streams.cooperation)

    targets, a_causal, decisions = _select_speeds(world, rh, cfg, strategy, streams, coop, bcfg)

    new_time = t * cfg.dt
    moved = []
    for s, vt in zip(world.vehicles, targets):
        s = step_kinematics(s, (vt - s.v) / cfg.dt, cfg.dt, cfg.v_min, cfg.v_max)
        plan = s.lane_change
        if plan is not None:
            tau = new_time - plan.t_start
            if tau >= plan.T - 1e-9:
                # the intention is fulfilled: one change per eligible vehicle
                s = dataclasses.replace(s, y=plan.target_lane * cfg.lane_width,
                                        lane=plan.target_lane, lane_change=None,
                                        lc_eligible=False)
            else:
                s = dataclasses.replace(s, y=eval_trajectory(plan, tau)[0])
        moved.append(s)
    world2 = WorldState(vehicles=tuple(moved), t=t + 1, sim_time=new_time)

    plans = [maybe_initiate(world2, i, cfg, streams.lane[i], new_time) for i in range(n)]
    if any(p is not None for p in plans):
        world2 = dataclasses.replace(world2, vehicles=tuple(
            dataclasses.replace(s, lane_change=p) if p is not None else s
            for s, p in zip(world2.vehicles, plans)))

    x, y, v = world2.arrays()
    gaps = front_gaps(x, front_neighbors(x, y, cfg.lane_width))
    breakdowns = tuple(
        RewardBreakdown(
            safety=safety_reward(float(gaps[i]), cfg.r_safety_base),
            efficiency=efficiency_reward(float(v[i]), v, cfg.r_efficiency_base),
            cooperation=coop,
            causal=float(a_causal[i]),
        )
        for i in range(n)
    )
    base_rewards = [b.total for b in breakdowns]

    events = detect_collisions(world2, cfg)
    world3, rewards = apply_collision_response(world2, base_rewards, events, cfg)
    penalties = tuple(r - b for r, b in zip(rewards, base_rewards))

    effectiveness = causal_effectiveness(rewards, cfg.cm, mean_influence, rh.total_rewards)
    snapshot = CausalSnapshot(tuple(influence), mean_influence, effectiveness, tuple(a_causal))
    rh2 = rh.append(x, rewards, influence, len(events))

    x3, y3, v3 = world3.arrays()
    record = StepRecord(
        step=t,
        sim_time=new_time,
        x=tuple(x3.tolist()),
        y=tuple(y3.tolist()),
        v=tuple(v3.tolist()),
        lanes=tuple(s.lane for s in world3.vehicles),
        lane_change_active=tuple(s.lane_change is not None for s in world3.vehicles),
        rewards=breakdowns,
        penalties=penalties,
        step_rewards=tuple(float(r) for r in rewards),
        causal=snapshot,
        ttc=tuple(ttc_records(world3, cfg)),
        collisions=tuple(events),
        decisions=decisions,
    )
    return world3, rh2, record


def run(cfg: SimConfig, scenario: str, strategy: str, seed: int | None = None,
        bcfg: BaselineConfig | None = None) -> TraceLog:
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    seed = cfg.seed if seed is None else seed
    bcfg = bcfg or BaselineConfig()
    streams = RngStreams(seed, cfg.n_vehicles)
    world = init_scenario(cfg, scenario, streams.scenario)
    rh = RunHistory.empty(world.n)
    trace = TraceLog(scenario, strategy, seed, config_hash(cfg, bcfg), cfg, initial=world)
    for _ in range(cfg.n_steps):
        world, rh, rec = step(world, rh, cfg, strategy, streams, bcfg)
        trace.records.append(rec)
    log.debug("run %s/%s seed=%d collisions=%d", scenario, strategy, seed, trace.total_collisions)
    return trace


def _run_args(args):
    return run(*args)


def run_many(cfg: SimConfig, scenario: str, strategy: str, seeds, bcfg=None,
             workers: int = 1) -> list[TraceLog]:
    """Run one trace per seed, in seed order regardless of worker count."""
    jobs = [(cfg, scenario, strategy, s, bcfg) for s in seeds]
    if workers <= 1:
        return [run(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_args, jobs))


def run_batch(cfg: SimConfig, scenario: str, strategy: str, n_runs: int, base_seed: int = 0,
              bcfg: BaselineConfig | None = None, workers: int = 1):
    """Seeds base_seed .. base_seed + n_runs - 1, aggregated into a BatchSummary."""
    from .summary import summarize

    if n_runs < 1:
        raise ConfigError("n_runs must be >= 1")
    traces = run_many(cfg, scenario, strategy, range(base_seed, base_seed + n_runs), bcfg, workers)
    return summarize(traces)
