"""Aggregation of traces into batch statistics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .engine import TraceLog


@dataclass(frozen=True)
class Band:
    """Pointwise mean / std / min / max across runs."""

    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray

    @classmethod
    def of(cls, runs: np.ndarray) -> "Band":
        """Band over axis 0. NaN entries are skipped; all-NaN columns stay NaN."""
        runs = np.asarray(runs, dtype=float)
        if not np.isnan(runs).any():
            return cls(runs.mean(0), runs.std(0), runs.min(0), runs.max(0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return cls(np.nanmean(runs, 0), np.nanstd(runs, 0), np.nanmin(runs, 0), np.nanmax(runs, 0))

    def to_dict(self) -> dict:
        return {k: _jsonable(getattr(self, k)) for k in ("mean", "std", "min", "max")}


def _jsonable(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        v = float(a)
        return None if math.isnan(v) else v
    return [_jsonable(x) for x in a]


@dataclass(frozen=True)
class BatchSummary:
    scenario: str
    strategy: str
    seeds: tuple[int, ...]
    times: np.ndarray
    collisions_per_run: tuple[int, ...]
    collisions: dict
    cumulative_reward: Band  # system reward summed over vehicles, prefix-summed over time
    final_reward_per_run: tuple[float, ...]
    speed: tuple[Band, ...]  # one band per vehicle
    ttc_strict: Band  # mean finite TTC over vehicle pairs per step; NaN = no finite pair
    ttc_signed: Band
    ttc_below_fraction_per_run: tuple[float, ...]
    ttc_below_fraction: dict = field(default_factory=dict)

    @property
    def n_runs(self) -> int:
        return len(self.seeds)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "strategy": self.strategy,
            "n_runs": self.n_runs,
            "seeds": list(self.seeds),
            "times": _jsonable(self.times),
            "collisions_per_run": list(self.collisions_per_run),
            "collisions": self.collisions,
            "cumulative_reward": self.cumulative_reward.to_dict(),
            "final_reward_per_run": list(self.final_reward_per_run),
            "speed": [b.to_dict() for b in self.speed],
            "ttc_strict": self.ttc_strict.to_dict(),
            "ttc_signed": self.ttc_signed.to_dict(),
            "ttc_below_fraction_per_run": list(self.ttc_below_fraction_per_run),
            "ttc_below_fraction": self.ttc_below_fraction,
        }


def _stats(values) -> dict:
    a = np.asarray(values, dtype=float)
    return {"mean": float(a.mean()), "std": float(a.std()), "min": float(a.min()), "max": float(a.max())}


def mean_finite(values) -> float:
    """Mean of the finite entries; NaN (the no-risk marker) if there are none."""
    a = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    return float(a.mean()) if a.size else math.nan


def below_threshold_fraction(trace: TraceLog, threshold: float) -> float:
    """Share of (step, vehicle pair) TTC records with a finite strict TTC below threshold."""
    total = below = 0
    for rec in trace.records:
        for r in rec.ttc:
            if r is None:
                continue
            total += 1
            below += math.isfinite(r.value) and r.value < threshold
    return below / total if total else 0.0


def summarize(traces: list[TraceLog]) -> BatchSummary:
    if not traces:
        raise ValueError("no traces to summarize")
    first = traces[0]
    for tr in traces[1:]:
        if (tr.scenario, tr.strategy, tr.n_steps) != (first.scenario, first.strategy, first.n_steps):
            raise ValueError("heterogeneous traces: scenario, strategy and step count must match")
    n_veh = len(first.records[0].x) if first.records else 0

    collisions = [tr.total_collisions for tr in traces]
    step_totals = np.array([[rec.total_reward for rec in tr.records] for tr in traces])
    cum = np.cumsum(step_totals, axis=1)
    speeds = np.array([[rec.v for rec in tr.records] for tr in traces])  # run, step, vehicle
    strict = np.array([[mean_finite([r.value for r in rec.ttc if r]) for rec in tr.records]
                       for tr in traces])
    signed = np.array([[mean_finite([r.signed_value for r in rec.ttc if r]) for rec in tr.records]
                       for tr in traces])
    below = [below_threshold_fraction(tr, first.cfg.ttc_threshold) for tr in traces]

    return BatchSummary(
        scenario=first.scenario,
        strategy=first.strategy,
        seeds=tuple(tr.seed for tr in traces),
        times=np.array([rec.sim_time for rec in first.records]),
        collisions_per_run=tuple(collisions),
        collisions=_stats(collisions),
        cumulative_reward=Band.of(cum),
        final_reward_per_run=tuple(float(c[-1]) if c.size else 0.0 for c in cum),
        speed=tuple(Band.of(speeds[:, :, k]) for k in range(n_veh)),
        ttc_strict=Band.of(strict),
        ttc_signed=Band.of(signed),
        ttc_below_fraction_per_run=tuple(below),
        ttc_below_fraction=_stats(below),
    )
