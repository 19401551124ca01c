"""Trace persistence, summary files and strategy comparison tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.stats import binomtest

from .config import BaselineConfig, SimConfig
from .engine import TraceLog, run_batch
from .summary import Band, BatchSummary

COLUMNS = (
    "step", "sim_time_s", "vehicle_id", "x_m", "y_m", "lane", "v_mps", "r_safety",
    "r_efficiency", "r_cooperation", "a_causal", "r_total", "causal_influence",
    "collision_flag", "ttc_front_s", "ttc_front_signed_s", "lane_change_active",
)
INT_COLUMNS = {"step", "vehicle_id", "lane", "collision_flag", "lane_change_active"}


def _num(v: float) -> str:
    """Shortest round-tripping decimal; empty cell for infinities and NaN."""
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def trace_rows(trace: TraceLog) -> list[dict]:
    """One dict per (step, vehicle), keyed by COLUMNS, values already encoded as text."""
    rows = []
    for rec in trace.records:
        hit = {k for ev in rec.collisions for k in ev.pair}
        for k in range(len(rec.x)):
            b, t = rec.rewards[k], rec.ttc[k]
            rows.append({
                "step": str(rec.step),
                "sim_time_s": _num(rec.sim_time),
                "vehicle_id": str(k + 1),
                "x_m": _num(rec.x[k]),
                "y_m": _num(rec.y[k]),
                "lane": str(rec.lanes[k]),
                "v_mps": _num(rec.v[k]),
                "r_safety": _num(b.safety),
                "r_efficiency": _num(b.efficiency),
                "r_cooperation": _num(b.cooperation),
                "a_causal": _num(b.causal),
                "r_total": _num(rec.step_rewards[k]),
                "causal_influence": _num(rec.causal.influence[k]),
                "collision_flag": "1" if (k + 1) in hit else "0",
                "ttc_front_s": "" if t is None else _num(t.value),
                "ttc_front_signed_s": "" if t is None else _num(t.signed_value),
                "lane_change_active": "1" if rec.lane_change_active[k] else "0",
            })
    return rows


def trace_meta(trace: TraceLog) -> dict:
    return {
        "scenario": trace.scenario,
        "strategy": trace.strategy,
        "seed": trace.seed,
        "config_hash": trace.config_hash,
        "n_steps": trace.n_steps,
        "n_vehicles": trace.cfg.n_vehicles,
        "total_collisions": trace.total_collisions,
        "collision_events": [[rec.step, *ev.pair] for rec in trace.records for ev in rec.collisions],
    }


def export_trace(trace: TraceLog, path: str | Path, fmt: str = "csv") -> Path:
    """Write the trace rows plus a ``<path>.meta.json`` sidecar. Returns the trace path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = trace_rows(trace)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        path.write_text(buf.getvalue())
    elif fmt in ("jsonl", "json-lines"):
        lines = (json.dumps({c: _decode(c, r[c]) for c in COLUMNS}) for r in rows)
        path.write_text("".join(line + "\n" for line in lines))
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
    meta_path = path.with_name(path.name + ".meta.json")
    meta_path.write_text(json.dumps(trace_meta(trace), indent=2, sort_keys=True) + "\n")
    return path


def _decode(col: str, cell):
    if col in INT_COLUMNS:
        return int(cell)
    if cell == "" or cell is None:
        return None
    return float(cell)


def load_trace(path: str | Path) -> list[dict]:
    """Read a csv or jsonl trace back into typed rows (None marks an empty TTC cell)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".jsonl":
        return [json.loads(line) for line in text.splitlines() if line]
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
    return [{c: _decode(c, r[c]) for c in COLUMNS} for r in reader]


def recount_collisions(rows: Iterable[dict], meta: dict) -> int:
    """Collision count re-derived from exported data: pairs per step, from the sidecar."""
    rows = list(rows)
    flagged = {(r["step"], r["vehicle_id"]) for r in rows if r["collision_flag"]}
    events = meta["collision_events"]
    if not all((s, a) in flagged and (s, b) in flagged for s, a, b in events):
        raise ValueError("collision events in the sidecar disagree with the row flags")
    return len(events)


def band_table(summary: BatchSummary) -> str:
    """Per-step curves with run-spread bands, CSV text; empty cells are the no-risk marker."""
    cols: list[tuple[str, np.ndarray]] = [("sim_time_s", summary.times)]

    def add(prefix: str, band: Band):
        for stat in ("mean", "std", "min", "max"):
            cols.append((f"{prefix}_{stat}", getattr(band, stat)))

    add("cum_reward", summary.cumulative_reward)
    for k, b in enumerate(summary.speed):
        add(f"v{k + 1}_mps", b)
    add("ttc_strict_s", summary.ttc_strict)
    add("ttc_signed_s", summary.ttc_signed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([name for name, _ in cols])
    for i in range(len(summary.times)):
        w.writerow([_num(a[i]) for _, a in cols])
    return buf.getvalue()


def write_summary(summary: BatchSummary, out_dir: str | Path, tag: str = "") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"summary_{summary.scenario}_{summary.strategy}{tag}"
    j = out / f"{stem}.json"
    j.write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n")
    b = out / f"{stem}_bands.csv"
    b.write_text(band_table(summary))
    return [j, b]


def sign_test(a, b) -> tuple[int, int, float]:
    """One-sided paired sign test of a < b. Ties are dropped. Returns (wins, losses, p)."""
    a, b = np.asarray(a), np.asarray(b)
    wins, losses = int((a < b).sum()), int((a > b).sum())
    if wins + losses == 0:
        return wins, losses, 1.0
    return wins, losses, float(binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue)


COMPARISON_COLUMNS = (
    "strategy", "n_runs", "collisions_mean", "collisions_std", "collisions_min", "collisions_max",
    "final_reward_mean", "ttc_below_fraction_mean", "wins_vs_ref", "losses_vs_ref",
    "sign_test_p_vs_ref",
)


def comparison_table(summaries: dict[str, BatchSummary], reference: str = "cegt") -> str:
    """One row per strategy. The sign test asks whether ``reference`` collides less, run by run."""
    ref = summaries.get(reference)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for name, s in summaries.items():
        c = s.collisions
        if ref is not None and name != reference:
            wins, losses, p = sign_test(ref.collisions_per_run, s.collisions_per_run)
            test = [str(wins), str(losses), _num(p)]
        else:
            test = ["", "", ""]
        w.writerow([name, str(s.n_runs), _num(c["mean"]), _num(c["std"]), _num(c["min"]),
                    _num(c["max"]), _num(np.mean(s.final_reward_per_run)),
                    _num(s.ttc_below_fraction["mean"]), *test])
    return buf.getvalue()


def compare(cfg: SimConfig, scenario: str, strategies: Iterable[str], n_runs: int,
            base_seed: int = 0, bcfg: BaselineConfig | None = None,
            workers: int = 1) -> dict[str, BatchSummary]:
    """Batch every strategy over the same seed range."""
    return {s: run_batch(cfg, scenario, s, n_runs, base_seed, bcfg, workers) for s in strategies}
