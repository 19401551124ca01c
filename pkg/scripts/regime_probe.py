"""Sweep constants and report CEGT collision counts against the other strategies.

Grid values are given as key=v1,v2,... pairs over SimConfig fields, e.g.

    python scripts/regime_probe.py d_safe=8,12 v_max=40 beta=1,5 --runs 60

Setting d_safe also moves d_min with it.
"""

import argparse
import itertools

import numpy as np

from cegt import SimConfig
from cegt.config import STRATEGIES
from cegt.engine import run_many
from cegt.harness import sign_test


def parse_grid(items):
    grid = {}
    for item in items:
        key, _, vals = item.partition("=")
        grid[key] = [float(v) for v in vals.split(",")]
    return grid


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("grid", nargs="*")
    ap.add_argument("--scenario", default="case1")
    ap.add_argument("--runs", type=int, default=60)
    ap.add_argument("--strategies", default=",".join(STRATEGIES))
    args = ap.parse_args()
    grid = parse_grid(args.grid)
    strategies = args.strategies.split(",")
    for combo in itertools.product(*grid.values()) if grid else [()]:
        kw = dict(zip(grid, combo))
        if "d_safe" in kw:
            kw["d_min"] = kw["d_safe"]
        cfg = SimConfig(**kw)
        counts = {s: np.array([t.total_collisions for t in run_many(cfg, args.scenario, s, range(args.runs))])
                  for s in strategies}
        means = " ".join(f"{s}={c.mean():.2f}" for s, c in counts.items())
        tests = " ".join("vs {}: {}/{} p={:.3g}".format(s, *sign_test(counts["cegt"], c))
                         for s, c in counts.items() if s != "cegt")
        print(kw, means, tests, flush=True)


if __name__ == "__main__":
    main()
