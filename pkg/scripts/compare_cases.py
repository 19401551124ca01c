"""Collision comparison of all four strategies in both scenarios, with paired sign tests.

    python scripts/compare_cases.py --runs 100 --out results/compare
    python scripts/compare_cases.py --config my.ini
"""

import argparse
from pathlib import Path

from cegt.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results/compare"))
    args = ap.parse_args()
    for scenario in ("case1", "case2"):
        print(f"== {scenario}")
        argv = ["compare", "--scenario", scenario, "--runs", str(args.runs), "--seed", str(args.seed),
                "--no-traces", "--out", str(args.out / scenario)]
        if args.config:
            argv += ["--config", str(args.config)]
        rc = cli(argv)
        if rc:
            raise SystemExit(rc)


if __name__ == "__main__":
    main()
