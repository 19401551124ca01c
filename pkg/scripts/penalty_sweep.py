"""Strategy comparison at collision penalties -100, -200 and -300.

Each setting writes its summaries, band curves and comparison table under --out.
"""

import argparse
from pathlib import Path

from cegt.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="case1", choices=("case1", "case2"))
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results/penalty_sweep"))
    args = ap.parse_args()
    for pen in (-100, -200, -300):
        print(f"== penalty {pen}")
        argv = ["compare", "--scenario", args.scenario, "--runs", str(args.runs), "--penalty", str(pen),
                "--no-traces", "--out", str(args.out / f"penalty_{-pen}")]
        if args.config:
            argv += ["--config", str(args.config)]
        rc = cli(argv)
        if rc:
            raise SystemExit(rc)


if __name__ == "__main__":
    main()
