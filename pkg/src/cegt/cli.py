"""Command line entry point: run, batch, compare, validate-config."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from .config import (SCENARIOS, STRATEGIES, BaselineConfig, ConfigError, ExperimentSpec, SimConfig,
                     dump_config, parse_config)
from .engine import run, run_batch
from .harness import compare, comparison_table, export_trace, write_summary

log = logging.getLogger("cegt")

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO,
              "debug": logging.DEBUG}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cegt", description="Causal evolutionary game simulation of highway traffic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, runs=False):
        sp.add_argument("--config", type=Path, help="INI file with [sim], [strategy], [experiment]")
        sp.add_argument("--scenario", choices=SCENARIOS)
        sp.add_argument("--seed", type=int, help="run seed (run) or first seed (batch/compare)")
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--format", choices=("csv", "jsonl"))
        sp.add_argument("--penalty", type=float, help="override the collision penalty")
        if runs:
            sp.add_argument("--runs", type=int)
            sp.add_argument("--workers", type=int, default=1)
            sp.add_argument("--no-traces", action="store_true", help="skip per-run trace files")

    sp = sub.add_parser("run", help="simulate a single seeded run and export its trace")
    common(sp)
    sp.add_argument("--strategy", choices=STRATEGIES, default=None)

    sp = sub.add_parser("batch", help="seeded batch for one strategy")
    common(sp, runs=True)
    sp.add_argument("--strategy", choices=STRATEGIES, default=None)

    sp = sub.add_parser("compare", help="batch several strategies on the same seeds")
    common(sp, runs=True)
    sp.add_argument("--strategy", help="comma separated subset (default: all)")

    sp = sub.add_parser("validate-config", help="parse a config and print the effective values")
    sp.add_argument("--config", type=Path)
    sp.add_argument("--penalty", type=float)
    return p


def load_effective(args) -> tuple[SimConfig, BaselineConfig, ExperimentSpec]:
    """Config file plus command line overrides; the one validation path for every subcommand."""
    text = ""
    if getattr(args, "config", None) is not None:
        try:
            text = args.config.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from e
    sim, base, exp = parse_config(text)
    if getattr(args, "penalty", None) is not None:
        sim = dataclasses.replace(sim, p_collision=args.penalty)
    changes = {}
    for flag, key in (("scenario", "scenario"), ("runs", "n_runs"), ("format", "format")):
        if getattr(args, flag, None) is not None:
            changes[key] = getattr(args, flag)
    if getattr(args, "out", None) is not None:
        changes["out_dir"] = str(args.out)
    if getattr(args, "seed", None) is not None:
        changes["base_seed"] = args.seed
    strategy = getattr(args, "strategy", None)
    if strategy:
        changes["strategies"] = tuple(s.strip() for s in strategy.split(",") if s.strip())
    if changes:
        exp = dataclasses.replace(exp, **changes)
    return sim, base, exp


def _echo(out: Path, sim, base, exp) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(dump_config(sim, base, exp))


def _trace_name(scenario, strategy, seed, fmt) -> str:
    return f"trace_{scenario}_{strategy}_seed{seed}.{fmt}"


def cmd_run(args) -> int:
    sim, base, exp = load_effective(args)
    strategy = exp.strategies[0] if args.strategy else "cegt"
    seed = exp.base_seed if args.seed is not None else sim.seed
    out = Path(exp.out_dir)
    _echo(out, sim, base, dataclasses.replace(exp, strategies=(strategy,), base_seed=seed))
    trace = run(sim, exp.scenario, strategy, seed, base)
    path = export_trace(trace, out / _trace_name(exp.scenario, strategy, seed, exp.format), exp.format)
    print(f"{path}  collisions={trace.total_collisions}")
    return 0


def _batch_one(args, sim, base, exp, strategy, out):
    if args.no_traces:
        return run_batch(sim, exp.scenario, strategy, exp.n_runs, exp.base_seed, base, args.workers)
    from .engine import run_many
    from .summary import summarize

    seeds = range(exp.base_seed, exp.base_seed + exp.n_runs)
    traces = run_many(sim, exp.scenario, strategy, seeds, base, args.workers)
    for tr in traces:
        export_trace(tr, out / "traces" / _trace_name(exp.scenario, strategy, tr.seed, exp.format),
                     exp.format)
    return summarize(traces)


def cmd_batch(args) -> int:
    sim, base, exp = load_effective(args)
    strategy = exp.strategies[0] if args.strategy else "cegt"
    exp = dataclasses.replace(exp, strategies=(strategy,))
    out = Path(exp.out_dir)
    _echo(out, sim, base, exp)
    summary = _batch_one(args, sim, base, exp, strategy, out)
    write_summary(summary, out)
    c = summary.collisions
    print(f"{strategy}: collisions mean={c['mean']:.3f} std={c['std']:.3f} over {summary.n_runs} runs")
    return 0


def cmd_compare(args) -> int:
    sim, base, exp = load_effective(args)
    out = Path(exp.out_dir)
    _echo(out, sim, base, exp)
    if args.no_traces:
        summaries = compare(sim, exp.scenario, exp.strategies, exp.n_runs, exp.base_seed, base,
                            args.workers)
    else:
        summaries = {s: _batch_one(args, sim, base, exp, s, out) for s in exp.strategies}
    for s in summaries.values():
        write_summary(s, out)
    table = comparison_table(summaries)
    (out / f"comparison_{exp.scenario}.csv").write_text(table)
    print(table, end="")
    return 0


def cmd_validate(args) -> int:
    sim, base, exp = load_effective(args)
    print(dump_config(sim, base, exp), end="")
    return 0


COMMANDS = {"run": cmd_run, "batch": cmd_batch, "compare": cmd_compare,
            "validate-config": cmd_validate}


def _setup_logging() -> None:
    level = LOG_LEVELS.get(os.environ.get("CEGT_LOG_LEVEL", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - any runtime failure maps to exit code 2
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
