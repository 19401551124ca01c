"""Simulation, baseline and experiment configuration.

Configs are frozen dataclasses. The on-disk format is a flat INI document with
three sections::

    [sim]
    dt = 0.1
    init_v_range = 10.0, 20.0

    [strategy]
    cm = 0.1

    [experiment]
    scenario = case1
    strategies = cegt, egt

Absent keys take their defaults, unknown keys are rejected, and every value is
range-checked by the dataclass itself so that all entry points share one
validation path.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
import re
from dataclasses import dataclass, field, fields
from typing import Any

SCENARIOS = ("case1", "case2")
STRATEGIES = ("cegt", "egt", "nash", "stackelberg")


class ConfigError(ValueError):
    """Invalid configuration document or value."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class SimConfig:
    # kinematics / road
    dt: float = 0.1
    duration: float = 10.0
    n_lanes: int = 2
    n_vehicles: int = 4
    lane_width: float = 3.75
    veh_length: float = 5.0
    v_min: float = 0.0
    v_max: float = 25.0
    d_min: float = 5.0
    d_safe: float = 5.0
    eps_lane: float = 0.5
    # rewards
    r_safety_base: float = 10.0
    r_efficiency_base: float = 10.0
    p_collision: float = -100.0
    # lane change
    p_lane: float = 0.1
    t_lc: float = 8.14
    # scenario
    init_v_range: tuple[float, float] = (10.0, 20.0)
    init_gap_range: tuple[float, float] = (10.0, 20.0)
    ttc_threshold: float = 4.0
    seed: int = 0
    # strategy (causal gate, imitation, mutation)
    cm: float = 0.1
    w_c: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    gamma: float = 0.9
    lam: float = 1.0
    sigma_imit: float = 0.1
    mutation_span: float = 2.0
    mutation_step: float = 0.1
    p_imitation_fixed: float = 0.5
    causal_window: int = 0  # 0 = full history

    def __post_init__(self):
        object.__setattr__(self, "init_v_range", tuple(float(v) for v in self.init_v_range))
        object.__setattr__(self, "init_gap_range", tuple(float(v) for v in self.init_gap_range))
        checks = [
            (self.dt > 0, "dt must be > 0"),
            (self.duration > 0, "duration must be > 0"),
            (self.n_lanes >= 1, "n_lanes must be >= 1"),
            (self.n_vehicles >= 1, "n_vehicles must be >= 1"),
            (self.lane_width > 0, "lane_width must be > 0"),
            (self.veh_length >= 0, "veh_length must be >= 0"),
            (self.v_min <= self.v_max, "v_min must be <= v_max"),
            (self.d_min >= 0 and self.d_safe >= 0, "d_min and d_safe must be >= 0"),
            (self.eps_lane > 0, "eps_lane must be > 0"),
            (0.0 <= self.p_lane <= 1.0, "p_lane must be in [0, 1]"),
            (self.t_lc > 0, "t_lc must be > 0"),
            (len(self.init_v_range) == 2 and self.init_v_range[0] <= self.init_v_range[1],
             "init_v_range must be a non-empty [lo, hi] range"),
            (len(self.init_gap_range) == 2 and self.init_gap_range[0] <= self.init_gap_range[1],
             "init_gap_range must be a non-empty [lo, hi] range"),
            (self.init_gap_range[0] >= 0, "init_gap_range must be non-negative"),
            (self.ttc_threshold > 0, "ttc_threshold must be > 0"),
            (self.seed >= 0, "seed must be unsigned"),
            (self.cm >= 0, "cm must be >= 0"),
            (0.0 < self.gamma < 1.0, "gamma must be in (0, 1)"),
            (self.lam > 0, "lam must be > 0"),
            (self.sigma_imit >= 0, "sigma_imit must be >= 0"),
            (self.mutation_span >= 0, "mutation_span must be >= 0"),
            (self.mutation_step > 0, "mutation_step must be > 0"),
            (0.0 <= self.p_imitation_fixed <= 1.0, "p_imitation_fixed must be in [0, 1]"),
            (self.causal_window >= 0, "causal_window must be >= 0"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and math.isnan(v):
                raise ConfigError(f"{f.name} is NaN")

    @property
    def n_steps(self) -> int:
        # small epsilon keeps 10.0/0.1 from flooring to 99
        return int(math.floor(self.duration / self.dt + 1e-9))


@dataclass(frozen=True)
class BaselineConfig:
    action_grid_span: float = 2.0
    action_grid_step: float = 0.1
    nash_max_iters: int = 50
    nash_tol: float = 1e-9

    def __post_init__(self):
        if self.action_grid_step <= 0:
            raise ConfigError("action_grid_step must be > 0")
        if self.action_grid_span < 0:
            raise ConfigError("action_grid_span must be >= 0")
        if self.nash_max_iters < 0:
            raise ConfigError("nash_max_iters must be >= 0")
        if self.nash_tol < 0:
            raise ConfigError("nash_tol must be >= 0")


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: str = "case1"
    strategies: tuple[str, ...] = STRATEGIES
    n_runs: int = 100
    base_seed: int = 0
    out_dir: str = "out"
    format: str = "csv"
    overrides: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad or not self.strategies:
            raise ConfigError(f"unknown strategies {bad}; expected a subset of {STRATEGIES}")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be unsigned")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError("format must be csv or jsonl")


SIM_KEYS = (
    "dt", "duration", "n_lanes", "n_vehicles", "lane_width", "veh_length", "v_min", "v_max",
    "d_min", "d_safe", "eps_lane", "r_safety_base", "r_efficiency_base", "p_collision",
    "p_lane", "t_lc", "init_v_range", "init_gap_range", "ttc_threshold", "seed",
)
STRATEGY_KEYS = (
    "cm", "w_c", "alpha", "beta", "gamma", "lam", "sigma_imit", "mutation_span",
    "mutation_step", "p_imitation_fixed", "causal_window",
    "action_grid_span", "action_grid_step", "nash_max_iters", "nash_tol",
)
EXPERIMENT_KEYS = ("scenario", "strategies", "n_runs", "base_seed", "out_dir", "format")
SECTIONS = {"sim": SIM_KEYS, "strategy": STRATEGY_KEYS, "experiment": EXPERIMENT_KEYS}

_TYPES = {f.name: f.type for cls in (SimConfig, BaselineConfig, ExperimentSpec) for f in fields(cls)}


def _convert(key: str, raw: str) -> Any:
    typ = _TYPES[key]
    raw = raw.strip()
    if typ == "float":
        return float(raw)
    if typ == "int":
        return int(raw)
    if typ == "str":
        return raw
    if typ.startswith("tuple[float"):
        return tuple(float(p) for p in raw.split(","))
    if typ.startswith("tuple[str"):
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    raise TypeError(f"no converter for {key}: {typ}")


def _key_line(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.fullmatch(r"\[(.+)\]", s)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return lineno
    return None


def parse_config(text: str) -> tuple[SimConfig, BaselineConfig, ExperimentSpec]:
    """Parse a config document into (SimConfig, BaselineConfig, ExperimentSpec)."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("key outside of a [section]", e.lineno) from e
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError("malformed line", line) from e
    except configparser.Error as e:
        raise ConfigError(str(e).splitlines()[0], getattr(e, "lineno", None)) from e

    values: dict[str, Any] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]", _section_line(text, section))
        for key, raw in parser.items(section):
            line = _key_line(text, section, key)
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", line)
            try:
                values[key] = _convert(key, raw)
            except ValueError as e:
                raise ConfigError(f"bad value for {key}: {raw!r}", line) from e

    return build_configs(values, text)


def _section_line(text: str, section: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f"[{section}]":
            return lineno
    return None


def build_configs(values: dict[str, Any], text: str = ""):
    """Build the three config objects from a flat key -> value mapping."""
    groups = {
        SimConfig: {k: v for k, v in values.items() if k in _field_names(SimConfig)},
        BaselineConfig: {k: v for k, v in values.items() if k in _field_names(BaselineConfig)},
        ExperimentSpec: {k: v for k, v in values.items() if k in _field_names(ExperimentSpec)},
    }
    built = []
    for cls, kwargs in groups.items():
        try:
            built.append(cls(**kwargs))
        except ConfigError as e:
            key = str(e).split()[0]
            section = next((s for s, keys in SECTIONS.items() if key in keys), None)
            line = _key_line(text, section, key) if section and text else None
            raise ConfigError(str(e), line) from None
    sim, base, exp = built
    exp = dataclasses.replace(exp, overrides=dict(values))
    return sim, base, exp


def _field_names(cls) -> set[str]:
    return {f.name for f in fields(cls) if f.name != "overrides"}


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def dump_config(sim: SimConfig, base: BaselineConfig | None = None,
                exp: ExperimentSpec | None = None) -> str:
    """Emit the effective configuration as a document parse_config accepts."""
    base = base or BaselineConfig()
    exp = exp or ExperimentSpec()
    merged = {**dataclasses.asdict(sim), **dataclasses.asdict(base), **dataclasses.asdict(exp)}
    lines = []
    for section, keys in SECTIONS.items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {_fmt(merged[k])}" for k in keys)
        lines.append("")
    return "\n".join(lines)


def config_hash(sim: SimConfig, base: BaselineConfig | None = None) -> str:
    """Stable digest of the effective simulation config."""
    payload = {**dataclasses.asdict(sim), **dataclasses.asdict(base or BaselineConfig())}
    blob = json.dumps(payload, sort_keys=True, default=list).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
