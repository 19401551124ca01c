"""Causal-evaluation evolutionary game simulator for autonomous-vehicle interaction."""

from .config import BaselineConfig, ConfigError, ExperimentSpec, SimConfig, parse_config
from .engine import TraceLog, run, run_batch, step
from .summary import BatchSummary, summarize

__all__ = [
    "BaselineConfig", "BatchSummary", "ConfigError", "ExperimentSpec", "SimConfig", "TraceLog",
    "parse_config", "run", "run_batch", "step", "summarize",
]
