"""Synthetic data, file formats and run orchestration."""

from .io import (
    load_dataset, load_solution, load_truth, read_dataset, read_metrics_csv,
    save_dataset, save_solution, save_truth, write_metrics_csv,
)
from .runner import RunConfig, RunResult, run
from .synthetic import gen_synthetic, named_rng

__all__ = [
    "RunConfig", "RunResult", "gen_synthetic", "load_dataset", "load_solution", "load_truth",
    "named_rng", "read_dataset", "read_metrics_csv", "run", "save_dataset", "save_solution",
    "save_truth", "write_metrics_csv",
]
