"""Accuracy/fairness Pareto fronts for logistic classifiers."""

import json
import os

from ._core import (
    ConfigError,
    DataError,
    Dataset,
    Error,
    NumericalError,
    __version__,
    dominates,
    downsample_indices,
    evaluate,
    generate_synthetic,
    hypervolume,
    hypervolume_reference,
    nondominated_indices,
    performance_profile,
    pfsmg,
    purity,
    read_front,
    solve_minnorm,
    spread_delta,
    spread_gamma,
)
from ._core import _run_command


def run(command, config=None, seed=None, out=".", workers=None, inputs=()):
    """Runs a CLI subcommand in-process and returns its manifest as a dict."""
    cfg = os.fspath(config) if config is not None else None
    paths = [os.fspath(p) for p in inputs]
    return json.loads(_run_command(command, cfg, seed, os.fspath(out), workers, paths))


__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "Error",
    "NumericalError",
    "__version__",
    "dominates",
    "downsample_indices",
    "evaluate",
    "generate_synthetic",
    "hypervolume",
    "hypervolume_reference",
    "nondominated_indices",
    "performance_profile",
    "pfsmg",
    "purity",
    "read_front",
    "run",
    "solve_minnorm",
    "spread_delta",
    "spread_gamma",
]
