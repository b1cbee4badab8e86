"""Synthetic network-slice KPIs, their image encodings, and baseline classifiers.

The heavy lifting happens in the compiled ``_core`` extension. This module
adds thin conveniences: configuration dictionaries instead of JSON strings
and parsed evaluation reports.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Mapping, Optional, Sequence

from . import _core
from ._core import (
    KPI_NAMES,
    METHODS,
    SLICES,
    ConfigError,
    DataError,
    Dataset,
    EncodingError,
    IntegrityError,
    IoError,
    SliceVisError,
    TrainingError,
    UsageError,
    perlin2,
)

__version__ = "0.1.0"

__all__ = [
    "KPI_NAMES",
    "METHODS",
    "SLICES",
    "ConfigError",
    "DataError",
    "Dataset",
    "EncodingError",
    "IntegrityError",
    "IoError",
    "SliceVisError",
    "TrainingError",
    "UsageError",
    "default_config",
    "encode",
    "evaluate",
    "generate",
    "load_dataset",
    "perlin2",
    "simulate_kpis",
]


def _config_text(config: Optional[Mapping[str, Any] | str | os.PathLike]) -> Optional[str]:
    if config is None:
        return None
    if isinstance(config, Mapping):
        return json.dumps(config)
    with open(config, encoding="utf-8") as fh:
        return fh.read()


def default_config() -> dict:
    """The built-in configuration in canonical form."""
    return json.loads(_core.default_config_json())


def generate(
    count: int,
    config: Optional[Mapping[str, Any] | str | os.PathLike] = None,
    *,
    seed: Optional[int] = None,
    methods: Optional[Iterable[str]] = None,
    workers: int = 1,
) -> Dataset:
    """Generate ``count`` samples.

    ``config`` is a dict following the JSON schema or a path to a JSON file.
    ``seed`` overrides the configured master seed.
    """
    return _core.generate(
        count,
        _config_text(config),
        seed,
        None if methods is None else list(methods),
        workers,
    )


def load_dataset(root: str | os.PathLike) -> Dataset:
    """Load and verify a dataset directory written by ``Dataset.write``."""
    return _core.load_dataset(os.fspath(root))


def evaluate(
    dataset: Dataset,
    methods: Optional[Sequence[str]] = None,
    *,
    split_seed: int = 7,
    k: int = 5,
) -> dict:
    """Run the raw-KPI and image baselines on one stratified 80/20 split."""
    methods = None if methods is None else list(methods)
    return json.loads(_core.evaluate(dataset, methods, split_seed, k))


def simulate_kpis(
    slice: str,
    count: int,
    seed: int = 0,
    config: Optional[Mapping[str, Any] | str | os.PathLike] = None,
):
    """Measured KPI vectors for one slice type as a (count, 10) float array."""
    return _core.simulate_kpis(slice, count, seed, _config_text(config))


def encode(
    method: str,
    normalized: Sequence[Optional[float]],
    slice: str = "eMBB",
    *,
    side: int = 16,
    seed: int = 0,
):
    """Encode one normalized KPI vector into an (side, side, 3) float patch."""
    return _core.encode(method, list(normalized), slice, side, seed)
