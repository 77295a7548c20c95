"""Shared experiment plumbing: config validation, replicate mapping, outputs.

Every experiment writes a ``manifest.json`` holding the seed, the full
validated config and its hash, the data checksums and library versions,
which is enough to reproduce the run bit for bit.  Replicates derive their
streams from ``(seed, replicate_id, role)``, so results do not depend on
the number of worker processes.
"""
from __future__ import annotations

import csv
import hashlib
import json
import multiprocessing
import platform
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..datasets import data_checksums

__all__ = ["validate_config", "map_replicates", "write_csv", "write_manifest", "ConfigError"]


class ConfigError(ValueError):
    """A config file failed validation; nothing has been written."""


def validate_config(raw: dict, schema: dict, name: str) -> dict:
    """Merge ``raw`` over schema defaults, rejecting unknown or ill-typed keys.

    ``schema`` maps key -> (default, validator); a validator returns the
    coerced value or raises ValueError.
    """
    if not isinstance(raw, dict):
        raise ConfigError(f"{name} config must be a JSON object")
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(f"{name} config has unknown keys: {sorted(unknown)}")
    out = {}
    for key, (default, validator) in schema.items():
        value = raw.get(key, default)
        try:
            out[key] = validator(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{name} config key {key!r}: {e}") from e
    return out


def positive_int(v) -> int:
    v = int(v)
    if v < 1:
        raise ValueError("must be a positive integer")
    return v


def nonneg_int(v) -> int:
    v = int(v)
    if v < 0:
        raise ValueError("must be nonnegative")
    return v


def positive_float(v) -> float:
    v = float(v)
    if not v > 0:
        raise ValueError("must be positive")
    return v


def any_float(v) -> float:
    return float(v)


def probability(v) -> float:
    v = float(v)
    if not 0.0 < v < 1.0:
        raise ValueError("must lie strictly between 0 and 1")
    return v


def int_list(v) -> list:
    return [positive_int(x) for x in list(v)]


_ACTIVE_WORKER = None


def _invoke_worker(replicate_id):
    return _ACTIVE_WORKER(replicate_id)


def map_replicates(worker, R: int, threads: int = 1) -> list:
    """Apply ``worker(replicate_id)`` for replicate ids 0..R-1, in index order.

    ``threads > 1`` fans out over forked processes; workers must derive all
    randomness from the replicate id for the result to be thread-count
    independent.
    """
    if threads <= 1 or R <= 1:
        return [worker(r) for r in range(R)]
    global _ACTIVE_WORKER
    _ACTIVE_WORKER = worker
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=min(threads, R)) as pool:
            chunk = max(1, R // (threads * 8))
            return pool.map(_invoke_worker, range(R), chunksize=chunk)
    finally:
        _ACTIVE_WORKER = None


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])


def _format_cell(v):
    if isinstance(v, (bool, str)):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return v


def write_manifest(out_dir, subcommand: str, seed: int, config: dict, extra: dict | None = None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config_text = json.dumps(config, sort_keys=True)
    manifest = {
        "subcommand": subcommand,
        "seed": int(seed),
        "config": config,
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "data_checksums": data_checksums(),
        "versions": {
            "coupled_mcmc": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }
    if extra:
        manifest.update(extra)
    with open(out_dir / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return manifest
