"""Declarative experiment configs (YAML key/value blocks) and their validation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from .errors import ConfigurationError
from .grids import Grid, WaveFunction, gaussian, make_grid
from .potentials import PRESETS, QuadraticSpec, RepulsiveSpec

EXPERIMENT_KINDS = (
    "propagate",
    "cook",
    "wave-operator",
    "velocity",
    "classical",
    "mourre-scan",
    "convergence",
)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    raw: dict
    seed: int

    def digest(self) -> str:
        canon = json.dumps({"config": self.raw, "seed": self.seed}, sort_keys=True,
                           default=str)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_config(path, seed_override: Optional[int] = None) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"{path}: YAML parse error: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: config must be a mapping")
    kind = raw.get("experiment")
    if kind not in EXPERIMENT_KINDS:
        raise ConfigurationError(
            f"{path}: field 'experiment' must be one of {EXPERIMENT_KINDS}, got {kind!r}"
        )
    seed = seed_override if seed_override is not None else int(raw.get("seed", 0))
    return ExperimentConfig(kind=kind, raw=raw, seed=seed)


def require(block: dict, key: str, context: str):
    if key not in block:
        raise ConfigurationError(f"{context}: missing required field '{key}'")
    return block[key]


def build_grid(block: dict) -> Grid:
    return make_grid(
        dims=int(block.get("dims", 1)),
        points_per_dim=int(require(block, "points", "grid")),
        half_width=float(require(block, "half_width", "grid")),
    )


def build_state(block: dict, grid: Grid) -> WaveFunction:
    kind = block.get("kind", "gaussian")
    if kind != "gaussian":
        raise ConfigurationError(f"state: unknown kind {kind!r}")
    return gaussian(
        grid,
        center=block.get("center", 0.0),
        width=float(block.get("width", 1.0)),
        momentum=block.get("momentum", 0.0),
    )


def build_repulsive(block: dict) -> RepulsiveSpec:
    return RepulsiveSpec(
        alpha=float(require(block, "alpha", "hamiltonian.repulsive")),
        regularized=bool(block.get("regularized", True)),
    )


def build_quadratic(block: dict, dims: int) -> QuadraticSpec:
    return QuadraticSpec(
        dims=dims,
        n_minus=int(block.get("n_minus", 0)),
        n_plus=int(block.get("n_plus", 0)),
        n_E=int(block.get("n_E", 0)),
        omegas=tuple(float(w) for w in block.get("omegas", ())),
        fields=tuple(float(e) for e in block.get("fields", ())),
    )


def build_perturbation(block: Optional[dict]):
    """Symbolic preset or raw sample table; None means V = 0."""
    if block is None:
        return None
    if "preset" in block:
        name = block["preset"]
        if name not in PRESETS:
            raise ConfigurationError(
                f"perturbation: unknown preset {name!r}; available {sorted(PRESETS)}"
            )
        args = block.get("args", {})
        return PRESETS[name](**args)
    if "table" in block:
        return np.asarray(block["table"], dtype=float)
    raise ConfigurationError("perturbation block needs 'preset' or 'table'")


def build_schedule(block: dict) -> np.ndarray:
    if "times" in block:
        times = np.asarray([float(t) for t in block["times"]])
    else:
        start = float(require(block, "start", "schedule"))
        stop = float(require(block, "stop", "schedule"))
        count = int(require(block, "count", "schedule"))
        spacing = block.get("spacing", "linear")
        if spacing == "geometric":
            times = np.geomspace(start, stop, count)
        elif spacing == "linear":
            times = np.linspace(start, stop, count)
        else:
            raise ConfigurationError(f"schedule: unknown spacing {spacing!r}")
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ConfigurationError("schedule times must be positive and increasing")
    return times


def format_float(x) -> object:
    """JSON-safe value with shortest round-trip float text (bit-stable)."""
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(repr(x))
