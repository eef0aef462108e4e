"""Experiment configuration: defaults, presets, files, environment.

A configuration is a plain JSON object validated against a schema.
Values are resolved in increasing priority: built-in defaults, then the
named preset, then the configuration file, then DEEPESN_* environment
variables, then command-line flags. The resolved object is what every
run and grid report echoes back.
"""

from __future__ import annotations

import copy
import json
import os

import jsonschema

from .errors import ConfigError
from .ip import IpConfig
from .reservoir import ReservoirConfig
from .selection import GridSpec, clip_radius_target

__all__ = [
    "CONFIG_SCHEMA",
    "DEFAULTS",
    "PRESETS",
    "resolve_config",
    "build_reservoir_config",
    "build_ip_config",
    "build_grid_spec",
]

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_UNIT_OPEN = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "preset": {"type": "string"},
        "dataset": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "workers": {"type": "integer", "minimum": 1},
        "washout": {"type": "integer", "minimum": 0},
        "reservoir": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_layers": {"type": "integer", "minimum": 1},
                "units_per_layer": {"type": "integer", "minimum": 1},
                "leaky_rate": _UNIT_OPEN,
                "spectral_radius": _UNIT_OPEN,
                "input_scaling": _POSITIVE,
                "connectivity": _UNIT_OPEN,
            },
        },
        "ip": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "enabled": {"type": "boolean"},
                "target_mean": {"type": "number"},
                "target_std": _POSITIVE,
                "learning_rate": _POSITIVE,
                "epochs": {"type": "integer", "minimum": 1},
            },
        },
        "readout": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "ridge": {"type": "number", "minimum": 0},
                "threshold": {"type": "number", "minimum": 0, "maximum": 1},
                "tune_threshold": {"type": "boolean"},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "spectral_radii": {
                    "type": "array", "items": _UNIT_OPEN, "minItems": 1,
                },
                "leaky_rates": {
                    "type": "array", "items": _UNIT_OPEN, "minItems": 1,
                },
                "input_scalings": {
                    "type": "array", "items": _POSITIVE, "minItems": 1,
                },
                "ridges": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
                "n_guesses": {"type": "integer", "minimum": 1},
            },
        },
    },
}

DEFAULTS = {
    "dataset": None,
    "seed": 0,
    "workers": 1,
    "washout": 0,
    "reservoir": {
        "n_layers": 1,
        "units_per_layer": 100,
        "leaky_rate": 1.0,
        "spectral_radius": 0.9,
        "input_scaling": 1.0,
        "connectivity": 0.01,
    },
    "ip": {
        "enabled": False,
        "target_mean": 0.0,
        "target_std": 0.1,
        "learning_rate": 1e-3,
        "epochs": 5,
    },
    "readout": {"ridge": 1e-3, "threshold": 0.5, "tune_threshold": False},
    "grid": {
        "spectral_radii": [0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
        "leaky_rates": [0.1, 0.3, 0.5, 0.7, 0.9, 1.0],
        "input_scalings": [0.5, 1.5, 2.5],
        "ridges": [1e-4, 1e-3, 1e-2, 1e-1],
        "n_guesses": 5,
    },
}

# Benchmark architectures: a deep stack and a single wide layer of the
# same total size, both sparse and both with adaptation enabled.
PRESETS = {
    "deepesn-paper": {
        "reservoir": {
            "n_layers": 30,
            "units_per_layer": 200,
            "connectivity": 0.01,
        },
        "ip": {"enabled": True, "target_std": 0.1},
    },
    "esn-paper": {
        "reservoir": {
            "n_layers": 1,
            "units_per_layer": 6000,
            "connectivity": 0.01,
        },
        "ip": {"enabled": True, "target_std": 0.1},
    },
}


def _merge(base: dict, override: dict) -> dict:
    """Merge one level of nested sections; scalars replace outright."""
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = {**out[key], **value}
        else:
            out[key] = value
    return out


def _env_int(env: dict, name: str):
    raw = env.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def resolve_config(
    path=None,
    preset: str | None = None,
    env: dict | None = None,
    seed: int | None = None,
    workers: int | None = None,
    dataset: str | None = None,
) -> dict:
    """Produce the fully resolved configuration dictionary.

    `path` points to an optional JSON file; `preset` overrides the
    file's own preset key. `seed`, `workers`, and `dataset` are flag
    values and take priority over everything, environment included.
    """
    file_config = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                file_config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        try:
            jsonschema.validate(file_config, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = ".".join(str(p) for p in exc.absolute_path) or "(top level)"
            raise ConfigError(f"{path}: {where}: {exc.message}") from exc

    resolved = copy.deepcopy(DEFAULTS)
    preset_name = preset if preset is not None else file_config.get("preset")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset_name!r}; available: {sorted(PRESETS)}"
            )
        resolved = _merge(resolved, PRESETS[preset_name])
    resolved = _merge(
        resolved, {k: v for k, v in file_config.items() if k != "preset"}
    )

    env = os.environ if env is None else env
    env_seed = _env_int(env, "DEEPESN_SEED")
    env_workers = _env_int(env, "DEEPESN_WORKERS")
    if env_seed is not None:
        resolved["seed"] = env_seed
    if env_workers is not None:
        resolved["workers"] = env_workers

    if seed is not None:
        resolved["seed"] = seed
    if workers is not None:
        resolved["workers"] = workers
    if dataset is not None:
        resolved["dataset"] = dataset
    return resolved


def build_reservoir_config(config: dict, input_dim: int) -> ReservoirConfig:
    """Turn the reservoir section into a validated ReservoirConfig."""
    r = config["reservoir"]
    try:
        return ReservoirConfig(
            input_dim=input_dim,
            n_layers=r["n_layers"],
            units_per_layer=r["units_per_layer"],
            leaky_rate=r["leaky_rate"],
            spectral_radius_target=clip_radius_target(r["spectral_radius"]),
            input_scaling=r["input_scaling"],
            connectivity=r["connectivity"],
            seed=config["seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_ip_config(config: dict) -> IpConfig | None:
    """IpConfig from the ip section, or None when adaptation is off."""
    section = config["ip"]
    if not section["enabled"]:
        return None
    try:
        return IpConfig(
            target_mean=section["target_mean"],
            target_std=section["target_std"],
            learning_rate=section["learning_rate"],
            epochs=section["epochs"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_grid_spec(config: dict) -> GridSpec:
    """GridSpec from the grid section."""
    g = config["grid"]
    try:
        return GridSpec(
            spectral_radii=tuple(g["spectral_radii"]),
            leaky_rates=tuple(g["leaky_rates"]),
            input_scalings=tuple(g["input_scalings"]),
            ridges=tuple(g["ridges"]),
            n_guesses=g["n_guesses"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
