"""Experiment configuration: JSON parsing and schema validation."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import jsonschema

from .diskmaps import MapSpec, MeasureSpec, TwistSpec

__all__ = ["ExperimentConfig", "ConfigError", "load_config"]

_SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schema", "experiment.schema.json")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _load_schema() -> dict:
    with open(_SCHEMA_PATH) as fh:
        return json.load(fh)


def _point(xy) -> complex:
    return complex(xy[0], xy[1])


def _map_spec(data: dict) -> MapSpec:
    twists = tuple(
        TwistSpec(_point(t["center"]), t["radius"], t["angle"], t.get("profile", "quartic_bump"))
        for t in data["twists"]
    )
    return MapSpec(twists)


def _measure_spec(data: dict) -> MeasureSpec:
    kind = data["type"]
    if kind == "area":
        return MeasureSpec("area")
    if kind == "radial":
        return MeasureSpec("radial", profile=data.get("profile", "quartic_bump"))
    if kind == "dirac":
        if "point" not in data:
            raise ConfigError("dirac measure needs a point")
        return MeasureSpec("dirac", point=_point(data["point"]))
    if "points" not in data:
        raise ConfigError("finite measure needs points")
    return MeasureSpec("finite", points=tuple(_point(p) for p in data["points"]))


@dataclass
class ExperimentConfig:
    n: int
    seed: int
    map: MapSpec
    measures: list[MeasureSpec]
    samples: int = 20
    n_max: int = 16
    workers: int = 1
    base_angle: float = 0.0
    kind: str = "theta2"
    resolution: int = 32
    stretch_cap: int | None = None
    conjugator: MapSpec | None = None
    measure_families: list[list[MeasureSpec]] | None = None
    extract_N: int = 1
    extract_resolution: int = 32
    extract_trace: bool = True
    calabi_samples: int = 1000
    calabi_N: int = 8
    raw: dict = field(default_factory=dict)


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a config file; raises ConfigError with location."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(data, _load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    measures = [_measure_spec(ms) for ms in data["measures"]]
    if len(measures) != data["n"]:
        raise ConfigError(f"n = {data['n']} but {len(measures)} measures given")
    families = None
    if "measure_families" in data:
        families = [[_measure_spec(ms) for ms in fam] for fam in data["measure_families"]]
        for fam in families:
            if len(fam) != data["n"]:
                raise ConfigError("every measure family must list n measures")
    extract = data.get("extract", {})
    calabi = data.get("calabi", {})
    try:
        map_spec = _map_spec(data["map"])
        conj = _map_spec(data["conjugator"]) if "conjugator" in data else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(
        n=data["n"],
        seed=data["seed"],
        map=map_spec,
        measures=measures,
        samples=data.get("samples", 20),
        n_max=data.get("n_max", 16),
        workers=data.get("workers", 1),
        base_angle=data.get("base_angle", 0.0),
        kind=data.get("kind", "theta2"),
        resolution=data.get("resolution", 32),
        stretch_cap=data.get("stretch_cap"),
        conjugator=conj,
        measure_families=families,
        extract_N=extract.get("N", 1),
        extract_resolution=extract.get("resolution", 32),
        extract_trace=extract.get("trace", True),
        calabi_samples=calabi.get("samples", 1000),
        calabi_N=calabi.get("N", 8),
        raw=data,
    )
