"""Experiment configuration: JSON schema, semantic checks and shipped presets."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import jsonschema

from .dynamics import ScalarField, Segment, segments_from_json
from .geometry import FundamentalDomain, build_group
from .quasimorphism import CountingQM
from .words import WordFormatError, as_word


class ConfigError(ValueError):
    pass


_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_TERM = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "bump"},
                "center": _POINT,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "amplitude": {"type": "number"},
            },
            "required": ["kind", "center", "radius", "amplitude"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "collar"},
                "core": {"type": "string"},
                "width": {"type": "number", "exclusiveMinimum": 0},
                "amplitude": {"type": "number"},
            },
            "required": ["kind", "core", "width", "amplitude"],
            "additionalProperties": False,
        },
    ]
}
_FIELD = {
    "type": "object",
    "properties": {"terms": {"type": "array", "items": _TERM}},
    "required": ["terms"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "genus": {"type": "integer"},
        "hamiltonian": _FIELD,
        "perturbation": _FIELD,
        "composition": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"field": _FIELD, "duration": {"type": "number", "minimum": 0}},
                "required": ["field"],
                "additionalProperties": False,
            },
        },
        "pattern": {"type": "string"},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "p": {"type": "integer", "minimum": 1},
        "n_samples": {"type": "integer", "minimum": 100},
        "seed": {"type": "integer", "minimum": 0},
        "epsilons": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "n_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "flow": {
            "type": "object",
            "properties": {
                "x0": _POINT,
                "T": {"type": "number", "exclusiveMinimum": 0},
                "dt": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "output": {"type": "string"},
    },
    "required": ["genus"],
    "additionalProperties": False,
}

_COLLAR_A1 = {"kind": "collar", "core": "a1", "width": 0.5, "amplitude": 1.0}
_COLLAR_B1 = {"kind": "collar", "core": "b1", "width": 0.5, "amplitude": 1.0}
_BUMP = {"kind": "bump", "center": [0.2, 0.1], "radius": 0.6, "amplitude": 1.0}
# centred near the a1 core so that the perturbation changes the orbits it meets
_BUMP_ON_CORE = {"kind": "bump", "center": [0.3, 0.3], "radius": 0.8, "amplitude": 1.0}

DEFAULTS: dict[str, Any] = {
    "genus": 2,
    "hamiltonian": {"terms": [_COLLAR_A1]},
    "perturbation": {"terms": [_BUMP_ON_CORE]},
    "composition": [
        {"field": {"terms": [_COLLAR_A1]}, "duration": 1.0},
        {"field": {"terms": [_COLLAR_B1]}, "duration": 1.0},
    ],
    "pattern": "a1 b1",
    "dt": 0.01,
    "p": 8,
    "n_samples": 2000,
    "seed": 0,
    "epsilons": [0.1, 0.05, 0.01],
    "n_list": list(range(1, 11)),
    "flow": {"x0": [0.337094103833, 0.337094103833], "T": 1.0, "dt": 0.001},
    "output": "out",
}

PRESETS: dict[str, dict[str, Any]] = {
    "vanishing": {},
    "unboundedness": {},
    "continuity": {"pattern": "a1"},
    "flow": {},
    "vanishing_bump": {"hamiltonian": {"terms": [_BUMP]}},
    "vanishing_contrast": {"pattern": "a1"},
}


def preset(name: str) -> dict[str, Any]:
    return resolve(PRESETS[name])


def resolve(raw: dict[str, Any]) -> dict[str, Any]:
    """Fill defaults (one level deep for ``flow``)."""
    cfg = copy.deepcopy(DEFAULTS)
    for k, v in raw.items():
        if k == "flow" and isinstance(v, dict):
            cfg["flow"].update(v)
        else:
            cfg[k] = copy.deepcopy(v)
    return cfg


def _path(err: jsonschema.ValidationError) -> str:
    return "/".join(str(x) for x in err.absolute_path) or "<root>"


def validate(raw: dict[str, Any]) -> dict[str, Any]:
    """Schema plus semantic checks; returns the resolved configuration."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>: config must be a JSON object")
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(raw),
                    key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{_path(e)}: {e.message}")
    cfg = resolve(raw)
    if cfg["genus"] < 2:
        raise ConfigError("genus: genus must be ≥ 2")
    try:
        CountingQM(cfg["pattern"], build_group(cfg["genus"]).group)
    except (ValueError, WordFormatError) as exc:
        raise ConfigError(f"pattern: {exc}") from exc
    eps = cfg["epsilons"]
    if any(a <= b for a, b in zip(eps, eps[1:])):
        raise ConfigError("epsilons: must be strictly decreasing")
    return cfg


def load(path: str | Path) -> dict[str, Any]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: invalid JSON ({exc})") from exc
    return validate(raw)


def config_hash(cfg: dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


@dataclass
class Setup:
    """Objects built from a resolved configuration."""

    cfg: dict[str, Any]
    domain: FundamentalDomain

    @classmethod
    def build(cls, cfg: dict[str, Any]) -> "Setup":
        return cls(cfg, build_group(cfg["genus"]))

    def _field(self, d: dict) -> ScalarField:
        try:
            return ScalarField.from_json(self.domain, d)
        except (ValueError, WordFormatError) as exc:
            raise ConfigError(f"field: {exc}") from exc

    @property
    def hamiltonian(self) -> ScalarField:
        return self._field(self.cfg["hamiltonian"])

    @property
    def perturbation(self) -> ScalarField:
        return self._field(self.cfg["perturbation"])

    @property
    def composition(self) -> list[Segment]:
        try:
            return segments_from_json(self.domain, self.cfg["composition"])
        except (ValueError, WordFormatError) as exc:
            raise ConfigError(f"composition: {exc}") from exc

    @property
    def qm(self) -> CountingQM:
        return CountingQM(as_word(self.cfg["pattern"]), self.domain.group)
