"""JSON setup files: schema, default resolution and construction of model objects.

Every physical quantity in a setup file carries its unit in the field name
(``z_m``, ``spin_rate_rad_per_s``, ...).  ``load_config`` validates the file,
fills defaults and returns a :class:`SetupConfig` whose ``resolved`` dict is
what the run manifest echoes; feeding that echo back reproduces the same
configuration.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .chain import DEFAULT_INERTIA, Chain, ElementKind, OpticalElement, alternating_chain
from .constants import DEFAULT_WAVELENGTH, OMEGA_EARTH
from .errors import ConfigError, PhysicsContractError
from .vortex import BeamGeometry

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_frac = {"type": "number", "minimum": 0, "maximum": 1}
_kinds = [k.value for k in ElementKind]

ELEMENT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "z_m"],
    "properties": {
        "kind": {"enum": _kinds},
        "z_m": _num,
        "spin_rate_rad_per_s": {**_num, "default": 0.0},
        "efficiency": {**_frac, "default": 1.0},
        "moment_of_inertia_kg_m2": {**_pos, "default": DEFAULT_INERTIA},
        "bias_shift_rad_per_s": {**_num, "default": 0.0},
    },
}

ALTERNATING_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["alternating"],
    "properties": {
        "alternating": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_elements", "spin_rate_rad_per_s"],
            "properties": {
                "n_elements": {"type": "integer", "minimum": 0},
                "spin_rate_rad_per_s": _num,
                "spacing_m": {**_pos, "default": 0.1},
                "kind": {"enum": _kinds[:3], "default": "DovePrism"},
                "moment_of_inertia_kg_m2": {**_pos, "default": DEFAULT_INERTIA},
                "efficiency": {**_frac, "default": 1.0},
            },
        }
    },
}

WINDOW_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "theta_min_rad", "theta_max_rad", "r_min_m", "r_max_m"],
    "properties": {
        "id": {"type": "integer", "minimum": 0},
        "theta_min_rad": _num,
        "theta_max_rad": _num,
        "r_min_m": {"type": "number", "minimum": 0},
        "r_max_m": _pos,
        "side": {"enum": ["above", "below"], "default": "above"},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PCVI setup",
    "type": "object",
    "additionalProperties": False,
    "required": ["beam", "chain"],
    "properties": {
        "beam": {
            "type": "object",
            "additionalProperties": False,
            "required": ["d0_m", "ell"],
            "properties": {
                "wavelength_m": {**_pos, "default": DEFAULT_WAVELENGTH},
                "d0_m": _pos,
                "power_W": {"type": "number", "minimum": 0, "default": 1e-3},
                "ell": {"type": "integer"},
                "amplitude": {"type": "number", "minimum": 0, "default": 1.0},
            },
        },
        "chain": {"oneOf": [{"type": "array", "minItems": 2, "items": ELEMENT_SCHEMA}, ALTERNATING_SCHEMA]},
        "frame_rate_rad_per_s": {**_num, "default": 0.0},
        "exact_recoil": {"type": "boolean", "default": False},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nx": {"type": "integer", "minimum": 16, "default": 256},
                "ny": {"type": "integer", "minimum": 16, "default": 256},
                "extent_m": _pos,
                "z_m": _num,
                "n_frames": {"type": "integer", "minimum": 1, "default": 16},
                "frame_dt_s": _pos,
                "projection": {"type": "number", "exclusiveMinimum": 0, "maximum": 1, "default": 1.0},
                "bits": {"enum": [8, 16], "default": 8},
            },
            "default": {},
        },
        "mc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_photons": {"type": "integer", "minimum": 1, "default": 100000},
                "seed": {"type": "integer", "minimum": 0, "default": 0},
                "rate_per_s": {**_pos, "default": 1e6},
                "segment": {"type": "integer", "minimum": 0, "default": 0},
                "z_m": _num,
                "amplitude_ratio": _frac,
                "which_way": {"type": "boolean", "default": False},
                "split": {**_frac, "default": 0.5},
                "mean_photons": _pos,
                "gate_s": {**_pos, "default": 1e-9},
                "windows": {"type": "array", "items": WINDOW_SCHEMA},
            },
            "default": {},
        },
        "scenario": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "target_multiplier": {"type": "integer", "minimum": 1},
                "ell_max": {"type": "integer", "minimum": 1, "maximum": 10000},
                "n_max": {"type": "integer", "minimum": 0, "maximum": 10000},
                "n_min": {"type": "integer", "minimum": 0, "default": 1},
                "ell": {"type": "integer", "minimum": 1},
                "n_elements": {"type": "integer", "minimum": 0},
                "latitude_rad": {**_num, "default": 0.0},
                "frame_rate_rad_per_s": {**_num, "default": OMEGA_EARTH},
            },
            "default": {},
        },
    },
}


def _fill(node: dict, schema: dict) -> None:
    for key, sub in schema.get("properties", {}).items():
        if key not in node and "default" in sub:
            node[key] = copy.deepcopy(sub["default"])
        if key in node and isinstance(node[key], dict) and sub.get("type") == "object":
            _fill(node[key], sub)


def resolve(raw: dict) -> dict:
    """Validate ``raw`` and return a copy with every default made explicit."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config field '{where}': {exc.message}") from None
    cfg = copy.deepcopy(raw)
    _fill(cfg, SCHEMA)
    chain = cfg["chain"]
    if isinstance(chain, list):
        for el in chain:
            _fill(el, ELEMENT_SCHEMA)
    else:
        _fill(chain["alternating"], ALTERNATING_SCHEMA["properties"]["alternating"])
    for w in cfg["mc"].get("windows", []):
        _fill(w, WINDOW_SCHEMA)
    return cfg


@dataclass
class SetupConfig:
    resolved: dict
    geometry: BeamGeometry
    chain: Chain  # frame rate already applied

    @property
    def beam(self) -> dict:
        return self.resolved["beam"]

    @property
    def power(self) -> float:
        return self.beam["power_W"]

    @property
    def exact_recoil(self) -> bool:
        return self.resolved["exact_recoil"]

    @property
    def grid(self) -> dict:
        return self.resolved["grid"]

    @property
    def mc(self) -> dict:
        return self.resolved["mc"]

    @property
    def scenario(self) -> dict:
        return self.resolved["scenario"]


def build(raw: dict) -> SetupConfig:
    cfg = resolve(raw)
    beam = cfg["beam"]
    geom = BeamGeometry(beam["d0_m"], beam["wavelength_m"])
    try:
        chain_cfg = cfg["chain"]
        if isinstance(chain_cfg, list):
            elems = [
                OpticalElement(
                    ElementKind(e["kind"]), e["z_m"], e["spin_rate_rad_per_s"], e["efficiency"],
                    e["moment_of_inertia_kg_m2"], e["bias_shift_rad_per_s"],
                )
                for e in chain_cfg
            ]
            elems.sort(key=lambda e: e.z_pos)
            chain = Chain(tuple(elems), geom, geom.photon(beam["ell"], beam["amplitude"]))
        else:
            alt = chain_cfg["alternating"]
            chain = alternating_chain(
                alt["n_elements"], beam["ell"], alt["spin_rate_rad_per_s"], geom, alt["spacing_m"],
                ElementKind(alt["kind"]), alt["moment_of_inertia_kg_m2"], alt["efficiency"],
            )
            if beam["amplitude"] != 1.0:
                chain = Chain(chain.elements, geom, geom.photon(beam["ell"], beam["amplitude"]))
    except PhysicsContractError as exc:
        raise ConfigError(f"config field 'chain': {exc}") from None
    if cfg["frame_rate_rad_per_s"]:
        chain = chain.with_frame_rate(cfg["frame_rate_rad_per_s"])
    return SetupConfig(cfg, chain.geometry, chain)


def load_config(path) -> SetupConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return build(raw)
