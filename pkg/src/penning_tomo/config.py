"""Run configuration: parsing, validation and the objects it resolves to.

Config files are YAML. Recognized keys (anything else is rejected)::

    state:
      kind: odd_cat          # coherent | odd_cat | even_cat | fock | thermal
      alpha: 1.5             # or [re, im]; coherent / cat states
      n: 0                   # fock
      nbar: 0.5              # thermal
      dim: 32
    trap:
      field_tesla: 5.0
      potential_volt: 10.0
      trap_size_m: 0.0033
      bottle_t_per_m2: 0.0
      coupling_g: 0.0
      temperature_k: 4.2
      particle: electron     # or positron
    protocol:
      kind: oht              # oht | pnt
      phases: 27             # oht
      grid: default255       # pnt: default255 or a grid mapping
      samples: 1000
    reconstruction:
      s: -0.25
      n_bins: 64
      x_range: [-6.0, 6.0]
      r_max: null            # default from the kernel decay
      n_r: 512
      n_max: null
      extent: 3.0            # evaluation grid for OHT / oracle
      n_grid: 41
    seed: 7
    efficiency: 1.0
    output_dir: out
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .fock import (
    DEFAULT_DIM,
    QuantumState,
    coherent_state,
    even_cat_state,
    fock_state,
    odd_cat_state,
    thermal_state,
)
from .grids import CartesianGrid, GridSpec, default_pnt_grid, grid_from_dict, square_grid
from .measurement import OhtProtocol, PntProtocol
from .trap import TrapConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "build_state", "build_trap", "build_protocol", "resolve_pnt_grid"]


class ConfigError(ValueError):
    """Malformed configuration (unknown key, wrong type, bad value)."""


_STATE_KEYS = {"kind", "alpha", "n", "nbar", "dim"}
_TRAP_KEYS = {
    "field_tesla", "potential_volt", "trap_size_m", "bottle_t_per_m2",
    "coupling_g", "temperature_k", "particle",
}
_PROTOCOL_KEYS = {"kind", "phases", "grid", "samples"}
_RECON_KEYS = {"s", "n_bins", "x_range", "r_max", "n_r", "n_max", "extent", "n_grid"}
_TOP_KEYS = {"state", "trap", "protocol", "reconstruction", "seed", "efficiency", "output_dir"}

_TRAP_MAP = {
    "field_tesla": "B",
    "potential_volt": "V0",
    "trap_size_m": "d",
    "bottle_t_per_m2": "b",
    "coupling_g": "g",
    "temperature_k": "temperature",
    "particle": "particle",
}

DEFAULTS: dict[str, Any] = {
    "state": {"kind": "odd_cat", "alpha": 1.5, "dim": DEFAULT_DIM},
    "trap": {
        "field_tesla": 5.0,
        "potential_volt": 10.0,
        "trap_size_m": 3.3e-3,
        "bottle_t_per_m2": 0.0,
        "coupling_g": 0.0,
        "temperature_k": 4.2,
        "particle": "electron",
    },
    "protocol": {"kind": "oht", "phases": 27, "samples": 1000},
    "reconstruction": {
        "s": -0.25,
        "n_bins": 64,
        "x_range": [-6.0, 6.0],
        "r_max": None,
        "n_r": 512,
        "n_max": None,
        "extent": 3.0,
        "n_grid": 41,
    },
    "seed": 0,
    "efficiency": 1.0,
    "output_dir": None,
}


def _check_keys(section: str, d: dict, allowed: set) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{section or 'config'} must be a mapping")
    for key in d:
        if key not in allowed:
            where = f"{section}.{key}" if section else key
            raise ConfigError(f"unknown config key {where!r}")


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "grid":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class RunConfig:
    """Fully resolved configuration; ``to_dict`` is what gets echoed into outputs."""

    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "RunConfig":
        d = d or {}
        _check_keys("", d, _TOP_KEYS)
        for section, keys in (("state", _STATE_KEYS), ("trap", _TRAP_KEYS),
                              ("protocol", _PROTOCOL_KEYS), ("reconstruction", _RECON_KEYS)):
            if section in d:
                _check_keys(section, d[section], keys)
        cfg = cls(_merge(DEFAULTS, d))
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    def updated(self, overrides: dict) -> "RunConfig":
        return RunConfig.from_dict(_merge(self.data, overrides))

    def validate(self) -> None:
        st = self.data["state"]
        if st["kind"] not in ("coherent", "odd_cat", "even_cat", "fock", "thermal"):
            raise ConfigError(f"unknown state kind {st['kind']!r}")
        pr = self.data["protocol"]
        if pr["kind"] not in ("oht", "pnt"):
            raise ConfigError(f"unknown protocol kind {pr['kind']!r}")
        if int(pr["samples"]) < 1:
            raise ConfigError("protocol.samples must be at least 1")
        if pr["kind"] == "oht" and int(pr.get("phases", 0)) < 1:
            raise ConfigError("protocol.phases must be at least 1")
        eff = float(self.data["efficiency"])
        if not 0 < eff <= 1:
            raise ConfigError("efficiency must lie in (0, 1]")
        xr = self.data["reconstruction"]["x_range"]
        if len(xr) != 2 or xr[0] >= xr[1]:
            raise ConfigError("reconstruction.x_range must be [low, high]")
        if self.data["trap"]["particle"] not in ("electron", "positron"):
            raise ConfigError("trap.particle must be electron or positron")

    def __getitem__(self, key):
        return self.data[key]


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return RunConfig.from_dict(raw)


def _alpha(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("alpha as a list must be [re, im]")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def build_state(spec: dict) -> QuantumState:
    kind = spec["kind"]
    dim = int(spec.get("dim", DEFAULT_DIM))
    if kind == "coherent":
        return coherent_state(_alpha(spec.get("alpha", 0.0)), dim)
    if kind == "odd_cat":
        return odd_cat_state(_alpha(spec.get("alpha", 1.5)), dim)
    if kind == "even_cat":
        return even_cat_state(_alpha(spec.get("alpha", 1.5)), dim)
    if kind == "fock":
        return fock_state(int(spec.get("n", 0)), dim)
    if kind == "thermal":
        return thermal_state(float(spec.get("nbar", 0.0)), dim)
    raise ConfigError(f"unknown state kind {kind!r}")


def build_trap(spec: dict) -> TrapConfig:
    return TrapConfig(**{_TRAP_MAP[k]: v for k, v in spec.items()})


def resolve_pnt_grid(value) -> GridSpec:
    if value is None or value == "default255":
        return default_pnt_grid()
    if isinstance(value, dict):
        return grid_from_dict(value)
    raise ConfigError(f"unrecognized PNT grid {value!r}")


def build_protocol(spec: dict):
    if spec["kind"] == "oht":
        return OhtProtocol(int(spec["phases"]), int(spec["samples"]))
    return PntProtocol(resolve_pnt_grid(spec.get("grid")), int(spec["samples"]))


def evaluation_grid(recon: dict) -> CartesianGrid:
    return square_grid(float(recon["extent"]), int(recon["n_grid"]))
