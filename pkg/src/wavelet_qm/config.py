"""Scenario configuration: YAML document merged over the shipped defaults."""
from __future__ import annotations

import copy
from dataclasses import dataclass
from importlib import resources

import yaml

from .core import MinimalPacketWavelet, PhysicalParams, ScalePositionGrid, SpatialGrid
from .errors import ConfigError
from .io import FORMATS
from .potential import PotentialModel

PIPELINES = ("transform_roundtrip", "admissibility_report", "potential_field", "evolve_compare")

# types of keys whose default is null
_NULLABLE = {
    ("scale_grid", "b_min"): float,
    ("scale_grid", "b_max"): float,
    ("scale_grid", "n_positions"): int,
    ("admissibility", "k_max"): float,
}
# list-valued keys and their element type
_LISTS = {
    ("evolution", "times"): float,
    ("admissibility", "k_min"): float,
    ("output", "formats"): str,
}


def load_defaults() -> dict:
    text = resources.files("wavelet_qm").joinpath("defaults.yaml").read_text()
    return yaml.safe_load(text)


def _coerce(value, typ, key):
    if value is None:
        raise ConfigError(f"{key}: null is not allowed here")
    if isinstance(value, bool) and typ is not bool:
        raise ConfigError(f"{key}: expected {typ.__name__}, got boolean {value!r}")
    try:
        if typ is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if typ is float:
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected {typ.__name__}, got {value!r}") from None
    if not isinstance(value, typ):
        raise ConfigError(f"{key}: expected {typ.__name__}, got {value!r}")
    return value


def _merge(defaults: dict, given: dict) -> dict:
    if not isinstance(given, dict):
        raise ConfigError("configuration must be a mapping of sections")
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ConfigError(f"unknown key {key!r}")
        if isinstance(defaults[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{key}: expected a section, got {val!r}")
            for sub, sval in val.items():
                if sub not in defaults[key]:
                    raise ConfigError(f"unknown key {key}.{sub}")
                out[key][sub] = _coerce_key((key, sub), defaults[key][sub], sval)
        else:
            out[key] = _coerce_key((key,), defaults[key], val)
    return out


def _coerce_key(path, default, value):
    name = ".".join(path)
    if path in _LISTS:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{name}: expected a non-empty list, got {value!r}")
        return [_coerce(v, _LISTS[path], name) for v in value]
    if path in _NULLABLE:
        return None if value is None else _coerce(value, _NULLABLE[path], name)
    return _coerce(value, type(default), name)


@dataclass
class ScenarioConfig:
    data: dict

    @classmethod
    def from_dict(cls, given: dict | None) -> "ScenarioConfig":
        cfg = cls(_merge(load_defaults(), given or {}))
        cfg.check()
        return cfg

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        """Parse a YAML scenario; OSError propagates for unreadable files."""
        with open(path) as fh:
            text = fh.read()
        try:
            given = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: malformed YAML: {exc}") from None
        return cls.from_dict(given)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.data, sort_keys=False)

    def __getitem__(self, key):
        return self.data[key]

    def check(self):
        """Build every domain object once so invariant violations surface as config errors."""
        d = self.data
        if d["pipeline"] not in PIPELINES:
            raise ConfigError(f"pipeline: expected one of {PIPELINES}, got {d['pipeline']!r}")
        if d["initial_state"]["kind"] not in ("packet", "atom"):
            raise ConfigError(f"initial_state.kind: expected packet or atom, got {d['initial_state']['kind']!r}")
        for fmt in d["output"]["formats"]:
            if fmt not in FORMATS:
                raise ConfigError(f"output.formats: unknown format {fmt!r}")
        nulls = [d["scale_grid"][k] is None for k in ("b_min", "b_max", "n_positions")]
        if any(nulls) and not all(nulls):
            raise ConfigError("scale_grid.b_min, b_max, n_positions must be given together")
        if any(t < 0 for t in d["evolution"]["times"]):
            raise ConfigError("evolution.times: times must be non-negative")
        builders = [("physical", self.params), ("wavelet", self.wavelet),
                    ("spatial_grid", self.spatial_grid), ("scale_grid", self.scale_grid),
                    ("potential", self.potential), ("initial_state", self.initial_wavelet)]
        for section, build in builders:
            try:
                build()
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"{section}: {exc}") from None
        from .evolution import METHODS
        if d["evolution"]["method"] not in METHODS:
            raise ConfigError(f"evolution.method: expected one of {METHODS}")
        if not d["evolution"]["dt"] > 0:
            raise ConfigError("evolution.dt: must be positive")

    # -------------------------------------------------------------- builders

    def params(self) -> PhysicalParams:
        return PhysicalParams(**self.data["physical"])

    def wavelet(self) -> MinimalPacketWavelet:
        return MinimalPacketWavelet(**self.data["wavelet"])

    def spatial_grid(self) -> SpatialGrid:
        return SpatialGrid(**self.data["spatial_grid"])

    def scale_grid(self) -> ScalePositionGrid:
        s = self.data["scale_grid"]
        if s["b_min"] is None:
            b = self.spatial_grid()
        else:
            b = SpatialGrid(s["b_min"], s["b_max"], s["n_positions"])
        return ScalePositionGrid(s["a_min"], s["a_max"], s["n_scales"], b)

    def potential(self) -> PotentialModel:
        return PotentialModel(**self.data["potential"])

    def initial_wavelet(self) -> MinimalPacketWavelet:
        s = self.data["initial_state"]
        if s["kind"] == "atom":
            if not s["a"] > 0:
                raise ConfigError("initial_state.a: must be positive")
            return self.wavelet()
        return MinimalPacketWavelet(s["delta_x"], s["p"], s["x_bar"])
