"""Strict TOML run configuration.

Layout (every key optional, unknown keys rejected)::

    [run]        seed, output_dir
    [scenario]   ScenarioSpec fields
    [radar]      jitter_sigma, plus [radar.uwb] and [radar.fmcw] tables
    [fusion]     importance_repeats, plus [fusion.lr], [fusion.dt], [fusion.rf]
    [fleet]      n_ha, n_la (0 = size automatically), mission kinematics and energy
    [protocol]   scenarios, altitudes, per_class, ranges, test_fraction

Platform jitter lives only in [radar] and is shared by the dataset protocol
and the mission; the forest seed is the run seed.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields, replace

import tomli

from .. import __version__
from ..fusion import ForestHyper, LogisticHyper, Protocol, TreeHyper, resolve_families
from ..mission import MissionConfig
from ..radar import HOVER_JITTER_SIGMA, FmcwConfig, UwbConfig
from ..scene import ScenarioSpec


class ConfigError(ValueError):
    """Malformed or unknown configuration; maps to exit code 2."""


@dataclass(frozen=True)
class FleetPolicy:
    n_ha: int = 0
    n_la: int = 2

    def __post_init__(self):
        if self.n_ha < 0 or self.n_la < 0:
            raise ValueError("fleet counts must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    output_dir: str = "out"
    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    uwb: UwbConfig = field(default_factory=UwbConfig)
    fmcw: FmcwConfig = field(default_factory=FmcwConfig)
    jitter_sigma: float = HOVER_JITTER_SIGMA
    lr: LogisticHyper = field(default_factory=LogisticHyper)
    dt: TreeHyper = field(default_factory=TreeHyper)
    rf: ForestHyper = field(default_factory=ForestHyper)
    importance_repeats: int = 5
    fleet: FleetPolicy = field(default_factory=FleetPolicy)
    mission: MissionConfig = field(default_factory=MissionConfig)
    protocol: Protocol = field(default_factory=Protocol)
    scenarios: tuple = ("StableWood",)

    @property
    def protocol_config(self):
        return replace(self.protocol, jitter_sigma=self.jitter_sigma)

    @property
    def mission_config(self):
        return replace(self.mission, uwb=self.uwb, fmcw=self.fmcw, jitter_sigma=self.jitter_sigma)

    @property
    def forest_hyper(self):
        return replace(self.rf, seed=self.seed)

    def hyper(self, kind):
        return {"lr": self.lr, "dt": self.dt, "rf": self.forest_hyper}[kind]

    def to_dict(self):
        return _plain(dataclasses.asdict(self))

    @property
    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def provenance(self, **extra):
        doc = {"tool": f"rubblesar-{__version__}", "seed": self.seed,
               "config_sha256": self.digest}
        doc.update(extra)
        return doc


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str, bool)):
        return obj.value
    return obj


def _tuples(value):
    if isinstance(value, list):
        return tuple(_tuples(v) for v in value)
    if isinstance(value, dict):
        return {k: _tuples(v) for k, v in value.items()}
    return value


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(unknown)}")


def _build(cls, table, where, exclude=()):
    names = [f.name for f in fields(cls) if f.name not in exclude]
    _check_keys(table, names, where)
    try:
        return cls(**{k: _tuples(v) for k, v in table.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{where}]: {exc}") from exc


SECTIONS = ("run", "scenario", "radar", "fusion", "fleet", "protocol")
MISSION_EXCLUDE = ("uwb", "fmcw", "jitter_sigma")


def config_from_dict(doc):
    """Build a RunConfig from a parsed TOML document, rejecting unknown keys."""
    _check_keys(doc, SECTIONS, "top level")
    kw = {}
    run = doc.get("run", {})
    _check_keys(run, ("seed", "output_dir"), "run")
    kw.update(run)
    if "scenario" in doc:
        kw["scenario"] = _build(ScenarioSpec, doc["scenario"], "scenario")
    radar = dict(doc.get("radar", {}))
    _check_keys(radar, ("jitter_sigma", "uwb", "fmcw"), "radar")
    if "uwb" in radar:
        kw["uwb"] = _build(UwbConfig, radar.pop("uwb"), "radar.uwb")
    if "fmcw" in radar:
        kw["fmcw"] = _build(FmcwConfig, radar.pop("fmcw"), "radar.fmcw")
    kw.update(radar)
    fusion = dict(doc.get("fusion", {}))
    _check_keys(fusion, ("importance_repeats", "lr", "dt", "rf"), "fusion")
    for name, cls, exclude in (("lr", LogisticHyper, ()), ("dt", TreeHyper, ()),
                               ("rf", ForestHyper, ("seed",))):
        if name in fusion:
            kw[name] = _build(cls, fusion.pop(name), f"fusion.{name}", exclude)
    kw.update(fusion)
    fleet = dict(doc.get("fleet", {}))
    policy_keys = [f.name for f in fields(FleetPolicy)]
    mission_keys = [f.name for f in fields(MissionConfig) if f.name not in MISSION_EXCLUDE]
    _check_keys(fleet, policy_keys + mission_keys, "fleet")
    kw["fleet"] = _build(FleetPolicy, {k: v for k, v in fleet.items() if k in policy_keys}, "fleet")
    kw["mission"] = _build(MissionConfig, {k: v for k, v in fleet.items() if k in mission_keys},
                           "fleet", MISSION_EXCLUDE)
    protocol = dict(doc.get("protocol", {}))
    if "scenarios" in protocol:
        kw["scenarios"] = _tuples(protocol.pop("scenarios"))
    kw["protocol"] = _build(Protocol, protocol, "protocol", ("jitter_sigma",))
    try:
        cfg = RunConfig(**{k: _tuples(v) for k, v in kw.items()})
        resolve_families(cfg.scenarios)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise ConfigError("[run] seed must be a non-negative integer")
    return cfg


def parse_value(text):
    """Parse a TOML scalar or array; bare words fall back to strings."""
    try:
        return tomli.loads(f"v = {text}")["v"]
    except tomli.TOMLDecodeError:
        return text


def apply_override(doc, dotted, value):
    """Set ``section.key`` (or ``section.sub.key``) in a raw config document."""
    parts = dotted.split(".")
    if len(parts) < 2 or not all(parts):
        raise ConfigError(f"override {dotted!r} must look like section.key")
    node = doc
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {dotted!r} crosses a non-table value")
    node[parts[-1]] = value


def load_config(path=None, overrides=()):
    """Read a TOML file (optional), apply ``(dotted_key, value)`` overrides, validate."""
    doc = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomli.load(fh)
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    for key, value in overrides:
        apply_override(doc, key, value)
    return config_from_dict(doc)
