"""Mission actors, tasks, events and reports."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from ..radar import HOVER_JITTER_SIGMA, FmcwConfig, UwbConfig


class TaskSource(enum.Enum):
    SURVEY = "Survey"
    OPERATOR = "Operator"


class EventKind(enum.Enum):
    COMMAND_ISSUED = "CommandIssued"
    SURVEY_FOUND = "SurveyFound"
    TASK_ASSIGNED = "TaskAssigned"
    WAYPOINT = "Waypoint"
    SENSE_SAMPLE = "SenseSample"
    DETECTION_REPORTED = "DetectionReported"
    BATTERY_LOW = "BatteryLow"
    RETURNED_TO_BASE = "ReturnedToBase"


class UntrainedModelError(ValueError):
    pass


@dataclass(frozen=True)
class MissionConfig:
    """Kinematics, energy and sensing defaults (1 tick = 1 s)."""
    base: tuple = (0, 0)
    la_speed: int = 2
    battery: float = 36000.0
    reserve_fraction: float = 0.1
    move_cost: float = 1.0
    sense_cost: float = 0.5
    dwell_samples: int = 5
    sensing_altitude: float = 1.5
    jitter_sigma: float = HOVER_JITTER_SIGMA
    visible_detection_prob: float = 0.9
    camera_radius: int = 5
    vote_threshold: float = 0.5
    max_ticks: int = 200_000
    uwb: UwbConfig = field(default_factory=UwbConfig)
    fmcw: FmcwConfig = field(default_factory=FmcwConfig)

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        if self.la_speed < 1:
            raise ValueError("la_speed must be >= 1 cell per tick")
        if self.dwell_samples < 1:
            raise ValueError("dwell_samples must be >= 1")
        if not 0 <= self.reserve_fraction < 1:
            raise ValueError("reserve_fraction must be in [0, 1)")
        if not 0 <= self.visible_detection_prob <= 1:
            raise ValueError("visible_detection_prob must be in [0, 1]")
        if self.battery <= 0 or self.move_cost < 0 or self.sense_cost < 0:
            raise ValueError("battery must be > 0 and costs >= 0")

    @property
    def reserve(self):
        return self.battery * self.reserve_fraction


@dataclass
class HaUav:
    id: int
    position: tuple
    camera_radius: int = 5
    visible_detection_prob: float = 0.9
    assigned_cluster: int | None = None

    @property
    def name(self):
        return f"HA-{self.id}"


@dataclass
class LaUav:
    id: int
    position: tuple
    speed: int = 2
    battery: float = 36000.0
    reserve: float = 3600.0
    sensing_altitude: float = 1.5
    task_queue: list = field(default_factory=list)

    def __post_init__(self):
        self.position = tuple(self.position)
        if self.battery < 0:
            raise ValueError("battery must be >= 0")

    @property
    def name(self):
        return f"LA-{self.id}"


@dataclass(frozen=True)
class Task:
    cell: tuple
    source: TaskSource = TaskSource.SURVEY
    dwell_samples: int = 5

    def __post_init__(self):
        object.__setattr__(self, "cell", tuple(self.cell))
        if self.dwell_samples < 1:
            raise ValueError("dwell_samples must be >= 1")


@dataclass(frozen=True)
class FleetSpec:
    n_ha: int = 0
    n_la: int = 0

    def __post_init__(self):
        if self.n_ha < 0 or self.n_la < 0:
            raise ValueError("fleet counts must be >= 0")

    @property
    def is_empty(self):
        return self.n_ha == 0 and self.n_la == 0


@dataclass(frozen=True)
class MissionEvent:
    tick: int
    actor: str
    kind: EventKind
    payload: dict

    def to_json(self):
        doc = {"tick": self.tick, "actor": self.actor, "kind": self.kind.value,
               "payload": self.payload}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


@dataclass
class MissionLog:
    events: list = field(default_factory=list)

    def emit(self, tick, actor, kind, **payload):
        if self.events and tick < self.events[-1].tick:
            raise ValueError("mission log ticks must be non-decreasing")
        self.events.append(MissionEvent(tick, actor, kind, payload))

    def of_kind(self, kind):
        return [e for e in self.events if e.kind is kind]

    def to_jsonl(self, provenance=None):
        lines = []
        if provenance is not None:
            lines.append(json.dumps({"provenance": provenance}, sort_keys=True,
                                    separators=(",", ":")))
        lines.extend(e.to_json() for e in self.events)
        return "".join(line + "\n" for line in lines)

    def __len__(self):
        return len(self.events)


@dataclass
class MissionReport:
    victims_total: int
    victims_detected: int
    buried_total: int
    buried_detected: int
    false_sites: int
    mean_time_to_detection: float | None
    cells_scanned: int
    energy_used: dict
    ticks: int
    unreachable: int = 0

    @property
    def detected_fraction(self):
        return self.victims_detected / self.victims_total if self.victims_total else 1.0

    @property
    def buried_fraction_detected(self):
        return self.buried_detected / self.buried_total if self.buried_total else 1.0

    CSV_FIELDS = ("victims_total", "victims_detected", "buried_total", "buried_detected",
                  "false_sites", "mean_time_to_detection", "cells_scanned", "energy_total",
                  "ticks", "unreachable")

    def csv_row(self):
        mttd = "" if self.mean_time_to_detection is None else repr(self.mean_time_to_detection)
        return [self.victims_total, self.victims_detected, self.buried_total,
                self.buried_detected, self.false_sites, mttd, self.cells_scanned,
                repr(float(sum(self.energy_used.values()))), self.ticks, self.unreachable]

    def summary(self):
        mttd = ("n/a" if self.mean_time_to_detection is None
                else f"{self.mean_time_to_detection:.1f} ticks")
        lines = [
            f"victims detected     {self.victims_detected}/{self.victims_total}",
            f"buried detected      {self.buried_detected}/{self.buried_total}"
            f" ({self.buried_fraction_detected:.0%})",
            f"false sites          {self.false_sites}",
            f"mean time to detect  {mttd}",
            f"cells scanned        {self.cells_scanned}",
            f"unreachable tasks    {self.unreachable}",
            f"mission ticks        {self.ticks}",
        ]
        for name in sorted(self.energy_used):
            lines.append(f"energy {name:<13} {self.energy_used[name]:.1f}")
        return "\n".join(lines)
