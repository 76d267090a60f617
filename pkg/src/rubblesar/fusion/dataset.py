"""Protocol datasets: balanced detection / non-detection samples per altitude."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from ..radar import (HOVER_JITTER_SIGMA, FeatureVector, FmcwConfig, PlatformState, ScenarioTag, UwbConfig,
                     measure)
from ..rng import substream
from ..scene import Material, RubbleColumn, Victim

CSV_HEADER = ("scenario", "altitude_m", "doppler_hz", "uwb_detect", "fmcw_reading", "label")

FAMILY_ALIASES = {
    "stable": (ScenarioTag.STABLE_WOOD, ScenarioTag.STABLE_WOOD_BRICKS),
    "combined": tuple(ScenarioTag),
    "hover": (ScenarioTag.HOVER_WOOD_BRICKS,),
}


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Protocol:
    altitudes: tuple = (1.5, 1.75, 2.0)
    per_class: int = 2000
    test_fraction: float = 0.2
    wood_range: tuple = (0.02, 0.12)
    brick_range: tuple = (0.02, 0.06)
    jitter_sigma: float = HOVER_JITTER_SIGMA
    respiration_range: tuple = (0.25, 0.4)
    heartbeat_range: tuple = (1.0, 1.5)
    amplitude_range: tuple = (0.005, 0.008)
    # share of labelled-detection windows in which the victim returns no signal
    unobserved_rate: float = 0.01

    def __post_init__(self):
        # zero counts are legal here and rejected at generation time
        if isinstance(self.per_class, bool) or not isinstance(self.per_class, int):
            raise ValueError(f"per_class must be an integer, got {self.per_class!r}")
        if not all(isinstance(a, (int, float)) and a > 0 for a in self.altitudes):
            raise ValueError("altitudes must be positive numbers")
        if not 0 <= self.test_fraction < 1:
            raise ValueError("test_fraction must be in [0, 1)")
        if not 0 <= self.unobserved_rate <= 1:
            raise ValueError("unobserved_rate must be in [0, 1]")


@dataclass
class Dataset:
    rows: list
    split: tuple | None = None

    def __len__(self):
        return len(self.rows)

    @property
    def X(self):
        if not self.rows:
            return np.empty((0, 4))
        return np.array([r.as_array() for r in self.rows])

    @property
    def y(self):
        return np.array([r.label for r in self.rows], dtype=int)

    def subset(self, indices):
        return Dataset([self.rows[i] for i in indices])

    @property
    def train(self):
        return self.subset(self.split[0])

    @property
    def test(self):
        return self.subset(self.split[1])

    def __add__(self, other):
        return Dataset(self.rows + other.rows)


def resolve_families(family):
    """Accept a tag, a tag value, an alias ('stable', 'combined', 'hover') or a sequence."""
    if isinstance(family, ScenarioTag):
        return (family,)
    if isinstance(family, str):
        key = family.lower()
        if key in FAMILY_ALIASES:
            return FAMILY_ALIASES[key]
        for tag in ScenarioTag:
            if tag.value.lower() == key:
                return (tag,)
        raise ValueError(f"unknown scenario family {family!r}")
    tags = []
    for f in family:
        tags.extend(resolve_families(f))
    return tuple(dict.fromkeys(tags))


def _rubble(tag, protocol, rng):
    wood = float(rng.uniform(*protocol.wood_range))
    brick = float(rng.uniform(*protocol.brick_range))
    if tag is ScenarioTag.STABLE_WOOD:
        return RubbleColumn(((Material.WOOD, wood),))
    return RubbleColumn(((Material.WOOD, wood), (Material.BRICK, brick)))


def _platform(tag, altitude, protocol):
    if tag is ScenarioTag.HOVER_WOOD_BRICKS:
        return PlatformState.hovering(altitude, protocol.jitter_sigma)
    return PlatformState.stable(altitude)


def random_victim(protocol, rng, cell=(0, 0), victim_id=0):
    return Victim(victim_id, cell,
                  float(rng.uniform(*protocol.respiration_range)),
                  float(rng.uniform(*protocol.heartbeat_range)),
                  float(rng.uniform(*protocol.amplitude_range)))


def generate_dataset(family, protocol=Protocol(), seed=0, uwb=UwbConfig(), fmcw=FmcwConfig()):
    """Rows ordered by (family, altitude, label 1 then 0, index); split is stratified."""
    if protocol.per_class < 1 or not protocol.altitudes:
        raise ValueError("protocol needs at least one altitude and per_class >= 1")
    rows = []
    for tag in resolve_families(family):
        tag_index = list(ScenarioTag).index(tag)
        for a_index, altitude in enumerate(protocol.altitudes):
            platform = _platform(tag, float(altitude), protocol)
            for label in (1, 0):
                rng = substream(seed, "radar", tag_index, a_index, label)
                for _ in range(protocol.per_class):
                    column = _rubble(tag, protocol, rng)
                    victim = random_victim(protocol, rng) if label else None
                    if label and rng.random() < protocol.unobserved_rate:
                        row = replace(measure(None, column, platform, uwb, fmcw, rng, tag), label=1)
                    else:
                        row = measure(victim, column, platform, uwb, fmcw, rng, tag)
                    rows.append(row)
    ds = Dataset(rows)
    ds.split = stratified_split(ds.rows, seed, protocol.test_fraction)
    return ds


def stratified_split(rows, seed, test_fraction=0.2):
    """80/20-style split within each (scenario_tag, altitude, label) stratum."""
    strata = {}
    for i, r in enumerate(rows):
        tag = r.scenario_tag.value if r.scenario_tag is not None else ""
        strata.setdefault((tag, r.altitude, r.label), []).append(i)
    rng = substream(seed, "fusion", 0)
    train, test = [], []
    for key in sorted(strata):
        idx = np.array(strata[key])
        perm = idx[rng.permutation(len(idx))]
        n_test = int(round(len(idx) * test_fraction))
        test.extend(perm[:n_test].tolist())
        train.extend(perm[n_test:].tolist())
    return sorted(train), sorted(test)


# -- CSV ---------------------------------------------------------------------

def dataset_to_csv(dataset, provenance=None):
    buf = io.StringIO()
    if provenance:
        buf.write("# " + " ".join(f"{k}={v}" for k, v in provenance.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in dataset.rows:
        w.writerow([r.scenario_tag.value if r.scenario_tag else "", repr(r.altitude),
                    repr(r.doppler), r.uwb_detect, repr(r.fmcw), r.label])
    return buf.getvalue()


def dataset_from_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetFormatError("empty dataset file") from None
    if tuple(header) != CSV_HEADER:
        for pos, expected in enumerate(CSV_HEADER):
            got = header[pos] if pos < len(header) else "<missing>"
            if got != expected:
                raise DatasetFormatError(
                    f"bad column {pos + 1}: expected {expected!r}, found {got!r}")
        raise DatasetFormatError(f"unexpected extra columns: {header[len(CSV_HEADER):]}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(CSV_HEADER):
            raise DatasetFormatError(f"row {lineno}: expected {len(CSV_HEADER)} fields")
        tag = ScenarioTag(rec[0]) if rec[0] else None
        rows.append(FeatureVector(float(rec[2]), int(rec[3]), float(rec[4]), float(rec[1]),
                                  int(rec[5]), tag))
    return Dataset(rows)
