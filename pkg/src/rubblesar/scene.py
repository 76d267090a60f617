"""Disaster world: grid geometry, rubble columns, victims and damage clusters.

Cells are ``(row, col)`` integer tuples, so plain tuple ordering is row-major.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import tomli
import tomli_w

from .rng import substream


class Material(enum.Enum):
    AIR = "Air"
    WOOD = "Wood"
    BRICK = "Brick"
    CONCRETE = "Concrete"


class InfeasibleSpecError(ValueError):
    """Scenario spec cannot be realized (e.g. more victims than damaged cells)."""


@dataclass(frozen=True)
class RubbleColumn:
    layers: tuple = ()
    max_thickness: float = 2.0

    def __post_init__(self):
        layers = tuple((Material(m), float(t)) for m, t in self.layers)
        object.__setattr__(self, "layers", layers)
        for _, t in layers:
            if not t > 0:
                raise ValueError(f"layer thickness must be > 0, got {t}")
        if self.total_thickness > self.max_thickness + 1e-12:
            raise ValueError(
                f"column thickness {self.total_thickness} exceeds {self.max_thickness}")

    @property
    def total_thickness(self):
        return float(sum(t for _, t in self.layers))

    @property
    def is_empty(self):
        return not self.layers


EMPTY_COLUMN = RubbleColumn()


@dataclass(frozen=True)
class Victim:
    id: int
    cell: tuple
    respiration_rate: float
    heartbeat_rate: float
    chest_amplitude: float
    buried: bool = True

    def __post_init__(self):
        object.__setattr__(self, "cell", tuple(int(c) for c in self.cell))
        if not 0.1 <= self.respiration_rate <= 0.7:
            raise ValueError(f"respiration_rate {self.respiration_rate} outside [0.1, 0.7] Hz")
        if not 0.8 <= self.heartbeat_rate <= 3.0:
            raise ValueError(f"heartbeat_rate {self.heartbeat_rate} outside [0.8, 3.0] Hz")
        if not 0 < self.chest_amplitude <= 0.02:
            raise ValueError(f"chest_amplitude {self.chest_amplitude} outside (0, 0.02] m")


@dataclass(frozen=True)
class Cluster:
    id: int
    cells: frozenset
    centroid: tuple


@dataclass(frozen=True)
class Scenario:
    width: int
    height: int
    cell_size: float = 1.0
    columns: dict = field(default_factory=dict)
    no_fly: frozenset = frozenset()
    victims: tuple = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "no_fly", frozenset(tuple(c) for c in self.no_fly))
        object.__setattr__(self, "victims", tuple(self.victims))
        # empty columns are not stored; a missing key means open ground
        cols = {tuple(c): col for c, col in self.columns.items() if not col.is_empty}
        object.__setattr__(self, "columns", cols)
        seen = set()
        for v in self.victims:
            if not self.contains(v.cell):
                raise ValueError(f"victim {v.id} at {v.cell} is outside the grid")
            if v.cell in seen:
                raise ValueError(f"two victims share cell {v.cell}")
            seen.add(v.cell)
            if v.buried and v.cell not in cols:
                raise ValueError(f"buried victim {v.id} sits on open ground")

    def contains(self, cell):
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    @property
    def damaged_cells(self):
        return sorted(self.columns)

    def victim_at(self, cell):
        cell = tuple(cell)
        for v in self.victims:
            if v.cell == cell:
                return v
        return None


@dataclass(frozen=True)
class ScenarioSpec:
    width: int = 24
    height: int = 16
    cell_size: float = 1.0
    n_clusters: int = 3
    cluster_cells: int = 10
    material_ratios: dict = field(
        default_factory=lambda: {"Wood": 1.0, "Brick": 0.0, "Concrete": 0.0})
    thickness_range: dict = field(default_factory=lambda: {
        "Wood": (0.03, 0.10), "Brick": (0.05, 0.15), "Concrete": (0.05, 0.20)})
    max_layers: int = 1
    max_total_thickness: float = 2.0
    n_victims: int = 6
    buried_fraction: float = 1.0
    n_no_fly: int = 0
    respiration_range: tuple = (0.25, 0.4)
    heartbeat_range: tuple = (1.0, 1.5)
    amplitude_range: tuple = (0.005, 0.008)


def overburden(scenario, cell):
    """Rubble column above `cell`; an empty column for undamaged ground."""
    cell = tuple(cell)
    if not scenario.contains(cell):
        raise IndexError(f"cell {cell} outside {scenario.height}x{scenario.width} grid")
    return scenario.columns.get(cell, EMPTY_COLUMN)


def _neighbors4(cell):
    r, c = cell
    return ((r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c))


def find_clusters(scenario):
    """4-connected components of damaged cells, numbered in row-major discovery order."""
    damaged = set(scenario.columns)
    seen = set()
    clusters = []
    for start in sorted(damaged):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            cell = queue.popleft()
            comp.append(cell)
            for nb in _neighbors4(cell):
                if nb in damaged and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        clusters.append(Cluster(len(clusters), frozenset(comp), _centroid(comp)))
    return clusters


def _centroid(cells):
    # member cell nearest to the mean position, so the centroid is always inside
    mr = sum(r for r, _ in cells) / len(cells)
    mc = sum(c for _, c in cells) / len(cells)
    return min(sorted(cells), key=lambda rc: (rc[0] - mr) ** 2 + (rc[1] - mc) ** 2)


def _cluster_regions(spec):
    """Disjoint interiors of vertical strips, separated so blobs never touch."""
    regions = []
    n = spec.n_clusters
    for j in range(n):
        c0 = (j * spec.width) // n
        c1 = ((j + 1) * spec.width) // n
        cols = range(c0 + 1, c1 - 1)
        rows = range(1, spec.height - 1)
        regions.append([(r, c) for r in rows for c in cols])
    return regions


def _random_column(spec, rng):
    names = sorted(spec.material_ratios)
    weights = np.array([spec.material_ratios[k] for k in names], dtype=float)
    weights = weights / weights.sum()
    n_layers = int(rng.integers(1, spec.max_layers + 1))
    layers = []
    total = 0.0
    for _ in range(n_layers):
        name = names[int(rng.choice(len(names), p=weights))]
        lo, hi = spec.thickness_range[name]
        t = float(rng.uniform(lo, hi))
        if total + t > spec.max_total_thickness:
            break
        layers.append((Material(name), t))
        total += t
    if not layers:
        name = names[int(np.argmax(weights))]
        layers.append((Material(name), min(spec.thickness_range[name][0], spec.max_total_thickness)))
    return RubbleColumn(tuple(layers), spec.max_total_thickness)


def generate_scenario(spec, seed):
    """Build a scenario from `spec`; a pure function of ``(spec, seed)``."""
    if spec.width < 1 or spec.height < 1:
        raise InfeasibleSpecError("grid dimensions must be >= 1")
    if spec.n_victims > spec.n_clusters * spec.cluster_cells:
        raise InfeasibleSpecError(
            f"{spec.n_victims} victims requested but only "
            f"{spec.n_clusters * spec.cluster_cells} damaged cells will exist")
    if spec.n_clusters and sum(spec.material_ratios.values()) <= 0:
        raise InfeasibleSpecError("material ratios must have a positive sum")
    rng = substream(seed, "scene")

    damaged = []
    if spec.n_clusters:
        for region in _cluster_regions(spec):
            if len(region) < spec.cluster_cells:
                raise InfeasibleSpecError(
                    f"grid too small for {spec.n_clusters} clusters of {spec.cluster_cells} cells")
            allowed = set(region)
            blob = [region[int(rng.integers(len(region)))]]
            members = set(blob)
            while len(blob) < spec.cluster_cells:
                r, c = blob[int(rng.integers(len(blob)))]
                nb = _neighbors4((r, c))[int(rng.integers(4))]
                if nb in allowed and nb not in members:
                    blob.append(nb)
                    members.add(nb)
            damaged.extend(sorted(blob))

    columns = {cell: _random_column(spec, rng) for cell in damaged}

    picks = rng.permutation(len(damaged))[: spec.n_victims] if damaged else []
    victims = []
    for i, idx in enumerate(sorted(int(p) for p in picks)):
        victims.append(Victim(
            id=i,
            cell=damaged[idx],
            respiration_rate=float(rng.uniform(*spec.respiration_range)),
            heartbeat_rate=float(rng.uniform(*spec.heartbeat_range)),
            chest_amplitude=float(rng.uniform(*spec.amplitude_range)),
            buried=bool(rng.random() < spec.buried_fraction),
        ))

    # no-fly cells stay off the rubble and off the (0, 0) deployment corner
    free = [(r, c) for r in range(spec.height) for c in range(spec.width)
            if (r, c) not in columns and (r, c) != (0, 0)]
    if spec.n_no_fly > len(free):
        raise InfeasibleSpecError(f"cannot place {spec.n_no_fly} no-fly cells")
    no_fly = [free[int(i)] for i in rng.permutation(len(free))[: spec.n_no_fly]] if free else []

    return Scenario(spec.width, spec.height, spec.cell_size, columns,
                    frozenset(no_fly), tuple(victims), int(seed))


def empty_scenario(width=10, height=10, seed=0):
    return Scenario(width, height, 1.0, {}, frozenset(), (), seed)


# -- TOML round-trip ---------------------------------------------------------

def scenario_to_toml(scenario, clusters=None):
    if clusters is None:
        clusters = find_clusters(scenario)
    doc = {
        "grid": {
            "width": scenario.width,
            "height": scenario.height,
            "cell_size": scenario.cell_size,
            "seed": scenario.seed,
            "no_fly": [list(c) for c in sorted(scenario.no_fly)],
        },
        "materials": {
            "columns": [
                {"cell": list(cell),
                 "max_thickness": col.max_thickness,
                 "layers": [{"material": m.value, "thickness": t} for m, t in col.layers]}
                for cell, col in sorted(scenario.columns.items())
            ],
        },
        "victims": [
            {"id": v.id, "cell": list(v.cell), "respiration_rate": v.respiration_rate,
             "heartbeat_rate": v.heartbeat_rate, "chest_amplitude": v.chest_amplitude,
             "buried": v.buried}
            for v in scenario.victims
        ],
        "clusters": [
            {"id": k.id, "cells": [list(c) for c in sorted(k.cells)], "centroid": list(k.centroid)}
            for k in clusters
        ],
    }
    return tomli_w.dumps(doc)


def scenario_from_toml(text):
    """Parse a scenario document. Returns ``(scenario, clusters)``.

    Clusters are recomputed when the document omits them.
    """
    doc = tomli.loads(text)
    grid = doc["grid"]
    columns = {}
    for entry in doc.get("materials", {}).get("columns", []):
        layers = tuple((Material(l["material"]), l["thickness"]) for l in entry["layers"])
        columns[tuple(entry["cell"])] = RubbleColumn(layers, entry.get("max_thickness", 2.0))
    victims = tuple(
        Victim(v["id"], tuple(v["cell"]), v["respiration_rate"], v["heartbeat_rate"],
               v["chest_amplitude"], v.get("buried", True))
        for v in doc.get("victims", []))
    scenario = Scenario(grid["width"], grid["height"], grid.get("cell_size", 1.0), columns,
                        frozenset(tuple(c) for c in grid.get("no_fly", [])), victims,
                        grid.get("seed", 0))
    if doc.get("clusters"):
        clusters = [Cluster(k["id"], frozenset(tuple(c) for c in k["cells"]), tuple(k["centroid"]))
                    for k in doc["clusters"]]
    else:
        clusters = find_clusters(scenario)
    return scenario, clusters
