"""Tick-driven two-tier search mission.

The DRC commands HA-UAVs to their clusters at tick 0. HA-UAVs survey at
tick 1 and their clusters become LA-UAV tasks. From tick 2 each LA-UAV acts
once per tick: it flies up to `la_speed` cells, or takes one radar sample,
or returns home.
"""

from __future__ import annotations

import math

from ..fusion.evaluate import aggregate_detection, predict
from ..radar import PlatformState, sample_features
from ..rng import substream
from ..scene import find_clusters
from .entities import (EventKind, FleetSpec, HaUav, LaUav, MissionConfig, MissionLog,
                       MissionReport, Task, TaskSource, UntrainedModelError)
from .planning import assign_tasks, boustrophedon, coverage_order, plan_path, reachable

DRC = "DRC"


def position_m(scenario, cell):
    """Local east/north metres of a cell centre, standing in for a GPS fix."""
    r, c = cell
    return [(c + 0.5) * scenario.cell_size, (r + 0.5) * scenario.cell_size]


def _check_model(model):
    if model is None or not callable(getattr(model, "predict_proba", None)):
        raise UntrainedModelError("mission needs a trained fusion model")


def survey(ha, scenario, rng, clusters=None):
    """Phase one: camera pass over the HA-UAV's cluster.

    Returns ``(visible victim cells, candidate cells)``; candidates are every
    damaged cell of the cluster in sweep order.
    """
    if ha.assigned_cluster is None:
        raise ValueError(f"{ha.name} has no assigned cluster")
    clusters = {k.id: k for k in (clusters if clusters is not None else find_clusters(scenario))}
    if ha.assigned_cluster not in clusters:
        raise ValueError(f"{ha.name} assigned to unknown cluster {ha.assigned_cluster}")
    cluster = clusters[ha.assigned_cluster]
    visible = []
    for v in sorted(scenario.victims, key=lambda v: v.id):
        if not v.buried and v.cell in cluster.cells and rng.random() < ha.visible_detection_prob:
            visible.append(v.cell)
    return visible, boustrophedon(cluster.cells)


def sense_sample(cell, scenario, model, rng, altitude, cfg):
    platform = PlatformState.hovering(altitude, cfg.jitter_sigma)
    return predict(model, sample_features(scenario, cell, platform, cfg.uwb, cfg.fmcw, rng))


def sense_at(uav, cell, scenario, model, k, rng, cfg=MissionConfig(), log=None, tick=0):
    """Hover over `cell`, take `k` samples and aggregate them.

    With a `log`, emits one SenseSample per sample and a DetectionReported on
    a positive verdict. Energy is not charged here; see `run_mission`.
    """
    _check_model(model)
    if k < 1:
        raise ValueError("k must be >= 1")
    cell = tuple(cell)
    window = []
    for i in range(k):
        p = sense_sample(cell, scenario, model, rng, uav.sensing_altitude, cfg)
        window.append(p)
        if log is not None:
            log.emit(tick, uav.name, EventKind.SENSE_SAMPLE, cell=list(cell), sample=i,
                     probability=p, energy=0.0)
    prob, verdict = aggregate_detection(window, k, cfg.vote_threshold)
    if verdict and log is not None:
        log.emit(tick, uav.name, EventKind.DETECTION_REPORTED, cell=list(cell),
                 probability=prob, position_m=position_m(scenario, cell))
    return prob, verdict


def la_budget_cells(candidates, cfg):
    """Cells one LA-UAV can cover on one battery, from the average per-cell cost."""
    if not candidates:
        return math.inf
    order = list(candidates)
    legs = zip([cfg.base] + order, order + [cfg.base])
    travel = sum(math.ceil(math.dist(a, b) / cfg.la_speed) for a, b in legs) * cfg.move_cost
    per_cell = cfg.dwell_samples * cfg.sense_cost + travel / len(order)
    usable = cfg.battery - cfg.reserve
    return max(1, math.floor(usable / per_cell)) if per_cell > 0 else math.inf


def size_fleet(clusters, cfg=MissionConfig(), ha_per_cluster=1):
    """One HA-UAV per cluster and enough LA-UAVs for the candidate load."""
    clusters = list(clusters)
    if not clusters:
        return FleetSpec(0, 0)
    candidates = coverage_order(clusters, cfg.base)
    n_la = max(1, math.ceil(len(candidates) / la_budget_cells(candidates, cfg)))
    return FleetSpec(ha_per_cluster * len(clusters), n_la)


class _LaState:
    """Per-UAV controller state for the tick loop."""

    def __init__(self, uav):
        self.uav = uav
        self.path = []
        self.mode = "idle"
        self.task = None
        self.window = []
        self.spent = 0.0


def run_mission(scenario, fleet, model, seed, cfg=MissionConfig()):
    """Simulate one mission. Returns ``(MissionLog, MissionReport)``."""
    _check_model(model)
    clusters = find_clusters(scenario)
    if clusters and (fleet.n_ha < 1 or fleet.n_la < 1):
        raise ValueError("a scenario with rubble needs at least one HA-UAV and one LA-UAV")
    if not scenario.contains(cfg.base) or cfg.base in scenario.no_fly:
        raise ValueError(f"base {cfg.base} must be an open cell inside the grid")
    shape = (scenario.height, scenario.width)
    survey_rng = substream(seed, "mission", 0)
    sense_rng = substream(seed, "mission", 1)
    log = MissionLog()
    found = {}

    # tick 0: DRC commands
    has = [HaUav(i, cfg.base, cfg.camera_radius, cfg.visible_detection_prob)
           for i in range(fleet.n_ha)]
    las = [LaUav(i, cfg.base, cfg.la_speed, cfg.battery, cfg.reserve, cfg.sensing_altitude)
           for i in range(fleet.n_la)]
    by_id = {k.id: k for k in clusters}
    plan = {ha.id: [k.id for k in clusters[ha.id::fleet.n_ha]] for ha in has}
    for ha in has:
        for cid in plan[ha.id]:
            log.emit(0, DRC, EventKind.COMMAND_ISSUED, target=ha.name, cluster=cid,
                     position_m=position_m(scenario, by_id[cid].centroid))
    for la in las:
        log.emit(0, DRC, EventKind.COMMAND_ISSUED, target=la.name, standby=True,
                 position_m=position_m(scenario, cfg.base))

    # phase one: each HA-UAV surveys its clusters, one per tick
    tick = 1
    for step in range(max((len(p) for p in plan.values()), default=0)):
        tick = 1 + step
        for ha in has:
            if step >= len(plan[ha.id]):
                continue
            ha.assigned_cluster = plan[ha.id][step]
            ha.position = by_id[ha.assigned_cluster].centroid
            visible, _ = survey(ha, scenario, survey_rng, clusters)
            for cell in visible:
                v = scenario.victim_at(cell)
                found.setdefault(v.id, tick)
                log.emit(tick, ha.name, EventKind.SURVEY_FOUND, cell=list(cell), victim=v.id,
                         position_m=position_m(scenario, cell))

    # task allocation over every cluster cell
    open_cells = reachable(cfg.base, scenario.no_fly, shape)
    tasks, skipped = [], 0
    for cell in coverage_order(clusters, cfg.base):
        if cell in open_cells:
            tasks.append(Task(cell, TaskSource.SURVEY, cfg.dwell_samples))
        else:
            skipped += 1
            log.emit(tick, DRC, EventKind.TASK_ASSIGNED, cell=list(cell), uav=None,
                     status="unreachable")
    queues = assign_tasks(tasks, las) if las else {}
    for la in las:
        la.task_queue = list(queues[la.id])
        for order, task in enumerate(la.task_queue):
            log.emit(tick, DRC, EventKind.TASK_ASSIGNED, cell=list(task.cell), uav=la.name,
                     order=order, dwell=task.dwell_samples, status="assigned")

    # phase two: LA-UAV tick loop
    states = [_LaState(la) for la in las]
    sensed, reported = set(), {}
    while states and any(s.mode != "home" for s in states):
        tick += 1
        if tick > cfg.max_ticks:
            raise RuntimeError(f"mission exceeded {cfg.max_ticks} ticks")
        for s in states:
            _step(s, tick, scenario, model, sense_rng, cfg, log, shape, sensed, reported)

    for vid_cell, t in reported.items():
        v = scenario.victim_at(vid_cell)
        if v is not None:
            found.setdefault(v.id, t)
    buried = [v for v in scenario.victims if v.buried]
    times = [found[v.id] for v in scenario.victims if v.id in found]
    report = MissionReport(
        victims_total=len(scenario.victims),
        victims_detected=len(times),
        buried_total=len(buried),
        buried_detected=sum(v.id in found for v in buried),
        false_sites=sum(scenario.victim_at(c) is None for c in reported),
        mean_time_to_detection=sum(times) / len(times) if times else None,
        cells_scanned=len(sensed),
        energy_used={s.uav.name: s.spent for s in states},
        ticks=tick,
        unreachable=skipped,
    )
    return log, report


def _move_ticks(path, speed):
    return math.ceil((len(path) - 1) / speed)


def _step(s, tick, scenario, model, rng, cfg, log, shape, sensed, reported):
    """Advance one LA-UAV by one tick."""
    uav = s.uav
    if s.mode == "home":
        return
    if s.mode == "idle":
        _next_action(s, tick, scenario, cfg, log, shape)
        if s.mode == "home":
            return
    if s.mode in ("transit", "returning") and s.path:
        hop, s.path = s.path[:uav.speed], s.path[uav.speed:]
        uav.position = hop[-1]
        _spend(s, cfg.move_cost)
        log.emit(tick, uav.name, EventKind.WAYPOINT, cells=[list(c) for c in hop],
                 position_m=position_m(scenario, uav.position), energy=cfg.move_cost,
                 battery=uav.battery)
        if not s.path:
            if s.mode == "returning":
                s.mode = "home"
                log.emit(tick, uav.name, EventKind.RETURNED_TO_BASE,
                         position_m=position_m(scenario, uav.position), battery=uav.battery)
            else:
                s.mode = "sensing"
        return
    if s.mode == "sensing":
        cell = s.task.cell
        p = sense_sample(cell, scenario, model, rng, uav.sensing_altitude, cfg)
        s.window.append(p)
        _spend(s, cfg.sense_cost)
        log.emit(tick, uav.name, EventKind.SENSE_SAMPLE, cell=list(cell),
                 sample=len(s.window) - 1, probability=p, energy=cfg.sense_cost,
                 battery=uav.battery)
        if len(s.window) == s.task.dwell_samples:
            sensed.add(cell)
            prob, verdict = aggregate_detection(s.window, s.task.dwell_samples,
                                                cfg.vote_threshold)
            if verdict:
                reported.setdefault(cell, tick)
                log.emit(tick, uav.name, EventKind.DETECTION_REPORTED, cell=list(cell),
                         probability=prob, position_m=position_m(scenario, cell))
            s.task, s.window, s.mode = None, [], "idle"


def _spend(s, cost):
    s.uav.battery -= cost
    s.spent += cost


def _next_action(s, tick, scenario, cfg, log, shape):
    """Pick the next task, or head home when the queue is done or energy is short."""
    uav = s.uav
    home = plan_path(uav.position, cfg.base, scenario.no_fly, shape)
    while uav.task_queue:
        task = uav.task_queue[0]
        there = plan_path(uav.position, task.cell, scenario.no_fly, shape)
        back = plan_path(task.cell, cfg.base, scenario.no_fly, shape)
        need = ((_move_ticks(there, uav.speed) + _move_ticks(back, uav.speed)) * cfg.move_cost
                + task.dwell_samples * cfg.sense_cost)
        if uav.battery - need < uav.reserve:
            log.emit(tick, uav.name, EventKind.BATTERY_LOW, battery=uav.battery,
                     reserve=uav.reserve, pending=len(uav.task_queue))
            uav.task_queue = []
            break
        uav.task_queue.pop(0)
        s.task, s.window = task, []
        s.path = there[1:]
        s.mode = "transit" if s.path else "sensing"
        return
    s.path = home[1:]
    if s.path:
        s.mode = "returning"
    else:
        s.mode = "home"
        log.emit(tick, uav.name, EventKind.RETURNED_TO_BASE,
                 position_m=position_m(scenario, uav.position), battery=uav.battery)
