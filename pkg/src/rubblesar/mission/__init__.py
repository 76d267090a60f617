"""Two-tier UAV search mission: survey, allocation, routing, sensing and reporting."""

from .entities import (EventKind, FleetSpec, HaUav, LaUav, MissionConfig, MissionEvent,
                       MissionLog, MissionReport, Task, TaskSource, UntrainedModelError)
from .planning import (assign_tasks, boustrophedon, coverage_order, improve_assignment, makespan,
                       plan_path, queue_time, reachable)
from .sim import la_budget_cells, position_m, run_mission, sense_at, size_fleet, survey
