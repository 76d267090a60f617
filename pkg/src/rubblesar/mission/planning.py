"""Grid path planning, coverage ordering and greedy makespan task allocation."""

from __future__ import annotations

import math
from collections import deque


def neighbors(cell, height, width):
    """4-neighbors inside the grid, in row-major order."""
    r, c = cell
    for nr, nc in ((r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)):
        if 0 <= nr < height and 0 <= nc < width:
            yield (nr, nc)


def plan_path(start, goal, no_fly, shape):
    """Shortest 4-connected path from `start` to `goal` avoiding `no_fly`.

    `shape` is ``(height, width)``. Returns the cell list including both
    endpoints, or None when the goal cannot be reached (a no-fly goal counts
    as unreachable).
    """
    height, width = shape
    start, goal = tuple(start), tuple(goal)
    for name, cell in (("start", start), ("goal", goal)):
        if not (0 <= cell[0] < height and 0 <= cell[1] < width):
            raise ValueError(f"{name} {cell} outside {height}x{width} grid")
    if start in no_fly:
        raise ValueError(f"start {start} is a no-fly cell")
    if goal in no_fly:
        return None
    if start == goal:
        return [start]
    parent = {start: None}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        for nb in neighbors(cell, height, width):
            if nb in parent or nb in no_fly:
                continue
            parent[nb] = cell
            if nb == goal:
                path = [goal]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(nb)
    return None


def reachable(start, no_fly, shape):
    """All cells reachable from `start`."""
    height, width = shape
    seen = {tuple(start)}
    queue = deque(seen)
    while queue:
        for nb in neighbors(queue.popleft(), height, width):
            if nb not in seen and nb not in no_fly:
                seen.add(nb)
                queue.append(nb)
    return seen


def boustrophedon(cells):
    """Row-serpentine sweep: even rows left to right, odd rows right to left."""
    rows = {}
    for r, c in cells:
        rows.setdefault(r, []).append(c)
    order = []
    for i, r in enumerate(sorted(rows)):
        cols = sorted(rows[r], reverse=bool(i % 2))
        order.extend((r, c) for c in cols)
    return order


def coverage_order(clusters, start):
    """Sweep each cluster, visiting clusters by nearest-centroid chaining from `start`."""
    remaining = sorted(clusters, key=lambda k: k.id)
    here = tuple(start)
    order = []
    while remaining:
        nxt = min(remaining, key=lambda k: (distance(here, k.centroid), k.id))
        remaining.remove(nxt)
        sweep = boustrophedon(nxt.cells)
        order.extend(sweep)
        here = sweep[-1]
    return order


def distance(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def assign_tasks(tasks, fleet, max_moves=500):
    """Greedy makespan allocation followed by local improvement.

    Construction repeatedly commits the (UAV, task) pair that finishes
    earliest: each UAV's candidate is its nearest unassigned task from the end
    of its queue, and ties go to the lower UAV id, then row-major cell order.
    Travel time is Euclidean cell distance over speed, plus one tick per dwell
    sample. A relocate/swap pass then lowers the makespan while it can.

    `fleet` items need ``id``, ``position`` and ``speed``. Returns
    ``{uav_id: [task, ...]}``.
    """
    if not fleet:
        raise ValueError("cannot assign tasks to an empty fleet")
    queues = {u.id: [] for u in fleet}
    finish = {u.id: 0.0 for u in fleet}
    at = {u.id: tuple(u.position) for u in fleet}
    speed = {u.id: u.speed for u in fleet}
    pending = sorted(tasks, key=lambda t: tuple(t.cell))
    while pending:
        best = None
        for uid in sorted(queues):
            for t in pending:
                done = finish[uid] + distance(at[uid], t.cell) / speed[uid] + t.dwell_samples
                key = (done, uid, tuple(t.cell))
                if best is None or key < best[0]:
                    best = (key, uid, t)
        (done, _, _), uid, task = best
        pending.remove(task)
        queues[uid].append(task)
        finish[uid] = done
        at[uid] = tuple(task.cell)
    return improve_assignment(queues, fleet, max_moves)


def _profile(queues, by_id):
    """Queue completion times, slowest first: compared lexicographically."""
    return sorted((queue_time(by_id[i].position, by_id[i].speed, q) for i, q in queues.items()),
                  reverse=True)


def _lower(a, b, tol=1e-9):
    for x, y in zip(a, b):
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False


def _moves(queues):
    """Every single-task relocation and every cross-queue swap, in fixed order."""
    ids = sorted(queues)
    for i in ids:
        for a in range(len(queues[i])):
            for j in ids:
                for b in range(len(queues[j]) + (i != j)):
                    if i == j and b == a:
                        continue
                    nq = dict(queues)
                    nq[i] = list(queues[i])
                    task = nq[i].pop(a)
                    nq[j] = list(nq[j]) if j != i else nq[i]
                    nq[j].insert(b, task)
                    yield nq
                if j > i:
                    for b in range(len(queues[j])):
                        nq = dict(queues)
                        nq[i], nq[j] = list(queues[i]), list(queues[j])
                        nq[i][a], nq[j][b] = queues[j][b], queues[i][a]
                        yield nq


def improve_assignment(queues, fleet, max_moves=500):
    """Best-improvement descent over relocations and swaps.

    The objective is the sorted completion-time profile, so once the slowest
    queue cannot improve the next slowest still can, which frees slack for
    later moves. Deterministic: moves are scanned in a fixed order.
    """
    by_id = {u.id: u for u in fleet}
    current = _profile(queues, by_id)
    for _ in range(max_moves):
        best = None
        for nq in _moves(queues):
            prof = _profile(nq, by_id)
            if _lower(prof, current) and (best is None or _lower(prof, best[0])):
                best = (prof, nq)
        if best is None:
            break
        current, queues = best
    return queues


def queue_time(start, speed, tasks):
    """Completion time of one UAV's ordered queue under the allocation cost model."""
    t, here = 0.0, tuple(start)
    for task in tasks:
        t += distance(here, task.cell) / speed + task.dwell_samples
        here = tuple(task.cell)
    return t


def makespan(assignment, fleet):
    by_id = {u.id: u for u in fleet}
    return max((queue_time(by_id[i].position, by_id[i].speed, q) for i, q in assignment.items()),
               default=0.0)
