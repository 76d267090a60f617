"""Random problem generators shared by the unit tests and the acceptance suite."""

import numpy as np

from rubblesar.fusion import TreeHyper
from rubblesar.mission import LaUav, Task


def random_cart_problem(rng):
    """<= 20 rows x 4 features with few distinct values, so ties and duplicates are common."""
    n = int(rng.integers(1, 21))
    X = rng.integers(0, int(rng.integers(2, 6)), size=(n, 4)).astype(float)
    X[:, 1] = X[:, 1] * 0.5 - 1.0
    y = rng.integers(0, 2, n)
    hyper = TreeHyper(int(rng.integers(1, 6)), int(rng.integers(1, 4)), int(rng.integers(2, 5)))
    probes = np.vstack([X, rng.integers(-1, 6, size=(20, 4)).astype(float)])
    return X, y, hyper, probes


def random_grid(rng, max_side=30):
    """(start, goal, no_fly, shape) with an open start, or None if every cell is blocked."""
    h, w = (int(v) for v in rng.integers(1, max_side + 1, 2))
    density = float(rng.uniform(0, 0.4))
    no_fly = {(r, c) for r in range(h) for c in range(w) if rng.random() < density}
    free = [(r, c) for r in range(h) for c in range(w) if (r, c) not in no_fly]
    if not free:
        return None
    start = free[int(rng.integers(len(free)))]
    goal = (int(rng.integers(h)), int(rng.integers(w)))
    return start, goal, no_fly, (h, w)


def random_allocation(rng):
    """1-3 LA-UAVs and 0-8 tasks on a 10, 30 or 50 cell grid."""
    grid = int(rng.choice([10, 30, 50]))
    fleet = [LaUav(i, tuple(int(v) for v in rng.integers(0, grid, 2)),
                   speed=int(rng.integers(1, 4))) for i in range(int(rng.integers(1, 4)))]
    tasks = [Task(tuple(int(v) for v in rng.integers(0, grid, 2)),
                  dwell_samples=int(rng.integers(1, 6))) for _ in range(int(rng.integers(0, 9)))]
    return fleet, tasks
