"""Independent reference implementations used only by the tests.

Each oracle takes a deliberately different route from the package code:
exact rational arithmetic instead of floats, exhaustive enumeration instead
of sorted sweeps, explicit loops instead of vectorized numpy, and a
third-party graph library for grid shortest paths.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import networkx as nx


# -- metrics -------------------------------------------------------------------

def metrics_closed_form(tp, fp, fn, tn):
    """Accuracy, precision, recall, F1 straight from the textbook definitions."""
    total = tp + fp + fn + tn
    acc = Fraction(tp + tn, total) if total else Fraction(0)
    prec = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    rec = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    # F1 = 2tp / (2tp + fp + fn), the count form of the harmonic mean
    f1 = Fraction(2 * tp, 2 * tp + fp + fn) if tp else Fraction(0)
    return tuple(float(v) for v in (acc, prec, rec, f1))


# -- CART ----------------------------------------------------------------------

def _gini_weighted(labels):
    n = len(labels)
    if n == 0:
        return Fraction(0)
    p = Fraction(sum(labels), n)
    return n * (1 - p * p - (1 - p) * (1 - p))


def cart_oracle(X, y, max_depth, min_leaf, min_split=2, depth=0):
    """Exhaustive CART: try every (feature, midpoint), exact Gini, tie to lowest pair.

    Returns a nested tuple: ('leaf', p) or ('split', f, t, left, right).
    """
    rows = list(range(len(y)))
    n = len(rows)
    pos = sum(y)
    p = pos / n
    if depth >= max_depth or pos in (0, n) or n < max(min_split, 2 * min_leaf):
        return ("leaf", p)
    best = None
    for f in range(len(X[0])):
        values = sorted(set(row[f] for row in X))
        for a, b in zip(values, values[1:]):
            t = (a + b) / 2.0
            left = [y[i] for i in rows if X[i][f] <= t]
            right = [y[i] for i in rows if X[i][f] > t]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            cost = _gini_weighted(left) + _gini_weighted(right)
            if best is None or cost < best[0]:
                best = (cost, f, t)
    if best is None:
        return ("leaf", p)
    _, f, t = best
    li = [i for i in rows if X[i][f] <= t]
    ri = [i for i in rows if X[i][f] > t]
    return ("split", f, t,
            cart_oracle([X[i] for i in li], [y[i] for i in li], max_depth, min_leaf, min_split,
                        depth + 1),
            cart_oracle([X[i] for i in ri], [y[i] for i in ri], max_depth, min_leaf, min_split,
                        depth + 1))


def cart_predict(node, x):
    while node[0] == "split":
        _, f, t, left, right = node
        node = left if x[f] <= t else right
    return node[1]


# -- logistic regression ---------------------------------------------------------

def mean_cross_entropy(w, b, Xs, y):
    """Plain-loop mean cross-entropy, for finite differences."""
    total = 0.0
    for row, label in zip(Xs, y):
        z = sum(wi * xi for wi, xi in zip(w, row)) + b
        p = 1.0 / (1.0 + math.exp(-z))
        total -= label * math.log(p) + (1 - label) * math.log(1 - p)
    return total / len(y)


def central_difference_grad(w, b, Xs, y, h=1e-5):
    grads = []
    for j in range(len(w)):
        up, dn = list(w), list(w)
        up[j] += h
        dn[j] -= h
        grads.append((mean_cross_entropy(up, b, Xs, y) - mean_cross_entropy(dn, b, Xs, y)) / (2 * h))
    gb = (mean_cross_entropy(w, b + h, Xs, y) - mean_cross_entropy(w, b - h, Xs, y)) / (2 * h)
    return grads, gb


# -- task allocation --------------------------------------------------------------

def _route_times(start, cells, dwell, speed):
    """Held-Karp: fastest visiting order for every subset of tasks, keyed by bitmask."""
    n = len(cells)
    d0 = [math.dist(start, c) / speed for c in cells]
    d = [[math.dist(a, b) / speed for b in cells] for a in cells]
    best = {}
    for j in range(n):
        best[(1 << j, j)] = d0[j] + dwell[j]
    for mask in range(1, 1 << n):
        members = [j for j in range(n) if mask >> j & 1]
        if len(members) < 2:
            continue
        for j in members:
            prev = mask & ~(1 << j)
            best[(mask, j)] = min(best[(prev, i)] + d[i][j] for i in members if i != j) + dwell[j]
    times = {0: 0.0}
    for mask in range(1, 1 << n):
        times[mask] = min(best[(mask, j)] for j in range(n) if mask >> j & 1)
    return times


def optimal_makespan(starts, speeds, cells, dwell):
    """Exhaustive minimum makespan over every assignment of tasks to UAVs."""
    tables = [_route_times(s, cells, dwell, v) for s, v in zip(starts, speeds)]
    best = math.inf
    for owner in itertools.product(range(len(starts)), repeat=len(cells)):
        masks = [0] * len(starts)
        for j, u in enumerate(owner):
            masks[u] |= 1 << j
        best = min(best, max(t[m] for t, m in zip(tables, masks)))
    return best


# -- grid paths ---------------------------------------------------------------------

def bfs_length(start, goal, no_fly, shape):
    """Shortest free-cell path length in cells via networkx, or None if unreachable."""
    g = nx.grid_2d_graph(*shape)
    g.remove_nodes_from(no_fly)
    try:
        return nx.shortest_path_length(g, start, goal) + 1
    except (nx.NetworkXNoPath, nx.NodeNotFound):
        return None
