"""CART classification trees (Gini) and bagged random forests."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TreeHyper:
    max_depth: int = 8
    min_samples_leaf: int = 5
    min_samples_split: int = 2


@dataclass(frozen=True)
class ForestHyper:
    n_trees: int = 100
    features_per_split: int = 2
    bootstrap: bool = True
    # members are grown nearly out; averaging, not pruning, controls their variance
    max_depth: int = 40
    min_samples_leaf: int = 2
    min_samples_split: int = 2
    seed: int = 0
    n_jobs: int = 1

    @property
    def tree_hyper(self):
        return TreeHyper(self.max_depth, self.min_samples_leaf, self.min_samples_split)


def split_score(pos_left, neg_left, pos_right, neg_right):
    """Sum over children of (pos^2 + neg^2) / n.

    Maximizing this is equivalent to minimizing the size-weighted Gini
    impurity of the children. Works elementwise on arrays.
    """
    n_left = pos_left + neg_left
    n_right = pos_right + neg_right
    return ((pos_left * pos_left + neg_left * neg_left) / n_left
            + (pos_right * pos_right + neg_right * neg_right) / n_right)


@dataclass
class DecisionTree:
    """Flat preorder node arrays; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def depth(self):
        depths = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def used_features(self):
        return sorted(set(int(f) for f in self.feature if f >= 0))

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                break
            go_left = X[rows[active], f[active]] <= self.threshold[node[active]]
            node[active] = np.where(go_left, self.left[node[active]], self.right[node[active]])
        return self.value[node].astype(float)

    @classmethod
    def leaf(cls, p, n=1):
        return cls(np.array([-1]), np.array([0.0]), np.array([-1]), np.array([-1]),
                   np.array([float(p)]), np.array([n]))


def best_split(X, y, idx, features, min_leaf):
    """Best (feature, threshold) over midpoints of consecutive distinct values.

    Ties go to the lower feature index, then the lower threshold. Returns
    None when no split leaves ``min_leaf`` rows on both sides.
    """
    n = len(idx)
    y_node = y[idx]
    total_pos = float(y_node.sum())
    best = None
    best_score = -np.inf
    # scores within eps are exact ties that rounding may have split apart
    eps = 1e-12 * n
    i = np.arange(1, n)
    for f in features:
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        cum_pos = np.cumsum(y_node[order]).astype(float)
        valid = (xs[1:] > xs[:-1]) & (i >= min_leaf) & (n - i >= min_leaf)
        if not valid.any():
            continue
        pl = cum_pos[:-1]
        nl = i - pl
        pr = total_pos - pl
        nr = (n - i) - pr
        scores = np.where(valid, split_score(pl, nl, pr, nr), -np.inf)
        k = int(np.argmax(scores >= scores.max() - eps))
        if scores[k] > best_score + eps:
            best_score = scores[k]
            best = (int(f), float((xs[k] + xs[k + 1]) / 2.0))
    return best


def _grow(X, y, hyper, rng=None, features_per_split=None):
    n_features = X.shape[1]
    k = n_features if features_per_split is None else min(features_per_split, n_features)
    feature, threshold, left, right, value, counts = [], [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].sum()) / len(idx))
        counts.append(len(idx))
        return len(feature) - 1

    # explicit stack, children pushed right-then-left to keep preorder numbering
    root_idx = np.arange(len(y))
    stack = [(new_node(root_idx), root_idx, 0)]
    while stack:
        node, idx, depth = stack.pop()
        n = len(idx)
        p = value[node]
        if depth >= hyper.max_depth or p in (0.0, 1.0) or n < max(hyper.min_samples_split,
                                                                  2 * hyper.min_samples_leaf):
            continue
        if k < n_features:
            feats = np.sort(rng.choice(n_features, size=k, replace=False))
        else:
            feats = range(n_features)
        split = best_split(X, y, idx, feats, hyper.min_samples_leaf)
        if split is None:
            continue
        f, t = split
        mask = X[idx, f] <= t
        li, ri = idx[mask], idx[~mask]
        feature[node] = f
        threshold[node] = t
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return DecisionTree(np.array(feature, dtype=np.int64), np.array(threshold),
                        np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                        np.array(value), np.array(counts, dtype=np.int64))


def train_tree(X, y, hyper=TreeHyper()):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("cannot train a tree on an empty training set")
    return _grow(X, y, hyper)


def _shift(children, offset):
    return np.where(children >= 0, children + offset, -1)


@dataclass
class RandomForest:
    trees: list
    per_tree_seeds: list
    features_per_split: int
    bootstrap: bool = True
    _packed: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def _pack(self):
        # all trees in one node table so every tree descends in the same numpy step
        if self._packed is None:
            sizes = [t.n_nodes for t in self.trees]
            offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
            self._packed = (
                offsets,
                np.concatenate([t.feature for t in self.trees]),
                np.concatenate([t.threshold for t in self.trees]),
                np.concatenate([_shift(t.left, o) for t, o in zip(self.trees, offsets)]),
                np.concatenate([_shift(t.right, o) for t, o in zip(self.trees, offsets)]),
                np.concatenate([t.value for t in self.trees]).astype(float),
            )
        return self._packed

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        offsets, feature, threshold, left, right, value = self._pack()
        node = np.repeat(offsets[:, None], len(X), axis=1)
        rows = np.broadcast_to(np.arange(len(X)), node.shape)
        while True:
            f = feature[node]
            active = f >= 0
            if not active.any():
                break
            at = node[active]
            go_left = X[rows[active], f[active]] <= threshold[at]
            node[active] = np.where(go_left, left[at], right[at])
        acc = np.zeros(len(X))
        for v in value[node]:  # tree order, as a running sum
            acc += v
        return acc / len(self.trees)

    def used_features(self):
        return sorted(set().union(*(t.used_features() for t in self.trees)))


def _fit_member(X, y, seed, hyper):
    rng = np.random.default_rng(seed)
    if hyper.bootstrap:
        idx = rng.integers(0, len(y), len(y))
        Xb, yb = X[idx], y[idx]
    else:
        Xb, yb = X, y
    return _grow(Xb, yb, hyper.tree_hyper, rng, hyper.features_per_split)


def train_forest(X, y, hyper=ForestHyper()):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("cannot train a forest on an empty training set")
    if hyper.n_trees < 1:
        raise ValueError("a forest needs at least one tree")
    seeds = [int(s) for s in np.random.default_rng(hyper.seed).integers(0, 2**63, hyper.n_trees)]
    if hyper.n_jobs > 1:
        with ThreadPoolExecutor(hyper.n_jobs) as pool:
            trees = list(pool.map(lambda s: _fit_member(X, y, s, hyper), seeds))
    else:
        trees = [_fit_member(X, y, s, hyper) for s in seeds]
    return RandomForest(trees, seeds, hyper.features_per_split, hyper.bootstrap)
