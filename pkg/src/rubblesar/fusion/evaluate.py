from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..radar import FeatureVector
from .metrics import Metrics

DECISION_THRESHOLD = 0.5


def _as_matrix(x):
    if isinstance(x, FeatureVector):
        return x.as_array()[None, :]
    if hasattr(x, "rows"):
        return x.X
    return np.atleast_2d(np.asarray(x, dtype=float))


def predict(model, x):
    """Positive-class probability; scalar for a single FeatureVector."""
    p = model.predict_proba(_as_matrix(x))
    return float(p[0]) if isinstance(x, FeatureVector) else p


def decide(prob, threshold=DECISION_THRESHOLD):
    # ties go positive: missing a victim costs more than a false alarm
    return (np.asarray(prob) >= threshold).astype(int)


def aggregate_detection(window, k=None, vote_threshold=0.5):
    """Mean of per-sample outputs over a window. Returns ``(probability, verdict)``."""
    window = [float(w) for w in window]
    if not window:
        raise ValueError("detection window is empty")
    if k is not None and len(window) != k:
        raise ValueError(f"window holds {len(window)} samples, expected {k}")
    p = sum(sorted(window)) / len(window)
    return p, p >= vote_threshold


def evaluate(model, test):
    if len(test) == 0:
        raise ValueError("empty test set")
    return Metrics.from_predictions(test.y, decide(model.predict_proba(test.X)))


@dataclass(frozen=True)
class ImportanceReport:
    importance: tuple
    raw: tuple
    ranking: tuple


def permutation_importance(model, test, repeats=5, seed=0):
    """Accuracy drop when each feature column is shuffled, clamped and normalized."""
    X, y = test.X, test.y
    if len(y) == 0:
        raise ValueError("empty test set")
    rng = np.random.default_rng(seed)
    baseline = float(np.mean(decide(model.predict_proba(X)) == y))
    raw = []
    for j in range(X.shape[1]):
        accs = []
        for _ in range(repeats):
            Xp = X.copy()
            Xp[:, j] = Xp[rng.permutation(len(y)), j]
            accs.append(float(np.mean(decide(model.predict_proba(Xp)) == y)))
        raw.append(max(0.0, baseline - float(np.mean(accs))))
    total = sum(raw)
    if total > 0:
        imp = tuple(r / total for r in raw)
    else:
        imp = tuple(1.0 / len(raw) for _ in raw)
    ranking = tuple(sorted(range(len(imp)), key=lambda j: (-imp[j], j)))
    return ImportanceReport(imp, tuple(raw), ranking)
