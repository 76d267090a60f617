"""Versioned JSON documents for trained models.

Floats are written with ``repr`` semantics (the json default), which
round-trips float64 exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .logistic import LogisticModel
from .tree import DecisionTree, RandomForest

FORMAT_VERSION = 1
N_FEATURES = 4


class ModelFormatError(ValueError):
    pass


def _tree_doc(t):
    return {
        "feature": t.feature.tolist(),
        "threshold": t.threshold.tolist(),
        "left": t.left.tolist(),
        "right": t.right.tolist(),
        "value": t.value.tolist(),
        "n_samples": t.n_samples.tolist(),
    }


def _tree_from(d):
    return DecisionTree(np.array(d["feature"], dtype=np.int64), np.array(d["threshold"], dtype=float),
                        np.array(d["left"], dtype=np.int64), np.array(d["right"], dtype=np.int64),
                        np.array(d["value"], dtype=float), np.array(d["n_samples"], dtype=np.int64))


def model_kind(model):
    if isinstance(model, LogisticModel):
        return "lr"
    if isinstance(model, DecisionTree):
        return "dt"
    if isinstance(model, RandomForest):
        return "rf"
    raise TypeError(f"not a model: {type(model).__name__}")


def model_to_dict(model, provenance=None):
    kind = model_kind(model)
    doc = {"format_version": FORMAT_VERSION, "kind": kind, "n_features": N_FEATURES}
    if kind == "lr":
        doc["weights"] = model.weights.tolist()
        doc["bias"] = float(model.bias)
        doc["feature_means"] = model.feature_means.tolist()
        doc["feature_scales"] = model.feature_scales.tolist()
    elif kind == "dt":
        doc["tree"] = _tree_doc(model)
    else:
        doc["features_per_split"] = model.features_per_split
        doc["bootstrap"] = model.bootstrap
        doc["per_tree_seeds"] = list(model.per_tree_seeds)
        doc["trees"] = [_tree_doc(t) for t in model.trees]
    if provenance:
        doc["provenance"] = provenance
    return doc


def model_from_dict(doc):
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    if kind == "lr":
        return LogisticModel(np.array(doc["weights"], dtype=float), float(doc["bias"]),
                             np.array(doc["feature_means"], dtype=float),
                             np.array(doc["feature_scales"], dtype=float))
    if kind == "dt":
        return _tree_from(doc["tree"])
    if kind == "rf":
        return RandomForest([_tree_from(t) for t in doc["trees"]], list(doc["per_tree_seeds"]),
                            int(doc["features_per_split"]), bool(doc["bootstrap"]))
    raise ModelFormatError(f"unknown model kind {kind!r}")


def dumps_model(model, provenance=None):
    return json.dumps(model_to_dict(model, provenance), indent=1, sort_keys=True) + "\n"


def loads_model(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(doc)
