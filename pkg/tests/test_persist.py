import json

import numpy as np
import pytest

from rubblesar.fusion import (ForestHyper, LogisticHyper, ModelFormatError, TreeHyper,
                              dumps_model, loads_model, model_kind, train_forest, train_logistic,
                              train_tree)


@pytest.fixture(scope="module")
def models():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(300, 4)) * [0.5, 1, 3, 0.2] + [0, 0.5, 0, 1.75]
    y = (X[:, 0] + 0.3 * X[:, 2] + 0.2 * rng.normal(size=300) > 0).astype(int)
    return {
        "lr": train_logistic(X, y, LogisticHyper(epochs=50)),
        "dt": train_tree(X, y, TreeHyper()),
        "rf": train_forest(X, y, ForestHyper(n_trees=15, seed=3)),
    }


@pytest.mark.parametrize("kind", ["lr", "dt", "rf"])
def test_round_trip_preserves_predictions_exactly(models, kind):
    model = models[kind]
    text = dumps_model(model, provenance={"seed": 3})
    back = loads_model(text)
    assert model_kind(back) == kind
    probes = np.random.default_rng(1).normal(size=(1000, 4)) * 3
    assert np.array_equal(model.predict_proba(probes), back.predict_proba(probes))
    assert dumps_model(back, provenance={"seed": 3}) == text
    assert json.loads(text)["provenance"] == {"seed": 3}


def test_version_and_kind_errors(models):
    doc = json.loads(dumps_model(models["dt"]))
    doc["format_version"] = 99
    with pytest.raises(ModelFormatError, match="version"):
        loads_model(json.dumps(doc))
    doc["format_version"] = 1
    doc["kind"] = "svm"
    with pytest.raises(ModelFormatError, match="kind"):
        loads_model(json.dumps(doc))
    with pytest.raises(ModelFormatError):
        loads_model("not json")


def test_unknown_object_rejected():
    with pytest.raises(TypeError):
        model_kind(object())
