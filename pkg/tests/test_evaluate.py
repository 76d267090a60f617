import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rubblesar.fusion import (Dataset, DecisionTree, LogisticModel, RandomForest, TreeHyper,
                              aggregate_detection, decide, permutation_importance, predict,
                              train_tree)
from rubblesar.radar import FeatureVector


@pytest.mark.parametrize("window, expected", [
    ([1, 1, 1, 1, 1], 1.0), ([0, 0, 0], 0.0), ([1, 0, 1, 0, 1], 0.6)])
def test_aggregate_examples(window, expected):
    p, verdict = aggregate_detection(window, k=len(window))
    assert p == pytest.approx(expected, abs=1e-15)
    assert verdict == (expected >= 0.5)


def test_aggregate_rejections_and_vote_threshold():
    with pytest.raises(ValueError):
        aggregate_detection([])
    with pytest.raises(ValueError):
        aggregate_detection([1, 0], k=3)
    assert aggregate_detection([1, 0], vote_threshold=0.5) == (0.5, True)
    assert aggregate_detection([1, 0, 0], vote_threshold=0.3)[1]
    assert not aggregate_detection([1, 0, 0], vote_threshold=0.4)[1]


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.randoms(use_true_random=False))
def test_aggregate_permutation_invariant(window, rnd):
    shuffled = list(window)
    rnd.shuffle(shuffled)
    assert aggregate_detection(window) == aggregate_detection(shuffled)
    assert 0.0 <= aggregate_detection(window)[0] <= 1.0


def test_decide_ties_positive():
    assert decide([0.5, 0.4999999, 1.0, 0.0]).tolist() == [1, 0, 1, 0]


def test_predict_scalar_and_batch():
    x = FeatureVector(0.2, 0, 0.1, 1.5, 0)
    assert predict(LogisticModel(np.zeros(4), 0.0, np.zeros(4), np.ones(4)), x) == 0.5
    batch = predict(DecisionTree.leaf(0.25), np.zeros((3, 4)))
    assert batch.tolist() == [0.25, 0.25, 0.25]


def _rows(X, y):
    return Dataset([FeatureVector(a, int(b), c, d, int(lab)) for (a, b, c, d), lab in zip(X, y)])


def test_importance_zero_for_ignored_features():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(300, 4))
    X[:, 1] = (X[:, 1] > 0)
    y = (X[:, 2] > 0).astype(int)
    data = _rows(X, y)
    tree = train_tree(data.X, data.y, TreeHyper(max_depth=1))
    assert set(tree.feature[tree.feature >= 0].tolist()) == {2}
    report = permutation_importance(tree, data, repeats=3, seed=1)
    assert report.raw[0] == report.raw[1] == report.raw[3] == 0.0
    assert report.importance == (0.0, 0.0, 1.0, 0.0)
    assert report.ranking == (2, 0, 1, 3)
    lr = LogisticModel(np.array([0.0, 0.0, 3.0, 0.0]), 0.0, np.zeros(4), np.ones(4))
    raw = permutation_importance(lr, data, repeats=3, seed=1).raw
    assert raw[0] == raw[1] == raw[3] == 0.0 and raw[2] > 0.3


def test_importance_uniform_when_nothing_matters():
    data = _rows(np.random.default_rng(1).normal(size=(50, 4)), [1] * 25 + [0] * 25)
    report = permutation_importance(DecisionTree.leaf(0.9), data, repeats=2)
    assert report.importance == (0.25, 0.25, 0.25, 0.25)
    assert report.ranking == (0, 1, 2, 3)


def test_importance_deterministic_and_normalized():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(200, 4))
    y = (X[:, 0] + 0.5 * X[:, 3] > 0).astype(int)
    data = _rows(X, y)
    forest = RandomForest([train_tree(X, y, TreeHyper(4, 2))], [0], 4, False)
    a = permutation_importance(forest, data, repeats=4, seed=3)
    b = permutation_importance(forest, data, repeats=4, seed=3)
    assert a == b
    assert sum(a.importance) == pytest.approx(1.0, abs=1e-12)
    assert all(v >= 0 for v in a.importance)
    assert list(a.ranking) == sorted(range(4), key=lambda j: (-a.importance[j], j))


def test_empty_test_set_rejected():
    with pytest.raises(ValueError):
        permutation_importance(DecisionTree.leaf(0.5), Dataset([]))
