import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rubblesar.fusion import (LogisticHyper, LogisticModel, SingleClassError, loss_and_grad,
                              train_logistic)

from oracles import central_difference_grad, mean_cross_entropy


def test_zero_init_balanced_bias_gradient_is_zero():
    rng = np.random.default_rng(0)
    Xs = rng.normal(size=(10, 4))
    y = np.array([0, 1] * 5, dtype=float)
    _, _, gb = loss_and_grad(np.zeros(4), 0.0, Xs, y)
    assert gb == pytest.approx(np.mean(y) - 0.5, abs=1e-15)
    assert gb == pytest.approx(0.0, abs=1e-15)


def test_separable_eight_points():
    X = np.array([[0, 0, 0, 1.5], [0.1, 0, 0.2, 1.5], [0.2, 0, 0.1, 1.75], [0, 0, 0.3, 2.0],
                  [1, 1, 1, 1.5], [0.9, 1, 1.2, 1.75], [1.1, 1, 0.8, 2.0], [1.2, 1, 1.1, 1.5]])
    y = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    model = train_logistic(X, y)
    assert np.array_equal((model.predict_proba(X) >= 0.5).astype(int), y)
    assert model.loss_history[-1] <= model.loss_history[0]


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_gradient_matches_central_differences(seed):
    rng = np.random.default_rng(seed)
    Xs = rng.normal(size=(20, 4))
    y = rng.integers(0, 2, 20).astype(float)
    w = rng.normal(scale=0.5, size=4)
    b = float(rng.normal(scale=0.5))
    loss, gw, gb = loss_and_grad(w, b, Xs, y)
    assert loss == pytest.approx(mean_cross_entropy(w, b, Xs, y), rel=1e-12)
    nw, nb = central_difference_grad(list(w), b, Xs.tolist(), y.tolist(), h=1e-5)
    for a, n in zip(list(gw) + [gb], nw + [nb]):
        assert abs(a - n) <= 1e-5 * max(abs(a), abs(n)) + 1e-9


def test_training_lowers_loss_and_keeps_scales_positive():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(200, 4))
    X[:, 3] = 2.0  # constant column: scale falls back to 1
    y = (X[:, 0] + 0.3 * rng.normal(size=200) > 0).astype(int)
    model = train_logistic(X, y, LogisticHyper(epochs=200))
    assert len(model.loss_history) == 201
    assert model.loss_history[-1] < model.loss_history[0]
    assert np.all(model.feature_scales > 0)
    p = model.predict_proba(X)
    assert np.all((p > 0) & (p < 1))


def test_single_class_rejected():
    with pytest.raises(SingleClassError):
        train_logistic(np.ones((5, 4)), np.ones(5))


def test_zero_model_predicts_half():
    m = LogisticModel(np.zeros(4), 0.0, np.zeros(4), np.ones(4))
    assert m.predict_proba(np.array([[3.0, 1.0, -2.0, 1.5]]))[0] == 0.5


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), col=st.integers(0, 3),
       scale=st.floats(0.1, 50.0), flip=st.booleans(), shift=st.floats(-100, 100))
def test_decisions_invariant_under_affine_column_rescale(seed, col, scale, flip, shift):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(60, 4))
    y = (X @ np.array([1.0, -0.5, 0.8, 0.2]) + 0.5 * rng.normal(size=60) > 0).astype(int)
    X2 = X.copy()
    X2[:, col] = (-scale if flip else scale) * X2[:, col] + shift
    p1 = train_logistic(X, y, LogisticHyper(epochs=100)).predict_proba(X)
    p2 = train_logistic(X2, y, LogisticHyper(epochs=100)).predict_proba(X2)
    assert np.allclose(p1, p2, atol=1e-9)
    clear = np.abs(p1 - 0.5) > 1e-9
    assert np.array_equal(p1[clear] >= 0.5, p2[clear] >= 0.5)
