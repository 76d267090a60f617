from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


class SingleClassError(ValueError):
    """Training data holds only one label."""


@dataclass(frozen=True)
class LogisticHyper:
    epochs: int = 500
    learning_rate: float = 0.1


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_scales: np.ndarray
    loss_history: tuple = ()

    def standardize(self, X):
        return (np.asarray(X, dtype=float) - self.feature_means) / self.feature_scales

    def predict_proba(self, X):
        X = np.atleast_2d(X)
        return expit(self.standardize(X) @ self.weights + self.bias)


def loss_and_grad(w, b, Xs, y):
    """Mean cross-entropy on standardized inputs and its gradient in (w, b)."""
    z = Xs @ w + b
    p = expit(z)
    # log(1 + e^z) - y*z, written stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    err = p - y
    return loss, Xs.T @ err / len(y), float(np.mean(err))


def train_logistic(X, y, hyper=LogisticHyper()):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(y)) < 2:
        raise SingleClassError("logistic regression needs both classes in the training set")
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales[scales == 0] = 1.0
    Xs = (X - means) / scales
    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    for _ in range(hyper.epochs):
        loss, gw, gb = loss_and_grad(w, b, Xs, y)
        history.append(loss)
        w = w - hyper.learning_rate * gw
        b = b - hyper.learning_rate * gb
    history.append(loss_and_grad(w, b, Xs, y)[0])
    return LogisticModel(w, b, means, scales, tuple(history))
