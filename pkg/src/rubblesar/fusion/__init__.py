"""Multi-modal fusion: datasets, from-scratch classifiers, metrics, importance."""

from .dataset import (CSV_HEADER, Dataset, DatasetFormatError, Protocol, dataset_from_csv,
                      dataset_to_csv, generate_dataset, resolve_families, stratified_split)
from .evaluate import (DECISION_THRESHOLD, ImportanceReport, aggregate_detection, decide,
                       evaluate, permutation_importance, predict)
from .logistic import LogisticHyper, LogisticModel, SingleClassError, loss_and_grad, train_logistic
from .metrics import Metrics
from .persist import ModelFormatError, dumps_model, loads_model, model_kind
from .tree import (DecisionTree, ForestHyper, RandomForest, TreeHyper, best_split, split_score,
                   train_forest, train_tree)

MODEL_KINDS = ("lr", "dt", "rf")


def train_model(kind, dataset, hyper=None):
    """Fit model `kind` ('lr', 'dt' or 'rf') on every row of `dataset`."""
    X, y = dataset.X, dataset.y
    if kind == "lr":
        return train_logistic(X, y, hyper or LogisticHyper())
    if kind == "dt":
        return train_tree(X, y, hyper or TreeHyper())
    if kind == "rf":
        return train_forest(X, y, hyper or ForestHyper())
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
