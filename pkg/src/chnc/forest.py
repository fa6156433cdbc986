"""Random-forest feature importances for the distance metric.

The forest is scikit-learn's classifier behind this module's surface:
Gini impurity splits, sqrt(H) features per split, bootstrap per tree,
and a leaf-size floor given as a fraction of the labeled set (a node
splits only if both children would keep at least
``ceil(fraction * n_labeled)`` samples). The per-feature mean decrease
in impurity is rescaled so the importances sum to the feature count,
making the weighted distance comparable to the unweighted one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.model_selection import StratifiedKFold

from .errors import ConfigError, DataError

DEFAULT_CANDIDATE_FRACTIONS = (0.001, 0.002, 0.005, 0.01)


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    min_samples_leaf_fraction: float = 0.001
    candidate_fractions: tuple[float, ...] = DEFAULT_CANDIDATE_FRACTIONS
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        fractions = (self.min_samples_leaf_fraction, *self.candidate_fractions)
        if any(not 0.0 < f <= 0.5 for f in fractions):
            raise ConfigError("leaf fractions must lie in (0, 0.5]")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")


@dataclass(frozen=True, eq=False)
class ForestModel:
    """Fitted forest plus the settings it was trained with."""

    estimator: RandomForestClassifier
    n_features: int
    leaf_fraction: float

    def predict(self, features) -> np.ndarray:
        return self.estimator.predict(np.asarray(features)).astype(np.int8)


@dataclass(frozen=True, eq=False)
class ImportanceVector:
    """Per-feature weights rho_h >= 0 with sum(rho) == H."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.ascontiguousarray(self.rho, dtype=np.float64)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if np.any(rho < 0):
            raise ConfigError("importances must be nonnegative")
        if abs(rho.sum() - len(rho)) > 1e-9:
            raise ConfigError("importances must sum to the feature count")

    def to_json(self) -> str:
        return json.dumps([float(v) for v in self.rho])


def _labeled_arrays(ds):
    ids = ds.labeled_ids
    if len(ids) < 2:
        raise DataError("need at least 2 labeled samples")
    y = ds.given_label[ids].astype(np.int64)
    if len(np.unique(y)) < 2:
        raise DataError("labeled set contains a single class")
    return ds.features[ids], y


def _make_estimator(cfg: ForestConfig) -> RandomForestClassifier:
    return RandomForestClassifier(
        n_estimators=cfg.n_trees,
        criterion="gini",
        max_features="sqrt",
        min_samples_leaf=cfg.min_samples_leaf_fraction,
        bootstrap=True,
        random_state=cfg.seed,
        n_jobs=-1,
    )


def fit_forest(ds, cfg: ForestConfig) -> ForestModel:
    """Train the forest on the labeled samples."""
    features, y = _labeled_arrays(ds)
    est = _make_estimator(cfg)
    est.fit(features, y)
    return ForestModel(est, features.shape[1], cfg.min_samples_leaf_fraction)


def tune_leaf_fraction(ds, cfg: ForestConfig) -> float:
    """Pick the leaf fraction with the best stratified-CV accuracy.

    Ties break toward the smallest candidate.
    """
    features, y = _labeled_arrays(ds)
    if len(y) < cfg.cv_folds:
        raise ConfigError(
            f"{len(y)} labeled samples cannot form {cfg.cv_folds} folds")
    counts = np.bincount((y + 1) // 2, minlength=2)
    if counts.min() < cfg.cv_folds:
        raise ConfigError("a class has fewer labeled samples than folds")
    skf = StratifiedKFold(n_splits=cfg.cv_folds, shuffle=True,
                          random_state=cfg.seed)
    folds = list(skf.split(features, y))
    best_fraction, best_score = None, -1.0
    for fraction in sorted(cfg.candidate_fractions):
        scores = []
        for train_idx, val_idx in folds:
            est = _make_estimator(replace(cfg, min_samples_leaf_fraction=fraction))
            est.fit(features[train_idx], y[train_idx])
            scores.append(est.score(features[val_idx], y[val_idx]))
        mean = float(np.mean(scores))
        if mean > best_score:
            best_fraction, best_score = fraction, mean
    return best_fraction


def feature_importances(model: ForestModel) -> ImportanceVector:
    """Impurity-based importances rescaled to sum to the feature count.

    All-zero raw importances (no useful split anywhere) fall back to
    uniform weights so the distance metric stays nondegenerate.
    """
    raw = np.asarray(model.estimator.feature_importances_, dtype=np.float64)
    total = raw.sum()
    if total <= 0:
        return ImportanceVector(np.ones(model.n_features))
    return ImportanceVector(raw * (model.n_features / total))
