"""End-to-end classifier: lambda selection, final cut, full pipeline.

The tradeoff parameter is selected by stratified cross-validation on
the labeled set. Held-out labeled samples are rebuilt as unlabeled
nodes (their confidence arcs replaced by the parametric terminal arcs),
one parametric sweep scores every grid value at once, and validation
accuracy is measured against the given -- possibly noisy -- labels,
since no clean labels exist at training time. Confidence weights are
computed once on the full labeled set and reused across folds.

``run_pipeline`` composes the whole method: standardization, forest
tuning and importances, kNN graph, the two confidence sweeps, lambda
selection, and the final cut. One master seed derives all stage seeds
through a fixed spawning scheme, so a run is reproducible end to end.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .confidence import ConfidenceReport, confidence_weights
from .data import Dataset, standardize
from .errors import ChncError, ConfigError
from .forest import (
    ForestConfig,
    ImportanceVector,
    feature_importances,
    fit_forest,
    tune_leaf_fraction,
)
from .hnc_graphs import ConfidenceVector, SeedSpec, build_chnc_graph
from .paramcut import min_cut, parametric_min_cut
from .simgraph import SimilarityGraph, build_knn_graph, default_knn_params


@dataclass(frozen=True)
class LambdaGrid:
    """Ascending lambda grid given as (lo, hi, step)."""

    lo: float = -1.0
    hi: float = 1.0
    step: float = 0.002

    def __post_init__(self):
        if self.step <= 0:
            raise ConfigError("grid step must be positive")
        if self.lo >= self.hi:
            raise ConfigError("grid needs lo < hi")

    def values(self) -> np.ndarray:
        count = int(round((self.hi - self.lo) / self.step)) + 1
        return np.linspace(self.lo, self.hi, count)


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for :func:`run_pipeline`.

    ``k`` and ``sigma`` default to the size-dependent values when left
    ``None``. The forest seed is overridden by the derived stage seed.
    """

    standardize_features: bool = True
    k: int | None = None
    sigma: float | None = None
    lambda_grid: LambdaGrid = field(default_factory=LambdaGrid)
    cv_folds: int = 5
    forest: ForestConfig = field(default_factory=ForestConfig)
    seed: int = 0

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.sigma is not None and self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")


@dataclass(frozen=True, eq=False)
class ChncResult:
    """Final partition with per-sample predictions and noise detections."""

    lambda_star: float
    source_mask: np.ndarray
    prediction_ids: np.ndarray
    predictions: np.ndarray
    detected_noisy: np.ndarray
    cv_table: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        out = {
            "lambda_star": self.lambda_star,
            "predictions": [
                {"id": int(i), "label": int(p)}
                for i, p in zip(self.prediction_ids, self.predictions)
            ],
            "detected_noisy": [int(i) for i in self.detected_noisy],
            "cv_table": [],
        }
        if self.cv_table is not None:
            out["cv_table"] = [
                {"lambda": float(lam), "acc": float(acc)}
                for lam, acc in self.cv_table
            ]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True, eq=False)
class PipelineResult:
    """Every stage artifact of one pipeline run."""

    dataset: Dataset
    leaf_fraction: float
    importances: ImportanceVector
    graph: SimilarityGraph
    confidence: ConfidenceReport
    chnc: ChncResult
    k: int
    sigma: float


@contextmanager
def _stage(name: str):
    try:
        yield
    except ChncError as err:
        raise type(err)(f"[{name}] {err}") from err


def _fold_accuracies(q_index, given, num_grid):
    """Per-grid-point validation accuracy from held-out crossing indices.

    A held-out node predicts positive at grid position k iff k > q_i,
    so a +1 label is correct on (q_i, q] and a -1 label on [1, q_i].
    """
    correct = np.zeros(num_grid + 2)
    for q_i, label in zip(q_index, given):
        if label > 0:
            correct[q_i + 1] += 1
            correct[num_grid + 1] -= 1
        else:
            correct[1] += 1
            correct[q_i + 1] -= 1
    return np.cumsum(correct)[1:num_grid + 1] / len(given)


def select_lambda(
    ds: Dataset,
    graph: SimilarityGraph,
    gamma: ConfidenceVector,
    lambdas: Sequence[float],
    folds: int = 5,
    seed: int = 0,
) -> tuple[float, np.ndarray]:
    """Cross-validate the tradeoff parameter over a lambda grid.

    Returns ``(lambda_star, cv_table)`` where the table holds the mean
    validation accuracy per grid value. Ties break toward the smallest
    absolute lambda, then the smallest lambda.
    """
    lams = np.asarray(lambdas, dtype=np.float64)
    if folds < 2:
        raise ConfigError("folds must be >= 2")
    labeled = ds.labeled_ids
    y = ds.given_label[labeled]
    if np.bincount((y + 1) // 2, minlength=2).min() < folds:
        raise ConfigError("a labeled class has fewer samples than folds")
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    acc = np.zeros((folds, len(lams)))
    for f, (train_idx, val_idx) in enumerate(skf.split(labeled.reshape(-1, 1), y)):
        train_ids = labeled[train_idx]
        val_ids = labeled[val_idx]
        train_y = ds.given_label[train_ids]
        if len(np.unique(train_y)) < 2:
            raise ConfigError(f"training fold {f} lost a labeled class")
        seeds = SeedSpec(train_ids[train_y > 0], train_ids[train_y < 0])
        cuts = parametric_min_cut(build_chnc_graph(graph, seeds, gamma), lams)
        acc[f] = _fold_accuracies(cuts.q_index[val_ids],
                                  ds.given_label[val_ids], len(lams))
    mean_acc = acc.mean(axis=0)
    best = mean_acc.max()
    candidates = np.flatnonzero(mean_acc == best)
    pick = candidates[np.lexsort((lams[candidates], np.abs(lams[candidates])))[0]]
    return float(lams[pick]), np.column_stack([lams, mean_acc])


def fit_predict(
    ds: Dataset,
    graph: SimilarityGraph,
    gamma: ConfidenceVector,
    lambda_star: float,
    cv_table: np.ndarray | None = None,
) -> ChncResult:
    """Solve the confidence-weighted cut at ``lambda_star``.

    Unlabeled samples on the source side are predicted positive; labeled
    samples landing opposite their given label are flagged noisy.
    """
    ds.require_both_classes()
    seeds = SeedSpec(ds.pos_ids, ds.neg_ids)
    res = min_cut(build_chnc_graph(graph, seeds, gamma), lambda_star)
    mask = res.source_mask
    unlabeled = ds.unlabeled_ids
    predictions = np.where(mask[unlabeled], 1, -1).astype(np.int8)
    detected = np.sort(np.concatenate([
        ds.pos_ids[~mask[ds.pos_ids]],
        ds.neg_ids[mask[ds.neg_ids]],
    ]))
    return ChncResult(float(lambda_star), mask, unlabeled, predictions,
                      detected, cv_table)


def _stage_seeds(master: int, count: int) -> list[int]:
    children = np.random.SeedSequence(master).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


def run_pipeline(ds: Dataset, config: PipelineConfig) -> PipelineResult:
    """Run the full method on an already split (and possibly noisy) dataset."""
    with _stage("validate"):
        ds.require_both_classes()
    tune_seed, fit_seed, cv_seed = _stage_seeds(config.seed, 3)

    with _stage("standardize"):
        data = standardize(ds) if config.standardize_features else ds

    with _stage("forest"):
        forest_cfg = replace(config.forest, seed=tune_seed)
        leaf_fraction = tune_leaf_fraction(data, forest_cfg)
        model = fit_forest(
            data, replace(forest_cfg, min_samples_leaf_fraction=leaf_fraction,
                          seed=fit_seed))
        rho = feature_importances(model)

    with _stage("graph"):
        default_k, default_sigma = default_knn_params(data.n)
        k = config.k if config.k is not None else default_k
        sigma = config.sigma if config.sigma is not None else default_sigma
        graph = build_knn_graph(data, rho, k, sigma)

    lams = config.lambda_grid.values()
    with _stage("confidence"):
        seeds = SeedSpec(data.pos_ids, data.neg_ids)
        report = confidence_weights(graph, seeds, lams)
        gamma = report.gamma_vector()

    with _stage("select-lambda"):
        lambda_star, cv_table = select_lambda(data, graph, gamma, lams,
                                              config.cv_folds, cv_seed)

    with _stage("fit-predict"):
        chnc = fit_predict(data, graph, gamma, lambda_star, cv_table)

    return PipelineResult(data, leaf_fraction, rho, graph, report, chnc, k,
                          sigma)
