"""Dataset ingestion, synthetic generation, splitting and noise injection.

A :class:`Dataset` stores the feature matrix together with per-sample
labeling state. ``given_label`` uses the compact encoding ``+1`` /
``-1`` for positive / negative labeled samples and ``0`` for unlabeled
ones, so the sample role is the sign of the entry. ``true_label`` (when
known) is kept strictly for evaluation; the classifier never reads it.
All randomized operations are pure functions of their inputs and seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError

POS_LABELED = 1
NEG_LABELED = -1
UNLABELED = 0

HYPERCUBE = "hypercube"
POLYTOPE = "polytope"

_LABEL_TOKENS = {"": UNLABELED, "1": POS_LABELED, "+1": POS_LABELED,
                 "-1": NEG_LABELED}

# guards floor/round against float dust in products like 0.3 * 10
_COUNT_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus per-sample labeling state.

    ``noisy_flags`` marks labeled samples whose given label was flipped
    relative to the ground truth; it is meaningful only where the
    sample is labeled.
    """

    features: np.ndarray
    given_label: np.ndarray
    true_label: np.ndarray | None = None
    noisy_flags: np.ndarray | None = None

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        given = np.ascontiguousarray(self.given_label, dtype=np.int8)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "given_label", given)
        if feats.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        n, h = feats.shape
        if n < 2 or h < 1:
            raise DataError("need at least 2 samples and 1 feature")
        if not np.all(np.isfinite(feats)):
            raise DataError("features must be finite")
        if given.shape != (n,) or not np.all(np.isin(given, (-1, 0, 1))):
            raise DataError("given_label must be per-sample in {-1, 0, +1}")
        if self.true_label is not None:
            true = np.ascontiguousarray(self.true_label, dtype=np.int8)
            object.__setattr__(self, "true_label", true)
            if true.shape != (n,) or not np.all(np.isin(true, (-1, 1))):
                raise DataError("true_label must be per-sample in {-1, +1}")
        if self.noisy_flags is not None:
            flags = np.ascontiguousarray(self.noisy_flags, dtype=bool)
            object.__setattr__(self, "noisy_flags", flags)
            if flags.shape != (n,):
                raise DataError("noisy_flags must be per-sample")
            if self.true_label is not None:
                labeled = given != UNLABELED
                expect = labeled & (given != self.true_label)
                if not np.array_equal(flags & labeled, expect):
                    raise DataError(
                        "noisy_flags disagree with given vs true labels")
        for name in ("features", "given_label", "true_label", "noisy_flags"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def labeled_mask(self) -> np.ndarray:
        return self.given_label != UNLABELED

    @property
    def labeled_ids(self) -> np.ndarray:
        return np.flatnonzero(self.given_label != UNLABELED)

    @property
    def unlabeled_ids(self) -> np.ndarray:
        return np.flatnonzero(self.given_label == UNLABELED)

    @property
    def pos_ids(self) -> np.ndarray:
        return np.flatnonzero(self.given_label == POS_LABELED)

    @property
    def neg_ids(self) -> np.ndarray:
        return np.flatnonzero(self.given_label == NEG_LABELED)

    def require_both_classes(self) -> None:
        """Classification precondition: a seed on each side."""
        if len(self.pos_ids) == 0 or len(self.neg_ids) == 0:
            raise DataError(
                "need at least one positive and one negative labeled sample")


@dataclass(frozen=True)
class SyntheticConfig:
    """Gaussian-cluster generator settings."""

    n_samples: int = 1000
    n_features: int = 5
    pos_fraction: float = 0.5
    clusters_per_class: int = 1
    class_sep: float = 1.0
    centroid_layout: str = HYPERCUBE
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 2 or self.n_features < 1:
            raise ConfigError("need n_samples >= 2 and n_features >= 1")
        if not 0.0 < self.pos_fraction < 1.0:
            raise ConfigError("pos_fraction must lie in (0, 1)")
        if self.clusters_per_class < 1:
            raise ConfigError("clusters_per_class must be >= 1")
        if self.class_sep <= 0:
            raise ConfigError("class_sep must be positive")
        if self.centroid_layout not in (HYPERCUBE, POLYTOPE):
            raise ConfigError(f"unknown centroid layout {self.centroid_layout!r}")


def load_csv(path, label_column: str) -> Dataset:
    """Read a dataset from a headered CSV file.

    The label column accepts ``+1``, ``1``, ``-1`` and the empty string
    (unlabeled). Every other column must parse as a finite real. When
    every row is labeled the given labels double as ground truth.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as err:
        raise DataError(f"cannot read {path}: {err}") from err
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: no column named {label_column!r}")
        label_idx = header.index(label_column)
        width = len(header)
        rows, labels = [], []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != width:
                raise DataError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {width}")
            token = row[label_idx].strip()
            if token not in _LABEL_TOKENS:
                raise DataError(
                    f"{path}: row {row_no} has unknown label token {token!r}")
            labels.append(_LABEL_TOKENS[token])
            try:
                values = [float(cell) for k, cell in enumerate(row) if k != label_idx]
            except ValueError:
                raise DataError(
                    f"{path}: row {row_no} has a non-numeric feature cell") from None
            if not all(math.isfinite(v) for v in values):
                raise DataError(f"{path}: row {row_no} has a non-finite feature")
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    given = np.array(labels, dtype=np.int8)
    true = given.copy() if np.all(given != UNLABELED) else None
    flags = np.zeros(len(given), dtype=bool) if true is not None else None
    return Dataset(np.array(rows), given, true, flags)


def save_csv(ds: Dataset, path) -> None:
    """Write features plus a ``label`` column in the ingestion format."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{k}" for k in range(ds.num_features)] + ["label"])
        for x, y in zip(ds.features, ds.given_label):
            label = "" if y == UNLABELED else f"{int(y):+d}"
            writer.writerow([f"{v:.17g}" for v in x] + [label])


def _per_class_counts(class_sizes: list[int], total_keep: int) -> list[int]:
    """Largest-remainder split of total_keep across classes."""
    fractions = [total_keep * size / sum(class_sizes) for size in class_sizes]
    keep = [int(math.floor(f + _COUNT_EPS)) for f in fractions]
    remainders = [f - k for f, k in zip(fractions, keep)]
    order = sorted(range(len(keep)), key=lambda c: (-remainders[c], c))
    for c in order[: total_keep - sum(keep)]:
        keep[c] += 1
    return keep


def split_labeled_unlabeled(ds: Dataset, labeled_fraction: float, seed: int) -> Dataset:
    """Stratified split of a fully labeled dataset into labeled/unlabeled.

    ``round(labeled_fraction * n)`` samples keep their labels; the rest
    become unlabeled but retain the ground truth for evaluation.
    """
    if not 0.0 < labeled_fraction < 1.0:
        raise ConfigError("labeled_fraction must lie in (0, 1)")
    if np.any(ds.given_label == UNLABELED):
        raise ConfigError("split requires every sample to be labeled")
    rng = np.random.default_rng(seed)
    total_keep = int(math.floor(labeled_fraction * ds.n + 0.5 + _COUNT_EPS))
    class_ids = [ds.pos_ids, ds.neg_ids]
    keep_counts = _per_class_counts([len(ids) for ids in class_ids], total_keep)
    keep_mask = np.zeros(ds.n, dtype=bool)
    for ids, count in zip(class_ids, keep_counts):
        if count < 1 or len(ids) - count < 1:
            raise ConfigError(
                f"labeled_fraction={labeled_fraction} leaves an empty class "
                "on one side of the split")
        keep_mask[rng.choice(ids, size=count, replace=False)] = True
    given = np.where(keep_mask, ds.given_label, UNLABELED).astype(np.int8)
    return Dataset(ds.features, given, ds.given_label.copy(),
                   np.zeros(ds.n, dtype=bool))


def inject_noise(ds: Dataset, rate: float, seed: int) -> Dataset:
    """Flip exactly floor(rate * class_count) labels in each class.

    Flipped positives become negative-labeled and vice versa; flipping
    the same indices again restores the original dataset.
    """
    if not 0.0 <= rate < 1.0:
        raise ConfigError("noise rate must lie in [0, 1)")
    if len(ds.pos_ids) == 0 or len(ds.neg_ids) == 0:
        raise ConfigError("noise injection needs labeled samples in both classes")
    rng = np.random.default_rng(seed)
    flip_mask = np.zeros(ds.n, dtype=bool)
    for ids in (ds.pos_ids, ds.neg_ids):
        n_flip = int(math.floor(rate * len(ids) + _COUNT_EPS))
        if n_flip:
            flip_mask[rng.choice(ids, size=n_flip, replace=False)] = True
    given = np.where(flip_mask, -ds.given_label, ds.given_label).astype(np.int8)
    old_flags = (ds.noisy_flags if ds.noisy_flags is not None
                 else np.zeros(ds.n, dtype=bool))
    return Dataset(ds.features, given, ds.true_label, old_flags ^ flip_mask)


def generate_synthetic(cfg: SyntheticConfig) -> Dataset:
    """Sample unit-variance Gaussian clusters around per-class centroids.

    Centroids sit on distinct vertices of either a hypercube of side
    ``2 * class_sep`` or a random simplex-like polytope (``n_features +
    1`` random directions at hypercube-corner radius). On the
    hypercube, each negative-class centroid is the antipode of a
    positive-class one, so ``class_sep`` controls the inter-class gap
    directly instead of depending on which corners a draw happens to
    hit. Within a class, samples are dealt to its centroids
    round-robin. Positive rows come first.
    """
    rng = np.random.default_rng(cfg.seed)
    h = cfg.n_features
    needed = 2 * cfg.clusters_per_class
    if cfg.centroid_layout == HYPERCUBE:
        available = 2 ** h if h < 63 else 2 ** 63
        if needed > available:
            raise ConfigError(
                f"{needed} centroids requested but the {h}-cube has only "
                f"{available} vertices")
        # positive corners come from the half-cube with first bit 0,
        # negative centroids are their bitwise complements: disjoint by
        # construction and maximally separated pairwise
        picked: set[tuple[int, ...]] = set()
        pos_corners = []
        while len(pos_corners) < cfg.clusters_per_class:
            corner = (0, *(int(b) for b in rng.integers(0, 2, size=h - 1)))
            if corner not in picked:
                picked.add(corner)
                pos_corners.append(corner)
        corners = pos_corners + [tuple(1 - b for b in c) for c in pos_corners]
        centroids = (2.0 * np.array(corners, dtype=np.float64) - 1.0) * cfg.class_sep
    else:
        available = h + 1
        if needed > available:
            raise ConfigError(
                f"{needed} centroids requested but a {h}-simplex has only "
                f"{available} vertices")
        directions = rng.normal(size=(available, h))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        vertices = directions * (cfg.class_sep * math.sqrt(h))
        centroids = vertices[rng.choice(available, size=needed, replace=False)]

    n_pos = int(math.floor(cfg.pos_fraction * cfg.n_samples + 0.5 + _COUNT_EPS))
    n_neg = cfg.n_samples - n_pos
    if n_pos < 1 or n_neg < 1:
        raise ConfigError("pos_fraction leaves a class empty")
    pos_centroids = centroids[: cfg.clusters_per_class]
    neg_centroids = centroids[cfg.clusters_per_class:]
    blocks = []
    for count, cents in ((n_pos, pos_centroids), (n_neg, neg_centroids)):
        assignment = np.arange(count) % cfg.clusters_per_class
        blocks.append(cents[assignment] + rng.normal(size=(count, h)))
    features = np.vstack(blocks)
    given = np.concatenate([
        np.full(n_pos, POS_LABELED, dtype=np.int8),
        np.full(n_neg, NEG_LABELED, dtype=np.int8),
    ])
    return Dataset(features, given, given.copy(), np.zeros(cfg.n_samples, dtype=bool))


def standardize(ds: Dataset) -> Dataset:
    """Z-score every feature column over all samples; constant columns
    map to zeros."""
    mean = ds.features.mean(axis=0)
    std = ds.features.std(axis=0)
    centered = ds.features - mean
    out = np.divide(centered, std, out=np.zeros_like(centered), where=std > 0)
    return replace(ds, features=out)
