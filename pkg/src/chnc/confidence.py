"""Confidence weights for labeled samples from nested parametric cuts.

Each class gets one parametric run on its one-sided graph. As the
tradeoff parameter sweeps an ascending grid, the source set grows in a
nested sequence; the grid position at which a labeled node switches
sides (its crossing index) orders the class by label reliability.
Positive seeds that leave the sink side early are trusted; negative
seeds that hold out in the sink side long are trusted. The raw weight
of a seed is the fraction of its own side's candidate pool (own class
plus unlabeled) still on the wrong side when it crosses, so it lies in
[0, 1], and it is finally multiplied by the mean similarity weight
``theta`` so the penalties live on the scale of the other arc
capacities.

The grid endpoints are assumed extreme enough that the sweep starts and
ends at the trivial partitions; if not, a warning is emitted and the
boundary conventions below apply (crossing index 0 means the node was
already on the source side at the first grid point).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .hnc_graphs import ConfidenceVector, SeedSpec, build_neg_conf_graph, build_pos_conf_graph
from .paramcut import parametric_min_cut
from .simgraph import SimilarityGraph


@dataclass(frozen=True, eq=False)
class ClassConfidences:
    """Unscaled confidence weights for the seeds of one class."""

    node_ids: np.ndarray
    q_index: np.ndarray
    unscaled: np.ndarray

    def __post_init__(self):
        if np.any(self.unscaled < 0) or np.any(self.unscaled > 1):
            raise ConfigError("unscaled confidence weights must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class ConfidenceReport:
    """Merged per-labeled-node confidence weights.

    ``scaled`` is exactly ``theta * unscaled``; ``label`` records which
    class each row belongs to. Rows are sorted by node id.
    """

    node_ids: np.ndarray
    label: np.ndarray
    q_index: np.ndarray
    unscaled: np.ndarray
    scaled: np.ndarray
    theta: float

    def gamma_vector(self) -> ConfidenceVector:
        return ConfidenceVector(self.node_ids, self.scaled)

    def to_csv_text(self) -> str:
        lines = ["sample_id,class,q_index,unscaled,scaled"]
        for i, lab, q, u, s in zip(self.node_ids, self.label, self.q_index,
                                   self.unscaled, self.scaled):
            lines.append(f"{i},{lab:+d},{q},{u:.17g},{s:.17g}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv_text())


def _check_grid(lambdas) -> np.ndarray:
    lams = np.asarray(lambdas, dtype=np.float64)
    if len(lams) < 2:
        raise ConfigError("confidence grid needs at least two values")
    return lams


def positive_confidences(graph: SimilarityGraph, seeds: SeedSpec,
                         lambdas: Sequence[float]) -> ClassConfidences:
    """Confidence weights of the positive seeds.

    The positive seeds are treated as unlabeled alongside the true
    unlabeled set; only negative seeds stay pinned. A seed crossing at
    grid position ``q_i`` scores the fraction of the positive-candidate
    pool still on the sink side at ``q_i``; crossing immediately (index
    0) scores 1.
    """
    lams = _check_grid(lambdas)
    cuts = parametric_min_cut(build_pos_conf_graph(graph, seeds.neg_seeds), lams)
    pool = graph.num_nodes - len(seeds.neg_seeds)
    if cuts.set_sizes[0] != 0:
        warnings.warn("grid start is not extreme enough: the sweep does not "
                      "begin at the empty source set", stacklevel=2)
    if cuts.set_sizes[-1] != pool:
        warnings.warn("grid end is not extreme enough: some candidates never "
                      "enter the source set", stacklevel=2)
    q = cuts.q_index[seeds.pos_seeds]
    # the one-sided graph keeps negative seeds on the sink side, so the
    # source set is a subset of the pool and |sink side ∩ pool| is
    # pool - |S|
    sizes = cuts.set_sizes
    unscaled = np.where(q == 0, 1.0,
                        (pool - sizes[np.maximum(q, 1) - 1]) / pool)
    return ClassConfidences(seeds.pos_seeds.copy(), q, unscaled)


def negative_confidences(graph: SimilarityGraph, seeds: SeedSpec,
                         lambdas: Sequence[float]) -> ClassConfidences:
    """Confidence weights of the negative seeds (mirror run).

    Here positive seeds stay pinned to the source while negative seeds
    float. A late-crossing negative seed is trusted: it scores the
    fraction of the negative-candidate pool already on the source side
    at its crossing position. Crossing index 0 cannot occur when the
    grid start is extreme (the sweep starts from the positive seeds
    alone) and scores 0 by convention if it does.
    """
    lams = _check_grid(lambdas)
    cuts = parametric_min_cut(build_neg_conf_graph(graph, seeds.pos_seeds), lams)
    n_pos = len(seeds.pos_seeds)
    pool = graph.num_nodes - n_pos
    if cuts.set_sizes[0] != n_pos:
        warnings.warn("grid start is not extreme enough: the sweep does not "
                      "begin at the positive seeds alone", stacklevel=2)
    if cuts.set_sizes[-1] != graph.num_nodes:
        warnings.warn("grid end is not extreme enough: the sweep does not "
                      "end at the full node set", stacklevel=2)
    q = cuts.q_index[seeds.neg_seeds]
    # positive seeds sit in every source set, so |S ∩ pool| = |S| - n_pos
    sizes = cuts.set_sizes
    unscaled = np.where(q == 0, 0.0,
                        (sizes[np.maximum(q, 1) - 1] - n_pos) / pool)
    return ClassConfidences(seeds.neg_seeds.copy(), q, unscaled)


def scale_confidences(pos_part: ClassConfidences, neg_part: ClassConfidences,
                      graph: SimilarityGraph) -> ConfidenceReport:
    """Merge both class runs and scale by the mean similarity weight."""
    theta = graph.mean_weight
    ids = np.concatenate([pos_part.node_ids, neg_part.node_ids])
    label = np.concatenate([
        np.ones(len(pos_part.node_ids), dtype=np.int8),
        -np.ones(len(neg_part.node_ids), dtype=np.int8),
    ])
    q = np.concatenate([pos_part.q_index, neg_part.q_index])
    unscaled = np.concatenate([pos_part.unscaled, neg_part.unscaled])
    order = np.argsort(ids)
    ids, label, q, unscaled = ids[order], label[order], q[order], unscaled[order]
    return ConfidenceReport(ids, label, q, unscaled, theta * unscaled, theta)


def confidence_weights(graph: SimilarityGraph, seeds: SeedSpec,
                       lambdas: Sequence[float]) -> ConfidenceReport:
    """Run both one-sided sweeps and return the merged scaled report."""
    pos = positive_confidences(graph, seeds, lambdas)
    neg = negative_confidences(graph, seeds, lambdas)
    return scale_confidences(pos, neg, graph)
