"""Confidence-weight contract tests, including the planted-cluster oracle."""

import numpy as np
import pytest

from chnc.confidence import (
    confidence_weights,
    negative_confidences,
    positive_confidences,
    scale_confidences,
)
from chnc.errors import ConfigError
from chnc.hnc_graphs import SeedSpec
from chnc.simgraph import SimilarityGraph

from conftest import random_seed_split, random_similarity_graph

GRID = np.linspace(-1.0, 1.0, 101)


def planted_two_clusters(rng, size=8):
    """Two dense clusters with one flipped seed per class.

    Returns (graph, seeds, flipped_pos_id, flipped_neg_id): the flipped
    positive seed physically sits in the negative cluster and vice
    versa.
    """
    n = 2 * size
    a_ids = np.arange(size)
    b_ids = np.arange(size, n)
    ei, ej, w = [], [], []
    for ids in (a_ids, b_ids):
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                ei.append(ids[x])
                ej.append(ids[y])
                w.append(float(rng.uniform(0.9, 1.0)))
    for _ in range(size // 2):
        ei.append(int(rng.choice(a_ids)))
        ej.append(int(rng.choice(b_ids)))
        w.append(float(rng.uniform(0.01, 0.05)))
    keys = {}
    for i, j, ww in zip(ei, ej, w):
        keys[(min(i, j), max(i, j))] = ww
    graph = SimilarityGraph.from_edges(
        n,
        np.array([k[0] for k in keys]),
        np.array([k[1] for k in keys]),
        np.array(list(keys.values())),
    )
    flip_pos = int(b_ids[0])  # labeled positive, lives in cluster B
    flip_neg = int(a_ids[0])  # labeled negative, lives in cluster A
    pos = np.sort(np.concatenate([a_ids[1:], [flip_pos]]))
    neg = np.sort(np.concatenate([b_ids[1:], [flip_neg]]))
    return graph, SeedSpec(pos, neg), flip_pos, flip_neg


class TestRangeAndMonotonicity:
    def test_unscaled_in_unit_interval(self, rng):
        for _ in range(10):
            n = int(rng.integers(6, 14))
            graph = random_similarity_graph(rng, n)
            pos, neg, _ = random_seed_split(rng, n)
            seeds = SeedSpec(pos, neg)
            report = confidence_weights(graph, seeds, GRID)
            assert np.all(report.unscaled >= 0)
            assert np.all(report.unscaled <= 1)
            assert np.allclose(report.scaled, report.theta * report.unscaled)

    def test_within_class_strictly_ordered_by_crossing(self, rng):
        for _ in range(10):
            n = int(rng.integers(8, 14))
            graph = random_similarity_graph(rng, n)
            pos, neg, _ = random_seed_split(rng, n, n_pos=3, n_neg=3)
            seeds = SeedSpec(pos, neg)
            p = positive_confidences(graph, seeds, GRID)
            for i in range(len(p.node_ids)):
                for j in range(len(p.node_ids)):
                    if p.q_index[i] < p.q_index[j]:
                        assert p.unscaled[i] > p.unscaled[j]
            m = negative_confidences(graph, seeds, GRID)
            for i in range(len(m.node_ids)):
                for j in range(len(m.node_ids)):
                    if m.q_index[i] < m.q_index[j]:
                        assert m.unscaled[i] < m.unscaled[j]

    def test_refined_grid_never_contradicts_coarse_order(self, rng):
        coarse = np.linspace(-1.0, 1.0, 21)
        fine = np.linspace(-1.0, 1.0, 161)
        for _ in range(8):
            n = int(rng.integers(8, 13))
            graph = random_similarity_graph(rng, n)
            pos, neg, _ = random_seed_split(rng, n, n_pos=3, n_neg=3)
            seeds = SeedSpec(pos, neg)
            for fn in (positive_confidences, negative_confidences):
                a = fn(graph, seeds, coarse)
                b = fn(graph, seeds, fine)
                for i in range(len(a.node_ids)):
                    for j in range(len(a.node_ids)):
                        if a.unscaled[i] > a.unscaled[j]:
                            assert b.unscaled[i] >= b.unscaled[j]


class TestPlantedClusters:
    def test_flipped_seeds_get_minimum_confidence(self, rng):
        for _ in range(3):
            graph, seeds, flip_pos, flip_neg = planted_two_clusters(rng)
            report = confidence_weights(graph, seeds, GRID)
            by_id = dict(zip(report.node_ids.tolist(), report.unscaled))
            pos_rest = [by_id[i] for i in seeds.pos_seeds if i != flip_pos]
            neg_rest = [by_id[i] for i in seeds.neg_seeds if i != flip_neg]
            assert by_id[flip_pos] < min(pos_rest)
            assert by_id[flip_neg] < min(neg_rest)


class TestConventionsAndScaling:
    def test_positive_crossing_at_start_scores_one(self, rng):
        # with a grid starting above the entry point, early nodes sit in
        # the source set at the first grid value and take the q=0 rule
        graph = random_similarity_graph(rng, 8)
        pos, neg, _ = random_seed_split(rng, 8, n_pos=3, n_neg=2)
        seeds = SeedSpec(pos, neg)
        with pytest.warns(UserWarning):
            part = positive_confidences(graph, seeds, np.array([0.9, 1.0]))
        assert np.all(part.unscaled[part.q_index == 0] == 1.0)

    def test_warns_when_grid_end_not_extreme(self, rng):
        graph = random_similarity_graph(rng, 8)
        pos, neg, _ = random_seed_split(rng, 8, n_pos=3, n_neg=2)
        seeds = SeedSpec(pos, neg)
        with pytest.warns(UserWarning):
            positive_confidences(graph, seeds, np.array([-1.0, -0.9]))

    def test_theta_is_mean_edge_weight(self):
        graph = SimilarityGraph.from_edges(4, [0, 2], [1, 3], [0.2, 0.8])
        seeds = SeedSpec([0], [3])
        report = confidence_weights(graph, seeds, GRID)
        assert report.theta == pytest.approx(0.5)

    def test_constant_weights_halve_scaled(self):
        graph = SimilarityGraph.from_edges(4, [0, 1, 2], [1, 2, 3],
                                           [0.5, 0.5, 0.5])
        seeds = SeedSpec([0], [3])
        report = confidence_weights(graph, seeds, GRID)
        assert report.theta == pytest.approx(0.5)
        assert np.allclose(report.scaled, 0.5 * report.unscaled)

    def test_zero_unscaled_stays_zero(self, rng):
        graph, seeds, _, _ = planted_two_clusters(rng, size=5)
        pos = positive_confidences(graph, seeds, GRID)
        neg = negative_confidences(graph, seeds, GRID)
        merged = scale_confidences(pos, neg, graph)
        zero = merged.unscaled == 0
        assert np.all(merged.scaled[zero] == 0)

    def test_no_edges_rejected(self):
        graph = SimilarityGraph(2, np.array([], dtype=np.int64),
                                np.array([], dtype=np.int64), np.array([]),
                                np.zeros(2))
        seeds = SeedSpec([0], [1])
        with pytest.raises(ConfigError):
            confidence_weights(graph, seeds, GRID)

    def test_csv_round_shape(self, rng):
        graph = random_similarity_graph(rng, 8)
        pos, neg, _ = random_seed_split(rng, 8)
        report = confidence_weights(graph, SeedSpec(pos, neg), GRID)
        text = report.to_csv_text()
        lines = text.strip().split("\n")
        assert lines[0] == "sample_id,class,q_index,unscaled,scaled"
        assert len(lines) == 1 + len(pos) + len(neg)
