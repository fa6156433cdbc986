"""Lambda selection, final-cut and pipeline behavior tests."""

import numpy as np
import pytest

from chnc.classify import (
    LambdaGrid,
    PipelineConfig,
    fit_predict,
    run_pipeline,
    select_lambda,
)
from chnc.data import Dataset, SyntheticConfig, generate_synthetic, inject_noise, split_labeled_unlabeled
from chnc.errors import ConfigError
from chnc.forest import ForestConfig
from chnc.hnc_graphs import ConfidenceVector, SeedSpec, build_chnc_graph, build_hnc_graph
from chnc.paramcut import min_cut
from chnc.simgraph import SimilarityGraph

from conftest import random_seed_split, random_similarity_graph


def labeled_dataset(rng, n=24, h=2):
    feats = rng.normal(size=(n, h))
    feats[: n // 2] += 4.0
    labels = np.array([1] * (n // 2) + [-1] * (n - n // 2), dtype=np.int8)
    return Dataset(feats, labels, labels.copy(), np.zeros(n, dtype=bool))


class TestLambdaGrid:
    def test_published_grid_has_1001_values(self):
        values = LambdaGrid(-1.0, 1.0, 0.002).values()
        assert len(values) == 1001
        assert values[0] == -1.0 and values[-1] == 1.0
        assert values[500] == pytest.approx(0.0, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ConfigError):
            LambdaGrid(step=0.0)
        with pytest.raises(ConfigError):
            LambdaGrid(lo=1.0, hi=-1.0)


class TestSelectLambda:
    def test_singleton_grid(self, rng):
        ds = labeled_dataset(rng)
        graph = random_similarity_graph(rng, ds.n)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        lam, table = select_lambda(ds, graph, gamma, [0.25], folds=3, seed=0)
        assert lam == 0.25
        assert table.shape == (1, 2)

    def test_tie_prefers_zero(self, rng):
        # a grid of equivalent extremes: every lambda scores the same on
        # well-separated data, so the smallest |lambda| wins
        ds = labeled_dataset(rng)
        graph = random_similarity_graph(rng, ds.n)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        lams = np.array([-0.004, -0.002, 0.0, 0.002, 0.004])
        lam, table = select_lambda(ds, graph, gamma, lams, folds=3, seed=0)
        accs = table[:, 1]
        if np.all(accs == accs[0]):
            assert lam == 0.0

    def test_matches_per_lambda_independent_solves(self, rng):
        from sklearn.model_selection import StratifiedKFold

        ds = labeled_dataset(rng, n=18)
        graph = random_similarity_graph(rng, ds.n)
        ids = ds.labeled_ids
        gamma = ConfidenceVector(ids, rng.uniform(0.1, 0.9, size=len(ids)))
        lams = np.linspace(-1, 1, 41)
        lam_star, table = select_lambda(ds, graph, gamma, lams, folds=3, seed=5)

        skf = StratifiedKFold(n_splits=3, shuffle=True, random_state=5)
        y = ds.given_label[ids]
        acc = np.zeros((3, len(lams)))
        for f, (tr, va) in enumerate(skf.split(ids.reshape(-1, 1), y)):
            train_ids, val_ids = ids[tr], ids[va]
            ty = ds.given_label[train_ids]
            seeds = SeedSpec(train_ids[ty > 0], train_ids[ty < 0])
            g = build_chnc_graph(graph, seeds, gamma)
            for k, lam in enumerate(lams):
                mask = min_cut(g, lam).source_mask
                pred = np.where(mask[val_ids], 1, -1)
                acc[f, k] = (pred == ds.given_label[val_ids]).mean()
        assert np.allclose(table[:, 1], acc.mean(axis=0))

    def test_cv_fold_determinism(self, rng):
        ds = labeled_dataset(rng)
        graph = random_similarity_graph(rng, ds.n)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        lams = np.linspace(-1, 1, 21)
        a = select_lambda(ds, graph, gamma, lams, folds=4, seed=3)
        b = select_lambda(ds, graph, gamma, lams, folds=4, seed=3)
        assert a[0] == b[0]
        assert np.array_equal(a[1], b[1])

    def test_small_class_rejected(self, rng):
        feats = rng.normal(size=(6, 2))
        ds = Dataset(feats, np.array([1, 1, -1, -1, -1, 0], dtype=np.int8))
        graph = random_similarity_graph(rng, 6)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        with pytest.raises(ConfigError):
            select_lambda(ds, graph, gamma, [0.0], folds=3, seed=0)


class TestFitPredict:
    def test_hnc_special_case_detects_nothing(self, rng):
        ds = labeled_dataset(rng)
        graph = random_similarity_graph(rng, ds.n)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        res = fit_predict(ds, graph, gamma, 0.1)
        assert len(res.detected_noisy) == 0
        hnc = min_cut(build_hnc_graph(graph, SeedSpec(ds.pos_ids, ds.neg_ids)),
                      0.1)
        assert np.array_equal(res.source_mask, hnc.source_mask)

    def test_predictions_follow_partition(self, rng):
        feats = rng.normal(size=(10, 2))
        labels = np.array([1, -1, 0, 0, 0, 0, 0, 0, 0, 0], dtype=np.int8)
        ds = Dataset(feats, labels)
        graph = random_similarity_graph(rng, 10)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        res = fit_predict(ds, graph, gamma, 0.0)
        assert np.array_equal(res.predictions == 1,
                              res.source_mask[res.prediction_ids])

    def test_mislabeled_cheap_seed_flagged(self):
        # two far clusters: {0,1} positive-ish, {2,3} negative-ish; node 1
        # is labeled negative with a small penalty and must flip
        graph = SimilarityGraph.from_edges(
            4, [0, 2, 1], [1, 3, 2], [1.0, 1.0, 0.01])
        labels = np.array([1, -1, 0, -1], dtype=np.int8)
        ds = Dataset(np.zeros((4, 1)), labels)
        gamma = ConfidenceVector([0, 1, 3], [np.inf, 0.05, np.inf])
        res = fit_predict(ds, graph, gamma, 0.0)
        assert list(res.detected_noisy) == [1]
        assert res.source_mask[1]

    def test_unsaturable_single_node_never_flagged(self, rng):
        # raising one seed's penalty to unsaturable keeps it home
        graph = SimilarityGraph.from_edges(
            4, [0, 2, 1], [1, 3, 2], [1.0, 1.0, 0.01])
        labels = np.array([1, -1, 0, -1], dtype=np.int8)
        ds = Dataset(np.zeros((4, 1)), labels)
        gamma = ConfidenceVector([0, 1, 3], [np.inf, np.inf, np.inf])
        res = fit_predict(ds, graph, gamma, 0.0)
        assert 1 not in res.detected_noisy
        assert not res.source_mask[1]

    def test_json_schema(self, rng):
        import json

        ds = labeled_dataset(rng)
        graph = random_similarity_graph(rng, ds.n)
        gamma = ConfidenceVector.unsaturable(ds.labeled_ids)
        res = fit_predict(ds, graph, gamma, 0.0,
                          cv_table=np.array([[0.0, 1.0]]))
        payload = json.loads(res.to_json())
        assert set(payload) == {"lambda_star", "predictions", "detected_noisy",
                                "cv_table"}
        assert payload["cv_table"] == [{"lambda": 0.0, "acc": 1.0}]


class TestHncReduction:
    def test_partition_identical_across_grid(self, rng):
        from chnc.paramcut import parametric_min_cut

        for _ in range(10):
            n = int(rng.integers(6, 12))
            graph = random_similarity_graph(rng, n)
            pos, neg, _ = random_seed_split(rng, n)
            seeds = SeedSpec(pos, neg)
            gamma = ConfidenceVector.unsaturable(np.concatenate([pos, neg]))
            lams = np.linspace(-1, 1, 21)
            chnc = parametric_min_cut(build_chnc_graph(graph, seeds, gamma), lams)
            hnc = parametric_min_cut(build_hnc_graph(graph, seeds), lams)
            assert np.array_equal(chnc.q_index, hnc.q_index)


class TestRunPipeline:
    def small_noisy_dataset(self, seed=0):
        cfg = SyntheticConfig(n_samples=120, n_features=3, class_sep=3.0,
                              seed=seed)
        ds = split_labeled_unlabeled(generate_synthetic(cfg), 0.8, seed=seed + 1)
        return inject_noise(ds, 0.2, seed=seed + 2)

    def pipeline_config(self):
        return PipelineConfig(
            k=5,
            lambda_grid=LambdaGrid(-1.0, 1.0, 0.02),
            cv_folds=3,
            forest=ForestConfig(n_trees=20, candidate_fractions=(0.01, 0.05),
                                cv_folds=3),
            seed=7,
        )

    def test_separable_blobs_classified_perfectly(self):
        cfg = SyntheticConfig(n_samples=100, n_features=2, class_sep=60.0,
                              seed=3)
        ds = split_labeled_unlabeled(generate_synthetic(cfg), 0.8, seed=4)
        result = run_pipeline(ds, self.pipeline_config())
        truth = ds.true_label[result.chnc.prediction_ids]
        assert np.array_equal(result.chnc.predictions, truth)

    def test_deterministic(self):
        ds = self.small_noisy_dataset()
        a = run_pipeline(ds, self.pipeline_config())
        b = run_pipeline(ds, self.pipeline_config())
        assert a.chnc.lambda_star == b.chnc.lambda_star
        assert np.array_equal(a.chnc.predictions, b.chnc.predictions)
        assert np.array_equal(a.confidence.scaled, b.confidence.scaled)
        assert np.array_equal(a.importances.rho, b.importances.rho)

    def test_stage_artifacts_retained(self):
        ds = self.small_noisy_dataset(seed=5)
        result = run_pipeline(ds, self.pipeline_config())
        assert result.k == 5
        assert result.sigma == 0.75  # small-data default
        assert result.leaf_fraction in (0.01, 0.05)
        assert result.graph.num_nodes == ds.n
        assert len(result.confidence.node_ids) == len(ds.labeled_ids)
        assert result.importances.rho.shape == (3,)

    def test_default_k_sigma_by_size(self):
        ds = self.small_noisy_dataset(seed=6)
        cfg = PipelineConfig(lambda_grid=LambdaGrid(-1, 1, 0.1), cv_folds=2,
                             forest=ForestConfig(n_trees=5,
                                                 candidate_fractions=(0.05,),
                                                 cv_folds=2), seed=1)
        result = run_pipeline(ds, cfg)
        assert (result.k, result.sigma) == (15, 0.75)

    def test_single_class_rejected(self, rng):
        feats = rng.normal(size=(10, 2))
        labels = np.array([1] * 5 + [0] * 5, dtype=np.int8)
        ds = Dataset(feats, labels)
        with pytest.raises(Exception, match="validate"):
            run_pipeline(ds, self.pipeline_config())

    def test_stage_tag_on_failure(self):
        ds = self.small_noisy_dataset(seed=8)
        bad = PipelineConfig(k=500, lambda_grid=LambdaGrid(-1, 1, 0.1),
                             cv_folds=2,
                             forest=ForestConfig(n_trees=5,
                                                 candidate_fractions=(0.05,),
                                                 cv_folds=2))
        with pytest.raises(ConfigError, match=r"\[graph\]"):
            run_pipeline(ds, bad)
