"""Transductive binary classification with noisy labels via confidence-
weighted minimum cuts (Confidence HNC)."""

from .errors import ChncError, ConfigError, DataError

__version__ = "0.1.0"

from .classify import (  # noqa: E402
    ChncResult,
    LambdaGrid,
    PipelineConfig,
    PipelineResult,
    fit_predict,
    run_pipeline,
    select_lambda,
)
from .confidence import ConfidenceReport, confidence_weights  # noqa: E402
from .data import (  # noqa: E402
    Dataset,
    SyntheticConfig,
    generate_synthetic,
    inject_noise,
    load_csv,
    save_csv,
    split_labeled_unlabeled,
    standardize,
)
from .forest import ForestConfig, ImportanceVector  # noqa: E402
from .hnc_graphs import ConfidenceVector, SeedSpec  # noqa: E402
from .simgraph import (  # noqa: E402
    SimilarityGraph,
    build_knn_graph,
    default_knn_params,
    gaussian_weight,
    weighted_distance,
)
