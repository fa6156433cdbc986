"""Classification and noise-detection metrics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, DataError


def accuracy(pred, truth) -> float:
    """Fraction of matching entries."""
    p = np.asarray(pred)
    t = np.asarray(truth)
    if p.shape != t.shape or p.ndim != 1 or len(p) == 0:
        raise ConfigError("predictions and truth must be aligned nonempty vectors")
    return float((p == t).mean())


def balanced_accuracy(pred, truth) -> float:
    """Mean of the true-positive and true-negative rates."""
    p = np.asarray(pred)
    t = np.asarray(truth)
    if p.shape != t.shape or p.ndim != 1 or len(p) == 0:
        raise ConfigError("predictions and truth must be aligned nonempty vectors")
    pos = t > 0
    neg = t < 0
    if not pos.any() or not neg.any():
        raise DataError("balanced accuracy undefined for single-class truth")
    tpr = float((p[pos] == t[pos]).mean())
    tnr = float((p[neg] == t[neg]).mean())
    return (tpr + tnr) / 2.0


def noise_prf(detected, actual) -> tuple[float, float, float]:
    """(recall, precision, f1) of a detected-noisy set against the truth.

    An empty detection scores (0, 0, 0); f1 is 0 whenever precision and
    recall are both 0.
    """
    d = set(int(i) for i in detected)
    n = set(int(i) for i in actual)
    if not n:
        raise DataError("noise recall undefined without true noisy samples")
    hit = len(d & n)
    recall = hit / len(n)
    precision = hit / len(d) if d else 0.0
    f1 = 0.0 if precision + recall == 0 else (
        2 * precision * recall / (precision + recall))
    return recall, precision, f1


def avg_gap_from_max(acc_by_method_by_dataset: dict) -> dict[str, float]:
    """Per-method mean percent gap from the best score on each dataset.

    Input maps dataset -> method -> score; every dataset must cover
    every method. The best method on a dataset has gap 0; everyone else
    is negative.
    """
    datasets = list(acc_by_method_by_dataset)
    if not datasets:
        raise ConfigError("no datasets given")
    methods = sorted(acc_by_method_by_dataset[datasets[0]])
    gaps = {m: [] for m in methods}
    for name in datasets:
        row = acc_by_method_by_dataset[name]
        if sorted(row) != methods:
            raise ConfigError(f"dataset {name!r} is missing some method scores")
        best = max(row.values())
        for m in methods:
            gaps[m].append((row[m] - best) / best * 100.0)
    return {m: float(np.mean(v)) for m, v in gaps.items()}


def accuracy_improvement(acc_a: float, acc_b: float) -> float:
    """Percent improvement of score a over score b, sign preserving."""
    if acc_b <= 0:
        raise ConfigError("reference accuracy must be positive")
    return (acc_a / acc_b - 1.0) * 100.0


@dataclass(frozen=True)
class MetricsReport:
    """One run's scores; cross-method fields stay None until compared."""

    accuracy: float | None = None
    balanced_accuracy: float | None = None
    noise_recall: float | None = None
    noise_precision: float | None = None
    noise_f1: float | None = None
    acc_improvement_pct: float | None = None
    avg_gap_from_max_pct: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls(**json.loads(text))

    def as_text_table(self) -> str:
        rows = [(k, v) for k, v in asdict(self).items() if v is not None]
        width = max((len(k) for k, _ in rows), default=1)
        return "\n".join(f"{k:<{width}}  {v:.4f}" for k, v in rows) + "\n"
