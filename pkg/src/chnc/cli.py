"""Command-line surface: dataset generation, pipeline runs, comparison.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant failure. Every ``run`` output directory contains a manifest
echoing the resolved configuration and master seed; replaying a
manifest reproduces every output file byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .classify import LambdaGrid, PipelineConfig, run_pipeline
from .data import (
    HYPERCUBE,
    POLYTOPE,
    SyntheticConfig,
    UNLABELED,
    generate_synthetic,
    inject_noise,
    load_csv,
    save_csv,
    split_labeled_unlabeled,
)
from .errors import ChncError, ConfigError, DataError
from .forest import DEFAULT_CANDIDATE_FRACTIONS, ForestConfig
from .metrics import (
    MetricsReport,
    accuracy,
    accuracy_improvement,
    avg_gap_from_max,
    balanced_accuracy,
    noise_prf,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one ``run`` invocation."""

    input: str | None
    label_column: str
    synthetic: SyntheticConfig | None
    labeled_fraction: float
    noise_rate: float
    k: int | None
    sigma: float | None
    lambda_lo: float
    lambda_hi: float
    lambda_step: float
    cv_folds: int
    forest_trees: int
    forest_leaf_fractions: tuple[float, ...]
    forest_cv_folds: int
    standardize: bool
    seed: int
    output_dir: str

    def pipeline_config(self) -> PipelineConfig:
        return PipelineConfig(
            standardize_features=self.standardize,
            k=self.k,
            sigma=self.sigma,
            lambda_grid=LambdaGrid(self.lambda_lo, self.lambda_hi,
                                   self.lambda_step),
            cv_folds=self.cv_folds,
            forest=ForestConfig(
                n_trees=self.forest_trees,
                candidate_fractions=self.forest_leaf_fractions,
                cv_folds=self.forest_cv_folds,
            ),
        )


def _parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"lambda grid must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"lambda grid must be numeric, got {text!r}") from None
    return lo, hi, step


def _parse_fractions(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"leaf fractions must be numeric, got {text!r}") from None


def _add_synthetic_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-samples", type=int, default=1000)
    parser.add_argument("--n-features", type=int, default=5)
    parser.add_argument("--pos-fraction", type=float, default=0.5)
    parser.add_argument("--clusters-per-class", type=int, default=1)
    parser.add_argument("--class-sep", type=float, default=1.0)
    parser.add_argument("--layout", choices=[HYPERCUBE, POLYTOPE],
                        default=HYPERCUBE)


def _synthetic_config(args) -> SyntheticConfig:
    return SyntheticConfig(
        n_samples=args.n_samples,
        n_features=args.n_features,
        pos_fraction=args.pos_fraction,
        clusters_per_class=args.clusters_per_class,
        class_sep=args.class_sep,
        centroid_layout=args.layout,
        seed=args.seed,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chnc",
        description="Noise-tolerant transductive classification via "
                    "confidence-weighted minimum cuts.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    _add_synthetic_flags(gen)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", required=True, help="dataset CSV path")
    gen.add_argument("--force", action="store_true",
                     help="overwrite existing output files")

    run = sub.add_parser("run", help="run the full pipeline")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="dataset CSV path")
    src.add_argument("--synthetic", action="store_true",
                     help="generate the dataset in-process instead")
    run.add_argument("--label-column", default="label")
    _add_synthetic_flags(run)
    run.add_argument("--labeled-fraction", type=float, default=0.8)
    run.add_argument("--noise-rate", type=float, default=0.0)
    run.add_argument("--k", type=int, default=None)
    run.add_argument("--sigma", type=float, default=None)
    run.add_argument("--lambda-grid", default="-1:1:0.002",
                     help="lo:hi:step; pass as --lambda-grid=-1:1:0.002 when "
                          "lo is negative")
    run.add_argument("--cv-folds", type=int, default=5)
    run.add_argument("--trees", type=int, default=100)
    run.add_argument("--leaf-fractions",
                     default=",".join(str(f) for f in DEFAULT_CANDIDATE_FRACTIONS))
    run.add_argument("--forest-cv-folds", type=int, default=5)
    run.add_argument("--no-standardize", action="store_true")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--output-dir", required=True)

    comp = sub.add_parser("compare", help="tabulate metrics across run dirs")
    comp.add_argument("dirs", nargs="+")
    return parser


def cmd_gen(args) -> int:
    cfg = _synthetic_config(args)
    out = Path(args.output)
    truth = out.with_suffix(".truth.csv")
    for path in (out, truth):
        if path.exists() and not args.force:
            raise ConfigError(f"{path} exists; pass --force to overwrite")
    ds = generate_synthetic(cfg)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(ds, out)
    with open(truth, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "true_label"])
        for i, label in enumerate(ds.true_label):
            writer.writerow([i, f"{int(label):+d}"])
    print(f"wrote {out} ({ds.n} samples, {ds.num_features} features) and {truth}")
    return EXIT_OK


def _run_config(args) -> RunConfig:
    lo, hi, step = _parse_grid(args.lambda_grid)
    return RunConfig(
        input=args.input,
        label_column=args.label_column,
        synthetic=_synthetic_config(args) if args.synthetic else None,
        labeled_fraction=args.labeled_fraction,
        noise_rate=args.noise_rate,
        k=args.k,
        sigma=args.sigma,
        lambda_lo=lo,
        lambda_hi=hi,
        lambda_step=step,
        cv_folds=args.cv_folds,
        forest_trees=args.trees,
        forest_leaf_fractions=_parse_fractions(args.leaf_fractions),
        forest_cv_folds=args.forest_cv_folds,
        standardize=not args.no_standardize,
        seed=args.seed,
        output_dir=args.output_dir,
    )


def _manifest_dict(cfg: RunConfig, seeds: dict[str, int], ds) -> dict:
    out = asdict(cfg)
    del out["output_dir"]  # reflexive; keeps manifests replay-identical
    out["stage_seeds"] = seeds
    out["n_samples"] = ds.n
    out["n_features"] = ds.num_features
    out["version"] = __version__
    return out


def _dump_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args) -> int:
    cfg = _run_config(args)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    master = np.random.SeedSequence(cfg.seed).spawn(3)
    seed_split, seed_noise, seed_pipeline = (
        int(s.generate_state(1)[0]) for s in master)

    if cfg.synthetic is not None:
        ds = generate_synthetic(cfg.synthetic)
        source = "synthetic"
    else:
        ds = load_csv(cfg.input, cfg.label_column)
        source = cfg.input

    did_split = False
    if not np.any(ds.given_label == UNLABELED):
        ds = split_labeled_unlabeled(ds, cfg.labeled_fraction, seed_split)
        did_split = True
    if cfg.noise_rate > 0:
        ds = inject_noise(ds, cfg.noise_rate, seed_noise)

    pipeline_cfg = replace(cfg.pipeline_config(), seed=seed_pipeline)
    result = run_pipeline(ds, pipeline_cfg)

    manifest = _manifest_dict(
        cfg,
        {"split": seed_split, "noise": seed_noise, "pipeline": seed_pipeline},
        ds)
    manifest["source"] = source
    manifest["split_applied"] = did_split
    manifest["resolved_k"] = result.k
    manifest["resolved_sigma"] = result.sigma
    manifest["leaf_fraction"] = result.leaf_fraction
    _dump_json(out_dir / "manifest.json", manifest)

    _dump_json(out_dir / "predictions.json", result.chnc.to_json_dict())
    result.confidence.write_csv(out_dir / "confidence.csv")
    with open(out_dir / "importances.json", "w", encoding="utf-8") as fh:
        fh.write(result.importances.to_json())
        fh.write("\n")

    report = _compute_metrics(ds, result)
    with open(out_dir / "metrics.json", "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")

    print(f"lambda_star = {result.chnc.lambda_star:g}")
    print(f"detected_noisy = {len(result.chnc.detected_noisy)}")
    sys.stdout.write(report.as_text_table())
    return EXIT_OK


def _compute_metrics(ds, result) -> MetricsReport:
    fields: dict[str, float | None] = {}
    chnc = result.chnc
    if ds.true_label is not None and len(chnc.prediction_ids):
        truth = ds.true_label[chnc.prediction_ids]
        fields["accuracy"] = accuracy(chnc.predictions, truth)
        if (truth > 0).any() and (truth < 0).any():
            fields["balanced_accuracy"] = balanced_accuracy(
                chnc.predictions, truth)
    if ds.noisy_flags is not None and ds.noisy_flags.any():
        recall, precision, f1 = noise_prf(
            chnc.detected_noisy, np.flatnonzero(ds.noisy_flags))
        fields["noise_recall"] = recall
        fields["noise_precision"] = precision
        fields["noise_f1"] = f1
    return MetricsReport(**fields)


def cmd_compare(args) -> int:
    reports = {}
    for entry in args.dirs:
        path = Path(entry) / "metrics.json"
        if not path.exists():
            raise DataError(f"{path} not found")
        try:
            reports[Path(entry).name or entry] = MetricsReport.from_json(
                path.read_text())
        except (TypeError, ValueError) as err:
            raise DataError(f"{path}: schema mismatch ({err})") from err
    methods = list(reports)
    metric_names = ("accuracy", "balanced_accuracy", "noise_f1")
    header = ["method"] + [m for m in metric_names] + ["gap_acc_pct", "imp_vs_first_pct"]

    scored = {m: reports[m].accuracy for m in methods
              if reports[m].accuracy is not None}
    gaps = (avg_gap_from_max({"run": scored}) if len(scored) == len(methods)
            and scored else {})
    reference = reports[methods[0]].accuracy

    rows = []
    for m in methods:
        row = [m]
        for name in metric_names:
            value = getattr(reports[m], name)
            row.append("-" if value is None else f"{value:.4f}")
        row.append(f"{gaps[m]:+.2f}" if m in gaps else "-")
        acc = reports[m].accuracy
        if reference and acc is not None:
            row.append(f"{accuracy_improvement(acc, reference):+.2f}")
        else:
            row.append("-")
        rows.append(row)

    widths = [max(len(str(r[c])) for r in [header] + rows)
              for c in range(len(header))]
    for row in [header] + rows:
        print("  ".join(f"{cell:<{w}}" for cell, w in zip(row, widths)).rstrip())
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"gen": cmd_gen, "run": cmd_run, "compare": cmd_compare}
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except ChncError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as err:  # pragma: no cover - defensive
        print(f"internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
