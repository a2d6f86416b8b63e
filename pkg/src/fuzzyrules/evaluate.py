"""Cross-validation harness and evaluation metrics."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import induction
from .dataset import (
    DataError,
    RawTable,
    apply_normalizer,
    build_system,
    fit_normalizer,
    load_table,
    stratified_folds,
)
from .fuzzy import ConnectiveConfig, DEFAULT_CONFIG
from .inference import predict_batch
from .rules import Ruleset
from .setcover import DEFAULT_NODE_BUDGET

REPORT_COLUMNS = (
    "dataset", "fold", "balanced_accuracy", "n_rules", "mean_rule_length",
    "std_rule_length", "solver_optimal", "fit_seconds", "predict_seconds",
)


def balanced_accuracy(y_true, y_pred) -> float:
    """Arithmetic mean of per-class recall over the classes present in y_true."""
    y_true, y_pred = list(y_true), list(y_pred)
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise ValueError("cannot score an empty label sequence")
    recalls = []
    for cls in dict.fromkeys(y_true):
        members = [i for i, t in enumerate(y_true) if t == cls]
        hits = sum(1 for i in members if y_pred[i] == cls)
        recalls.append(hits / len(members))
    return sum(recalls) / len(recalls)


def imbalance_ratio(labels) -> float:
    """Largest class size divided by smallest class size."""
    counts: dict = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    if not counts:
        raise ValueError("no labels")
    return max(counts.values()) / min(counts.values())


@dataclass(frozen=True)
class MetricsRecord:
    """Evaluation of a single fold."""

    fold: int
    balanced_accuracy: float
    n_rules: int
    mean_rule_length: float
    std_rule_length: float
    imbalance_ratio: float
    solver_optimal: bool
    fit_seconds: float
    predict_seconds: float
    rule_lengths: tuple[int, ...]


@dataclass(frozen=True)
class CVReport:
    """Per-fold metrics plus aggregates and the configuration that produced them."""

    dataset: str
    n_folds: int
    seed: int
    config: ConnectiveConfig
    solver: str
    imbalance: float
    records: tuple[MetricsRecord, ...]

    @property
    def mean_balanced_accuracy(self) -> float:
        return float(np.mean([r.balanced_accuracy for r in self.records]))

    @property
    def mean_n_rules(self) -> float:
        return float(np.mean([r.n_rules for r in self.records]))

    @property
    def mean_rule_length(self) -> float:
        return float(np.mean([r.mean_rule_length for r in self.records]))

    @property
    def pooled_rule_lengths(self) -> tuple[int, ...]:
        """Rule lengths of every rule of every fold, pooled."""
        out: list[int] = []
        for r in self.records:
            out.extend(r.rule_lengths)
        return tuple(out)

    @property
    def pooled_length_mean(self) -> float:
        pooled = self.pooled_rule_lengths
        return float(np.mean(pooled)) if pooled else 0.0

    @property
    def pooled_length_std(self) -> float:
        pooled = self.pooled_rule_lengths
        return float(np.std(pooled)) if pooled else 0.0

    @property
    def all_optimal(self) -> bool:
        return all(r.solver_optimal for r in self.records)


def _evaluate_fold(table: RawTable, split, fold: int, imbalance: float,
                   config: ConnectiveConfig, solver: str,
                   node_budget: int) -> MetricsRecord:
    train_idx = split.train_indices(fold)
    test_idx = split.test_indices(fold)
    train = table.subset(train_idx)
    test = table.subset(test_idx)
    if len(set(train.labels)) < 2:
        raise DataError(
            f"fold {fold}: training part has fewer than two classes; reduce the fold count"
        )

    start = time.perf_counter()
    params = fit_normalizer(train)
    system = apply_normalizer(train, params)
    ruleset = induction.fit(system, config, solver=solver, node_budget=node_budget)
    fit_seconds = time.perf_counter() - start

    start = time.perf_counter()
    predictions = predict_batch(ruleset, test.values)
    predict_seconds = time.perf_counter() - start

    lengths = tuple(rule.length for rule in ruleset.rules)
    return MetricsRecord(
        fold=fold,
        balanced_accuracy=balanced_accuracy(test.labels, predictions),
        n_rules=len(ruleset.rules),
        mean_rule_length=float(np.mean(lengths)) if lengths else 0.0,
        std_rule_length=float(np.std(lengths)) if lengths else 0.0,
        imbalance_ratio=imbalance,
        solver_optimal=ruleset.solver_optimal,
        fit_seconds=fit_seconds,
        predict_seconds=predict_seconds,
        rule_lengths=lengths,
    )


def cross_validate(data, k: int, seed: int,
                   config: ConnectiveConfig = DEFAULT_CONFIG,
                   format: str = "csv", decision=None,
                   solver: str = "exact",
                   node_budget: int = DEFAULT_NODE_BUDGET,
                   jobs: int = 1,
                   dataset_name: str | None = None) -> CVReport:
    """Stratified k-fold cross-validation with per-training-fold normalization.

    ``data`` is a path (loaded with the given format options) or a RawTable.
    Normalization parameters and rules for each fold are functions of that
    fold's training part only; the fold assignment itself depends just on the
    class vector, k and the seed. Results are independent of ``jobs``.
    """
    if k < 2:
        raise ValueError("fold count must be at least 2")
    if isinstance(data, RawTable):
        table = data
        name = dataset_name or "data"
    else:
        table = load_table(data, format=format, decision=decision)
        name = dataset_name or str(data)
    if len(set(table.labels)) < 2:
        raise DataError("cross-validation needs at least two decision classes")

    imbalance = imbalance_ratio(table.labels)
    split = stratified_folds(build_system(table), k, seed)

    def run(fold: int) -> MetricsRecord:
        return _evaluate_fold(table, split, fold, imbalance, config, solver, node_budget)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = tuple(pool.map(run, range(k)))
    else:
        records = tuple(run(fold) for fold in range(k))
    return CVReport(name, k, seed, config, solver, imbalance, records)


def write_report_csv(report: CVReport, path, include_timings: bool = False) -> None:
    """Write per-fold rows plus a final aggregate row.

    Timing columns are left empty unless requested: wall-clock measurements
    would break byte-identical reports across runs.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for r in report.records:
            writer.writerow(_format_row(report.dataset, str(r.fold), r.balanced_accuracy,
                                        float(r.n_rules), r.mean_rule_length,
                                        r.std_rule_length, r.solver_optimal,
                                        r.fit_seconds, r.predict_seconds,
                                        include_timings))
        writer.writerow(_format_row(
            report.dataset, "mean", report.mean_balanced_accuracy,
            report.mean_n_rules, report.mean_rule_length,
            float(np.mean([r.std_rule_length for r in report.records])),
            report.all_optimal,
            float(np.mean([r.fit_seconds for r in report.records])),
            float(np.mean([r.predict_seconds for r in report.records])),
            include_timings,
        ))


def _format_row(dataset, fold, bacc, n_rules, mean_len, std_len, optimal,
                fit_s, predict_s, include_timings):
    return [
        dataset, fold, f"{bacc:.6f}", f"{n_rules:.1f}", f"{mean_len:.6f}",
        f"{std_len:.6f}", "true" if optimal else "false",
        f"{fit_s:.3f}" if include_timings else "",
        f"{predict_s:.3f}" if include_timings else "",
    ]


def summary_line(report: CVReport) -> str:
    solver_note = "exact" if report.all_optimal and report.solver == "exact" \
        else report.solver + ("" if report.all_optimal else " (budget exhausted on some folds)")
    return (
        f"{report.dataset}: folds={report.n_folds} seed={report.seed} "
        f"balanced_accuracy={report.mean_balanced_accuracy:.4f} "
        f"rules={report.mean_n_rules:.1f} "
        f"rule_length={report.pooled_length_mean:.2f}±{report.pooled_length_std:.2f} "
        f"solver={solver_note} "
        f"tnorm={report.config.tnorm} implicator={report.config.implicator}"
    )
