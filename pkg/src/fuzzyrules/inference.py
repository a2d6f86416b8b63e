"""Classification with a learned ruleset: per-class maximal covering degree."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DataError, normalize_values
from .fuzzy import EPSILON
from .rules import Ruleset, covering_degrees


@dataclass(frozen=True)
class ClassScores:
    """Per-class covering scores for one object.

    best_class maximizes the scores with ties broken toward the lower class
    index; when every score is numerically zero the training majority class
    is used and fallback_used is set.
    """

    scores: tuple[float, ...]
    best_class: int
    fallback_used: bool


def score_batch(ruleset: Ruleset, rows) -> np.ndarray:
    """Covering scores of raw rows, one row of per-class scores each.

    Rows are normalized (and clipped) with the ruleset's stored parameters;
    each class scores the maximum covering degree over its rules, or 0 when
    it has none.
    """
    values = _coerce_rows(rows, len(ruleset.attribute_names))
    if values.shape[0] == 0:
        return np.zeros((0, len(ruleset.class_labels)))
    normalized = normalize_values(values, ruleset.normalization)
    scores = np.zeros((normalized.shape[0], len(ruleset.class_labels)))
    for rule in ruleset.rules:
        degrees = covering_degrees(rule, normalized)
        np.maximum(scores[:, rule.class_index], degrees,
                   out=scores[:, rule.class_index])
    return scores


def score(ruleset: Ruleset, x) -> ClassScores:
    """Score a single raw value vector."""
    row = np.asarray(x, dtype=float)
    if row.ndim != 1 or row.size != len(ruleset.attribute_names):
        raise DataError(
            f"expected {len(ruleset.attribute_names)} attribute values, got {row.size}"
        )
    per_class = score_batch(ruleset, row[None, :])[0]
    fallback = bool((per_class <= EPSILON).all())
    best = ruleset.majority_class if fallback else int(per_class.argmax())
    return ClassScores(tuple(float(s) for s in per_class), best, fallback)


def predict_batch(ruleset: Ruleset, rows) -> list[str]:
    """Predicted label text for every raw row, in input order."""
    scores = score_batch(ruleset, rows)
    if scores.shape[0] == 0:
        return []
    best = scores.argmax(axis=1)
    fallback = (scores <= EPSILON).all(axis=1)
    best[fallback] = ruleset.majority_class
    return [ruleset.class_labels[c] for c in best]


def _coerce_rows(rows, arity: int) -> np.ndarray:
    if isinstance(rows, np.ndarray) and rows.dtype != object:
        values = np.atleast_2d(rows.astype(float))
    else:
        rows = list(rows)
        for i, row in enumerate(rows):
            if len(row) != arity:
                raise DataError(f"row {i}: expected {arity} values, got {len(row)}")
        values = np.array(rows, dtype=float).reshape(len(rows), arity) if rows \
            else np.zeros((0, arity))
    if values.size and values.shape[1] != arity:
        raise DataError(f"expected {arity} condition columns, got {values.shape[1]}")
    return values
