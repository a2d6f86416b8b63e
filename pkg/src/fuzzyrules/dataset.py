"""Loading, validation, normalization and fold splitting for decision tables.

Everything downstream of this module sees only unit-range condition values
and integer class indices. Raw-data concerns (CSV and KEEL parsing, min-max
scaling, out-of-range clipping, stratified splits) all live here.
"""

from __future__ import annotations

import io
import re
import warnings
from dataclasses import dataclass, field
from random import Random
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data, with a row/column location."""


@dataclass(frozen=True)
class AttributeMeta:
    """Observed value range of one condition attribute at fit time."""

    name: str
    observed_min: float
    observed_max: float

    def __post_init__(self):
        if self.observed_min > self.observed_max:
            raise ValueError(
                f"attribute {self.name!r}: min {self.observed_min} > max {self.observed_max}"
            )

    @property
    def zero_range(self) -> bool:
        return self.observed_min == self.observed_max


@dataclass(frozen=True)
class NormalizationParams:
    """Per-attribute (min, max) pairs captured from the training data."""

    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    def __post_init__(self):
        if len(self.mins) != len(self.maxs):
            raise ValueError("mins and maxs must have equal length")
        for i, (lo, hi) in enumerate(zip(self.mins, self.maxs)):
            if lo > hi:
                raise ValueError(f"column {i}: min {lo} > max {hi}")

    @property
    def n_attributes(self) -> int:
        return len(self.mins)

    def zero_range(self, i: int) -> bool:
        return self.mins[i] == self.maxs[i]


@dataclass
class RawTable:
    """Unnormalized condition values plus original decision labels."""

    values: np.ndarray
    labels: list[str]
    attribute_names: list[str]
    decision_name: str = "d"

    @property
    def n_objects(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]

    def subset(self, indices) -> "RawTable":
        idx = np.asarray(indices, dtype=int)
        return RawTable(self.values[idx], [self.labels[i] for i in idx],
                        list(self.attribute_names), self.decision_name)


@dataclass(frozen=True)
class DecisionSystem:
    """Normalized object-by-attribute table with categorical decisions.

    values holds unit-range reals, class_of indexes into class_labels, and
    attributes records the observed raw ranges. Instances are immutable and
    safe to share read-only across threads.
    """

    values: np.ndarray
    class_of: np.ndarray
    class_labels: tuple[str, ...]
    attributes: tuple[AttributeMeta, ...]

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        class_of = np.ascontiguousarray(self.class_of, dtype=int)
        values.setflags(write=False)
        class_of.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "class_of", class_of)
        n, m = values.shape if values.ndim == 2 else (0, 0)
        if n < 1 or m < 1:
            raise ValueError("decision system needs at least one object and one attribute")
        if class_of.shape != (n,):
            raise ValueError("class vector length does not match object count")
        if len(self.attributes) != m:
            raise ValueError("attribute metadata length does not match column count")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise ValueError("class labels must be distinct")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValueError("normalized values must lie in [0, 1]")
        if class_of.size and (class_of.min() < 0 or class_of.max() >= len(self.class_labels)):
            raise ValueError("class indices out of range")

    @property
    def n_objects(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    def class_membership(self, c: int) -> np.ndarray:
        """Crisp membership vector of decision class c."""
        return (self.class_of == c).astype(float)


@dataclass(frozen=True)
class FoldSplit:
    """Assignment of each object to one of k cross-validation folds."""

    assignments: np.ndarray
    n_folds: int
    seed: int

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)


# ---------------------------------------------------------------------------
# parsing


def _parse_float(text: str, row: int, column: str) -> float:
    text = text.strip()
    if not text or text == "?":
        raise DataError(f"row {row}, column {column!r}: missing value")
    try:
        return float(text)
    except ValueError:
        raise DataError(
            f"row {row}, column {column!r}: non-numeric condition value {text!r}"
        ) from None


def _resolve_decision(columns: list[str], decision) -> int:
    if decision is None:
        return len(columns) - 1
    if isinstance(decision, int):
        idx = decision if decision >= 0 else len(columns) + decision
        if not 0 <= idx < len(columns):
            raise DataError(f"decision column index {decision} out of range")
        return idx
    if decision in columns:
        return columns.index(decision)
    if re.fullmatch(r"-?\d+", str(decision)):
        return _resolve_decision(columns, int(decision))
    raise DataError(f"decision column {decision!r} not found in header {columns}")


def _load_csv(text: str, decision) -> RawTable:
    import csv

    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataError("empty CSV input")
    header = [cell.strip() for cell in rows[0]]
    d_idx = _resolve_decision(header, decision)
    cond_idx = [i for i in range(len(header)) if i != d_idx]
    if not cond_idx:
        raise DataError("no condition columns besides the decision column")
    values, labels = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"row {r}: expected {len(header)} fields, got {len(row)}")
        label = row[d_idx].strip()
        if not label:
            raise DataError(f"row {r}: missing decision value")
        labels.append(label)
        values.append([_parse_float(row[i], r, header[i]) for i in cond_idx])
    if not values:
        raise DataError("CSV contains a header but no data rows")
    return RawTable(np.array(values, dtype=float), labels,
                    [header[i] for i in cond_idx], header[d_idx])


def _load_keel(text: str, decision) -> RawTable:
    names: list[str] = []
    outputs: list[str] = []
    data_lines: list[tuple[int, str]] = []
    in_data = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if in_data:
            data_lines.append((lineno, stripped))
            continue
        low = stripped.lower()
        if low.startswith("@attribute"):
            body = stripped[len("@attribute"):].strip()
            m = re.match(r"([^\s{\[]+)", body)
            if not m:
                raise DataError(f"line {lineno}: malformed @attribute declaration")
            names.append(m.group(1))
        elif low.startswith("@outputs") or low.startswith("@output"):
            rest = stripped.split(None, 1)
            if len(rest) > 1:
                outputs = [t.strip() for t in rest[1].split(",") if t.strip()]
        elif low.startswith("@data"):
            in_data = True
        # @relation and @inputs carry nothing we honor beyond names
    if not names:
        raise DataError("KEEL file declares no attributes")
    if not data_lines:
        raise DataError("KEEL file has no @data section or no data rows")

    if decision is not None:
        d_idx = _resolve_decision(names, decision)
    elif outputs:
        if outputs[-1] not in names:
            raise DataError(f"@outputs names unknown attribute {outputs[-1]!r}")
        d_idx = names.index(outputs[-1])
    else:
        d_idx = len(names) - 1
    cond_idx = [i for i in range(len(names)) if i != d_idx]
    if not cond_idx:
        raise DataError("no condition attributes besides the decision attribute")

    values, labels = [], []
    for lineno, line in data_lines:
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(names):
            raise DataError(f"line {lineno}: expected {len(names)} fields, got {len(fields)}")
        label = fields[d_idx]
        if not label or label == "?":
            raise DataError(f"line {lineno}: missing decision value")
        labels.append(label)
        values.append([_parse_float(fields[i], lineno, names[i]) for i in cond_idx])
    return RawTable(np.array(values, dtype=float), labels,
                    [names[i] for i in cond_idx], names[d_idx])


def load_matrix(source, format: str = "csv") -> tuple[np.ndarray, list[str]]:
    """Parse every column of a table as a condition value (no decision column)."""
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    if format == "csv":
        import csv

        rows = [r for r in csv.reader(io.StringIO(text))
                if r and any(cell.strip() for cell in r)]
        if len(rows) < 2:
            raise DataError("CSV needs a header row and at least one data row")
        header = [cell.strip() for cell in rows[0]]
        values = [
            [_parse_float(cell, r, header[i]) for i, cell in enumerate(row)]
            for r, row in enumerate(rows[1:], start=2)
        ]
        return np.array(values, dtype=float), header
    if format == "keel":
        names: list[str] = []
        values = []
        in_data = False
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped:
                continue
            low = stripped.lower()
            if not in_data:
                if low.startswith("@attribute"):
                    m = re.match(r"([^\s{\[]+)", stripped[len("@attribute"):].strip())
                    if not m:
                        raise DataError(f"line {lineno}: malformed @attribute declaration")
                    names.append(m.group(1))
                elif low.startswith("@data"):
                    in_data = True
                continue
            fields = [f.strip() for f in stripped.split(",")]
            if len(fields) != len(names):
                raise DataError(
                    f"line {lineno}: expected {len(names)} fields, got {len(fields)}"
                )
            values.append([
                _parse_float(fields[i], lineno, names[i]) for i in range(len(names))
            ])
        if not values:
            raise DataError("KEEL file has no @data section or no data rows")
        return np.array(values, dtype=float), names
    raise DataError(f"unknown format {format!r}; expected 'csv' or 'keel'")


def load_table(source, format: str = "csv", decision=None) -> RawTable:
    """Load a raw decision table from a path, text or binary stream.

    format is "csv" (first row header) or "keel" (@attribute/@data sections).
    decision selects the decision column by name or index; defaults to the
    last column (for KEEL, the last @outputs attribute when declared).
    """
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    if format == "csv":
        return _load_csv(text, decision)
    if format == "keel":
        return _load_keel(text, decision)
    raise DataError(f"unknown format {format!r}; expected 'csv' or 'keel'")


# ---------------------------------------------------------------------------
# normalization


def fit_normalizer(table) -> NormalizationParams:
    """Capture column-wise min and max of the raw training data."""
    values = np.asarray(getattr(table, "values", table), dtype=float)
    if values.ndim != 2 or values.shape[0] < 1:
        raise ValueError("cannot fit a normalizer on an empty table")
    return NormalizationParams(tuple(values.min(axis=0)), tuple(values.max(axis=0)))


def normalize_values(values: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Min-max scale a raw value matrix, clipping out-of-range values.

    Values above the fitted max clip to 1, below the min clip to 0, and
    zero-range columns map to the constant 0.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != params.n_attributes:
        raise DataError(
            f"expected {params.n_attributes} condition columns, got {values.shape[1]}"
        )
    mins = np.array(params.mins)
    span = np.array(params.maxs) - mins
    safe = np.where(span > 0, span, 1.0)
    out = (values - mins) / safe
    out[:, span == 0] = 0.0
    return np.clip(out, 0.0, 1.0)


def index_labels(labels: Sequence[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Map label texts to indices by first appearance order."""
    order: dict[str, int] = {}
    for lab in labels:
        if lab not in order:
            order[lab] = len(order)
    class_of = np.array([order[lab] for lab in labels], dtype=int)
    return class_of, tuple(order)


def apply_normalizer(table, params: NormalizationParams):
    """Normalize a RawTable into a DecisionSystem, or a bare matrix into a matrix."""
    if isinstance(table, np.ndarray):
        return normalize_values(table, params)
    values = normalize_values(table.values, params)
    class_of, class_labels = index_labels(table.labels)
    metas = tuple(
        AttributeMeta(name, params.mins[i], params.maxs[i])
        for i, name in enumerate(table.attribute_names)
    )
    return DecisionSystem(values, class_of, class_labels, metas)


def build_system(table: RawTable) -> DecisionSystem:
    """Fit a normalizer on the table and apply it (the one-shot training path)."""
    return apply_normalizer(table, fit_normalizer(table))


# ---------------------------------------------------------------------------
# fold splitting


def stratified_folds(system: DecisionSystem, k: int, seed: int) -> FoldSplit:
    """Stratified fold assignment: per-class round-robin after a seeded shuffle.

    The dealing position carries over between classes so overall fold sizes
    stay balanced. Classes smaller than k end up spread over a subset of the
    folds, with a warning.
    """
    if k < 2:
        raise ValueError("fold count must be at least 2")
    rng = Random(seed)
    assignments = np.empty(system.n_objects, dtype=int)
    pointer = 0
    for c in range(system.n_classes):
        members = list(np.flatnonzero(system.class_of == c))
        if 0 < len(members) < k:
            warnings.warn(
                f"class {system.class_labels[c]!r} has {len(members)} member(s), "
                f"fewer than {k} folds; it will be absent from some folds",
                UserWarning,
                stacklevel=2,
            )
        rng.shuffle(members)
        for idx in members:
            assignments[idx] = pointer % k
            pointer += 1
    return FoldSplit(assignments, k, seed)
