"""Rule data model: condition types, matching and covering degrees, rendering
and the versioned model-file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import NormalizationParams
from .fuzzy import (
    ConnectiveConfig,
    DEFAULT_CONFIG,
    lower_approx,
    rel_aggregate,
    rel_dominant,
    rel_dominated,
    rel_similar,
)

MODEL_FORMAT = "fuzzyrules-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a serialized model cannot be parsed."""


class ConditionType(Enum):
    """Per-attribute condition kind; UNUSED marks an absent condition."""

    SIMILAR = "S"
    DOMINANT = "L"   # value is smaller than or similar to the prototype
    DOMINATED = "G"  # value is greater than or similar to the prototype
    UNUSED = "U"

    @classmethod
    def from_code(cls, code: str) -> "ConditionType":
        for member in cls:
            if member.value == code:
                return member
        raise ModelFormatError(f"unknown condition type code {code!r}")


_PHRASE = {
    ConditionType.SIMILAR: "is similar to",
    ConditionType.DOMINANT: "is smaller than or similar to",
    ConditionType.DOMINATED: "is greater than or similar to",
}


@dataclass(frozen=True)
class Rule:
    """One fuzzy decision rule anchored at a training object.

    The prototype keeps all m values even for UNUSED attributes, so pruning
    stays reversible and serialization is fixed-width per dataset.
    """

    prototype: tuple[float, ...]
    types: tuple[ConditionType, ...]
    class_index: int
    confidence: float
    source_index: int | None = None

    def __post_init__(self):
        if len(self.prototype) != len(self.types):
            raise ValueError("prototype and type vector lengths differ")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def length(self) -> int:
        """Number of active (non-UNUSED) conditions."""
        return sum(1 for t in self.types if t is not ConditionType.UNUSED)


@dataclass(frozen=True)
class Ruleset:
    """An ordered rule collection plus everything needed to score raw rows."""

    rules: tuple[Rule, ...]
    attribute_names: tuple[str, ...]
    class_labels: tuple[str, ...]
    normalization: NormalizationParams
    config: ConnectiveConfig
    majority_class: int = 0
    solver_optimal: bool = True

    def __post_init__(self):
        m = len(self.attribute_names)
        for i, rule in enumerate(self.rules):
            if len(rule.prototype) != m:
                raise ValueError(f"rule {i} arity {len(rule.prototype)} != {m}")
            if not 0 <= rule.class_index < len(self.class_labels):
                raise ValueError(f"rule {i} has out-of-range class {rule.class_index}")
        if self.class_labels and not 0 <= self.majority_class < len(self.class_labels):
            raise ValueError("majority class index out of range")

    def __len__(self) -> int:
        return len(self.rules)


def total_rule(system, u: int, config: ConnectiveConfig = DEFAULT_CONFIG) -> Rule:
    """The all-SIMILAR rule anchored at training object u.

    Its confidence is the object's membership in the lower approximation of
    its own decision class under the full-attribute relation.
    """
    relation = rel_aggregate(system, range(system.n_attributes), config)
    crisp = system.class_membership(system.class_of[u])
    confidence = float(lower_approx(crisp, relation, config)[u])
    return Rule(
        prototype=tuple(float(v) for v in system.values[u]),
        types=(ConditionType.SIMILAR,) * system.n_attributes,
        class_index=int(system.class_of[u]),
        confidence=confidence,
        source_index=u,
    )


def matching_degrees(rule: Rule, values: np.ndarray) -> np.ndarray:
    """Matching degree of every row of a normalized value matrix.

    Matching is the minimum over active conditions of the type-dispatched
    relation between the prototype value and the row value; an all-UNUSED
    rule matches everything at degree 1.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != len(rule.prototype):
        raise ValueError(
            f"expected {len(rule.prototype)} attribute values, got {values.shape[1]}"
        )
    out = np.ones(values.shape[0])
    for i, t in enumerate(rule.types):
        if t is ConditionType.UNUSED:
            continue
        p = rule.prototype[i]
        col = values[:, i]
        if t is ConditionType.SIMILAR:
            deg = rel_similar(p, col)
        elif t is ConditionType.DOMINANT:
            deg = rel_dominant(p, col)
        else:
            deg = rel_dominated(p, col)
        np.minimum(out, deg, out=out)
    return out


def matching_degree(rule: Rule, x) -> float:
    """Matching degree of a single normalized value vector."""
    return float(matching_degrees(rule, np.asarray(x, dtype=float)[None, :])[0])


def covering_degrees(rule: Rule, values: np.ndarray) -> np.ndarray:
    """Covering degree (matching capped by rule confidence) of every row."""
    return np.minimum(matching_degrees(rule, values), rule.confidence)


def covering_degree(rule: Rule, x) -> float:
    """Covering degree of a single normalized value vector."""
    return min(matching_degree(rule, x), rule.confidence)


# ---------------------------------------------------------------------------
# rendering


def _fmt(value: float) -> str:
    return f"{value:g}"


def render_rule(rule: Rule, attribute_names, class_labels,
                show_confidence: bool = True) -> str:
    """Deterministic text form: active conditions in attribute order."""
    parts = [
        f"{attribute_names[i]} {_PHRASE[t]} {_fmt(rule.prototype[i])}"
        for i, t in enumerate(rule.types)
        if t is not ConditionType.UNUSED
    ]
    antecedent = " AND ".join(parts) if parts else "(always)"
    text = f"IF {antecedent} THEN d is {class_labels[rule.class_index]}"
    if show_confidence:
        text += f" (confidence {rule.confidence:.6f})"
    return text


# ---------------------------------------------------------------------------
# serialization


def _float_text(value: float) -> str:
    return f"{value:.17g}"


def serialize_ruleset(ruleset: Ruleset) -> bytes:
    """Serialize to a versioned UTF-8 document; floats kept at full precision."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "tnorm": ruleset.config.tnorm,
        "implicator": ruleset.config.implicator,
        "attributes": list(ruleset.attribute_names),
        "class_labels": list(ruleset.class_labels),
        "normalization": {
            "min": [_float_text(v) for v in ruleset.normalization.mins],
            "max": [_float_text(v) for v in ruleset.normalization.maxs],
        },
        "majority_class": ruleset.majority_class,
        "solver_optimal": ruleset.solver_optimal,
        "rules": [
            {
                "source": rule.source_index,
                "types": "".join(t.value for t in rule.types),
                "prototype": [_float_text(v) for v in rule.prototype],
                "class": rule.class_index,
                "confidence": _float_text(rule.confidence),
            }
            for rule in ruleset.rules
        ],
    }
    return (json.dumps(doc, indent=1) + "\n").encode("utf-8")


def parse_ruleset(data: bytes) -> Ruleset:
    """Parse a serialized model; inverse of :func:`serialize_ruleset`."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"not a valid model document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError("missing or wrong format marker")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {doc.get('version')!r}, expected {MODEL_VERSION}"
        )
    try:
        attributes = tuple(str(a) for a in doc["attributes"])
        class_labels = tuple(str(c) for c in doc["class_labels"])
        norm = NormalizationParams(
            tuple(float(v) for v in doc["normalization"]["min"]),
            tuple(float(v) for v in doc["normalization"]["max"]),
        )
        config = ConnectiveConfig(doc["tnorm"], doc["implicator"])
        majority = int(doc["majority_class"])
        solver_optimal = bool(doc.get("solver_optimal", True))
        raw_rules = doc["rules"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from None

    rules = []
    for i, rec in enumerate(raw_rules):
        try:
            types = tuple(ConditionType.from_code(ch) for ch in rec["types"])
            prototype = tuple(float(v) for v in rec["prototype"])
            rule = Rule(
                prototype=prototype,
                types=types,
                class_index=int(rec["class"]),
                confidence=float(rec["confidence"]),
                source_index=None if rec.get("source") is None else int(rec["source"]),
            )
        except ModelFormatError as exc:
            raise ModelFormatError(f"rule {i}: {exc}") from None
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"rule {i}: {exc}") from None
        if len(types) != len(attributes):
            raise ModelFormatError(f"rule {i}: arity {len(types)} != {len(attributes)}")
        rules.append(rule)
    return Ruleset(tuple(rules), attributes, class_labels, norm, config,
                   majority, solver_optimal)


def save_ruleset(ruleset: Ruleset, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_ruleset(ruleset))


def load_ruleset(path) -> Ruleset:
    with open(path, "rb") as fh:
        return parse_ruleset(fh.read())
