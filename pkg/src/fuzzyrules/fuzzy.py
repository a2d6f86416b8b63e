"""Fuzzy connectives, value-comparison relations and rough approximations.

This is the numeric kernel: everything operates on degrees in [0, 1] and is
a pure function of its inputs. Fuzzy sets are plain 1-D float arrays indexed
by universe position; binary fuzzy relations are dense square float arrays.
No floating-point summation is used anywhere, so results are independent of
evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Shared zero tolerance. Degree comparisons against "exactly zero" allow this
# much slack; min/max arithmetic preserves exact zeros produced by clamping.
EPSILON = 1e-12

TNORMS = ("minimum", "lukasiewicz")
IMPLICATORS = ("lukasiewicz", "kleene_dienes")


@dataclass(frozen=True)
class ConnectiveConfig:
    """The t-norm / implicator pair parametrizing all fuzzy operations."""

    tnorm: str = "minimum"
    implicator: str = "lukasiewicz"

    def __post_init__(self):
        if self.tnorm not in TNORMS:
            raise ValueError(f"unknown t-norm {self.tnorm!r}; expected one of {TNORMS}")
        if self.implicator not in IMPLICATORS:
            raise ValueError(
                f"unknown implicator {self.implicator!r}; expected one of {IMPLICATORS}"
            )


DEFAULT_CONFIG = ConnectiveConfig()


def tnorm(config: ConnectiveConfig, x, y):
    """Apply the configured t-norm elementwise to degrees x, y."""
    if config.tnorm == "minimum":
        return np.minimum(x, y)
    return np.maximum(0.0, np.add(x, y) - 1.0)


def implicator(config: ConnectiveConfig, x, y):
    """Apply the configured implicator elementwise to degrees x, y."""
    if config.implicator == "lukasiewicz":
        return np.minimum(1.0, 1.0 - np.subtract(x, y))
    return np.maximum(1.0 - np.asarray(x, dtype=float), y)


def rel_similar(p, x):
    """Similarity degree 1 - |p - x| between unit-range values."""
    return 1.0 - np.abs(np.subtract(p, x))


def rel_dominant(p, x):
    """Degree to which x is smaller than or similar to the prototype p.

    Equals 1 whenever x <= p and decays linearly with the excess x - p.
    """
    return np.minimum(1.0, 1.0 - np.subtract(x, p))


def rel_dominated(p, x):
    """Degree to which x is greater than or similar to the prototype p.

    Mirror of :func:`rel_dominant` with the arguments swapped.
    """
    return np.minimum(1.0, 1.0 - np.subtract(p, x))


def rel_aggregate(system, attributes, config: ConnectiveConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Aggregated indiscernibility relation over a subset of attributes.

    Entry (u, v) combines the per-attribute similarities with the configured
    t-norm. The result is reflexive by construction.

    ``system`` may be a DecisionSystem or a plain (n, m) value matrix.
    """
    values = getattr(system, "values", system)
    values = np.asarray(values, dtype=float)
    attributes = list(attributes)
    if not attributes:
        raise ValueError("attribute subset must be non-empty")
    out = None
    for a in attributes:
        col = values[:, a]
        sim = 1.0 - np.abs(col[:, None] - col[None, :])
        out = sim if out is None else tnorm(config, out, sim)
    return out


def lower_approx(membership: np.ndarray, relation: np.ndarray,
                 config: ConnectiveConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Fuzzy lower approximation: inf over v of I(R(u, v), A(v))."""
    membership = np.asarray(membership, dtype=float)
    relation = np.asarray(relation, dtype=float)
    if relation.shape != (membership.size, membership.size):
        raise ValueError(
            f"relation shape {relation.shape} does not match universe size {membership.size}"
        )
    return implicator(config, relation, membership[None, :]).min(axis=1)


def upper_approx(membership: np.ndarray, relation: np.ndarray,
                 config: ConnectiveConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Fuzzy upper approximation: sup over v of T(R(u, v), A(v))."""
    membership = np.asarray(membership, dtype=float)
    relation = np.asarray(relation, dtype=float)
    if relation.shape != (membership.size, membership.size):
        raise ValueError(
            f"relation shape {relation.shape} does not match universe size {membership.size}"
        )
    return tnorm(config, relation, membership[None, :]).max(axis=1)


def positive_region(system, attributes, config: ConnectiveConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Membership of each object in the union of class lower approximations.

    Measures how consistently an object's neighbourhood (w.r.t. the given
    attributes) agrees with a single decision class.
    """
    relation = rel_aggregate(system, attributes, config)
    out = np.zeros(len(system.class_of))
    for c in range(len(system.class_labels)):
        crisp = (system.class_of == c).astype(float)
        out = np.maximum(out, lower_approx(crisp, relation, config))
    return out
