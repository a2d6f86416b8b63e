"""The rule learner: per-object rule pruning, cover-matrix construction and
minimal-rule selection via exact set cover.

Each training object starts as an all-SIMILAR rule over every attribute.
Pruning walks the attributes in fixed column order and, per attribute, tries
the most general condition types first, keeping the first one that leaves
the rule covering no object of another class. Selection then picks a minimum
subset of pruned rules that still covers every coverable training object.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import DecisionSystem, NormalizationParams
from .fuzzy import ConnectiveConfig, DEFAULT_CONFIG, EPSILON, lower_approx, rel_aggregate
from .rules import ConditionType, Rule, Ruleset, covering_degrees
from .setcover import CoverInstance, DEFAULT_NODE_BUDGET, solve_exact, solve_greedy

# Trial order per attribute: most general first, SIMILAR last. When nothing
# passes, the attribute simply keeps the SIMILAR type it started with.
TRIAL_ORDER = (
    ConditionType.UNUSED,
    ConditionType.DOMINANT,
    ConditionType.DOMINATED,
    ConditionType.SIMILAR,
)


class InductionWarning(UserWarning):
    """Non-fatal learner notices: inconsistent or uncoverable objects, solver fallback."""


@dataclass(frozen=True)
class PruneTrace:
    """Per-attribute record of the trial types and their pass/fail verdicts."""

    trials: tuple[tuple[tuple[ConditionType, bool], ...], ...]

    def accepted(self, attribute: int) -> ConditionType:
        for t, passed in reversed(self.trials[attribute]):
            if passed:
                return t
        return ConditionType.SIMILAR


def confidences(system: DecisionSystem, config: ConnectiveConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Each object's membership in the lower approximation of its own class."""
    relation = rel_aggregate(system, range(system.n_attributes), config)
    out = np.empty(system.n_objects)
    for c in range(system.n_classes):
        members = system.class_of == c
        if members.any():
            out[members] = lower_approx(system.class_membership(c), relation, config)[members]
    return out


def subset_check(rule: Rule, system: DecisionSystem, u: int) -> bool:
    """True iff the rule covers no object of a class other than u's.

    Same-class objects are irrelevant: the check only constrains coverage of
    the other classes, and holds exactly when every such covering degree is
    (numerically) zero.
    """
    others = system.class_of != system.class_of[u]
    if not others.any():
        return True
    degrees = covering_degrees(rule, system.values[others])
    return bool(degrees.max() <= EPSILON)


def rule_prune(system: DecisionSystem, u: int,
               config: ConnectiveConfig = DEFAULT_CONFIG,
               confidence: float | None = None,
               initial_types=None) -> Rule:
    """Shorten object u's rule by generalizing one attribute at a time."""
    rule, _ = rule_prune_traced(system, u, config, confidence, initial_types)
    return rule


def rule_prune_traced(system: DecisionSystem, u: int,
                      config: ConnectiveConfig = DEFAULT_CONFIG,
                      confidence: float | None = None,
                      initial_types=None) -> tuple[Rule, PruneTrace]:
    """As :func:`rule_prune`, also returning the per-attribute trial trace.

    initial_types overrides the all-SIMILAR starting vector; re-running the
    pass on a pruned rule's own types is a fixpoint.
    """
    m = system.n_attributes
    if confidence is None:
        relation = rel_aggregate(system, range(m), config)
        crisp = system.class_membership(system.class_of[u])
        confidence = float(lower_approx(crisp, relation, config)[u])
    prototype = tuple(float(v) for v in system.values[u])
    types = list(initial_types) if initial_types is not None else [ConditionType.SIMILAR] * m
    if len(types) != m:
        raise ValueError("initial type vector arity mismatch")

    def candidate() -> Rule:
        return Rule(prototype, tuple(types), int(system.class_of[u]), confidence, u)

    trials: list[tuple[tuple[ConditionType, bool], ...]] = []
    for i in range(m):
        attempt: list[tuple[ConditionType, bool]] = []
        for t in TRIAL_ORDER:
            types[i] = t
            ok = subset_check(candidate(), system, u)
            attempt.append((t, ok))
            if ok:
                break
        trials.append(tuple(attempt))
    return candidate(), PruneTrace(tuple(trials))


def build_cover_matrix(system: DecisionSystem, rules,
                       config: ConnectiveConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Binary matrix: entry (u, v) is True iff rule u covers training object v."""
    n = system.n_objects
    if len(rules) != n:
        raise ValueError("need exactly one pruned rule per training object")
    z = np.zeros((n, n), dtype=bool)
    for u, rule in enumerate(rules):
        z[u] = covering_degrees(rule, system.values) > EPSILON
    return z


def fit(system: DecisionSystem, config: ConnectiveConfig = DEFAULT_CONFIG,
        solver: str = "exact", node_budget: int = DEFAULT_NODE_BUDGET) -> Ruleset:
    """Learn a minimal ruleset from a normalized decision system."""
    if system.n_classes < 2:
        raise ValueError("training requires at least two decision classes")
    if solver not in ("exact", "greedy"):
        raise ValueError(f"unknown solver {solver!r}; expected 'exact' or 'greedy'")

    conf = confidences(system, config)
    pruned = [
        rule_prune(system, u, config, confidence=float(conf[u]))
        for u in range(system.n_objects)
    ]
    z = build_cover_matrix(system, pruned, config)

    # Rules with zero confidence cover nothing and leave the candidate pool;
    # objects no remaining rule covers lose their coverage constraint.
    candidates = [u for u in range(system.n_objects) if conf[u] > EPSILON]
    for u in range(system.n_objects):
        if conf[u] <= EPSILON:
            warnings.warn(
                f"object {u} is inconsistent with its class (confidence 0); "
                "its rule is excluded from selection",
                InductionWarning, stacklevel=2,
            )
    coverable = np.zeros(system.n_objects, dtype=bool)
    for u in candidates:
        coverable |= z[u]
    for v in np.flatnonzero(~coverable):
        warnings.warn(
            f"object {v} is not covered by any candidate rule; "
            "its coverage constraint is dropped",
            InductionWarning, stacklevel=2,
        )

    element_of = {int(v): e for e, v in enumerate(np.flatnonzero(coverable))}
    sets = tuple(
        frozenset(element_of[int(v)] for v in np.flatnonzero(z[u]) if coverable[v])
        for u in candidates
    )
    instance = CoverInstance(len(element_of), sets)
    if solver == "exact":
        solution = solve_exact(instance, node_budget)
        if not solution.optimal:
            warnings.warn(
                f"set-cover node budget ({node_budget}) exhausted after "
                f"{solution.nodes_explored} nodes; keeping best cover found "
                "(selection may not be minimal)",
                InductionWarning, stacklevel=2,
            )
    else:
        solution = solve_greedy(instance)

    selected = sorted(candidates[i] for i in solution.chosen)
    majority = int(np.bincount(system.class_of, minlength=system.n_classes).argmax())
    return Ruleset(
        rules=tuple(pruned[u] for u in selected),
        attribute_names=tuple(meta.name for meta in system.attributes),
        class_labels=system.class_labels,
        normalization=NormalizationParams(
            tuple(meta.observed_min for meta in system.attributes),
            tuple(meta.observed_max for meta in system.attributes),
        ),
        config=config,
        majority_class=majority,
        solver_optimal=solution.optimal,
    )
