"""Deterministic minimum set cover: exact branch-and-bound plus a greedy fallback.

The exact solver returns, among all minimum-cardinality covers, the one whose
sorted candidate-index vector is lexicographically smallest. Determinism is a
contract: repeat runs agree exactly, which an external ILP solver would not
guarantee. The solver is single-threaded by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

DEFAULT_NODE_BUDGET = 10_000_000


class InfeasibleCoverError(ValueError):
    """Some element is contained in no candidate set."""


@dataclass(frozen=True)
class CoverInstance:
    """Unweighted set-cover instance: elements 0..n-1 and candidate sets.

    The position of a set in the tuple is its candidate index; tie-breaking
    and reported solutions refer to these positions.
    """

    n_elements: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        seen = set()
        for i, s in enumerate(self.sets):
            for e in s:
                if not 0 <= e < self.n_elements:
                    raise ValueError(f"set {i} contains out-of-range element {e}")
            seen.update(s)
        for e in range(self.n_elements):
            if e not in seen:
                raise InfeasibleCoverError(f"element {e} is contained in no set")


@dataclass(frozen=True)
class CoverSolution:
    chosen: tuple[int, ...]
    optimal: bool
    nodes_explored: int


class _BudgetExhausted(Exception):
    pass


def _masks(instance: CoverInstance) -> list[int]:
    out = []
    for s in instance.sets:
        m = 0
        for e in s:
            m |= 1 << e
        out.append(m)
    return out


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _verify(instance: CoverInstance, chosen) -> None:
    covered = set()
    for i in chosen:
        covered.update(instance.sets[i])
    if len(covered) != instance.n_elements:
        raise RuntimeError("solver produced an incomplete cover")  # pragma: no cover


def _greedy_pick(masks, candidates, need: int) -> list[int]:
    """Largest-new-coverage-first greedy cover of `need`, ties to lowest index."""
    chosen: list[int] = []
    uncovered = need
    while uncovered:
        best_i, best_gain = -1, 0
        for i in candidates:
            gain = (masks[i] & uncovered).bit_count()
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_i < 0:  # pragma: no cover - feasibility is checked upstream
            raise InfeasibleCoverError("uncoverable element during greedy pass")
        chosen.append(best_i)
        uncovered &= ~masks[best_i]
    return chosen


def solve_greedy(instance: CoverInstance) -> CoverSolution:
    """Greedy cover; optimal flag only set when the size matches the lower bound."""
    masks = _masks(instance)
    need = (1 << instance.n_elements) - 1
    chosen = _greedy_pick(masks, range(len(masks)), need)
    _verify(instance, chosen)
    max_size = max((m.bit_count() for m in masks), default=0)
    lower = ceil(instance.n_elements / max_size) if max_size else 0
    return CoverSolution(tuple(sorted(chosen)), optimal=len(chosen) == lower,
                         nodes_explored=len(chosen))


def _reduce(masks: list[int], need: int):
    """Shrink the instance without disturbing the lexicographically least optimum.

    Three reductions run to a fixpoint:
      * an element is dropped when covering some other element always covers
        it too (its constraint is implied);
      * a set covering an element nothing else covers is forced into the
        solution;
      * set j is dropped when a lower-indexed set covers a superset of what
        j still contributes (swapping j for that set never makes the sorted
        index vector larger).
    """
    alive = [i for i in range(len(masks)) if masks[i] & need]
    forced: list[int] = []
    changed = True
    while changed and need:
        changed = False
        # implied-element elimination
        elements = list(_bits(need))
        coverers = {}
        for e in elements:
            cov = 0
            for pos, i in enumerate(alive):
                if masks[i] >> e & 1:
                    cov |= 1 << pos
            coverers[e] = cov
        dropped = set()
        for a in range(len(elements)):
            e = elements[a]
            if e in dropped:
                continue
            for b in range(a + 1, len(elements)):
                f = elements[b]
                if f in dropped:
                    continue
                if coverers[e] & ~coverers[f] == 0:
                    dropped.add(f)
                elif coverers[f] & ~coverers[e] == 0:
                    dropped.add(e)
                    break
        if dropped:
            for f in dropped:
                need &= ~(1 << f)
            changed = True
            elements = [e for e in elements if e not in dropped]
        # forced sets: unique coverer of some still-needed element
        for e in elements:
            if not need >> e & 1:
                continue
            live = [alive[p] for p in _bits(coverers[e])]
            live = [i for i in live if i not in forced and masks[i] & need]
            if len(live) == 1:
                i = live[0]
                forced.append(i)
                need &= ~masks[i]
                changed = True
        alive = [i for i in alive if i not in forced and masks[i] & need]
        if not need:
            break
        # safe set dominance: keep the lowest-indexed superset
        kept: list[int] = []
        for j in alive:
            eff_j = masks[j] & need
            if any(eff_j & ~(masks[i] & need) == 0 for i in kept):
                changed = True
                continue
            kept.append(j)
        alive = kept
    return sorted(forced), alive, need


def solve_exact(instance: CoverInstance,
                node_budget: int = DEFAULT_NODE_BUDGET) -> CoverSolution:
    """Exact minimum cover with deterministic lexicographic tie-breaking.

    Branches on the uncovered element contained in the fewest sets, bounded
    by a greedy incumbent and the ceil(uncovered / max-set-size) bound. When
    the node budget runs out the best cover found so far is returned with
    optimal=False (its size may still be optimal, but is unproven).
    """
    n = instance.n_elements
    if n == 0:
        return CoverSolution((), optimal=True, nodes_explored=0)
    masks = _masks(instance)
    full = (1 << n) - 1
    nodes = 0

    forced, alive, need = _reduce(masks, full)
    if not need:
        _verify(instance, forced)
        return CoverSolution(tuple(forced), optimal=True, nodes_explored=0)

    # Warm start: best of greedy on the residual and greedy on the full
    # instance (so the exact result can never be worse than solve_greedy).
    warm_residual = _greedy_pick(masks, alive, need)
    greedy_full = _greedy_pick(masks, range(len(masks)), full)
    greedy_rest = sorted(set(greedy_full) - set(forced))
    incumbent = min(
        (len(warm_residual), tuple(sorted(warm_residual))),
        (len(greedy_rest), tuple(sorted(greedy_rest))),
    )
    best_size, best_chosen = incumbent

    coverer_ids = {e: tuple(i for i in alive if masks[i] >> e & 1) for e in _bits(need)}
    max_set_size = max((masks[i] & need).bit_count() for i in alive)

    def bb(covered: int, chosen: list[int]) -> None:
        nonlocal nodes, best_size, best_chosen
        nodes += 1
        if nodes > node_budget:
            raise _BudgetExhausted
        uncovered = need & ~covered
        if not uncovered:
            if len(chosen) < best_size:
                best_size = len(chosen)
                best_chosen = tuple(sorted(chosen))
            return
        if len(chosen) + ceil(uncovered.bit_count() / max_set_size) >= best_size:
            return
        branch_e, fewest = -1, None
        for e in _bits(uncovered):
            k = len(coverer_ids[e])
            if fewest is None or k < fewest:
                branch_e, fewest = e, k
        order = sorted(coverer_ids[branch_e],
                       key=lambda i: (-(masks[i] & uncovered).bit_count(), i))
        for i in order:
            chosen.append(i)
            bb(covered | masks[i], chosen)
            chosen.pop()
            if len(chosen) + 1 >= best_size:
                break

    def lex_first(pos: int, covered: int, chosen: list[int],
                  pool: list[int], suffix_union: list[int]):
        """First size-best_size cover found in ascending index order."""
        nonlocal nodes
        uncovered = need & ~covered
        if not uncovered:
            return list(chosen)
        slots = best_size - len(chosen)
        if slots <= 0 or uncovered & ~suffix_union[pos]:
            return None
        if ceil(uncovered.bit_count() / max_set_size) > slots:
            return None
        for idx in range(pos, len(pool)):
            i = pool[idx]
            if not masks[i] & uncovered:
                continue
            nodes += 1
            if nodes > node_budget:
                raise _BudgetExhausted
            chosen.append(i)
            found = lex_first(idx + 1, covered | masks[i], chosen, pool, suffix_union)
            chosen.pop()
            if found is not None:
                return found
        return None

    # Phase 1 proves the minimum size; phase 2 re-walks candidates in index
    # order so the first cover of that size is the lexicographic minimum.
    try:
        bb(0, [])
        optimal = True
    except _BudgetExhausted:
        optimal = False
    if optimal:
        try:
            suffix = [0] * (len(alive) + 1)
            for idx in range(len(alive) - 1, -1, -1):
                suffix[idx] = suffix[idx + 1] | masks[alive[idx]]
            lex = lex_first(0, 0, [], alive, suffix)
            if lex is not None:
                best_chosen = tuple(sorted(lex))
        except _BudgetExhausted:
            pass  # size is proven optimal; tie-break is best-effort here

    chosen = tuple(sorted(forced + list(best_chosen)))
    _verify(instance, chosen)
    return CoverSolution(chosen, optimal=optimal, nodes_explored=nodes)
