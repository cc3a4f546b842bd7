"""The reachable state family and its learning-space structure.

A knowledge state is reachable when it can be built from the axioms by
adding one currently-unlockable concept at a time.  The family of all
such states is union-closed, accessible above the axioms, and spans from
the axiom set up to the understanding horizon; shifting every state by
the axioms yields an antimatroid.  The converse also holds: any family
with those properties is the reachable family of a canonical mind.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Mapping, Optional, Union

from .errors import CapExceededError, NotLearningSpaceError, UnreachableConceptError
from .mind import ConceptSpace, ExpansionRule, Mind, iter_bits

__all__ = [
    "DEFAULT_STATE_CAP",
    "ReachableFamily",
    "LearningSpaceReport",
    "enumerate_reachable",
    "check_learning_space",
    "canonical_rules",
    "structural_distance",
    "shortest_chain",
]

DEFAULT_STATE_CAP = 1 << 20


def default_state_cap() -> int:
    """The enumeration cap, overridable through NOESIS_NODE_CAP."""
    raw = os.environ.get("NOESIS_NODE_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_STATE_CAP


@dataclass(frozen=True, eq=False)
class ReachableFamily:
    """All reachable states of a mind, with one-step adjacency.

    ``addable_masks[state]`` holds the concepts that can be acquired next
    from ``state``; following any such move stays inside the family.
    States are stored as bit masks over ``space``; the accessors translate
    to label sets.  Immutable once built.
    """

    space: ConceptSpace
    axioms: frozenset[str]
    horizon: frozenset[str]
    state_masks: frozenset[int]
    addable_masks: Mapping[int, int] = field(repr=False)

    @property
    def minimum(self) -> frozenset[str]:
        return self.axioms

    @property
    def maximum(self) -> frozenset[str]:
        return self.horizon

    def __len__(self) -> int:
        return len(self.state_masks)

    def __contains__(self, state: object) -> bool:
        if isinstance(state, int):
            return state in self.state_masks
        if isinstance(state, (set, frozenset)):
            return self.space.mask(state) in self.state_masks
        return False

    def states(self) -> list[frozenset[str]]:
        """All states as label sets, sorted by size then by sorted labels."""
        out = [self.space.labels(m) for m in self.state_masks]
        out.sort(key=lambda s: (len(s), tuple(sorted(s))))
        return out

    def addable(self, state: Iterable[str]) -> frozenset[str]:
        mask = self.space.mask(state)
        if mask not in self.state_masks:
            raise KeyError(f"state {sorted(state)} is not reachable")
        return self.space.labels(self.addable_masks[mask])


def enumerate_reachable(mind: Mind, *, cap: Optional[int] = None) -> ReachableFamily:
    """Breadth-first enumeration of every reachable state of ``mind``.

    Raises :class:`CapExceededError` once more than ``cap`` states are
    discovered (the family can be exponential in the concept count).
    """
    limit = default_state_cap() if cap is None else cap
    start = mind.axiom_mask
    addable: dict[int, int] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        state = queue.popleft()
        moves = mind.expand_mask(state) & ~state
        addable[state] = moves
        for bit in iter_bits(moves):
            nxt = state | bit
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > limit:
                    raise CapExceededError(
                        f"reachable family exceeds {limit} states; raise the cap to continue"
                    )
                queue.append(nxt)
    return ReachableFamily(
        space=mind.space,
        axioms=mind.space.labels(start),
        horizon=mind.space.labels(mind.closure_mask(start)),
        state_masks=frozenset(seen),
        addable_masks=addable,
    )


@dataclass(frozen=True)
class LearningSpaceReport:
    """Outcome of the axiom-floor, accessibility, and union-closure checks."""

    has_axiom_floor: bool
    accessible: bool
    union_closed: bool
    shifted_antimatroid: bool

    @property
    def passed(self) -> bool:
        return self.has_axiom_floor and self.accessible and self.union_closed


FamilyLike = Union[ReachableFamily, Iterable[AbstractSet[str]]]


def _family_sets(family: FamilyLike) -> list[frozenset[str]]:
    if isinstance(family, ReachableFamily):
        return [family.space.labels(m) for m in family.state_masks]
    return [frozenset(s) for s in family]


def check_learning_space(family: FamilyLike, axioms: AbstractSet[str]) -> LearningSpaceReport:
    """Verify the learning-space axioms on an arbitrary state family.

    The family need not come from a mind; degenerate inputs are accepted
    so negative examples (union-closed but inaccessible) can be tested.
    The shifted-antimatroid verdict re-runs the antimatroid axioms on the
    family with the axioms removed from every state, rather than being
    inferred from the other three flags.
    """
    states = set(_family_sets(family))
    base = frozenset(axioms)

    floor = base in states and all(base <= s for s in states)
    accessible = all(
        any(s - {x} in states for x in s - base) for s in states if s != base
    )
    union_closed = all(a | b in states for a in states for b in states)

    shifted = {s - base for s in states}
    shifted_ok = (
        frozenset() in shifted
        and all(
            any(s - {x} in shifted for x in s) for s in shifted if s
        )
        and all(a | b in shifted for a in shifted for b in shifted)
    )
    return LearningSpaceReport(
        has_axiom_floor=floor,
        accessible=accessible,
        union_closed=union_closed,
        shifted_antimatroid=shifted_ok,
    )


def canonical_rules(
    family: FamilyLike, space: ConceptSpace, axioms: AbstractSet[str]
) -> tuple[ExpansionRule, ...]:
    """The canonical rule set whose reachable family is exactly ``family``.

    One rule per covering pair: whenever a family state plus one concept
    is again a family state, the state itself becomes the prerequisite
    set of that concept.  Raises :class:`NotLearningSpaceError` when the
    family fails :func:`check_learning_space`.
    """
    report = check_learning_space(family, axioms)
    if not report.passed:
        raise NotLearningSpaceError(
            "family is not an axiom-based learning space: "
            f"floor={report.has_axiom_floor} accessible={report.accessible} "
            f"union_closed={report.union_closed}"
        )
    states = set(_family_sets(family))
    rules: list[ExpansionRule] = []
    for s in sorted(states, key=lambda s: (len(s), tuple(sorted(s)))):
        for c in space.concepts:
            if c not in s and (s | {c}) in states:
                rules.append(ExpansionRule(s, c))
    return tuple(rules)


def _bfs_to_concept(mind: Mind, concept: str):
    """BFS over reachable states; stops at the first state containing ``concept``.

    Expansion follows concept order, so the discovered chain is the
    deterministic tie-break choice.  Returns the chain of masks or None.
    """
    target_bit = mind.space.bit(concept)
    start = mind.axiom_mask
    if start & target_bit:
        return [start]
    parent: dict[int, int] = {start: -1}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for bit in iter_bits(mind.expand_mask(state) & ~state):
            nxt = state | bit
            if nxt in parent:
                continue
            parent[nxt] = state
            if bit == target_bit:
                chain = [nxt]
                while parent[chain[-1]] != -1:
                    chain.append(parent[chain[-1]])
                chain.reverse()
                return chain
            queue.append(nxt)
    return None


def structural_distance(mind: Mind, concept: str) -> Optional[int]:
    """Length of the shortest acquisition chain reaching ``concept``.

    Zero when the concept is an axiom; None when it lies outside the
    understanding horizon and no chain can reach it.
    """
    if not mind.closure_mask(mind.axiom_mask) & mind.space.bit(concept):
        return None
    chain = _bfs_to_concept(mind, concept)
    assert chain is not None  # concept is in the horizon, so BFS must reach it
    return len(chain) - 1


def shortest_chain(mind: Mind, concept: str) -> tuple[frozenset[str], ...]:
    """A minimum-length witnessing chain from the axioms to ``concept``.

    Deterministic: ties are broken by concept order at every step.
    Raises :class:`UnreachableConceptError` outside the horizon.
    """
    if not mind.closure_mask(mind.axiom_mask) & mind.space.bit(concept):
        raise UnreachableConceptError(f"concept {concept!r} is outside the understanding horizon")
    chain = _bfs_to_concept(mind, concept)
    assert chain is not None
    return tuple(mind.space.labels(m) for m in chain)
