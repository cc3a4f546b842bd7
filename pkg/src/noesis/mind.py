"""Concept spaces, minds, one-step expansion, and closure computation.

A mind couples a finite concept space with a set of axiom concepts and a
list of expansion rules.  Each rule states that mastering a finite
prerequisite set unlocks one further concept.  The induced one-step
expansion operator and its least fixed point (the closure) are the
primitives everything else in the package is built on.

Concept sets are manipulated internally as bit masks over the space's
concept ordering; the public functions accept and return plain
``frozenset`` values of concept labels.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import AbstractSet, Callable, Iterable

from .errors import (
    CapExceededError,
    ClosureAxiomError,
    InvalidMindError,
    UnknownConceptError,
)

__all__ = [
    "ConceptSpace",
    "ExpansionRule",
    "Mind",
    "ValidationReport",
    "validate_mind",
    "one_step_expansion",
    "closure",
    "closure_iterates",
    "understanding_horizon",
    "is_ordered",
    "rules_from_closure",
]


def _check_label(label: str, kind: str) -> None:
    if not isinstance(label, str) or not label or any(ch.isspace() for ch in label):
        raise InvalidMindError(f"{kind} must be a non-empty token without whitespace, got {label!r}")


def iter_bits(mask: int):
    """Yield the individual set bits of ``mask``, lowest first."""
    while mask:
        bit = mask & -mask
        yield bit
        mask ^= bit


@dataclass(frozen=True)
class ConceptSpace:
    """An ordered, finite collection of distinct concept labels.

    The ordering is significant: it fixes the bit layout of every concept
    set and the tie-break order used by deterministic constructions.
    """

    concepts: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "concepts", tuple(self.concepts))
        if not self.concepts:
            raise InvalidMindError("concept space must be non-empty")
        seen: set[str] = set()
        for label in self.concepts:
            _check_label(label, "concept label")
            if label in seen:
                raise InvalidMindError(f"duplicate concept label {label!r}")
            seen.add(label)

    @cached_property
    def index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.concepts)}

    @property
    def full_mask(self) -> int:
        return (1 << len(self.concepts)) - 1

    def __len__(self) -> int:
        return len(self.concepts)

    def __contains__(self, label: object) -> bool:
        return label in self.index

    def bit(self, label: str) -> int:
        try:
            return 1 << self.index[label]
        except KeyError:
            raise UnknownConceptError(f"unknown concept {label!r}") from None

    def mask(self, labels: Iterable[str]) -> int:
        out = 0
        for label in labels:
            out |= self.bit(label)
        return out

    def labels(self, mask: int) -> frozenset[str]:
        return frozenset(self.concepts[bit.bit_length() - 1] for bit in iter_bits(mask))

    def sorted_labels(self, mask: int) -> tuple[str, ...]:
        """Labels of ``mask`` in space order."""
        return tuple(self.concepts[bit.bit_length() - 1] for bit in iter_bits(mask))


@dataclass(frozen=True)
class ExpansionRule:
    """One prerequisite rule: knowing every concept in ``prereqs`` unlocks ``target``."""

    prereqs: frozenset[str]
    target: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "prereqs", frozenset(self.prereqs))


@dataclass(frozen=True)
class Mind:
    """A concept space together with axiom concepts and expansion rules.

    Construction is permissive so that :func:`validate_mind` can diagnose
    ill-formed inputs; every operation that interprets the rules raises
    :class:`InvalidMindError` unless the validation report is clean.
    Instances are immutable and safe to share across threads.
    """

    space: ConceptSpace
    axioms: frozenset[str]
    rules: tuple[ExpansionRule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "axioms", frozenset(self.axioms))
        object.__setattr__(self, "rules", tuple(self.rules))

    @cached_property
    def _report(self) -> "ValidationReport":
        return validate_mind(self)

    @cached_property
    def _compiled(self) -> "_CompiledMind":
        if not self._report.accepted:
            raise InvalidMindError(f"mind rejected by validation: {self._report.summary()}")
        space = self.space
        seen: set[ExpansionRule] = set()
        compiled: list[tuple[int, int]] = []
        for rule in self.rules:
            if rule in seen:
                continue
            seen.add(rule)
            compiled.append((space.mask(rule.prereqs), space.bit(rule.target)))
        return _CompiledMind(
            axiom_mask=space.mask(self.axioms),
            rules=tuple(compiled),
            rule_objects=tuple(r for r in dict.fromkeys(self.rules)),
        )

    @property
    def effective_rules(self) -> tuple[ExpansionRule, ...]:
        """The rule list with duplicates removed, in first-occurrence order."""
        return self._compiled.rule_objects

    @property
    def axiom_mask(self) -> int:
        return self._compiled.axiom_mask

    def require_state(self, state: Iterable[str]) -> int:
        """Convert a concept set to a mask, rejecting unknown labels."""
        return self.space.mask(state)

    def expand_mask(self, mask: int) -> int:
        out = mask
        for prereq_mask, target_bit in self._compiled.rules:
            if prereq_mask & ~mask == 0:
                out |= target_bit
        return out

    def closure_mask(self, start: int) -> int:
        """Least fixed point of the expansion operator containing ``start``.

        Forward chaining with per-rule missing-prerequisite counters; each
        rule is touched a constant number of times per prerequisite.
        """
        rules = self._compiled.rules
        known = start
        missing: list[int] = []
        waiting: dict[int, list[int]] = defaultdict(list)
        stack: list[int] = []
        for ri, (prereq_mask, target_bit) in enumerate(rules):
            gap = prereq_mask & ~start
            missing.append(gap.bit_count())
            if gap == 0:
                if not target_bit & known:
                    stack.append(target_bit)
            else:
                for bit in iter_bits(gap):
                    waiting[bit].append(ri)
        while stack:
            bit = stack.pop()
            if bit & known:
                continue
            known |= bit
            for ri in waiting.get(bit, ()):
                missing[ri] -= 1
                if missing[ri] == 0:
                    target_bit = rules[ri][1]
                    if not target_bit & known:
                        stack.append(target_bit)
        return known


@dataclass(frozen=True)
class _CompiledMind:
    axiom_mask: int
    rules: tuple[tuple[int, int], ...]  # (prerequisite mask, target bit)
    rule_objects: tuple[ExpansionRule, ...]


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostic findings for a candidate mind.

    ``unknown_concepts`` pairs a rule index with the offending label;
    axiom findings use rule index -1.  ``degenerate_rules`` lists rules
    whose target already sits among its prerequisites.  A mind is
    accepted iff every list is empty.
    """

    axioms_outside_space: tuple[str, ...]
    unknown_concepts: tuple[tuple[int, str], ...]
    degenerate_rules: tuple[int, ...]
    duplicate_rules: tuple[int, ...]

    @property
    def accepted(self) -> bool:
        return not (
            self.axioms_outside_space
            or self.unknown_concepts
            or self.degenerate_rules
            or self.duplicate_rules
        )

    def summary(self) -> str:
        parts = []
        if self.axioms_outside_space:
            parts.append(f"axioms outside space: {sorted(self.axioms_outside_space)}")
        if self.unknown_concepts:
            parts.append(f"unknown concepts in rules: {list(self.unknown_concepts)}")
        if self.degenerate_rules:
            parts.append(f"degenerate rules (target in prereqs) at indices {list(self.degenerate_rules)}")
        if self.duplicate_rules:
            parts.append(f"duplicate rules at indices {list(self.duplicate_rules)}")
        return "; ".join(parts) if parts else "accepted"


def validate_mind(mind: Mind) -> ValidationReport:
    """Check a mind's construction invariants without raising."""
    space = mind.space
    bad_axioms = tuple(sorted(a for a in mind.axioms if a not in space))
    unknown: list[tuple[int, str]] = []
    degenerate: list[int] = []
    duplicates: list[int] = []
    seen: set[ExpansionRule] = set()
    for i, rule in enumerate(mind.rules):
        for label in sorted(rule.prereqs):
            if label not in space:
                unknown.append((i, label))
        if rule.target not in space:
            unknown.append((i, rule.target))
        if rule.target in rule.prereqs:
            degenerate.append(i)
        if rule in seen:
            duplicates.append(i)
        seen.add(rule)
    return ValidationReport(
        axioms_outside_space=bad_axioms,
        unknown_concepts=tuple(unknown),
        degenerate_rules=tuple(degenerate),
        duplicate_rules=tuple(duplicates),
    )


def one_step_expansion(mind: Mind, state: Iterable[str]) -> frozenset[str]:
    """Add every concept with a rule whose prerequisites are all in ``state``."""
    mask = mind.require_state(state)
    return mind.space.labels(mind.expand_mask(mask))


def closure(mind: Mind, state: Iterable[str]) -> frozenset[str]:
    """Least fixed point of one-step expansion containing ``state``."""
    mask = mind.require_state(state)
    return mind.space.labels(mind.closure_mask(mask))


def closure_iterates(mind: Mind, state: Iterable[str]) -> list[frozenset[str]]:
    """The strictly growing iteration sequence of one-step expansion.

    Runs the naive pass-until-stable loop and returns every distinct
    iterate, starting at ``state`` and ending at the closure.  The loop
    stabilizes after at most ``len(space)`` strict steps and must agree
    with the worklist computation used by :func:`closure`.
    """
    mask = mind.require_state(state)
    seq = [mask]
    while True:
        nxt = mind.expand_mask(mask)
        if nxt == mask:
            break
        seq.append(nxt)
        mask = nxt
    return [mind.space.labels(m) for m in seq]


def understanding_horizon(mind: Mind) -> frozenset[str]:
    """Everything derivable in principle, the closure of the axioms."""
    return mind.space.labels(mind.closure_mask(mind.axiom_mask))


def is_ordered(mind: Mind, state: Iterable[str], concept: str) -> bool:
    """True iff ``concept`` is known or unlocked by one rule firing at ``state``."""
    mask = mind.require_state(state)
    return bool(mind.expand_mask(mask) & mind.space.bit(concept))


_ORACLE_SPACE_CAP = 12


def rules_from_closure(
    space: ConceptSpace,
    closure_oracle: Callable[[frozenset[str]], AbstractSet[str]],
    *,
    max_concepts: int = _ORACLE_SPACE_CAP,
) -> tuple[ExpansionRule, ...]:
    """Present an abstract closure operator as an expansion-rule set.

    The oracle is tabulated on every subset of the space and checked for
    extension, idempotence, and monotonicity (single-concept steps imply
    the general case once all subsets are tabulated).  The returned rules
    are ``(S, c)`` for every subset ``S`` and every ``c`` in
    ``oracle(S) - S``; the closure they induce agrees with the oracle on
    every subset.
    """
    n = len(space)
    if n > max_concepts:
        raise CapExceededError(f"oracle tabulation needs 2^{n} subsets, cap is 2^{max_concepts}")
    table: list[int] = []
    for m in range(1 << n):
        out = closure_oracle(space.labels(m))
        table.append(space.mask(out))
    for m in range(1 << n):
        if m & ~table[m]:
            raise ClosureAxiomError(
                f"extension fails: oracle drops {sorted(space.labels(m & ~table[m]))} from {sorted(space.labels(m))}"
            )
        if table[table[m]] != table[m]:
            raise ClosureAxiomError(
                f"idempotence fails on {sorted(space.labels(m))}"
            )
        for bit in iter_bits(space.full_mask & ~m):
            if table[m] & ~table[m | bit]:
                raise ClosureAxiomError(
                    f"monotonicity fails between {sorted(space.labels(m))} and "
                    f"{sorted(space.labels(m | bit))}"
                )
    rules: list[ExpansionRule] = []
    for m in range(1 << n):
        prereqs = space.labels(m)
        for bit in iter_bits(table[m] & ~m):
            rules.append(ExpansionRule(prereqs, space.concepts[bit.bit_length() - 1]))
    return tuple(rules)
