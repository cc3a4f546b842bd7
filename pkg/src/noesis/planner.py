"""Fixed-horizon value bounds, thresholds, allocation, and broadcast penalties.

The optimal fixed-horizon success probability is bracketed by a
structural upper bound (only targets within reach can be completed) and
a constructive lower bound (walk the target's chain, then name it).  On
tiny instances the exact optimum is recovered by exhaustive search over
deterministic history-dependent strategies; success probability is
affine in each round's kernel probabilities, so the supremum over
stochastic strategies is attained at a deterministic one and the
restriction loses nothing.  The broadcast construction realizes the
linear penalty of teaching incompatible minds with one shared sequence.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import CapExceededError, MissingSignalError, UnreachableConceptError
from .mind import ConceptSpace, ExpansionRule, Mind
from .reachability import shortest_chain, structural_distance
from .signals import SignalSystem, parse
from .teaching import Scenario

__all__ = [
    "ValueEnvelope",
    "AllocationPlan",
    "BroadcastInstance",
    "value_upper",
    "value_lower",
    "value_envelope",
    "deterministic_value",
    "exact_value_tiny",
    "allocate",
    "broadcast_construct",
    "broadcast_check",
    "broadcast_min_length",
]


def _distances(scenario: Scenario) -> list[int]:
    out = []
    for target in scenario.targets:
        dist = structural_distance(scenario.mind, target)
        assert dist is not None  # scenario targets are confined to the horizon
        out.append(dist)
    return out


def value_upper(scenario: Scenario, t: int) -> float:
    """Prior mass of targets whose structural distance is at most ``t``."""
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    dists = _distances(scenario)
    return sum(p for p, d in zip(scenario.prior, dists) if d <= t)


def _direct_feasible(scenario: Scenario) -> bool:
    """Whether every prior-positive target's chain can be signaled."""
    for target, weight in zip(scenario.targets, scenario.prior):
        if weight <= 0.0:
            continue
        chain = shortest_chain(scenario.mind, target)
        for before, after in zip(chain, chain[1:]):
            if not scenario.system.fiber(next(iter(after - before))):
                return False
    return True


def value_lower(scenario: Scenario, t: int) -> float:
    """Success probability guaranteed by the chain-then-name strategy.

    Takes the larger of the tail bound ``1 - E[completion]/t`` and the
    exact mass of targets that strategy finishes within ``t`` rounds.
    The bound claims nothing (returns 0) when some chain concept of a
    prior-positive target carries no token, since the strategy is then
    unplayable and completion can be impossible outright.
    """
    if t < 1:
        raise ValueError("horizon must be at least 1")
    if not _direct_feasible(scenario):
        return 0.0
    dists = _distances(scenario)
    expected_direct = sum(p * (d + 1) for p, d in zip(scenario.prior, dists))
    markov = max(0.0, 1.0 - expected_direct / t)
    exact_direct = sum(p for p, d in zip(scenario.prior, dists) if d + 1 <= t)
    return max(markov, exact_direct)


@dataclass(frozen=True)
class ValueEnvelope:
    """Bounds (and optionally the exact value) of the horizon-``t`` success probability."""

    t: int
    upper: float
    lower: float
    exact: Optional[float] = None

    def __post_init__(self) -> None:
        slack = 1e-12
        if not (0.0 - slack <= self.lower <= self.upper + slack <= 1.0 + 2 * slack):
            raise ValueError(f"inconsistent envelope: {self}")
        if self.exact is not None and not (
            self.lower - slack <= self.exact <= self.upper + slack
        ):
            raise ValueError(f"exact value escapes the envelope: {self}")


def value_envelope(scenario: Scenario, t: int, *, exact: bool = False) -> ValueEnvelope:
    """Bundle the bounds, with the exhaustive value when requested."""
    lower = value_lower(scenario, t) if t >= 1 else 0.0
    return ValueEnvelope(
        t=t,
        upper=value_upper(scenario, t),
        lower=lower,
        exact=exact_value_tiny(scenario, t) if exact else None,
    )


def deterministic_value(mind: Mind, system: SignalSystem, goal: str, t: int) -> int:
    """Fixed-horizon acquisition value for a known target: 0 below its depth, else 1."""
    if not mind.closure_mask(mind.axiom_mask) & mind.space.bit(goal):
        raise UnreachableConceptError(f"target {goal!r} is outside the understanding horizon")
    chain = shortest_chain(mind, goal)
    for before, after in zip(chain, chain[1:]):
        concept = next(iter(after - before))
        if not system.fiber(concept):
            raise MissingSignalError(f"no signal token teaches chain concept {concept!r}")
    return 0 if t < len(chain) - 1 else 1


_EXACT_MAX_TARGETS = 3
_EXACT_MAX_TOKENS = 3
_EXACT_MAX_HORIZON = 3
_EXACT_OP_CAP = 10_000_000


def exact_value_tiny(
    scenario: Scenario,
    t: int,
    *,
    op_cap: int = _EXACT_OP_CAP,
) -> float:
    """Exact optimal success probability on a tiny instance.

    Searches all deterministic history-dependent strategies by
    maximizing independently over the teacher's choice at every reachable
    history (one token per live target).  Hard caps keep the search
    tractable; exceeding them raises :class:`CapExceededError`.
    """
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    if len(scenario.targets) > _EXACT_MAX_TARGETS:
        raise CapExceededError(f"exact search caps targets at {_EXACT_MAX_TARGETS}")
    if len(scenario.system.tokens) > _EXACT_MAX_TOKENS:
        raise CapExceededError(f"exact search caps the alphabet at {_EXACT_MAX_TOKENS}")
    if t > _EXACT_MAX_HORIZON:
        raise CapExceededError(f"exact search caps the horizon at {_EXACT_MAX_HORIZON}")

    mind, system = scenario.mind, scenario.system
    tokens = system.tokens
    ops = 0

    def best(state: frozenset[str], joint: tuple[float, ...], depth: int) -> float:
        nonlocal ops
        live = [i for i, p in enumerate(joint) if p > 0.0]
        mass = sum(joint[i] for i in live)
        if len(live) == 1 and scenario.targets[live[0]] in state:
            return mass  # identified and acquired: completed at this depth
        if depth == t:
            return 0.0
        value = 0.0
        for assignment in itertools.product(range(len(tokens)), repeat=len(live)):
            ops += 1
            if ops > op_cap:
                raise CapExceededError(f"exact search exceeded {op_cap} strategy evaluations")
            groups: dict[Optional[str], list[float]] = {}
            for i, tok_idx in zip(live, assignment):
                parsed = parse(mind, system, tokens[tok_idx], state)
                row = groups.setdefault(parsed, [0.0] * len(joint))
                row[i] += joint[i]
            total = 0.0
            for parsed, sub in groups.items():
                child_state = state if parsed is None else state | {system.concept_of(parsed)}
                total += best(child_state, tuple(sub), depth + 1)
            value = max(value, total)
        return value

    return best(frozenset(mind.axioms), scenario.prior, 0)


@dataclass(frozen=True)
class AllocationPlan:
    """Concentrated allocation of a round budget across identical learners."""

    learners: int
    budget: int
    depth: int
    rounds: tuple[int, ...]
    completed: int
    even_split_rounds: float
    even_split_completed: int


def allocate(learners: int, budget: int, depth: int) -> AllocationPlan:
    """Give ``depth`` rounds to as many learners as the budget affords.

    The concentrated plan completes ``min(learners, budget // depth)``
    learners; the even split completes everyone when each learner clears
    the depth threshold and nobody otherwise.
    """
    if learners < 1:
        raise ValueError("need at least one learner")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    completed = min(learners, budget // depth)
    rounds = (depth,) * completed + (0,) * (learners - completed)
    even_rounds = budget / learners
    even_completed = learners if budget // learners >= depth else 0
    return AllocationPlan(
        learners=learners,
        budget=budget,
        depth=depth,
        rounds=rounds,
        completed=completed,
        even_split_rounds=even_rounds,
        even_split_completed=even_completed,
    )


@dataclass(frozen=True)
class BroadcastInstance:
    """Incompatible minds sharing axioms and a target, plus the tight sequence."""

    k: int
    depth: int
    space: ConceptSpace
    axioms: frozenset[str]
    minds: tuple[Mind, ...]
    system: SignalSystem
    target: str
    tight_sequence: tuple[str, ...]

    def __post_init__(self) -> None:
        assert len(self.tight_sequence) == self.k * (self.depth - 1) + 1


_BROADCAST_CONCEPT_CAP = 10_000


def broadcast_construct(k: int, depth: int) -> BroadcastInstance:
    """Build ``k`` minds with private depth-``depth`` chains to a shared target.

    Mind ``i`` unlocks the target only through its own chain of private
    prerequisites; tokens teaching one mind's chain are noise to every
    other mind.  The returned tight sequence walks each chain in turn and
    names the target once, using ``k * (depth - 1) + 1`` rounds.
    """
    if k < 2 or depth < 2:
        raise ValueError("need at least two minds and chains of length two")
    if k * (depth - 1) + 2 > _BROADCAST_CONCEPT_CAP:
        raise CapExceededError(f"instance needs more than {_BROADCAST_CONCEPT_CAP} concepts")
    private = {(i, j): f"p{i}_{j}" for i in range(1, k + 1) for j in range(1, depth)}
    concepts = ["a"] + [private[(i, j)] for i in range(1, k + 1) for j in range(1, depth)] + ["g"]
    space = ConceptSpace(tuple(concepts))
    minds = []
    for i in range(1, k + 1):
        chain = ["a"] + [private[(i, j)] for j in range(1, depth)] + ["g"]
        rules = tuple(
            ExpansionRule(frozenset({chain[j]}), chain[j + 1]) for j in range(len(chain) - 1)
        )
        minds.append(Mind(space=space, axioms=frozenset({"a"}), rules=rules))
    pairs = [(f"z_{c}", c) for c in concepts if c != "a"]
    system = SignalSystem.from_pairs(pairs)
    tight = tuple(
        f"z_{private[(i, j)]}" for i in range(1, k + 1) for j in range(1, depth)
    ) + ("z_g",)
    return BroadcastInstance(
        k=k,
        depth=depth,
        space=space,
        axioms=frozenset({"a"}),
        minds=tuple(minds),
        system=system,
        target="g",
        tight_sequence=tight,
    )


def broadcast_check(instance: BroadcastInstance, sequence: Sequence[str]) -> tuple[bool, ...]:
    """Replay a shared token sequence for every mind; True where the target lands."""
    space = instance.space
    target_bit = space.bit(instance.target)
    states = [mind.axiom_mask for mind in instance.minds]
    for token in sequence:
        concept_bit = space.bit(instance.system.concept_of(token))
        for i, mind in enumerate(instance.minds):
            if mind.expand_mask(states[i]) & concept_bit:
                states[i] |= concept_bit
    return tuple(bool(s & target_bit) for s in states)


def broadcast_min_length(
    instance: BroadcastInstance, *, cap: int = 1 << 20
) -> Optional[int]:
    """Length of the shortest shared sequence teaching the target to every mind.

    Breadth-first search over tuples of per-mind states, one transition
    per token; the shared sequence is recovered implicitly as the path
    depth.  Returns None when no sequence works, and raises
    :class:`CapExceededError` past ``cap`` visited product states.
    """
    space = instance.space
    target_bit = space.bit(instance.target)
    token_bits = [space.bit(c) for c in instance.system.targets]

    def done(states: tuple[int, ...]) -> bool:
        return all(s & target_bit for s in states)

    start = tuple(mind.axiom_mask for mind in instance.minds)
    if done(start):
        return 0
    seen = {start}
    frontier = deque([(start, 0)])
    while frontier:
        states, depth = frontier.popleft()
        for bit in token_bits:
            nxt = tuple(
                s | bit if mind.expand_mask(s) & bit else s
                for s, mind in zip(states, instance.minds)
            )
            if nxt in seen:
                continue
            if done(nxt):
                return depth + 1
            seen.add(nxt)
            if len(seen) > cap:
                raise CapExceededError(f"product-state search exceeded {cap} states")
            frontier.append((nxt, depth + 1))
    return None
