"""Teaching scenarios, strategies, the Bayesian learner, and episode simulation.

A scenario fixes the learner's mind, the signal system, the candidate
target concepts, and the prior over them.  A strategy maps the realized
target and the parsed history to a distribution over the next raw token.
Episodes interleave teacher emission, prerequisite-gated parsing, the
one-concept acquisition update, and exact Bayesian filtering of the
belief; they record completion (target acquired and identified) and
identification (belief a point mass) times.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import (
    MissingSignalError,
    ScenarioError,
    StrategyError,
    ZeroProbabilityError,
)
from .information import entropy_bits
from .mind import Mind
from .reachability import shortest_chain
from .signals import ParsedSignal, SignalSystem, capacity, parse

__all__ = [
    "POINT_MASS_TOL",
    "Scenario",
    "StrategyKernel",
    "StrategySpec",
    "Round",
    "EpisodeTrace",
    "knowledge_update",
    "state_after",
    "posterior_after",
    "posterior_update",
    "direct_strategy",
    "scripted_strategy",
    "broadcast_strategy",
    "run_episode",
]

# A belief entry this close to one counts as a point mass; completion and
# identification are float events, so exact equality is not usable.
POINT_MASS_TOL = 1e-9

_PRIOR_SUM_TOL = 1e-12
_KERNEL_SUM_TOL = 1e-9

StrategyKernel = Callable[[str, tuple[ParsedSignal, ...]], Mapping[str, float]]


@dataclass(frozen=True)
class Scenario:
    """A teaching problem: mind, signal system, candidate targets, prior."""

    mind: Mind
    system: SignalSystem
    targets: tuple[str, ...]
    prior: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "prior", tuple(float(p) for p in self.prior))
        if not self.targets:
            raise ScenarioError("targets: must be non-empty")
        if len(set(self.targets)) != len(self.targets):
            raise ScenarioError("targets: duplicates are not allowed")
        horizon_mask = self.mind.closure_mask(self.mind.axiom_mask)
        for t in self.targets:
            if t not in self.mind.space:
                raise ScenarioError(f"targets: {t!r} is not in the concept space")
            if not horizon_mask & self.mind.space.bit(t):
                raise ScenarioError(f"targets: {t!r} lies outside the understanding horizon")
            if t not in self.system.image:
                raise ScenarioError(f"targets: no signal token teaches {t!r}")
        if len(self.prior) != len(self.targets):
            raise ScenarioError("prior: must have one weight per target")
        if any(p < 0.0 for p in self.prior):
            raise ScenarioError("prior: weights must be nonnegative")
        if abs(sum(self.prior) - 1.0) > _PRIOR_SUM_TOL:
            raise ScenarioError(f"prior: sums to {sum(self.prior)!r}, not 1")

    @cached_property
    def target_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.targets)}

    @cached_property
    def horizon(self) -> frozenset[str]:
        return self.mind.space.labels(self.mind.closure_mask(self.mind.axiom_mask))

    def prior_of(self, target: str) -> float:
        return self.prior[self.target_index[target]]


def knowledge_update(
    mind: Mind, system: SignalSystem, state: Iterable[str], parsed: ParsedSignal
) -> frozenset[str]:
    """Acquire the parsed token's concept; the null observation changes nothing."""
    current = frozenset(state)
    if parsed is None:
        return current
    return current | {system.concept_of(parsed)}


def state_after(scenario: Scenario, history: Sequence[ParsedSignal]) -> frozenset[str]:
    """The acquired set reached from the axioms along a parsed history."""
    state = frozenset(scenario.mind.axioms)
    for parsed in history:
        state = knowledge_update(scenario.mind, scenario.system, state, parsed)
    return state


def emission_distribution(
    strategy: StrategyKernel, target: str, history: tuple[ParsedSignal, ...]
) -> Mapping[str, float]:
    dist = strategy(target, history)
    total = sum(dist.values())
    if abs(total - 1.0) > _KERNEL_SUM_TOL or any(p < 0.0 for p in dist.values()):
        raise StrategyError(
            f"kernel for target {target!r} at round {len(history) + 1} is not a distribution"
        )
    return dist


def _parsed_likelihood(
    scenario: Scenario,
    strategy: StrategyKernel,
    history: tuple[ParsedSignal, ...],
    state: frozenset[str],
    parsed: ParsedSignal,
) -> list[float]:
    """P(next parsed observation = parsed | target, history), per target."""
    out = []
    for target in scenario.targets:
        dist = emission_distribution(strategy, target, history)
        out.append(
            sum(
                p
                for token, p in dist.items()
                if parse(scenario.mind, scenario.system, token, state) == parsed
            )
        )
    return out


def posterior_after(
    scenario: Scenario, strategy: StrategyKernel, history: Sequence[ParsedSignal]
) -> tuple[float, ...]:
    """Exact filtering of the belief along a parsed history."""
    belief = list(scenario.prior)
    prefix: tuple[ParsedSignal, ...] = ()
    state = frozenset(scenario.mind.axioms)
    for parsed in history:
        like = _parsed_likelihood(scenario, strategy, prefix, state, parsed)
        belief = [b * l for b, l in zip(belief, like)]
        total = sum(belief)
        if total <= 0.0:
            raise ZeroProbabilityError(
                f"history {tuple(prefix) + (parsed,)} has probability zero"
            )
        belief = [b / total for b in belief]
        state = knowledge_update(scenario.mind, scenario.system, state, parsed)
        prefix = prefix + (parsed,)
    return tuple(belief)


def posterior_update(
    scenario: Scenario,
    strategy: StrategyKernel,
    history: Sequence[ParsedSignal],
    parsed: ParsedSignal,
) -> tuple[float, ...]:
    """One Bayes step: the belief after observing ``parsed`` next."""
    return posterior_after(scenario, strategy, tuple(history) + (parsed,))


def direct_strategy(scenario: Scenario) -> StrategyKernel:
    """Walk each target's shortest acquisition chain, then name the target.

    For every target the plan emits one token per chain concept (the
    first token of that concept's fiber) followed by the target's fixed
    representative token, which identifies it in one extra round.  Every
    non-axiom concept in the understanding horizon must carry at least
    one token; axioms are never taught, so they need none.
    """
    mind, system = scenario.mind, scenario.system
    # Axioms are never acquired along a chain, so they need no token.
    for concept in sorted(scenario.horizon - scenario.mind.axioms):
        if not system.fiber(concept):
            raise MissingSignalError(f"no signal token teaches horizon concept {concept!r}")
    plans: dict[str, tuple[str, ...]] = {}
    for target in scenario.targets:
        chain = shortest_chain(mind, target)
        added = [
            next(iter(after - before))
            for before, after in zip(chain, chain[1:])
        ]
        plans[target] = tuple(system.fiber(c)[0] for c in added) + (system.fiber(target)[0],)

    def kernel(target: str, history: tuple[ParsedSignal, ...]) -> Mapping[str, float]:
        plan = plans[target]
        return {plan[min(len(history), len(plan) - 1)]: 1.0}

    return kernel


def scripted_strategy(rows: Mapping[str, Sequence[str]]) -> StrategyKernel:
    """Play a fixed token row per target, ignoring the history content."""
    fixed = {t: tuple(row) for t, row in rows.items()}

    def kernel(target: str, history: tuple[ParsedSignal, ...]) -> Mapping[str, float]:
        try:
            row = fixed[target]
        except KeyError:
            raise StrategyError(f"no script row for target {target!r}") from None
        if len(history) >= len(row):
            raise StrategyError(
                f"script row for {target!r} exhausted at round {len(history) + 1}"
            )
        return {row[len(history)]: 1.0}

    return kernel


def broadcast_strategy(row: Sequence[str]) -> StrategyKernel:
    """Play one shared token row regardless of the target."""
    shared = tuple(row)

    def kernel(target: str, history: tuple[ParsedSignal, ...]) -> Mapping[str, float]:
        if len(history) >= len(shared):
            raise StrategyError(f"broadcast row exhausted at round {len(history) + 1}")
        return {shared[len(history)]: 1.0}

    return kernel


@dataclass(frozen=True)
class StrategySpec:
    """Declarative strategy description, as it appears in scenario files."""

    kind: str  # "direct" | "scripted" | "broadcast"
    rows: Optional[Mapping[str, tuple[str, ...]]] = None
    row: Optional[tuple[str, ...]] = None

    def build(self, scenario: Scenario) -> StrategyKernel:
        if self.kind == "direct":
            return direct_strategy(scenario)
        if self.kind == "scripted":
            if self.rows is None:
                raise StrategyError("scripted strategy needs per-target rows")
            return scripted_strategy(self.rows)
        if self.kind == "broadcast":
            if self.row is None:
                raise StrategyError("broadcast strategy needs a shared row")
            return broadcast_strategy(self.row)
        raise StrategyError(f"unknown strategy kind {self.kind!r}")


@dataclass(frozen=True)
class Round:
    """One simulated round: emission, parse, and the updated learning state."""

    t: int
    emitted: str
    parsed: ParsedSignal
    state: frozenset[str]
    belief: tuple[float, ...]
    entropy_bits: float
    capacity_bits: float


@dataclass(frozen=True)
class EpisodeTrace:
    """A full simulated episode, reproducible from its seed."""

    theta: str
    seed: int
    horizon: int
    rounds: tuple[Round, ...]
    tau: Optional[int]
    tau_id: Optional[int]


def _sample(rng: random.Random, items: Sequence, probs: Sequence[float]):
    u = rng.random()
    acc = 0.0
    for item, p in zip(items, probs):
        acc += p
        if u < acc:
            return item
    return items[-1]


def run_episode(
    scenario: Scenario,
    strategy: StrategyKernel,
    horizon: int,
    seed: int,
    *,
    theta: Optional[str] = None,
) -> EpisodeTrace:
    """Simulate one teaching episode for ``horizon`` rounds.

    Randomness is split into named substreams so traces are bit-exact
    reproducible: the target is drawn from ``Random(f"{seed}:theta")`` and
    round ``t`` from ``Random(f"{seed}:round:{t}")``.  Pass ``theta`` to
    pin the target instead of sampling it.  The belief is filtered
    exactly, never estimated.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if theta is None:
        theta = _sample(random.Random(f"{seed}:theta"), scenario.targets, scenario.prior)
    elif theta not in scenario.target_index:
        raise ScenarioError(f"pinned target {theta!r} is not among the scenario targets")

    theta_idx = scenario.target_index[theta]
    state = frozenset(scenario.mind.axioms)
    belief = list(scenario.prior)
    history: tuple[ParsedSignal, ...] = ()
    tau: Optional[int] = None
    tau_id: Optional[int] = None

    def identified() -> bool:
        return max(belief) >= 1.0 - POINT_MASS_TOL

    if identified():
        tau_id = 0
        if theta in state and belief[theta_idx] >= 1.0 - POINT_MASS_TOL:
            tau = 0

    rounds: list[Round] = []
    for t in range(1, horizon + 1):
        dist = emission_distribution(strategy, theta, history)
        tokens = [tok for tok in dist if dist[tok] > 0.0]
        emitted = _sample(
            random.Random(f"{seed}:round:{t}"), tokens, [dist[tok] for tok in tokens]
        )
        parsed = parse(scenario.mind, scenario.system, emitted, state)
        like = _parsed_likelihood(scenario, strategy, history, state, parsed)
        belief = [b * l for b, l in zip(belief, like)]
        total = sum(belief)
        belief = [b / total for b in belief]
        state = knowledge_update(scenario.mind, scenario.system, state, parsed)
        history = history + (parsed,)
        rounds.append(
            Round(
                t=t,
                emitted=emitted,
                parsed=parsed,
                state=state,
                belief=tuple(belief),
                entropy_bits=entropy_bits(belief),
                capacity_bits=capacity(scenario.mind, scenario.system, state),
            )
        )
        if tau_id is None and identified():
            tau_id = t
        if tau is None and theta in state and belief[theta_idx] >= 1.0 - POINT_MASS_TOL:
            tau = t

    return EpisodeTrace(
        theta=theta,
        seed=seed,
        horizon=horizon,
        rounds=tuple(rounds),
        tau=tau,
        tau_id=tau_id,
    )
