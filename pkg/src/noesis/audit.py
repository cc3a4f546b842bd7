"""Exact history-tree computation and verification of the information laws.

The tree enumerates every positive-probability parsed history up to a
horizon, carrying exact joint probabilities with the latent target, the
deterministic acquired state, the filtered belief, and its entropy.  On
top of it, :func:`audit_all` verifies, node by node, the package's
information laws: the entropy-drop identity, the supermartingale
property of posterior entropy, the per-state capacity bound, the
erasure/informative dichotomy of parsing, the futility of rephrasing
unordered concepts, the total-information identity at identification,
the trajectory capacity budget, and the global floor on expected
completion time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import CapExceededError, InformationLawError
from .information import entropy_bits, mutual_information_bits
from .reachability import enumerate_reachable, structural_distance
from .signals import ParsedSignal, capacity, max_capacity, parse
from .teaching import Scenario, StrategyKernel, emission_distribution, knowledge_update

__all__ = [
    "AUDIT_TOL",
    "DEFAULT_NODE_CAP",
    "HistoryNode",
    "HistoryTree",
    "AuditReport",
    "LawVerdict",
    "build_history_tree",
    "entropy_bits",
    "round_mutual_info",
    "round_mutual_info_from_joint",
    "audit_all",
]

AUDIT_TOL = 1e-9
# Point-mass detection inside the tree; deterministic kernels produce
# exact 0/1 beliefs, so this is far tighter than the audit tolerance.
_EXACT_TOL = 1e-12

DEFAULT_NODE_CAP = 200_000


def default_node_cap() -> int:
    raw = os.environ.get("NOESIS_NODE_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_NODE_CAP


@dataclass(eq=False)
class HistoryNode:
    """One positive-probability parsed history.

    ``joint[i]`` is the absolute probability of target ``i`` occurring
    together with this history; ``emission[i][j]`` is the conditional
    probability, given the history, of target ``i`` and the teacher
    emitting token ``j`` next (None at the horizon).
    """

    history: tuple[ParsedSignal, ...]
    prob: float
    state: frozenset[str]
    joint: tuple[float, ...]
    belief: tuple[float, ...]
    entropy_bits: float
    emission: Optional[tuple[tuple[float, ...], ...]]
    children: dict[ParsedSignal, "HistoryNode"] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.history)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class HistoryTree:
    """The exhaustive tree of parsed histories for one scenario and strategy."""

    scenario: Scenario
    horizon: int
    root: HistoryNode
    node_count: int

    def iter_nodes(self) -> Iterator[HistoryNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children.values())))

    def internal_nodes(self) -> Iterator[HistoryNode]:
        return (n for n in self.iter_nodes() if n.children)

    def leaves(self) -> Iterator[HistoryNode]:
        return (n for n in self.iter_nodes() if not n.children)


def build_history_tree(
    scenario: Scenario,
    strategy: StrategyKernel,
    horizon: int,
    *,
    node_cap: Optional[int] = None,
) -> HistoryTree:
    """Enumerate every positive-probability parsed history up to ``horizon``.

    Joint probabilities are propagated exactly; only outcomes with
    positive probability become children.  Raises
    :class:`CapExceededError` when the tree would exceed ``node_cap``.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    cap = default_node_cap() if node_cap is None else node_cap
    mind, system = scenario.mind, scenario.system
    tokens = system.tokens
    n_targets = len(scenario.targets)
    count = 0

    def make_node(history: tuple[ParsedSignal, ...], state: frozenset[str], joint: list[float]) -> HistoryNode:
        nonlocal count
        count += 1
        if count > cap:
            raise CapExceededError(f"history tree exceeds {cap} nodes")
        prob = sum(joint)
        belief = tuple(j / prob for j in joint)
        node = HistoryNode(
            history=history,
            prob=prob,
            state=state,
            joint=tuple(joint),
            belief=belief,
            entropy_bits=entropy_bits(belief),
            emission=None,
        )
        if len(history) == horizon:
            return node
        emission_rows: list[tuple[float, ...]] = []
        child_joint: dict[ParsedSignal, list[float]] = {}
        for i, target in enumerate(scenario.targets):
            if joint[i] <= 0.0:
                emission_rows.append(tuple(0.0 for _ in tokens))
                continue
            dist = emission_distribution(strategy, target, history)
            emission_rows.append(tuple(belief[i] * dist.get(tok, 0.0) for tok in tokens))
            for tok, p in dist.items():
                if p <= 0.0:
                    continue
                parsed = parse(mind, system, tok, state)
                row = child_joint.setdefault(parsed, [0.0] * n_targets)
                row[i] += joint[i] * p
        node.emission = tuple(emission_rows)
        for parsed in list(tokens) + [None]:
            if parsed not in child_joint:
                continue
            sub_joint = child_joint[parsed]
            if sum(sub_joint) <= 0.0:
                continue
            child_state = knowledge_update(mind, system, state, parsed)
            node.children[parsed] = make_node(history + (parsed,), child_state, sub_joint)
        return node

    root = make_node((), frozenset(scenario.mind.axioms), list(scenario.prior))
    return HistoryTree(scenario=scenario, horizon=horizon, root=root, node_count=count)


def _mi_entropy_drop(node: HistoryNode) -> float:
    expected_child = sum(
        (child.prob / node.prob) * child.entropy_bits for child in node.children.values()
    )
    return node.entropy_bits - expected_child


def _parsed_joint_table(scenario: Scenario, node: HistoryNode) -> list[list[float]]:
    """Conditional joint of (target, next parsed observation) at a node."""
    tokens = scenario.system.tokens
    outcomes: list[ParsedSignal] = list(tokens) + [None]
    col = {y: j for j, y in enumerate(outcomes)}
    table = [[0.0] * len(outcomes) for _ in scenario.targets]
    assert node.emission is not None
    for i, row in enumerate(node.emission):
        for tok, p in zip(tokens, row):
            if p > 0.0:
                parsed = parse(scenario.mind, scenario.system, tok, node.state)
                table[i][col[parsed]] += p
    return table


def round_mutual_info_from_joint(tree: HistoryTree, node: HistoryNode) -> float:
    """Next-round information about the target, from the joint table."""
    if node.is_leaf:
        raise ValueError("leaf node has no next round")
    return mutual_information_bits(_parsed_joint_table(tree.scenario, node))


def round_mutual_info(tree: HistoryTree, node: HistoryNode) -> float:
    """Next-round information about the target, as the expected entropy drop.

    Cross-checked against the joint-table route; the two must agree
    within :data:`AUDIT_TOL`.
    """
    if node.is_leaf:
        raise ValueError("leaf node has no next round")
    drop = _mi_entropy_drop(node)
    alt = round_mutual_info_from_joint(tree, node)
    if abs(drop - alt) > AUDIT_TOL:
        raise InformationLawError(
            f"entropy-drop and joint-table information disagree at {node.history!r}: "
            f"{drop!r} vs {alt!r}"
        )
    return drop


@dataclass(frozen=True)
class LawVerdict:
    law: str
    verdict: str  # "pass" | "fail" | "not applicable"
    worst_violation: float
    witness: Optional[tuple[ParsedSignal, ...]]

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"


@dataclass(frozen=True)
class AuditReport:
    """Per-law verdicts with the worst violation found and its history."""

    verdicts: tuple[LawVerdict, ...]

    @property
    def passed(self) -> bool:
        return not any(v.failed for v in self.verdicts)

    def __getitem__(self, law: str) -> LawVerdict:
        for v in self.verdicts:
            if v.law == law:
                return v
        raise KeyError(law)

    def lines(self) -> list[str]:
        return [
            f"{v.law}: {v.verdict} (worst violation {v.worst_violation:.3e})"
            + (f" at {v.witness!r}" if v.witness is not None and v.failed else "")
            for v in self.verdicts
        ]


def _verdict(law: str, worst: float, witness) -> LawVerdict:
    if worst > AUDIT_TOL:
        return LawVerdict(law, "fail", worst, witness)
    return LawVerdict(law, "pass", worst, None)


def _restricted_mi(table: list[list[float]], keep_cols: list[int]) -> float:
    """Mutual information of a joint table restricted to columns and renormalized."""
    sub = [[row[j] for j in keep_cols] for row in table]
    mass = sum(sum(row) for row in sub)
    if mass <= 0.0:
        return 0.0
    return mutual_information_bits([[p / mass for p in row] for row in sub])


def audit_all(tree: HistoryTree, scenario: Optional[Scenario] = None) -> AuditReport:
    """Run all eight information-law checks over a built history tree."""
    scenario = tree.scenario if scenario is None else scenario
    mind, system = scenario.mind, scenario.system
    tokens = system.tokens

    cap_cache: dict[frozenset[str], float] = {}

    def state_capacity(state: frozenset[str]) -> float:
        if state not in cap_cache:
            cap_cache[state] = capacity(mind, system, state)
        return cap_cache[state]

    worst_drop = (0.0, None)
    worst_super = (0.0, None)
    worst_cap = (0.0, None)
    worst_rel = (0.0, None)
    worst_reph = (0.0, None)
    chain_sum = 0.0
    budget_sum = 0.0

    for node in tree.internal_nodes():
        drop = _mi_entropy_drop(node)
        table = _parsed_joint_table(scenario, node)
        mi = mutual_information_bits(table)

        gap = abs(drop - mi)
        if gap > worst_drop[0]:
            worst_drop = (gap, node.history)

        over = -drop  # expected child entropy above the node entropy
        if over > worst_super[0]:
            worst_super = (over, node.history)

        excess = mi - state_capacity(node.state)
        if excess > worst_cap[0]:
            worst_cap = (excess, node.history)

        # Erasure versus informativeness, split on whether the emitted
        # token's concept is currently ordered.  The unparseable event is
        # exactly the null column of the parsed table, so restricting to
        # it conditions on the event; within it the observation is
        # constant and must carry nothing.  On the parseable event the
        # parser is the identity, so parsed and raw information agree.
        assert node.emission is not None
        raw_table = [list(row) for row in node.emission]
        ordered_cols = [
            j for j, tok in enumerate(tokens)
            if parse(mind, system, tok, node.state) is not None
        ]
        mi_erased = _restricted_mi(table, [len(tokens)])
        if mi_erased > worst_rel[0]:
            worst_rel = (mi_erased, node.history)
        mi_y = _restricted_mi(table, ordered_cols)
        mi_z = _restricted_mi(raw_table, ordered_cols)
        gap = abs(mi_y - mi_z)
        if gap > worst_rel[0]:
            worst_rel = (gap, node.history)

        support_targets = {
            system.targets[j]
            for row in raw_table
            for j, p in enumerate(row)
            if p > 0.0
        }
        if len(support_targets) == 1:
            concept = next(iter(support_targets))
            ordered_now = bool(
                mind.expand_mask(mind.space.mask(node.state)) & mind.space.bit(concept)
            )
            if not ordered_now and mi > worst_reph[0]:
                worst_reph = (mi, node.history)

        if node.entropy_bits > _EXACT_TOL:
            chain_sum += node.prob * mi
            budget_sum += node.prob * state_capacity(node.state)

    identified_everywhere = all(leaf.entropy_bits <= _EXACT_TOL for leaf in tree.leaves())

    verdicts = [
        _verdict("entropy_drop", *worst_drop),
        _verdict("supermartingale", *worst_super),
        _verdict("statewise_bound", *worst_cap),
        _verdict("relativity", *worst_rel),
        _verdict("rephrasing", *worst_reph),
    ]

    prior_entropy = entropy_bits(scenario.prior)
    if identified_everywhere:
        verdicts.append(
            _verdict("chain_identity", abs(chain_sum - prior_entropy), None)
        )
        verdicts.append(
            _verdict("trajectory_budget", prior_entropy - budget_sum, None)
        )
    else:
        verdicts.append(LawVerdict("chain_identity", "not applicable", 0.0, None))
        verdicts.append(LawVerdict("trajectory_budget", "not applicable", 0.0, None))

    verdicts.append(_global_bound_verdict(tree, scenario))
    return AuditReport(tuple(verdicts))


def _expected_completion_time(tree: HistoryTree, scenario: Scenario) -> Optional[float]:
    """Exact expected completion time, or None when some path never completes."""
    total = 0.0
    incomplete = False

    def walk(node: HistoryNode, alive: list[int]) -> None:
        nonlocal total, incomplete
        if incomplete:
            return
        still = []
        for i in alive:
            if node.joint[i] <= 0.0:
                continue
            done = (
                scenario.targets[i] in node.state
                and node.joint[i] >= node.prob * (1.0 - _EXACT_TOL)
            )
            if done:
                total += node.joint[i] * node.depth
            else:
                still.append(i)
        if not still:
            return
        if node.is_leaf:
            incomplete = True
            return
        for child in node.children.values():
            walk(child, still)

    walk(tree.root, list(range(len(scenario.targets))))
    return None if incomplete else total


def _global_bound_verdict(tree: HistoryTree, scenario: Scenario) -> LawVerdict:
    expected_tau = _expected_completion_time(tree, scenario)
    if expected_tau is None:
        return LawVerdict("global_bound", "not applicable", 0.0, None)
    expected_depth = 0.0
    for target, weight in zip(scenario.targets, scenario.prior):
        if weight > 0.0:
            dist = structural_distance(scenario.mind, target)
            assert dist is not None  # targets are constrained to the horizon
            expected_depth += weight * dist
    family = enumerate_reachable(scenario.mind)
    cap_max = max_capacity(scenario.mind, scenario.system, family)
    floor = expected_depth
    if cap_max > 0.0:
        floor = max(floor, entropy_bits(scenario.prior) / cap_max)
    return _verdict("global_bound", floor - expected_tau, None)
