"""Command-line front end.

Subcommands cover closure and derivation queries, reachable-family
export, structural distance, capacity, episode simulation, the
information-law audit, value bounds, budget allocation, and the
broadcast constructions.  Exit codes: 0 success, 1 validation or usage
error, 2 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import fileio
from .audit import audit_all, build_history_tree
from .derivation import curriculum_from_derivation, derive
from .errors import CapExceededError, NoesisError
from .mind import closure_iterates
from .planner import (
    allocate,
    broadcast_check,
    broadcast_construct,
    broadcast_min_length,
    value_envelope,
)
from .reachability import check_learning_space, enumerate_reachable, shortest_chain, structural_distance
from .signals import capacity, max_capacity
from .teaching import run_episode

__all__ = ["run_cli", "main"]


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); bad usage is exit 1 here
        raise _CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="noesis", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
        return p

    p = add("closure", "closure of a concept set under a mind's rules")
    p.add_argument("--mind", type=Path, required=True)
    p.add_argument("--start", default=None, help="comma-separated concepts; default: the axioms")

    p = add("derive", "derivation tree and extracted curriculum for a concept")
    p.add_argument("--mind", type=Path, required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--start", default=None)

    p = add("reach", "enumerate the reachable state family")
    p.add_argument("--mind", type=Path, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cap", type=int, default=None)

    p = add("distance", "structural distance and a shortest chain to a concept")
    p.add_argument("--mind", type=Path, required=True)
    p.add_argument("--target", required=True)

    p = add("capacity", "per-state and maximal parsed-observation capacity")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--state", default=None, help="comma-separated concepts; default: the axioms")
    p.add_argument("--cap", type=int, default=None)

    p = add("simulate", "run teaching episodes and export traces")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--episodes", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = add("audit", "build the history tree and check the information laws")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--cap", type=int, default=None)

    p = add("value", "upper and lower success-probability bounds at a horizon")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="also run the exhaustive tiny-instance search")

    p = add("allocate", "concentrated versus even allocation of a round budget")
    p.add_argument("--N", type=int, required=True, help="number of learners")
    p.add_argument("--B", type=int, required=True, help="total budget in rounds")
    p.add_argument("--L", type=int, required=True, help="rounds each learner needs")

    p = add("broadcast-gen", "construct the incompatible-minds broadcast instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", type=int, required=True)

    p = add("broadcast-min", "minimal length of a shared sequence teaching every mind")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--cap", type=int, default=None)

    return parser


def _split_concepts(text: Optional[str]) -> Optional[list[str]]:
    if text is None:
        return None
    return [part for part in (s.strip() for s in text.split(",")) if part]


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_closure(args) -> str:
    mind = fileio.load_mind(args.mind)
    start = _split_concepts(args.start)
    start_set = frozenset(start) if start is not None else mind.axioms
    iterates = closure_iterates(mind, start_set)
    return fileio.dump_json(
        {
            "start": sorted(start_set),
            "closure": sorted(iterates[-1]),
            "iterates": [sorted(step) for step in iterates],
        }
    )


def _tree_to_dict(node) -> dict:
    if node.rule is None:
        return {"concept": node.concept, "base": True}
    return {
        "concept": node.concept,
        "rule": {"prereqs": sorted(node.rule.prereqs), "target": node.rule.target},
        "children": [_tree_to_dict(child) for child in node.children],
    }


def _cmd_derive(args) -> str:
    mind = fileio.load_mind(args.mind)
    start = _split_concepts(args.start)
    start_set = frozenset(start) if start is not None else mind.axioms
    tree = derive(mind, start_set, args.target)
    if tree is None:
        return fileio.dump_json({"target": args.target, "derivable": False})
    curriculum = curriculum_from_derivation(tree)
    return fileio.dump_json(
        {
            "target": args.target,
            "derivable": True,
            "tree": _tree_to_dict(tree),
            "curriculum": [
                {"prereqs": sorted(step.prereqs), "target": step.target} for step in curriculum
            ],
        }
    )


def _cmd_reach(args) -> str:
    mind = fileio.load_mind(args.mind)
    family = enumerate_reachable(mind, cap=args.cap)
    states = [sorted(s) for s in family.states()]
    if args.format == "csv":
        lines = ["state"] + ["|".join(s) for s in states]
        return "\n".join(lines) + "\n"
    report = check_learning_space(family, family.axioms)
    return fileio.dump_json(
        {
            "states": states,
            "minimum": sorted(family.minimum),
            "maximum": sorted(family.maximum),
            "count": len(family),
            "learning_space": {
                "has_axiom_floor": report.has_axiom_floor,
                "accessible": report.accessible,
                "union_closed": report.union_closed,
                "shifted_antimatroid": report.shifted_antimatroid,
            },
        }
    )


def _cmd_distance(args) -> str:
    mind = fileio.load_mind(args.mind)
    dist = structural_distance(mind, args.target)
    if dist is None:
        return fileio.dump_json({"target": args.target, "reachable": False})
    chain = shortest_chain(mind, args.target)
    return fileio.dump_json(
        {
            "target": args.target,
            "reachable": True,
            "distance": dist,
            "chain": [sorted(s) for s in chain],
        }
    )


def _cmd_capacity(args) -> str:
    bundle = fileio.load_scenario_bundle(args.scenario)
    scenario = bundle.scenario
    state = _split_concepts(args.state)
    state_set = frozenset(state) if state is not None else scenario.mind.axioms
    family = enumerate_reachable(scenario.mind, cap=args.cap)
    return fileio.dump_json(
        {
            "state": sorted(state_set),
            "capacity_bits": capacity(scenario.mind, scenario.system, state_set),
            "max_capacity_bits": max_capacity(scenario.mind, scenario.system, family),
        }
    )


def _cmd_simulate(args) -> str:
    bundle = fileio.load_scenario_bundle(args.scenario)
    for note in bundle.notes:
        print(f"note: {note}", file=sys.stderr)
    scenario = bundle.scenario
    strategy = bundle.strategy.build(scenario)
    if args.episodes < 1:
        raise _CliError("--episodes must be at least 1")
    traces = [
        run_episode(scenario, strategy, args.horizon, seed=args.seed + i)
        for i in range(args.episodes)
    ]
    if args.format == "csv":
        return fileio.trace_to_csv(traces)
    dicts = [fileio.trace_to_dict(t, bundle.digest) for t in traces]
    return fileio.dump_json(dicts[0] if args.episodes == 1 else dicts)


def _cmd_audit(args) -> str:
    bundle = fileio.load_scenario_bundle(args.scenario)
    scenario = bundle.scenario
    strategy = bundle.strategy.build(scenario)
    tree = build_history_tree(scenario, strategy, args.horizon, node_cap=args.cap)
    report = audit_all(tree)
    return fileio.dump_json(
        {
            "horizon": args.horizon,
            "nodes": tree.node_count,
            "passed": report.passed,
            "laws": [
                {
                    "law": v.law,
                    "verdict": v.verdict,
                    "worst_violation": v.worst_violation,
                    "witness": list(map(str, v.witness)) if v.witness else None,
                }
                for v in report.verdicts
            ],
        }
    )


def _cmd_value(args) -> str:
    scenario = fileio.load_scenario(args.scenario)
    envelope = value_envelope(scenario, args.horizon, exact=args.exact)
    return fileio.dump_json(
        {
            "t": envelope.t,
            "upper": envelope.upper,
            "lower": envelope.lower,
            "exact": envelope.exact,
        }
    )


def _cmd_allocate(args) -> str:
    plan = allocate(args.N, args.B, args.L)
    return fileio.dump_json(
        {
            "learners": plan.learners,
            "budget": plan.budget,
            "depth": plan.depth,
            "rounds": list(plan.rounds),
            "completed": plan.completed,
            "even_split_rounds": plan.even_split_rounds,
            "even_split_completed": plan.even_split_completed,
        }
    )


def _cmd_broadcast_gen(args) -> str:
    instance = broadcast_construct(args.k, args.L)
    per_mind = []
    for mind in instance.minds:
        per_mind.append(
            [{"prereqs": sorted(r.prereqs), "target": r.target} for r in mind.effective_rules]
        )
    return fileio.dump_json(
        {
            "k": instance.k,
            "L": instance.depth,
            "concepts": list(instance.space.concepts),
            "axioms": sorted(instance.axioms),
            "target": instance.target,
            "minds": per_mind,
            "signals": [
                {"token": t, "target": c}
                for t, c in zip(instance.system.tokens, instance.system.targets)
            ],
            "tight_sequence": list(instance.tight_sequence),
            "tight_sequence_succeeds": all(
                broadcast_check(instance, instance.tight_sequence)
            ),
        }
    )


def _cmd_broadcast_min(args) -> str:
    instance = broadcast_construct(args.k, args.L)
    cap = args.cap
    if cap is None:
        env = os.environ.get("NOESIS_NODE_CAP")
        cap = int(env) if env and env.isdigit() else None
    kwargs = {} if cap is None else {"cap": cap}
    length = broadcast_min_length(instance, **kwargs)
    return ("not-found" if length is None else str(length)) + "\n"


_COMMANDS = {
    "closure": _cmd_closure,
    "derive": _cmd_derive,
    "reach": _cmd_reach,
    "distance": _cmd_distance,
    "capacity": _cmd_capacity,
    "simulate": _cmd_simulate,
    "audit": _cmd_audit,
    "value": _cmd_value,
    "allocate": _cmd_allocate,
    "broadcast-gen": _cmd_broadcast_gen,
    "broadcast-min": _cmd_broadcast_min,
}


def run_cli(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        text = _COMMANDS[args.command](args)
        _emit(text, args.out)
        return 0
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
