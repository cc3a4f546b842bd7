"""Scenario, mind, and trace file formats.

Everything on disk is JSON; traces can additionally be exported as flat
CSV, one row per round.  Probabilities are serialized with 12 significant
digits, which round-trips well inside the audit tolerance, and writers
emit keys in a fixed order so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .errors import FormatError, NoesisError
from .mind import ConceptSpace, ExpansionRule, Mind
from .signals import SignalSystem
from .teaching import EpisodeTrace, Round, Scenario, StrategySpec

__all__ = [
    "LoadedScenario",
    "load_mind",
    "load_scenario",
    "load_scenario_bundle",
    "mind_to_dict",
    "scenario_digest",
    "trace_to_dict",
    "trace_from_dict",
    "write_trace",
    "read_trace",
    "trace_to_csv",
    "dump_json",
    "round_floats",
]


def round_floats(value: Any) -> Any:
    """Round every float in a JSON-like structure to 12 significant digits."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v) for v in value]
    return value


def dump_json(value: Any) -> str:
    """Deterministic JSON text: fixed key order, rounded floats, trailing newline."""
    return json.dumps(round_floats(value), indent=2, sort_keys=False) + "\n"


def _read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _need(data: Mapping[str, Any], field: str, kind: type, where: str) -> Any:
    if field not in data:
        raise FormatError(f"{where}: missing field {field!r}")
    value = data[field]
    if not isinstance(value, kind):
        raise FormatError(f"{where}: field {field!r} must be {kind.__name__}")
    return value


def _mind_from_dict(data: Mapping[str, Any], where: str) -> Mind:
    concepts = _need(data, "concepts", list, where)
    axioms = _need(data, "axioms", list, where)
    raw_rules = _need(data, "rules", list, where)
    rules = []
    for i, entry in enumerate(raw_rules):
        if not isinstance(entry, dict):
            raise FormatError(f"{where}: rules[{i}] must be an object")
        prereqs = _need(entry, "prereqs", list, f"{where}: rules[{i}]")
        target = _need(entry, "target", str, f"{where}: rules[{i}]")
        rules.append(ExpansionRule(frozenset(prereqs), target))
    try:
        space = ConceptSpace(tuple(concepts))
        mind = Mind(space=space, axioms=frozenset(axioms), rules=tuple(rules))
        mind._compiled  # force validation so errors surface at load time
    except NoesisError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    return mind


def mind_to_dict(mind: Mind) -> dict[str, Any]:
    return {
        "concepts": list(mind.space.concepts),
        "axioms": list(mind.space.sorted_labels(mind.axiom_mask)),
        "rules": [
            {"prereqs": sorted(rule.prereqs, key=mind.space.index.__getitem__), "target": rule.target}
            for rule in mind.effective_rules
        ],
    }


def load_mind(path: str | Path) -> Mind:
    """Read and validate a mind file (concepts, axioms, rules)."""
    return _mind_from_dict(_read_json(path), str(path))


@dataclass(frozen=True)
class LoadedScenario:
    """A fully validated scenario plus its declared strategy and load notes."""

    scenario: Scenario
    strategy: StrategySpec
    notes: tuple[str, ...]
    digest: str


def _strategy_from_dict(data: Any, where: str) -> StrategySpec:
    if not isinstance(data, dict):
        raise FormatError(f"{where}: field 'strategy' must be an object")
    kind = _need(data, "kind", str, where)
    if kind == "direct":
        return StrategySpec(kind="direct")
    if kind == "scripted":
        rows = _need(data, "rows", dict, f"{where}: strategy")
        fixed = {}
        for target, row in rows.items():
            if not isinstance(row, list) or not all(isinstance(tok, str) for tok in row):
                raise FormatError(f"{where}: strategy row for {target!r} must be a token list")
            fixed[target] = tuple(row)
        return StrategySpec(kind="scripted", rows=fixed)
    if kind == "broadcast":
        row = _need(data, "row", list, f"{where}: strategy")
        return StrategySpec(kind="broadcast", row=tuple(row))
    raise FormatError(f"{where}: unknown strategy kind {kind!r}")


def load_scenario_bundle(path: str | Path) -> LoadedScenario:
    """Read a scenario file: mind, signals, targets, prior, and strategy.

    The prior is normalized on load; a note records the rescaling.  Any
    invariant violation is reported with the offending field name.
    """
    where = str(path)
    data = _read_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{where}: top level must be an object")
    mind = _mind_from_dict(data, where)
    raw_signals = _need(data, "signals", list, where)
    pairs = []
    for i, entry in enumerate(raw_signals):
        if not isinstance(entry, dict):
            raise FormatError(f"{where}: signals[{i}] must be an object")
        token = _need(entry, "token", str, f"{where}: signals[{i}]")
        target = _need(entry, "target", str, f"{where}: signals[{i}]")
        pairs.append((token, target))
    targets = _need(data, "targets", list, where)
    raw_prior = _need(data, "prior", list, where)
    notes: list[str] = []
    try:
        weights = [float(w) for w in raw_prior]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: field 'prior' must be a list of numbers") from exc
    if any(w < 0 for w in weights):
        raise FormatError(f"{where}: field 'prior' has a negative weight")
    total = sum(weights)
    if total <= 0:
        raise FormatError(f"{where}: field 'prior' must have positive total weight")
    if abs(total - 1.0) > 1e-12:
        notes.append(f"prior weights sum to {total:.12g}; normalized to 1")
    prior = tuple(w / total for w in weights)
    try:
        system = SignalSystem.from_pairs(pairs)
        scenario = Scenario(mind=mind, system=system, targets=tuple(targets), prior=prior)
    except NoesisError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    strategy = _strategy_from_dict(data.get("strategy", {"kind": "direct"}), where)
    return LoadedScenario(
        scenario=scenario,
        strategy=strategy,
        notes=tuple(notes),
        digest=scenario_digest(scenario, strategy),
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file and return just the validated scenario."""
    return load_scenario_bundle(path).scenario


def scenario_digest(scenario: Scenario, strategy: Optional[StrategySpec] = None) -> str:
    """Stable content hash of a scenario (and strategy declaration, if any)."""
    payload = {
        "concepts": list(scenario.mind.space.concepts),
        "axioms": sorted(scenario.mind.axioms),
        "rules": [
            {"prereqs": sorted(r.prereqs), "target": r.target}
            for r in scenario.mind.effective_rules
        ],
        "signals": [
            {"token": t, "target": c}
            for t, c in zip(scenario.system.tokens, scenario.system.targets)
        ],
        "targets": list(scenario.targets),
        "prior": [f"{p:.12g}" for p in scenario.prior],
    }
    if strategy is not None:
        payload["strategy"] = {
            "kind": strategy.kind,
            "rows": {t: list(r) for t, r in sorted(strategy.rows.items())} if strategy.rows else None,
            "row": list(strategy.row) if strategy.row else None,
        }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


_NULL_TOKEN = "_null_"  # stands in for the unparseable observation in files


def _parsed_to_json(parsed: Optional[str]) -> str:
    return _NULL_TOKEN if parsed is None else parsed


def _parsed_from_json(text: str) -> Optional[str]:
    return None if text == _NULL_TOKEN else text


def trace_to_dict(trace: EpisodeTrace, digest: str = "") -> dict[str, Any]:
    return {
        "seed": trace.seed,
        "horizon": trace.horizon,
        "scenario_digest": digest,
        "theta": trace.theta,
        "tau": trace.tau,
        "tau_id": trace.tau_id,
        "rounds": [
            {
                "t": r.t,
                "z": r.emitted,
                "y": _parsed_to_json(r.parsed),
                "state": sorted(r.state),
                "belief": list(r.belief),
                "entropy_bits": r.entropy_bits,
                "capacity_bits": r.capacity_bits,
            }
            for r in trace.rounds
        ],
    }


def trace_from_dict(data: Mapping[str, Any]) -> tuple[EpisodeTrace, str]:
    rounds = tuple(
        Round(
            t=r["t"],
            emitted=r["z"],
            parsed=_parsed_from_json(r["y"]),
            state=frozenset(r["state"]),
            belief=tuple(r["belief"]),
            entropy_bits=r["entropy_bits"],
            capacity_bits=r["capacity_bits"],
        )
        for r in data["rounds"]
    )
    trace = EpisodeTrace(
        theta=data["theta"],
        seed=data["seed"],
        horizon=data["horizon"],
        rounds=rounds,
        tau=data["tau"],
        tau_id=data["tau_id"],
    )
    return trace, data.get("scenario_digest", "")


def trace_to_csv(traces: Sequence[EpisodeTrace]) -> str:
    """Flat per-round export; one row per round, episodes tagged by seed."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["seed", "theta", "t", "z", "y", "state", "belief", "entropy_bits", "capacity_bits"])
    for trace in traces:
        for r in trace.rounds:
            writer.writerow(
                [
                    trace.seed,
                    trace.theta,
                    r.t,
                    r.emitted,
                    _parsed_to_json(r.parsed),
                    "|".join(sorted(r.state)),
                    "|".join(f"{p:.12g}" for p in r.belief),
                    f"{r.entropy_bits:.12g}",
                    f"{r.capacity_bits:.12g}",
                ]
            )
    return buf.getvalue()


def write_trace(trace: EpisodeTrace, path: str | Path, digest: str = "") -> None:
    Path(path).write_text(dump_json(trace_to_dict(trace, digest)))


def read_trace(path: str | Path) -> tuple[EpisodeTrace, str]:
    data = _read_json(path)
    try:
        return trace_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{path}: malformed trace: {exc}") from exc
