"""Rule bases: IF-THEN rules over named partitions, with strict JSON I/O.

Document schema (field names are exact; unknown fields are rejected):

    {
      "inputs":  {name: {"universe": [lo, hi],
                         "labels": [{"name": .., "shape": .., "params": [..]}]}},
      "outputs": {name: {...same...}},
      "rules":   [{"if": {input: label, ...},
                   "then": {output: label, ...},
                   "weight": 1.0}]            # weight optional, in (0, 1]
    }

Loading validates name references, weights, and numeric completeness: on a
sampled lattice of the input universe product, every output must receive a
nonzero firing strength everywhere, which is what makes the downstream
centroid total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import RuleBaseError
from .membership import PARAM_COUNTS, MembershipFunction
from .partition import FuzzyPartition

# Lattice density per input axis for the load-time completeness check.
_COVERAGE_RESOLUTION = 33


@dataclass(frozen=True)
class FuzzyRule:
    """Conjunctive antecedent over inputs, one or more output assignments."""

    antecedent: tuple[tuple[str, str], ...]
    consequent: tuple[tuple[str, str], ...]
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.antecedent:
            raise RuleBaseError("rule needs at least one antecedent clause")
        if not self.consequent:
            raise RuleBaseError("rule needs at least one consequent clause")
        if not 0.0 < self.weight <= 1.0:
            raise RuleBaseError(f"rule weight must be in (0, 1], got {self.weight!r}")
        object.__setattr__(self, "antecedent", tuple((str(n), str(l)) for n, l in self.antecedent))
        object.__setattr__(self, "consequent", tuple((str(n), str(l)) for n, l in self.consequent))
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class FuzzyRuleBase:
    inputs: dict[str, FuzzyPartition]
    outputs: dict[str, FuzzyPartition]
    rules: tuple[FuzzyRule, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.inputs or not self.outputs:
            raise RuleBaseError("rule base needs at least one input and one output partition")
        if not self.rules:
            raise RuleBaseError("rule base has no rules")
        for rule in self.rules:
            for name, label in rule.antecedent:
                part = self.inputs.get(name)
                if part is None:
                    raise RuleBaseError(f"rule references unknown input {name!r}")
                if label not in part:
                    raise RuleBaseError(f"input {name!r} has no label {label!r}")
            for name, label in rule.consequent:
                part = self.outputs.get(name)
                if part is None:
                    raise RuleBaseError(f"rule references unknown output {name!r}")
                if label not in part:
                    raise RuleBaseError(f"output {name!r} has no label {label!r}")
        self._check_completeness()

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(self.inputs)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(self.outputs)

    def _check_completeness(self) -> None:
        """Reject rule bases that leave any output silent somewhere.

        Evaluated on a uniform lattice (33 points per axis); piecewise-linear
        memberships make that dense enough to catch real gaps.
        """
        axes = [part.grid(_COVERAGE_RESOLUTION) for part in self.inputs.values()]
        names = list(self.inputs)
        grids = np.meshgrid(*axes, indexing="ij")
        flat = {name: g.ravel() for name, g in zip(names, grids)}
        n_points = next(iter(flat.values())).size

        strengths = []
        for rule in self.rules:
            s = np.full(n_points, rule.weight)
            for name, label in rule.antecedent:
                mf = self.inputs[name].function(label)
                np.minimum(s, mf.sample(flat[name]) * rule.weight, out=s)
            strengths.append(s)

        for out_name in self.outputs:
            covered = np.zeros(n_points)
            for rule, s in zip(self.rules, strengths):
                if any(name == out_name for name, _ in rule.consequent):
                    np.maximum(covered, s, out=covered)
            if not np.all(covered > 0.0):
                i = int(np.argmin(covered))
                at = ", ".join(f"{name}={flat[name][i]:g}" for name in names)
                raise RuleBaseError(
                    f"incomplete rule base: output {out_name!r} receives no firing "
                    f"strength at {at}"
                )

    # -- JSON (de)serialization -------------------------------------------

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FuzzyRuleBase":
        _expect_keys(doc, {"inputs", "outputs", "rules"}, context="rule base")
        inputs = _partitions_from(doc["inputs"], kind="inputs")
        outputs = _partitions_from(doc["outputs"], kind="outputs")
        if not isinstance(doc["rules"], list):
            raise RuleBaseError("'rules' must be a list")
        rules = tuple(_rule_from(entry, i) for i, entry in enumerate(doc["rules"]))
        return cls(inputs=inputs, outputs=outputs, rules=rules)

    @classmethod
    def from_json(cls, text: str) -> "FuzzyRuleBase":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise RuleBaseError(f"rule base is not valid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise RuleBaseError("rule base document must be a JSON object")
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: str | Path) -> "FuzzyRuleBase":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_dict(self) -> dict:
        def dump_partitions(parts: Mapping[str, FuzzyPartition]) -> dict:
            return {
                name: {
                    "universe": list(part.universe),
                    "labels": [
                        {"name": label, "shape": mf.shape, "params": list(mf.params)}
                        for label, mf in part.labels
                    ],
                }
                for name, part in parts.items()
            }

        return {
            "inputs": dump_partitions(self.inputs),
            "outputs": dump_partitions(self.outputs),
            "rules": [
                {
                    "if": {name: label for name, label in rule.antecedent},
                    "then": {name: label for name, label in rule.consequent},
                    "weight": rule.weight,
                }
                for rule in self.rules
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _expect_keys(doc: Mapping, allowed: set[str], context: str, required: set[str] | None = None) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise RuleBaseError(f"unknown field(s) in {context}: {', '.join(sorted(map(str, unknown)))}")
    missing = (required if required is not None else allowed) - set(doc)
    if missing:
        raise RuleBaseError(f"missing field(s) in {context}: {', '.join(sorted(missing))}")


def _partitions_from(section, kind: str) -> dict[str, FuzzyPartition]:
    if not isinstance(section, dict) or not section:
        raise RuleBaseError(f"'{kind}' must be a non-empty object")
    parts: dict[str, FuzzyPartition] = {}
    for name, spec in section.items():
        context = f"{kind}.{name}"
        if not isinstance(spec, dict):
            raise RuleBaseError(f"{context} must be an object")
        _expect_keys(spec, {"universe", "labels"}, context=context)
        universe = spec["universe"]
        if not (isinstance(universe, list) and len(universe) == 2):
            raise RuleBaseError(f"{context}.universe must be [lo, hi]")
        labels = []
        if not isinstance(spec["labels"], list) or not spec["labels"]:
            raise RuleBaseError(f"{context}.labels must be a non-empty list")
        for entry in spec["labels"]:
            if not isinstance(entry, dict):
                raise RuleBaseError(f"{context}.labels entries must be objects")
            _expect_keys(entry, {"name", "shape", "params"}, context=f"{context}.labels")
            shape = entry["shape"]
            if shape not in PARAM_COUNTS:
                raise RuleBaseError(f"{context}: unknown shape {shape!r}")
            try:
                mf = MembershipFunction(shape, tuple(entry["params"]))
            except ValueError as e:
                raise RuleBaseError(f"{context}.{entry['name']}: {e}") from e
            labels.append((str(entry["name"]), mf))
        try:
            parts[str(name)] = FuzzyPartition(str(name), (universe[0], universe[1]), tuple(labels))
        except ValueError as e:
            raise RuleBaseError(f"{context}: {e}") from e
    return parts


def _rule_from(entry, index: int) -> FuzzyRule:
    context = f"rules[{index}]"
    if not isinstance(entry, dict):
        raise RuleBaseError(f"{context} must be an object")
    _expect_keys(entry, {"if", "then", "weight"}, context=context, required={"if", "then"})
    if not isinstance(entry["if"], dict) or not isinstance(entry["then"], dict):
        raise RuleBaseError(f"{context}: 'if' and 'then' must be objects")
    weight = entry.get("weight", 1.0)
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise RuleBaseError(f"{context}: weight must be a number")
    try:
        return FuzzyRule(
            antecedent=tuple(entry["if"].items()),
            consequent=tuple(entry["then"].items()),
            weight=float(weight),
        )
    except RuleBaseError as e:
        raise RuleBaseError(f"{context}: {e}") from e
