"""Recommendation events to mentality deltas via the fuzzy engine.

The inference signature is fixed: inputs are the recommendation priority
(6-grade UI scale mapped affinely onto [0, 1]) and the current arousal
coordinate; outputs are the per-axis deltas, whose [-50, 50] universes
bound the result by construction.  Pleasure does not feed back into the
rules, and speech-recognition confidence is deliberately not an input;
speech-category events are accepted elsewhere as a hook but ship with no
rules.

The default rule base (v1, installed as package data) is the smallest
complete monotone mapping: high priority drives arousal strongly up and
pleasure gently up, low priority the reverse, mid priority holds, with
anti-saturation overrides that soften the push once arousal is already
extreme.  Everything about it can be replaced by loading another JSON
rule base.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Final

import numpy as np

from .fuzzy import FuzzyRuleBase, InferenceEngine
from .mentality import MentalityState, StateDelta, apply_delta, clamp

PRIORITY_INPUT: Final = "priority"
AROUSAL_INPUT: Final = "arousal"
PLEASURE_OUTPUT: Final = "d_pl"
AROUSAL_OUTPUT: Final = "d_ar"

PRIORITY_MIN: Final = 1
PRIORITY_MAX: Final = 6

DEFAULT_RULEBASE_RESOURCE: Final = "rulebase_v1.json"


class IntentContractError(ValueError):
    """Rule base does not match the (priority, arousal) -> (d_pl, d_ar) contract."""


@dataclass(frozen=True)
class RecommendationEvent:
    """One recommendation from the information-recommendation side.

    priority runs 1 (not recommended) to 6 (strongly recommended).
    """

    priority: int
    item_id: str = ""
    timestamp_ms: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.priority, int) or isinstance(self.priority, bool):
            raise ValueError(f"priority must be an integer grade, got {self.priority!r}")
        if not PRIORITY_MIN <= self.priority <= PRIORITY_MAX:
            raise ValueError(
                f"priority must be in [{PRIORITY_MIN}, {PRIORITY_MAX}], got {self.priority}"
            )


def normalize_priority(grade: int) -> float:
    """Affine map of grade g in 1..6 onto [0, 1]: (g - 1) / 5."""
    if not PRIORITY_MIN <= grade <= PRIORITY_MAX:
        raise ValueError(f"priority grade {grade} outside [{PRIORITY_MIN}, {PRIORITY_MAX}]")
    return (grade - 1) / (PRIORITY_MAX - PRIORITY_MIN)


class IntentConfig:
    """A validated rule base bound to the intent-expression signature."""

    def __init__(self, rulebase: FuzzyRuleBase, backend: str | None = None) -> None:
        _check_contract(rulebase)
        self.rulebase = rulebase
        self.engine = InferenceEngine(rulebase, backend=backend)
        # Output positions in the engine's crisp result vector.
        names = rulebase.output_names
        self._i_pl = names.index(PLEASURE_OUTPUT)
        self._i_ar = names.index(AROUSAL_OUTPUT)

    @classmethod
    def default(cls, backend: str | None = None) -> "IntentConfig":
        """The shipped v1 rule base."""
        text = (
            resources.files("oculus.data")
            .joinpath(DEFAULT_RULEBASE_RESOURCE)
            .read_text(encoding="utf-8")
        )
        return cls(FuzzyRuleBase.from_json(text), backend=backend)

    @classmethod
    def from_file(cls, path: str | Path, backend: str | None = None) -> "IntentConfig":
        return cls(FuzzyRuleBase.load(path), backend=backend)

    def delta_at(self, s: MentalityState, priority_norm: float) -> StateDelta:
        """Delta for a normalized priority in [0, 1] (grades land on k/5)."""
        if not 0.0 <= priority_norm <= 1.0:
            raise ValueError(f"normalized priority {priority_norm!r} outside [0, 1]")
        values = np.empty(len(self.rulebase.input_names))
        for i, name in enumerate(self.rulebase.input_names):
            values[i] = priority_norm if name == PRIORITY_INPUT else s.x_ar
        crisp = self.engine.evaluate_array(values)
        # Universes already bound the centroid; the clamp only trims float fuzz.
        return StateDelta(
            d_pl=clamp(float(crisp[self._i_pl]), -50.0, 50.0),
            d_ar=clamp(float(crisp[self._i_ar]), -50.0, 50.0),
        )


def _check_contract(rulebase: FuzzyRuleBase) -> None:
    expected_inputs = {PRIORITY_INPUT: (0.0, 1.0), AROUSAL_INPUT: (-200.0, 200.0)}
    expected_outputs = {PLEASURE_OUTPUT: (-50.0, 50.0), AROUSAL_OUTPUT: (-50.0, 50.0)}
    if set(rulebase.input_names) != set(expected_inputs):
        raise IntentContractError(
            f"rule base inputs must be {sorted(expected_inputs)}, got {sorted(rulebase.input_names)}"
        )
    if set(rulebase.output_names) != set(expected_outputs):
        raise IntentContractError(
            f"rule base outputs must be {sorted(expected_outputs)}, got {sorted(rulebase.output_names)}"
        )
    for name, universe in expected_inputs.items():
        if rulebase.inputs[name].universe != universe:
            raise IntentContractError(
                f"input {name!r} universe must be {list(universe)}, got "
                f"{list(rulebase.inputs[name].universe)}"
            )
    for name, universe in expected_outputs.items():
        if rulebase.outputs[name].universe != universe:
            raise IntentContractError(
                f"output {name!r} universe must be {list(universe)}, got "
                f"{list(rulebase.outputs[name].universe)}"
            )


def compute_delta(s: MentalityState, r: RecommendationEvent, cfg: IntentConfig) -> StateDelta:
    """Delta for one recommendation event against the current state."""
    return cfg.delta_at(s, normalize_priority(r.priority))


def step(s: MentalityState, r: RecommendationEvent, cfg: IntentConfig) -> MentalityState:
    """One full update: infer the delta and apply it with boundary clamping."""
    return apply_delta(s, compute_delta(s, r, cfg))
