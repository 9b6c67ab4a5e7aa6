"""Mamdani-style fuzzy inference: partitions, rules, min/max inference,
center-of-area defuzzification, and a compiled hot kernel with a numpy
fallback."""

from .backend import DEFAULT_BACKEND, available_backends
from .errors import DegenerateSetError, RuleBaseError
from .inference import (
    DEFAULT_RESOLUTION,
    AggregatedFuzzySet,
    CompiledRuleBase,
    InferenceEngine,
    defuzzify_coa,
)
from .membership import (
    MembershipFunction,
    membership,
    shoulder_left,
    shoulder_right,
    trapezoidal,
    triangular,
)
from .partition import FuzzyPartition, fuzzify
from .rulebase import FuzzyRule, FuzzyRuleBase

__all__ = [
    "AggregatedFuzzySet",
    "CompiledRuleBase",
    "DEFAULT_BACKEND",
    "DEFAULT_RESOLUTION",
    "DegenerateSetError",
    "FuzzyPartition",
    "FuzzyRule",
    "FuzzyRuleBase",
    "InferenceEngine",
    "MembershipFunction",
    "RuleBaseError",
    "available_backends",
    "defuzzify_coa",
    "fuzzify",
    "membership",
    "shoulder_left",
    "shoulder_right",
    "trapezoidal",
    "triangular",
]
