"""Mamdani inference and center-of-area defuzzification.

Rule evaluation uses min for antecedent conjunction and implication
(clipping), max for aggregation across rules.  Aggregated output sets are
piecewise-linear curves; infer() materializes them as AggregatedFuzzySet
objects sampled on demand, while evaluate() runs a fused kernel straight
to centroids for the per-event hot path.  Both routes share the same
sampled-curve semantics and are cross-checked in the test suite.

The centroid is computed over uniformly spaced samples with trapezoid
endpoint weighting: sum(w_i x_i mu_i) / sum(w_i mu_i) with w = 1/2 at the
two ends, which is the ratio of trapezoid-rule integrals of x*mu and mu.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import backend as _backend
from .errors import DegenerateSetError, RuleBaseError
from .membership import SHAPE_CODES, MembershipFunction
from .rulebase import FuzzyRuleBase

DEFAULT_RESOLUTION = 1001


def _trapezoid_weights(resolution: int) -> np.ndarray:
    w = np.ones(resolution)
    w[0] = 0.5
    w[-1] = 0.5
    return w


@dataclass(frozen=True)
class AggregatedFuzzySet:
    """Pointwise max of consequent sets clipped at their firing strengths."""

    name: str
    universe: tuple[float, float]
    clipped: tuple[tuple[MembershipFunction, float], ...]

    def grid(self, resolution: int) -> np.ndarray:
        lo, hi = self.universe
        return np.linspace(lo, hi, resolution)

    def sample(self, resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
        """The aggregate curve at `resolution` uniform samples of the universe."""
        xs = self.grid(resolution)
        agg = np.zeros(resolution)
        for mf, strength in self.clipped:
            np.maximum(agg, np.minimum(mf.sample(xs), strength), out=agg)
        return agg

    def shifted(self, offset: float) -> "AggregatedFuzzySet":
        lo, hi = self.universe
        return AggregatedFuzzySet(
            name=self.name,
            universe=(lo + offset, hi + offset),
            clipped=tuple((mf.shifted(offset), s) for mf, s in self.clipped),
        )


def defuzzify_coa(aggset: AggregatedFuzzySet, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Center of area of an aggregated set, sampled at `resolution` points.

    Raises DegenerateSetError when the set is identically zero (no rule
    fired), which a complete rule base rules out.
    """
    if resolution < 3:
        raise ValueError(f"resolution must be at least 3, got {resolution}")
    mu = aggset.sample(resolution)
    xs = aggset.grid(resolution)
    w = _trapezoid_weights(resolution)
    den = float((w * mu).sum())
    if den <= 0.0:
        raise DegenerateSetError(
            f"aggregated set for output {aggset.name!r} is identically zero"
        )
    return float((w * xs * mu).sum()) / den


class CompiledRuleBase:
    """Flat array form of a rule base, shared by both evaluation kernels.

    Inputs and outputs keep their declaration order; antecedent and
    consequent clauses are stored CSR-style with per-rule offsets, and
    every output label's membership curve is pre-sampled on the output
    universe.
    """

    def __init__(self, rulebase: FuzzyRuleBase, resolution: int = DEFAULT_RESOLUTION) -> None:
        if resolution < 3:
            raise ValueError(f"resolution must be at least 3, got {resolution}")
        self.rulebase = rulebase
        self.resolution = resolution

        input_index = {name: i for i, name in enumerate(rulebase.inputs)}
        self.n_inputs = len(input_index)
        self.n_outputs = len(rulebase.outputs)
        self.n_rules = len(rulebase.rules)

        # Flat input-label table: shape code + padded params per label.
        in_shape: list[int] = []
        in_params: list[tuple[float, float, float, float]] = []
        in_label_index: dict[tuple[str, str], int] = {}
        for name, part in rulebase.inputs.items():
            for label, mf in part.labels:
                in_label_index[(name, label)] = len(in_shape)
                in_shape.append(SHAPE_CODES[mf.shape])
                padded = mf.params + (0.0,) * (4 - len(mf.params))
                in_params.append(padded)
        self.in_shape = np.ascontiguousarray(in_shape, dtype=np.int32)
        self.in_params = np.ascontiguousarray(in_params, dtype=np.float64)

        # Flat output-label table with pre-sampled curves.
        out_label_index: dict[tuple[str, str], int] = {}
        out_offsets = [0]
        curves: list[np.ndarray] = []
        wxs_rows: list[np.ndarray] = []
        w = _trapezoid_weights(resolution)
        for name, part in rulebase.outputs.items():
            lo, hi = part.universe
            xs = np.linspace(lo, hi, resolution)
            wxs_rows.append(w * xs)
            for label, mf in part.labels:
                out_label_index[(name, label)] = len(curves)
                curves.append(mf.sample(xs))
            out_offsets.append(len(curves))
        self.n_out_labels = len(curves)
        self.curves = np.ascontiguousarray(curves, dtype=np.float64)
        self.out_label_offset = np.ascontiguousarray(out_offsets, dtype=np.int32)
        self.w = np.ascontiguousarray(w, dtype=np.float64)
        self.wxs = np.ascontiguousarray(wxs_rows, dtype=np.float64)

        # CSR rule clauses.
        ant_input: list[int] = []
        ant_mf: list[int] = []
        ant_offset = [0]
        cons_out: list[int] = []
        cons_label: list[int] = []
        cons_offset = [0]
        output_index = {name: i for i, name in enumerate(rulebase.outputs)}
        for rule in rulebase.rules:
            for name, label in rule.antecedent:
                ant_input.append(input_index[name])
                ant_mf.append(in_label_index[(name, label)])
            ant_offset.append(len(ant_input))
            for name, label in rule.consequent:
                cons_out.append(output_index[name])
                cons_label.append(out_label_index[(name, label)])
            cons_offset.append(len(cons_out))
        self.ant_input = np.ascontiguousarray(ant_input, dtype=np.int32)
        self.ant_mf = np.ascontiguousarray(ant_mf, dtype=np.int32)
        self.ant_offset = np.ascontiguousarray(ant_offset, dtype=np.int32)
        self.cons_out = np.ascontiguousarray(cons_out, dtype=np.int32)
        self.cons_label = np.ascontiguousarray(cons_label, dtype=np.int32)
        self.cons_offset = np.ascontiguousarray(cons_offset, dtype=np.int32)
        self.weights = np.ascontiguousarray([r.weight for r in rulebase.rules], dtype=np.float64)


class InferenceEngine:
    """Rule-base evaluator exposing both the curve route and the fused route."""

    def __init__(
        self,
        rulebase: FuzzyRuleBase,
        resolution: int = DEFAULT_RESOLUTION,
        backend: str | None = None,
    ) -> None:
        self.rulebase = rulebase
        self.resolution = resolution
        self.pack = CompiledRuleBase(rulebase, resolution)
        self.backend = backend or _backend.DEFAULT_BACKEND
        self._kernel = _backend.make_kernel(self.pack, self.backend)

    # -- shared plumbing ----------------------------------------------------

    def _vector_from(self, inputs: Mapping[str, float]) -> np.ndarray:
        declared = self.rulebase.input_names
        missing = [name for name in declared if name not in inputs]
        if missing:
            raise RuleBaseError(f"missing input(s): {', '.join(missing)}")
        extra = [name for name in inputs if name not in self.rulebase.inputs]
        if extra:
            raise RuleBaseError(f"undeclared input(s): {', '.join(extra)}")
        values = np.empty(len(declared))
        for i, name in enumerate(declared):
            values[i] = self.rulebase.inputs[name].check_range(inputs[name])
        return values

    def firing_strengths(self, inputs: Mapping[str, float]) -> np.ndarray:
        """Per-rule firing strength: min over antecedent degrees, times weight."""
        values = self._vector_from(inputs)
        out = np.empty(self.pack.n_rules)
        self._kernel.rule_strengths(values, out)
        return out

    # -- curve route ----------------------------------------------------------

    def infer(self, inputs: Mapping[str, float]) -> dict[str, AggregatedFuzzySet]:
        """Aggregated output set per output name (labels clipped, max-merged)."""
        strengths = self.firing_strengths(inputs)
        label_strength: dict[tuple[str, str], float] = {}
        for rule, s in zip(self.rulebase.rules, strengths):
            for name, label in rule.consequent:
                key = (name, label)
                if s > label_strength.get(key, 0.0):
                    label_strength[key] = float(s)
        result = {}
        for name, part in self.rulebase.outputs.items():
            clipped = tuple(
                (mf, label_strength[(name, label)])
                for label, mf in part.labels
                if label_strength.get((name, label), 0.0) > 0.0
            )
            result[name] = AggregatedFuzzySet(name=name, universe=part.universe, clipped=clipped)
        return result

    # -- fused route ------------------------------------------------------------

    def evaluate_array(self, values: np.ndarray) -> np.ndarray:
        """Centroids for one input vector in declaration order (hot path)."""
        out = np.empty(self.pack.n_outputs)
        rc = self._kernel.infer_centroids(np.ascontiguousarray(values, dtype=np.float64), out)
        if rc != 0:
            name = self.rulebase.output_names[-rc - 1]
            raise DegenerateSetError(f"aggregated set for output {name!r} is identically zero")
        return out

    def evaluate_batch(self, values: np.ndarray) -> np.ndarray:
        """Row-wise evaluate_array over an (n, n_inputs) matrix."""
        values = np.ascontiguousarray(values, dtype=np.float64)
        out = np.empty((values.shape[0], self.pack.n_outputs))
        rc = self._kernel.infer_centroids_batch(values, out)
        if rc != 0:
            name = self.rulebase.output_names[-rc - 1]
            raise DegenerateSetError(f"aggregated set for output {name!r} is identically zero")
        return out

    def evaluate(self, inputs: Mapping[str, float]) -> dict[str, float]:
        """Crisp centroid per output name."""
        values = self._vector_from(inputs)
        crisp = self.evaluate_array(values)
        return {name: float(v) for name, v in zip(self.rulebase.output_names, crisp)}
