"""Pure-Python (numpy) inference kernel.

Fallback for environments without the compiled extension; selected by
oculus.fuzzy.backend at import time.  Semantics match _kernels.pyx
operation for operation: min-conjunction scaled by rule weight, clip at
firing strength, pointwise max aggregation, trapezoid-weighted centroid.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def _degree(shape: int, p0: float, p1: float, p2: float, p3: float, x: float) -> float:
    # Shape codes: 0 triangular, 1 trapezoidal, 2 shoulder-left, 3 shoulder-right.
    if shape == 0:
        if x < p0 or x > p2:
            return 0.0
        if x == p1:
            return 1.0
        if x < p1:
            return (x - p0) / (p1 - p0)
        return (p2 - x) / (p2 - p1)
    if shape == 1:
        if x < p0 or x > p3:
            return 0.0
        if p1 <= x <= p2:
            return 1.0
        if x < p1:
            return (x - p0) / (p1 - p0)
        return (p3 - x) / (p3 - p2)
    if shape == 2:
        if x <= p0:
            return 1.0
        if x >= p1:
            return 0.0
        return (p1 - x) / (p1 - p0)
    if x >= p1:
        return 1.0
    if x <= p0:
        return 0.0
    return (x - p0) / (p1 - p0)


class Kernel:
    """Fused fuzzify -> infer -> defuzzify evaluator over a compiled pack."""

    def __init__(self, pack) -> None:
        self._pack = pack

    def rule_strengths(self, values: np.ndarray, out: np.ndarray) -> None:
        p = self._pack
        for r in range(p.n_rules):
            s = 1.0
            for k in range(p.ant_offset[r], p.ant_offset[r + 1]):
                mf = p.ant_mf[k]
                d = _degree(
                    p.in_shape[mf],
                    p.in_params[mf, 0],
                    p.in_params[mf, 1],
                    p.in_params[mf, 2],
                    p.in_params[mf, 3],
                    values[p.ant_input[k]],
                )
                if d < s:
                    s = d
            out[r] = s * p.weights[r]

    def infer_centroids(self, values: np.ndarray, out: np.ndarray) -> int:
        """Centroid per output; returns 0, or -(o+1) when output o is degenerate."""
        p = self._pack
        strengths = np.empty(p.n_rules)
        self.rule_strengths(values, strengths)

        label_strengths = np.zeros(p.n_out_labels)
        for r in range(p.n_rules):
            for k in range(p.cons_offset[r], p.cons_offset[r + 1]):
                lab = p.cons_label[k]
                if strengths[r] > label_strengths[lab]:
                    label_strengths[lab] = strengths[r]

        for o in range(p.n_outputs):
            lo, hi = p.out_label_offset[o], p.out_label_offset[o + 1]
            agg = np.minimum(p.curves[lo:hi], label_strengths[lo:hi, None]).max(axis=0)
            den = float(p.w @ agg)
            if den <= 0.0:
                return -(o + 1)
            out[o] = float(p.wxs[o] @ agg) / den
        return 0

    def infer_centroids_batch(self, values: np.ndarray, out: np.ndarray) -> int:
        for i in range(values.shape[0]):
            rc = self.infer_centroids(values[i], out[i])
            if rc != 0:
                return rc
        return 0
