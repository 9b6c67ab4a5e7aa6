# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inference kernel: the hot loop behind per-event delta computation.

Mirrors _kernels_py semantics exactly; see that module for the reference
implementation.  Built by setup.py when Cython and a C compiler are
available.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef inline double _degree(int shape, double p0, double p1, double p2, double p3, double x) nogil:
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


cdef class Kernel:
    """Fused fuzzify -> infer -> defuzzify evaluator over a compiled pack."""

    cdef int n_rules, n_inputs, n_outputs, n_out_labels, resolution
    cdef int[::1] ant_input, ant_mf, ant_offset
    cdef int[::1] cons_out, cons_label, cons_offset
    cdef int[::1] in_shape, out_label_offset
    cdef double[::1] weights, w
    cdef double[:, ::1] in_params, curves, wxs

    def __init__(self, pack):
        self.n_rules = pack.n_rules
        self.n_inputs = pack.n_inputs
        self.n_outputs = pack.n_outputs
        self.n_out_labels = pack.n_out_labels
        self.resolution = pack.resolution
        self.ant_input = pack.ant_input
        self.ant_mf = pack.ant_mf
        self.ant_offset = pack.ant_offset
        self.cons_out = pack.cons_out
        self.cons_label = pack.cons_label
        self.cons_offset = pack.cons_offset
        self.in_shape = pack.in_shape
        self.in_params = pack.in_params
        self.out_label_offset = pack.out_label_offset
        self.weights = pack.weights
        self.w = pack.w
        self.curves = pack.curves
        self.wxs = pack.wxs

    cdef void _rule_strengths(self, double[::1] values, double[::1] out) nogil:
        cdef int r, k, mf
        cdef double s, d
        for r in range(self.n_rules):
            s = 1.0
            for k in range(self.ant_offset[r], self.ant_offset[r + 1]):
                mf = self.ant_mf[k]
                d = _degree(
                    self.in_shape[mf],
                    self.in_params[mf, 0],
                    self.in_params[mf, 1],
                    self.in_params[mf, 2],
                    self.in_params[mf, 3],
                    values[self.ant_input[k]],
                )
                if d < s:
                    s = d
            out[r] = s * self.weights[r]

    def rule_strengths(self, double[::1] values, double[::1] out):
        self._rule_strengths(values, out)

    cdef int _infer_centroids(
        self, double[::1] values, double[::1] strengths, double[::1] label_strengths, double[::1] out
    ) nogil:
        cdef int r, k, o, j, lab, lo, hi
        cdef double agg, clipped, num, den

        self._rule_strengths(values, strengths)

        for lab in range(self.n_out_labels):
            label_strengths[lab] = 0.0
        for r in range(self.n_rules):
            for k in range(self.cons_offset[r], self.cons_offset[r + 1]):
                lab = self.cons_label[k]
                if strengths[r] > label_strengths[lab]:
                    label_strengths[lab] = strengths[r]

        for o in range(self.n_outputs):
            lo = self.out_label_offset[o]
            hi = self.out_label_offset[o + 1]
            num = 0.0
            den = 0.0
            for j in range(self.resolution):
                agg = 0.0
                for lab in range(lo, hi):
                    clipped = self.curves[lab, j]
                    if label_strengths[lab] < clipped:
                        clipped = label_strengths[lab]
                    if clipped > agg:
                        agg = clipped
                num += self.wxs[o, j] * agg
                den += self.w[j] * agg
            if den <= 0.0:
                return -(o + 1)
            out[o] = num / den
        return 0

    def infer_centroids(self, double[::1] values, double[::1] out):
        """Centroid per output; returns 0, or -(o+1) when output o is degenerate."""
        cdef double[::1] strengths = np.empty(self.n_rules)
        cdef double[::1] label_strengths = np.empty(self.n_out_labels)
        return self._infer_centroids(values, strengths, label_strengths, out)

    def infer_centroids_batch(self, double[:, ::1] values, double[:, ::1] out):
        cdef double[::1] strengths = np.empty(self.n_rules)
        cdef double[::1] label_strengths = np.empty(self.n_out_labels)
        cdef int i
        cdef int rc = 0
        with nogil:
            for i in range(values.shape[0]):
                rc = self._infer_centroids(values[i], strengths, label_strengths, out[i])
                if rc != 0:
                    break
        return rc
