"""Piecewise-linear membership functions.

Four shapes cover the usual Ruspini-style partitions:

    triangular(a, b, c)      0 at a, peak 1 at b, 0 at c
    trapezoidal(a, b, c, d)  0 at a, 1 on [b, c], 0 at d
    shoulder-left(a, b)      1 up to a, ramp down to 0 at b
    shoulder-right(a, b)     0 up to a, ramp up to 1 at b

Breakpoints must be nondecreasing; degenerate segments (equal breakpoints)
collapse to steps.  Scalar evaluation and vectorized sampling use the same
branch conditions so they agree exactly on breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final

import numpy as np

TRIANGULAR: Final = "triangular"
TRAPEZOIDAL: Final = "trapezoidal"
SHOULDER_LEFT: Final = "shoulder-left"
SHOULDER_RIGHT: Final = "shoulder-right"

PARAM_COUNTS: Final = {
    TRIANGULAR: 3,
    TRAPEZOIDAL: 4,
    SHOULDER_LEFT: 2,
    SHOULDER_RIGHT: 2,
}

# Integer codes shared with the compiled kernel.
SHAPE_CODES: Final = {
    TRIANGULAR: 0,
    TRAPEZOIDAL: 1,
    SHOULDER_LEFT: 2,
    SHOULDER_RIGHT: 3,
}


@dataclass(frozen=True)
class MembershipFunction:
    shape: str
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.shape not in PARAM_COUNTS:
            raise ValueError(f"unknown membership shape {self.shape!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != PARAM_COUNTS[self.shape]:
            raise ValueError(
                f"{self.shape} takes {PARAM_COUNTS[self.shape]} breakpoints, got {len(params)}"
            )
        if any(not np.isfinite(p) for p in params):
            raise ValueError(f"non-finite breakpoint in {params}")
        if any(b < a for a, b in zip(params, params[1:])):
            raise ValueError(f"breakpoints must be nondecreasing, got {params}")
        object.__setattr__(self, "params", params)

    def __call__(self, x: float) -> float:
        """Membership degree in [0, 1]; 0 outside the support."""
        x = float(x)
        p = self.params
        if self.shape == TRIANGULAR:
            a, b, c = p
            if x < a or x > c:
                return 0.0
            if x == b:
                return 1.0
            if x < b:
                return (x - a) / (b - a)
            return (c - x) / (c - b)
        if self.shape == TRAPEZOIDAL:
            a, b, c, d = p
            if x < a or x > d:
                return 0.0
            if b <= x <= c:
                return 1.0
            if x < b:
                return (x - a) / (b - a)
            return (d - x) / (d - c)
        if self.shape == SHOULDER_LEFT:
            a, b = p
            if x <= a:
                return 1.0
            if x >= b:
                return 0.0
            return (b - x) / (b - a)
        # shoulder-right
        a, b = p
        if x >= b:
            return 1.0
        if x <= a:
            return 0.0
        return (x - a) / (b - a)

    def sample(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; mirrors __call__ branch-for-branch."""
        xs = np.asarray(xs, dtype=np.float64)
        y = np.zeros_like(xs)
        p = self.params
        if self.shape == TRIANGULAR:
            a, b, c = p
            if b > a:
                m = (xs >= a) & (xs < b)
                y[m] = (xs[m] - a) / (b - a)
            if c > b:
                m = (xs > b) & (xs <= c)
                y[m] = (c - xs[m]) / (c - b)
            y[xs == b] = 1.0
        elif self.shape == TRAPEZOIDAL:
            a, b, c, d = p
            if b > a:
                m = (xs >= a) & (xs < b)
                y[m] = (xs[m] - a) / (b - a)
            if d > c:
                m = (xs > c) & (xs <= d)
                y[m] = (d - xs[m]) / (d - c)
            y[(xs >= b) & (xs <= c)] = 1.0
        elif self.shape == SHOULDER_LEFT:
            a, b = p
            y[xs <= a] = 1.0
            if b > a:
                m = (xs > a) & (xs < b)
                y[m] = (b - xs[m]) / (b - a)
        else:  # shoulder-right
            a, b = p
            y[xs >= b] = 1.0
            if b > a:
                m = (xs > a) & (xs < b)
                y[m] = (xs[m] - a) / (b - a)
        return y

    @property
    def support(self) -> tuple[float, float]:
        """Closed interval outside which membership is identically 0 or,
        for shoulders, identically constant (the flat side counts as support)."""
        p = self.params
        return (p[0], p[-1])

    def shifted(self, offset: float) -> "MembershipFunction":
        """Same shape translated by offset along the universe."""
        return MembershipFunction(self.shape, tuple(p + offset for p in self.params))


def triangular(a: float, b: float, c: float) -> MembershipFunction:
    return MembershipFunction(TRIANGULAR, (a, b, c))


def trapezoidal(a: float, b: float, c: float, d: float) -> MembershipFunction:
    return MembershipFunction(TRAPEZOIDAL, (a, b, c, d))


def shoulder_left(a: float, b: float) -> MembershipFunction:
    return MembershipFunction(SHOULDER_LEFT, (a, b))


def shoulder_right(a: float, b: float) -> MembershipFunction:
    return MembershipFunction(SHOULDER_RIGHT, (a, b))


def membership(mf: MembershipFunction, x: float) -> float:
    """Functional alias for mf(x)."""
    if not np.isfinite(x):
        raise ValueError(f"membership input must be finite, got {x!r}")
    return mf(x)
