"""Labeled fuzzy partitions over a closed real universe."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .membership import MembershipFunction


@dataclass(frozen=True)
class FuzzyPartition:
    """Ordered (label, membership function) pairs over [lo, hi].

    Every function's breakpoints must lie inside the universe.  Partitions
    used by the default configuration are additionally Ruspini (degrees sum
    to 1 everywhere); that property is checked by is_ruspini(), not forced
    on arbitrary partitions.
    """

    name: str
    universe: tuple[float, float]
    labels: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self) -> None:
        lo, hi = (float(self.universe[0]), float(self.universe[1]))
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"universe must be a finite interval, got [{lo}, {hi}]")
        object.__setattr__(self, "universe", (lo, hi))
        if not self.labels:
            raise ValueError(f"partition {self.name!r} has no labels")
        seen = set()
        for label, mf in self.labels:
            if label in seen:
                raise ValueError(f"duplicate label {label!r} in partition {self.name!r}")
            seen.add(label)
            s_lo, s_hi = mf.support
            if s_lo < lo or s_hi > hi:
                raise ValueError(
                    f"label {label!r} support [{s_lo:g}, {s_hi:g}] leaves universe "
                    f"[{lo:g}, {hi:g}] of partition {self.name!r}"
                )

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.labels)

    def function(self, label: str) -> MembershipFunction:
        for name, mf in self.labels:
            if name == label:
                return mf
        raise KeyError(f"partition {self.name!r} has no label {label!r}")

    def __contains__(self, label: str) -> bool:
        return any(name == label for name, _ in self.labels)

    def check_range(self, x: float) -> float:
        lo, hi = self.universe
        x = float(x)
        if not lo <= x <= hi:
            raise ValueError(
                f"input {x!r} outside universe [{lo:g}, {hi:g}] of partition {self.name!r}"
            )
        return x

    def fuzzify(self, x: float) -> list[tuple[str, float]]:
        """One membership degree per label, in partition order.

        Raises ValueError when x leaves the universe: callers are expected
        to clamp upstream, so an excursion here is a bug, not data.
        """
        x = self.check_range(x)
        return [(name, mf(x)) for name, mf in self.labels]

    def degrees(self, x: float) -> np.ndarray:
        x = self.check_range(x)
        return np.array([mf(x) for _, mf in self.labels], dtype=np.float64)

    def grid(self, resolution: int) -> np.ndarray:
        """resolution uniformly spaced samples spanning the universe."""
        if resolution < 2:
            raise ValueError("resolution must be at least 2")
        lo, hi = self.universe
        return np.linspace(lo, hi, resolution)

    def is_ruspini(self, resolution: int = 10001, tol: float = 1e-9) -> bool:
        """True when label degrees sum to 1 everywhere on a dense sample."""
        xs = self.grid(resolution)
        total = np.zeros_like(xs)
        for _, mf in self.labels:
            total += mf.sample(xs)
        return bool(np.all(np.abs(total - 1.0) <= tol))


def fuzzify(p: FuzzyPartition, x: float) -> list[tuple[str, float]]:
    """Functional alias for p.fuzzify(x)."""
    return p.fuzzify(x)
