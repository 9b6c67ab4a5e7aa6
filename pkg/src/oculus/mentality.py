"""Bounded pleasure-arousal state space and its clamped update dynamics.

The mentality of a robot is a point S = (x_pl, x_ar) in a square affect
plane: pleasure-displeasure on one axis, arousal-sleep on the other, both
limited to [-200, 200].  Inference produces bounded deltas in [-50, 50]
per axis; applying a delta saturates at the plane boundary instead of
wrapping or failing, so the state stays total and continuous.

An optional third coordinate x_af (affinity, accumulated friendliness) is
carried on every state but never evolved here; updates copy it through
unchanged.

The evaluation protocol samples the plane at a fixed 5x4 grid of 20
states (5 pleasure levels x 4 arousal levels), exposed by grid_states().
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final

STATE_MIN: Final = -200.0
STATE_MAX: Final = 200.0
DELTA_MIN: Final = -50.0
DELTA_MAX: Final = 50.0

# 20-state evaluation grid: pleasure gets the finer resolution because it
# is the primary expressive axis; arousal levels sit off the boundary so
# grid movements never start saturated.
GRID_PLEASURE_LEVELS: Final = (-200.0, -100.0, 0.0, 100.0, 200.0)
GRID_AROUSAL_LEVELS: Final = (-150.0, -50.0, 50.0, 150.0)

_PLEASURE_NAMES: Final = ("very displeased", "displeased", "neutral", "pleased", "very pleased")
_AROUSAL_NAMES: Final = ("sleepy", "calm", "lively", "excited")


def clamp(value: float, lo: float, hi: float) -> float:
    """Saturate value into [lo, hi]."""
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class MentalityState:
    """Position in the affect plane; construction rejects out-of-range values."""

    x_pl: float
    x_ar: float
    x_af: float = 0.0

    def __post_init__(self) -> None:
        for name in ("x_pl", "x_ar", "x_af"):
            v = float(getattr(self, name))
            if not STATE_MIN <= v <= STATE_MAX:
                raise ValueError(f"{name}={v!r} outside [{STATE_MIN:g}, {STATE_MAX:g}]")
            object.__setattr__(self, name, v)

    @classmethod
    def neutral(cls) -> "MentalityState":
        return cls(0.0, 0.0)


@dataclass(frozen=True)
class StateDelta:
    """Bounded per-axis change produced by one inference step."""

    d_pl: float
    d_ar: float

    def __post_init__(self) -> None:
        for name in ("d_pl", "d_ar"):
            v = float(getattr(self, name))
            if not DELTA_MIN <= v <= DELTA_MAX:
                raise ValueError(f"{name}={v!r} outside [{DELTA_MIN:g}, {DELTA_MAX:g}]")
            object.__setattr__(self, name, v)

    @classmethod
    def zero(cls) -> "StateDelta":
        return cls(0.0, 0.0)


def apply_delta(s: MentalityState, d: StateDelta) -> MentalityState:
    """Add a delta to a state, saturating each axis at the plane boundary.

    Interior sums are exact addition; x_af passes through untouched.
    """
    return MentalityState(
        x_pl=clamp(s.x_pl + d.d_pl, STATE_MIN, STATE_MAX),
        x_ar=clamp(s.x_ar + d.d_ar, STATE_MIN, STATE_MAX),
        x_af=s.x_af,
    )


@dataclass(frozen=True)
class StateGrid:
    """The ordered 20-state evaluation grid with human-readable labels."""

    states: tuple[MentalityState, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.states) != 20 or len(self.labels) != 20:
            raise ValueError("grid must hold exactly 20 states and labels")
        if len({(s.x_pl, s.x_ar) for s in self.states}) != 20:
            raise ValueError("grid states must be distinct")

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, index: int) -> MentalityState:
        return self.states[index]

    def index_of(self, s: MentalityState) -> int:
        """Grid index of a state matching on (x_pl, x_ar); raises if absent."""
        for i, g in enumerate(self.states):
            if g.x_pl == s.x_pl and g.x_ar == s.x_ar:
                return i
        raise ValueError(f"state ({s.x_pl:g}, {s.x_ar:g}) is not a grid state")


def grid_states() -> StateGrid:
    """The fixed 5x4 presentation grid, row-major with pleasure as the slow axis.

    First state is (-200, -150); two calls return identical sequences.
    """
    states = []
    labels = []
    for pi, pl in enumerate(GRID_PLEASURE_LEVELS):
        for ai, ar in enumerate(GRID_AROUSAL_LEVELS):
            states.append(MentalityState(pl, ar))
            labels.append(f"{_PLEASURE_NAMES[pi]} / {_AROUSAL_NAMES[ai]}")
    return StateGrid(states=tuple(states), labels=tuple(labels))
