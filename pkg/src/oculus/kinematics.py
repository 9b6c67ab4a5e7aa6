"""5-DOF eye poses and timed expression movements.

Joint layout: one aperture per eyelid pair (left/right, linked upper and
lower lids move as one), independent left/right yaw, and a common pitch.
The mentality-to-pose map is linear and monotone:

    lid aperture = 0.5 + x_ar / 400     (asleep -200 -> 0.0, excited +200 -> 1.0)
    pitch        = 20 * x_pl / 200      (pleasure looks up, displeasure down)
    yaw          = 0 at rest

Movements between states interpolate in state space with smoothstep
(3u^2 - 2u^3), then map each interpolated state to a pose, giving C1
trajectories with no overshoot.  Blinking is a seeded point process whose
mean interval shrinks as arousal rises.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from typing import Final, Iterator

from .mentality import MentalityState, clamp

LID_MIN: Final = 0.0
LID_MAX: Final = 1.0
YAW_LIMIT_DEG: Final = 30.0
PITCH_LIMIT_DEG: Final = 20.0

MIN_MOVEMENT_MS: Final = 100
DEFAULT_MOVEMENT_MS: Final = 800

# Keyframes land roughly every 100 ms; the count is kept odd so the exact
# midpoint of the movement is always a keyframe.
_KEYFRAME_SPACING_MS: Final = 200

TRACE_HEADER: Final = "time_ms,lid_left,lid_right,yaw_left,yaw_right,pitch"


@dataclass(frozen=True)
class EyePose:
    """Joint targets; construction rejects out-of-limit values."""

    lid_left: float
    lid_right: float
    yaw_left: float
    yaw_right: float
    pitch: float

    def __post_init__(self) -> None:
        for name, lo, hi in (
            ("lid_left", LID_MIN, LID_MAX),
            ("lid_right", LID_MIN, LID_MAX),
            ("yaw_left", -YAW_LIMIT_DEG, YAW_LIMIT_DEG),
            ("yaw_right", -YAW_LIMIT_DEG, YAW_LIMIT_DEG),
            ("pitch", -PITCH_LIMIT_DEG, PITCH_LIMIT_DEG),
        ):
            v = float(getattr(self, name))
            if not lo <= v <= hi:
                raise ValueError(f"{name}={v!r} outside joint limit [{lo:g}, {hi:g}]")
            object.__setattr__(self, name, v)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.lid_left, self.lid_right, self.yaw_left, self.yaw_right, self.pitch)


@dataclass(frozen=True)
class ExpressionMovement:
    """Timed keyframe trajectory; times strictly increase from 0."""

    keyframes: tuple[tuple[int, EyePose], ...]

    def __post_init__(self) -> None:
        if len(self.keyframes) < 2:
            raise ValueError("movement needs at least two keyframes")
        times = [t for t, _ in self.keyframes]
        if times[0] != 0:
            raise ValueError(f"first keyframe must be at t=0, got {times[0]}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")

    @property
    def duration_ms(self) -> int:
        return self.keyframes[-1][0]

    def pose_at(self, t_ms: float) -> EyePose:
        """Linear interpolation between bracketing keyframes; clamped ends."""
        if t_ms <= 0:
            return self.keyframes[0][1]
        if t_ms >= self.duration_ms:
            return self.keyframes[-1][1]
        for (t0, p0), (t1, p1) in zip(self.keyframes, self.keyframes[1:]):
            if t0 <= t_ms <= t1:
                u = (t_ms - t0) / (t1 - t0)
                a, b = p0.as_tuple(), p1.as_tuple()
                return EyePose(*(x + u * (y - x) for x, y in zip(a, b)))
        raise AssertionError("unreachable: t_ms inside [0, duration]")

    def sample(self, rate_hz: float) -> Iterator[tuple[float, EyePose]]:
        """Uniform resampling at rate_hz, endpoints included."""
        if rate_hz <= 0:
            raise ValueError(f"rate_hz must be positive, got {rate_hz}")
        dt = 1000.0 / rate_hz
        n = int(round(self.duration_ms / dt))
        for k in range(n + 1):
            t = min(k * dt, float(self.duration_ms))
            yield t, self.pose_at(t)


def pose_from_state(s: MentalityState) -> EyePose:
    """Resting pose for a mentality state (yaws centered)."""
    aperture = clamp(0.5 + s.x_ar / 400.0, LID_MIN, LID_MAX)
    pitch = clamp(PITCH_LIMIT_DEG * s.x_pl / 200.0, -PITCH_LIMIT_DEG, PITCH_LIMIT_DEG)
    return EyePose(lid_left=aperture, lid_right=aperture, yaw_left=0.0, yaw_right=0.0, pitch=pitch)


def _smoothstep(u: float) -> float:
    return u * u * (3.0 - 2.0 * u)


def movement_between(
    s_from: MentalityState, s_to: MentalityState, duration_ms: int = DEFAULT_MOVEMENT_MS
) -> ExpressionMovement:
    """Expression movement from one state's pose to another's.

    Interpolates in state space with smoothstep and maps every intermediate
    state through pose_from_state, so each keyframe inherits the joint
    limits of a valid state.
    """
    if duration_ms < MIN_MOVEMENT_MS:
        raise ValueError(f"duration_ms must be >= {MIN_MOVEMENT_MS}, got {duration_ms}")
    n = 2 * max(1, round(duration_ms / _KEYFRAME_SPACING_MS)) + 1
    frames = []
    for i in range(n):
        t = round(i * duration_ms / (n - 1))
        u = t / duration_ms
        w = _smoothstep(u)
        state = MentalityState(
            x_pl=s_from.x_pl + w * (s_to.x_pl - s_from.x_pl),
            x_ar=s_from.x_ar + w * (s_to.x_ar - s_from.x_ar),
            x_af=s_from.x_af + w * (s_to.x_af - s_from.x_af),
        )
        frames.append((t, pose_from_state(state)))
    return ExpressionMovement(keyframes=tuple(frames))


@dataclass(frozen=True)
class BlinkPolicy:
    """Arousal-dependent blink scheduling.

    Nominal interval is base_interval_ms - arousal_gain * x_ar, jittered
    +/-20% and floored at blink_duration_ms so blinks never overlap.
    """

    base_interval_ms: float = 4000.0
    arousal_gain: float = 12.0
    blink_duration_ms: float = 150.0

    def __post_init__(self) -> None:
        if self.blink_duration_ms <= 0:
            raise ValueError("blink_duration_ms must be positive")
        if self.base_interval_ms <= 0:
            raise ValueError("base_interval_ms must be positive")

    def nominal_interval_ms(self, s: MentalityState) -> float:
        return max(self.blink_duration_ms, self.base_interval_ms - self.arousal_gain * s.x_ar)


def blink_times(
    policy: BlinkPolicy, s: MentalityState, horizon_ms: int, seed: int
) -> list[float]:
    """Blink onset times inside [0, horizon_ms), deterministic per seed."""
    if horizon_ms <= 0:
        raise ValueError(f"horizon_ms must be positive, got {horizon_ms}")
    rng = random.Random(seed)
    nominal = policy.nominal_interval_ms(s)
    times: list[float] = []
    t = 0.0
    while True:
        interval = max(policy.blink_duration_ms, nominal * rng.uniform(0.8, 1.2))
        t += interval
        if t >= horizon_ms:
            return times
        times.append(t)


def blink_movement(base: EyePose, policy: BlinkPolicy) -> ExpressionMovement:
    """Close-and-reopen trajectory superimposed on a resting pose."""
    closed = EyePose(0.0, 0.0, base.yaw_left, base.yaw_right, base.pitch)
    half = max(1, round(policy.blink_duration_ms / 2))
    return ExpressionMovement(
        keyframes=((0, base), (half, closed), (2 * half, base))
    )


def keyframe_dicts(movement: ExpressionMovement) -> list[dict]:
    """Keyframes as JSON-ready objects, the shape POSE.COMMAND carries."""
    return [
        {
            "time_ms": t,
            "lid_left": p.lid_left,
            "lid_right": p.lid_right,
            "yaw_left": p.yaw_left,
            "yaw_right": p.yaw_right,
            "pitch": p.pitch,
        }
        for t, p in movement.keyframes
    ]


def write_trace(movement: ExpressionMovement, rate_hz: float, fp) -> int:
    """CSV pose trace at a fixed sample rate; returns the number of rows."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(TRACE_HEADER.split(","))
    rows = 0
    for t, pose in movement.sample(rate_hz):
        writer.writerow(
            [f"{t:g}", *(f"{v:.6g}" for v in pose.as_tuple())]
        )
        rows += 1
    return rows


def trace_csv(movement: ExpressionMovement, rate_hz: float) -> str:
    buf = io.StringIO()
    write_trace(movement, rate_hz, buf)
    return buf.getvalue()
