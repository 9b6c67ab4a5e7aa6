"""Typed pub/sub middleware for a desk of five eye robots.

The bus carries a closed set of message types between components
(robots, experiment harness, operator console).  Delivery rules:

  - total order: publishes are serialized under one lock, so every
    subscriber observes the same global message order
  - per-source FIFO: seq numbers strictly increase per source and
    delivery preserves publish order
  - single-writer robots: a robot's state changes only inside its own
    event handler, which the serialized dispatch runs to completion
    before the next message enters

Handlers run synchronously on the publisher's thread; a handler may
itself publish (robots do: STATE.UPDATE then POSE.COMMAND while
handling EVENT.RECOMMENDATION), which delivers depth-first and keeps
the reaction adjacent to its cause in the log.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Final

from .intent import (
    IntentConfig,
    IntentContractError,
    RecommendationEvent,
    compute_delta,
)
from .kinematics import (
    DEFAULT_MOVEMENT_MS,
    ExpressionMovement,
    keyframe_dicts,
    movement_between,
)
from .mentality import MentalityState, StateDelta, apply_delta

# ── message model ────────────────────────────────────────────────────

MSG_REGISTER: Final = "REGISTER"
MSG_RECOMMENDATION: Final = "EVENT.RECOMMENDATION"
MSG_SPEECH_CATEGORY: Final = "EVENT.SPEECH_CATEGORY"
MSG_STATE_UPDATE: Final = "STATE.UPDATE"
MSG_POSE_COMMAND: Final = "POSE.COMMAND"
MSG_RATING_SUBMIT: Final = "RATING.SUBMIT"
MSG_ERROR: Final = "ERROR"

MESSAGE_TYPES: Final = frozenset(
    {
        MSG_REGISTER,
        MSG_RECOMMENDATION,
        MSG_SPEECH_CATEGORY,
        MSG_STATE_UPDATE,
        MSG_POSE_COMMAND,
        MSG_RATING_SUBMIT,
        MSG_ERROR,
    }
)

# Required payload fields, checked before delivery.  Payloads may carry
# extra fields; these are the ones consumers rely on.
_REQUIRED_FIELDS: Final = {
    MSG_RECOMMENDATION: ("priority",),
    MSG_SPEECH_CATEGORY: ("category",),
    MSG_STATE_UPDATE: ("robot_id", "x_pl", "x_ar"),
    MSG_POSE_COMMAND: ("robot_id", "duration_ms", "keyframes"),
    MSG_RATING_SUBMIT: ("trial_index", "grade"),
}

_WIRE_FIELDS: Final = ("type", "source", "seq", "timestamp_ms", "payload")

BUS_SOURCE: Final = "bus"


@dataclass(frozen=True)
class BusMessage:
    """One bus datagram; the wire format is its JSON object form."""

    type: str
    source: str
    seq: int
    timestamp_ms: int
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "source": self.source,
            "seq": self.seq,
            "timestamp_ms": self.timestamp_ms,
            "payload": self.payload,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BusMessage":
        if not isinstance(d, dict):
            raise ValueError("message must be a JSON object")
        missing = [k for k in _WIRE_FIELDS if k not in d]
        if missing:
            raise ValueError(f"missing field: {missing[0]}")
        unknown = sorted(set(d) - set(_WIRE_FIELDS))
        if unknown:
            raise ValueError(f"unknown field: {unknown[0]}")
        if not isinstance(d["payload"], dict):
            raise ValueError("payload must be an object")
        if not isinstance(d["seq"], int) or isinstance(d["seq"], bool):
            raise ValueError("seq must be an integer")
        return cls(
            type=str(d["type"]),
            source=str(d["source"]),
            seq=d["seq"],
            timestamp_ms=int(d["timestamp_ms"]),
            payload=d["payload"],
        )

    @classmethod
    def from_json(cls, line: str) -> "BusMessage":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValueError(f"invalid JSON: {e.msg}") from e
        return cls.from_dict(obj)


def _default_clock() -> int:
    return int(time.time() * 1000)


class ValidationFailure(ValueError):
    """Internal: publish-side validation problem, turned into ERROR traffic."""


def _validate_payload(msg: BusMessage) -> None:
    for name in _REQUIRED_FIELDS.get(msg.type, ()):
        if name not in msg.payload:
            raise ValidationFailure(f"missing field: {name}")
    if msg.type == MSG_RECOMMENDATION:
        p = msg.payload["priority"]
        if isinstance(p, bool) or not isinstance(p, int) or not 1 <= p <= 6:
            raise ValidationFailure(f"priority must be an integer in 1..6, got {p!r}")
    if msg.type == MSG_RATING_SUBMIT:
        g = msg.payload["grade"]
        if isinstance(g, bool) or not isinstance(g, int) or not 1 <= g <= 6:
            raise ValidationFailure(f"grade must be an integer in 1..6, got {g!r}")


# ── bus ──────────────────────────────────────────────────────────────

Subscriber = Callable[[BusMessage], None]


class MessageBus:
    """In-process pub/sub with per-source FIFO and a full session log.

    clock is injectable so tests and synthetic runs can freeze
    timestamps; it must return milliseconds as an int.
    """

    def __init__(self, clock: Callable[[], int] | None = None) -> None:
        self._lock = threading.RLock()
        self._clock = clock or _default_clock
        self._last_seq: dict[str, int] = {}
        self._subscribers: dict[str | None, list[Subscriber]] = {}
        self._log: list[BusMessage] = []
        self._last_seq[BUS_SOURCE] = 0

    # ── registry ─────────────────────────────────────────────────

    def register(self, source: str) -> None:
        """Admit a source and announce it with a REGISTER message."""
        if not source:
            raise ValueError("source name must be non-empty")
        with self._lock:
            if source in self._last_seq:
                raise ValueError(f"source already registered: {source}")
            self._last_seq[source] = 0
        self.emit(source, MSG_REGISTER, {"component": source})

    def is_registered(self, source: str) -> bool:
        with self._lock:
            return source in self._last_seq

    def sources(self) -> tuple[str, ...]:
        with self._lock:
            return tuple(self._last_seq)

    # ── subscription ─────────────────────────────────────────────

    def subscribe(self, msg_type: str | None, handler: Subscriber) -> Subscriber:
        """Deliver every message of msg_type to handler; None means all types."""
        if msg_type is not None and msg_type not in MESSAGE_TYPES:
            raise ValueError(f"unknown message type: {msg_type}")
        with self._lock:
            self._subscribers.setdefault(msg_type, []).append(handler)
        return handler

    def unsubscribe(self, msg_type: str | None, handler: Subscriber) -> None:
        with self._lock:
            try:
                self._subscribers.get(msg_type, []).remove(handler)
            except ValueError:
                pass

    # ── publish ──────────────────────────────────────────────────

    def publish(self, msg: BusMessage) -> int:
        """Deliver msg to its subscribers; returns how many were reached.

        A rejected message is not delivered: the bus publishes an ERROR
        message carrying the reason instead, and returns 0.  A REGISTER
        message from an unknown source admits that source; this is how
        remote clients join.
        """
        with self._lock:
            try:
                if msg.type == MSG_REGISTER and msg.source and msg.source not in self._last_seq:
                    self._last_seq[msg.source] = msg.seq - 1
                self._validate(msg)
            except ValidationFailure as e:
                self._emit_error(str(e), msg)
                return 0
            self._last_seq[msg.source] = msg.seq
            return self._dispatch(msg)

    def emit(self, source: str, msg_type: str, payload: dict[str, Any] | None = None) -> int:
        """publish() for in-process components: stamps seq and timestamp."""
        with self._lock:
            last = self._last_seq.get(source)
            msg = BusMessage(
                type=msg_type,
                source=source,
                seq=(0 if last is None else last) + 1,
                timestamp_ms=self._clock(),
                payload=payload if payload is not None else {},
            )
            return self.publish(msg)

    def _validate(self, msg: BusMessage) -> None:
        if msg.type not in MESSAGE_TYPES:
            raise ValidationFailure(f"unknown message type: {msg.type}")
        if msg.source not in self._last_seq:
            raise ValidationFailure(f"unregistered source: {msg.source}")
        if msg.seq <= self._last_seq[msg.source]:
            raise ValidationFailure(
                f"seq must increase per source: {msg.source} repeated {msg.seq}"
            )
        _validate_payload(msg)

    def report_error(self, reason: str, *, offending_type: str = "", offending_source: str = "") -> None:
        """Publish an ERROR message on behalf of the bus itself.

        Transport adapters use this for lines that never parsed into a
        message, so the failure still reaches every subscriber.
        """
        with self._lock:
            seq = self._last_seq[BUS_SOURCE] + 1
            self._last_seq[BUS_SOURCE] = seq
            err = BusMessage(
                type=MSG_ERROR,
                source=BUS_SOURCE,
                seq=seq,
                timestamp_ms=self._clock(),
                payload={
                    "reason": reason,
                    "offending_type": offending_type,
                    "offending_source": offending_source,
                },
            )
            self._dispatch(err)

    def _emit_error(self, reason: str, offending: BusMessage) -> None:
        self.report_error(
            reason,
            offending_type=offending.type,
            offending_source=offending.source,
        )

    def _dispatch(self, msg: BusMessage) -> int:
        self._log.append(msg)
        reached = 0
        # Wildcard subscribers (loggers, transports) run before type
        # handlers, so a cause always precedes its nested effects in
        # every observer's stream.
        for handler in tuple(self._subscribers.get(None, ())):
            handler(msg)
        for handler in tuple(self._subscribers.get(msg.type, ())):
            handler(msg)
            reached += 1
        return reached

    # ── log access ───────────────────────────────────────────────

    def history(self, msg_type: str | None = None) -> tuple[BusMessage, ...]:
        with self._lock:
            if msg_type is None:
                return tuple(self._log)
            return tuple(m for m in self._log if m.type == msg_type)


# ── robots ───────────────────────────────────────────────────────────


class Robot:
    """One simulated eye robot: holds state, reacts to recommendation events.

    Exactly one robot on the desk is mobile (it rides the microphone
    cart); the rest sit at fixed positions.  Mobility here is only a
    position attribute, there is no path planning.
    """

    def __init__(
        self,
        robot_id: int,
        config: IntentConfig,
        *,
        mobile: bool = False,
        position: tuple[float, float] = (0.0, 0.0),
        state: MentalityState | None = None,
        movement_duration_ms: int = DEFAULT_MOVEMENT_MS,
    ) -> None:
        if robot_id < 1:
            raise ValueError(f"robot_id must be >= 1, got {robot_id}")
        self.robot_id = robot_id
        self.mobile = mobile
        self.position = (float(position[0]), float(position[1]))
        self.config = config
        self.state = state if state is not None else MentalityState(0.0, 0.0)
        self.movement_duration_ms = movement_duration_ms
        self.speech_log: list[str] = []
        self._bus: MessageBus | None = None

    @property
    def source(self) -> str:
        return f"robot-{self.robot_id}"

    def attach(self, bus: MessageBus) -> None:
        self._bus = bus
        bus.register(self.source)
        bus.subscribe(MSG_RECOMMENDATION, self._handle_recommendation)
        bus.subscribe(MSG_SPEECH_CATEGORY, self._handle_speech)

    def move_to(self, position: tuple[float, float]) -> None:
        if not self.mobile:
            raise ValueError(f"robot {self.robot_id} is fixed")
        self.position = (float(position[0]), float(position[1]))

    # ── event handlers ───────────────────────────────────────────

    def on_recommendation(
        self, ev: RecommendationEvent
    ) -> tuple[StateDelta, MentalityState, ExpressionMovement]:
        """React to one event: update state, then publish the reaction.

        Emits STATE.UPDATE followed by POSE.COMMAND.  On inference
        configuration errors the state stays unchanged and the failure
        is reported as an ERROR message.
        """
        old = self.state
        delta = compute_delta(old, ev, self.config)
        new = apply_delta(old, delta)
        movement = movement_between(old, new, self.movement_duration_ms)
        self.state = new
        if self._bus is not None:
            self._bus.emit(
                self.source,
                MSG_STATE_UPDATE,
                {
                    "robot_id": self.robot_id,
                    "x_pl": new.x_pl,
                    "x_ar": new.x_ar,
                    "x_af": new.x_af,
                    "d_pl": delta.d_pl,
                    "d_ar": delta.d_ar,
                },
            )
            self._bus.emit(
                self.source,
                MSG_POSE_COMMAND,
                {
                    "robot_id": self.robot_id,
                    "duration_ms": movement.duration_ms,
                    "keyframes": keyframe_dicts(movement),
                },
            )
        return delta, new, movement

    def _handle_recommendation(self, msg: BusMessage) -> None:
        if msg.source == self.source:
            return
        ev = RecommendationEvent(
            priority=msg.payload["priority"],
            item_id=str(msg.payload.get("item_id", "")),
            timestamp_ms=msg.timestamp_ms,
        )
        try:
            self.on_recommendation(ev)
        except (IntentContractError, ValueError) as e:
            if self._bus is not None:
                self._bus.emit(
                    self.source,
                    MSG_ERROR,
                    {"reason": str(e), "robot_id": self.robot_id},
                )

    def _handle_speech(self, msg: BusMessage) -> None:
        # Accepted and logged only: no rule base consumes speech
        # categories yet, so the state must not drift.
        self.speech_log.append(str(msg.payload["category"]))


# ── assembly ─────────────────────────────────────────────────────────

ROBOT_SPACING_M: Final = 0.3


def build_system(
    robots: int = 5,
    config: IntentConfig | None = None,
    *,
    clock: Callable[[], int] | None = None,
    movement_duration_ms: int = DEFAULT_MOVEMENT_MS,
    bus: MessageBus | None = None,
) -> tuple[MessageBus, list[Robot]]:
    """Wire a bus plus n robots in a row; the last robot is the mobile one.

    Fixed robots sit 0.3 m apart along the desk edge; the mobile robot
    starts at the right end.
    """
    if robots < 1:
        raise ValueError(f"robot count must be >= 1, got {robots}")
    if config is None:
        config = IntentConfig.default()
    the_bus = bus if bus is not None else MessageBus(clock=clock)
    fleet: list[Robot] = []
    for i in range(robots):
        rid = i + 1
        x = (i - (robots - 1) / 2) * ROBOT_SPACING_M
        r = Robot(
            rid,
            config,
            mobile=(rid == robots),
            position=(x, 0.0),
            movement_duration_ms=movement_duration_ms,
        )
        r.attach(the_bus)
        fleet.append(r)
    return the_bus, fleet


__all__ = [
    "BUS_SOURCE",
    "BusMessage",
    "MESSAGE_TYPES",
    "MSG_ERROR",
    "MSG_POSE_COMMAND",
    "MSG_RATING_SUBMIT",
    "MSG_RECOMMENDATION",
    "MSG_REGISTER",
    "MSG_SPEECH_CATEGORY",
    "MSG_STATE_UPDATE",
    "MessageBus",
    "Robot",
    "build_system",
]
