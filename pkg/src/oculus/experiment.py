"""Human-rating sessions over the 20-state grid.

Protocol per session: shuffle the 20 grid states with a seeded
Fisher-Yates permutation, then for each trial animate the eyes from
neutral to the trial's state and wait for a 1..6 grade.  Everything is
replayable from the recorded seed: same seed, same presentation order.

Sessions persist three artifacts: a JSON-lines file (one record per
line), a CSV, and a small meta file carrying the seed and an aborted
flag.  A subject walking out mid-session keeps the trials already
graded; the partial data is written with aborted=true rather than
thrown away.

A synthetic subject (grade derived from arousal plus seeded noise)
makes the whole pipeline testable without a human in the chair.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import queue
import random
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Final

from .bus import MSG_POSE_COMMAND, MSG_RATING_SUBMIT, BusMessage, MessageBus
from .kinematics import DEFAULT_MOVEMENT_MS, keyframe_dicts, movement_between
from .mentality import GRID_AROUSAL_LEVELS, MentalityState, StateGrid, grid_states

GRADE_MIN: Final = 1
GRADE_MAX: Final = 6

CSV_HEADER: Final = "session_id,subject_id,trial_index,x_pl,x_ar,stimulus,grade,response_ms"

HARNESS_SOURCE: Final = "harness"


class GraderAbort(Exception):
    """Raised by a grader to end the session early (timeout, walk-out)."""


# A grader maps (trial_index, state, stimulus) to a grade in 1..6.
Grader = Callable[[int, MentalityState, str], int]


@dataclass(frozen=True)
class EvaluationRecord:
    """One graded trial."""

    session_id: str
    subject_id: str
    trial_index: int
    state: MentalityState
    stimulus: str
    grade: int
    response_ms: int

    def __post_init__(self) -> None:
        if isinstance(self.grade, bool) or not isinstance(self.grade, int):
            raise ValueError(f"grade must be an integer, got {self.grade!r}")
        if not GRADE_MIN <= self.grade <= GRADE_MAX:
            raise ValueError(f"grade must be in {GRADE_MIN}..{GRADE_MAX}, got {self.grade}")
        if not 0 <= self.trial_index:
            raise ValueError(f"trial_index must be >= 0, got {self.trial_index}")

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "subject_id": self.subject_id,
            "trial_index": self.trial_index,
            "x_pl": self.state.x_pl,
            "x_ar": self.state.x_ar,
            "stimulus": self.stimulus,
            "grade": self.grade,
            "response_ms": self.response_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationRecord":
        return cls(
            session_id=str(d["session_id"]),
            subject_id=str(d["subject_id"]),
            trial_index=int(d["trial_index"]),
            state=MentalityState(float(d["x_pl"]), float(d["x_ar"])),
            stimulus=str(d["stimulus"]),
            grade=int(d["grade"]),
            response_ms=int(d["response_ms"]),
        )


@dataclass(frozen=True)
class SessionConfig:
    """Everything needed to replay a session's presentation order."""

    seed: int
    subject_id: str
    stimulus: str = "book: A Brief History of Time"
    movement_duration_ms: int = DEFAULT_MOVEMENT_MS

    def __post_init__(self) -> None:
        if not self.subject_id:
            raise ValueError("subject_id must be non-empty")

    @property
    def session_id(self) -> str:
        return f"{self.subject_id}-seed{self.seed}"


def presentation_order(seed: int, n: int = 20) -> list[int]:
    """Seeded Fisher-Yates permutation of grid indices."""
    order = list(range(n))
    random.Random(seed).shuffle(order)
    return order


def _monotonic_ms() -> int:
    return int(time.monotonic() * 1000)


def run_session(
    cfg: SessionConfig,
    grader: Grader,
    *,
    bus: MessageBus | None = None,
    clock: Callable[[], int] | None = None,
    grid: StateGrid | None = None,
) -> list[EvaluationRecord]:
    """Run up to 20 trials; returns the graded records in trial order.

    Each trial publishes the neutral-to-state movement as POSE.COMMAND
    (robot_id 1, the presentation robot; trial_index rides along in the
    payload so remote graders know what they are grading), then blocks
    on the grader.  GraderAbort ends the session early; the records so
    far are returned and the session counts as aborted.

    clock is used only for response latency; pass a constant for
    byte-stable outputs.
    """
    the_grid = grid if grid is not None else grid_states()
    the_clock = clock if clock is not None else _monotonic_ms
    neutral = MentalityState.neutral()
    if bus is not None and not bus.is_registered(HARNESS_SOURCE):
        bus.register(HARNESS_SOURCE)

    records: list[EvaluationRecord] = []
    for trial_index, grid_index in enumerate(presentation_order(cfg.seed, len(the_grid))):
        state = the_grid[grid_index]
        movement = movement_between(neutral, state, cfg.movement_duration_ms)
        if bus is not None:
            bus.emit(
                HARNESS_SOURCE,
                MSG_POSE_COMMAND,
                {
                    "robot_id": 1,
                    "duration_ms": movement.duration_ms,
                    "trial_index": trial_index,
                    "keyframes": keyframe_dicts(movement),
                },
            )
        asked_at = the_clock()
        try:
            grade = grader(trial_index, state, cfg.stimulus)
        except GraderAbort:
            break
        records.append(
            EvaluationRecord(
                session_id=cfg.session_id,
                subject_id=cfg.subject_id,
                trial_index=trial_index,
                state=state,
                stimulus=cfg.stimulus,
                grade=grade,
                response_ms=max(0, the_clock() - asked_at),
            )
        )
    return records


# ── graders ──────────────────────────────────────────────────────────


def synthetic_grader(seed: int) -> Grader:
    """Deterministic subject: grade tracks arousal, plus seeded +/-1 noise.

    The noise RNG is private to the grader, so the same seed can drive
    both the shuffle and the subject without the streams coupling.
    """
    rng = random.Random(seed)

    def grade(trial_index: int, state: MentalityState, stimulus: str) -> int:
        base = 1 + round(5 * (state.x_ar + 200.0) / 400.0)
        noisy = base + rng.choice((-1, 0, 0, 1))
        return min(GRADE_MAX, max(GRADE_MIN, noisy))

    return grade


def console_grader(input_fn: Callable[[str], str] = input) -> Grader:
    """Prompt on the terminal; empty input or EOF aborts the session."""

    def grade(trial_index: int, state: MentalityState, stimulus: str) -> int:
        prompt = (
            f"trial {trial_index:2d}  state=({state.x_pl:+.0f},{state.x_ar:+.0f})  "
            f"{stimulus}\n  grade 1-6 (empty aborts): "
        )
        while True:
            try:
                raw = input_fn(prompt).strip()
            except EOFError:
                raise GraderAbort from None
            if not raw:
                raise GraderAbort
            if raw.isdigit() and GRADE_MIN <= int(raw) <= GRADE_MAX:
                return int(raw)
            prompt = "  grade must be 1-6, try again: "

    return grade


def bus_grader(bus: MessageBus, timeout_s: float = 120.0) -> Grader:
    """Take grades from RATING.SUBMIT messages with a matching trial_index.

    Times out into GraderAbort so an abandoned remote session still
    persists its partial data.
    """
    inbox: "queue.Queue[BusMessage]" = queue.Queue()
    bus.subscribe(MSG_RATING_SUBMIT, inbox.put)

    def grade(trial_index: int, state: MentalityState, stimulus: str) -> int:
        deadline = time.monotonic() + timeout_s
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise GraderAbort
            try:
                msg = inbox.get(timeout=remaining)
            except queue.Empty:
                raise GraderAbort from None
            if msg.payload.get("trial_index") == trial_index:
                return int(msg.payload["grade"])

    return grade


# ── persistence ──────────────────────────────────────────────────────


def write_csv(records: list[EvaluationRecord], fp) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in records:
        writer.writerow(
            [
                r.session_id,
                r.subject_id,
                r.trial_index,
                f"{r.state.x_pl:g}",
                f"{r.state.x_ar:g}",
                r.stimulus,
                r.grade,
                r.response_ms,
            ]
        )


def write_jsonl(records: list[EvaluationRecord], fp) -> None:
    for r in records:
        fp.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")


def read_jsonl(fp) -> list[EvaluationRecord]:
    return [EvaluationRecord.from_dict(json.loads(line)) for line in fp if line.strip()]


def records_csv(records: list[EvaluationRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def persist_session(
    records: list[EvaluationRecord], cfg: SessionConfig, out_dir: str
) -> dict[str, str]:
    """Write JSONL + CSV + meta under out_dir; returns the file paths.

    A session with fewer than 20 records is marked aborted in the meta
    file; its data files are written all the same.
    """
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, cfg.session_id)
    paths = {
        "jsonl": base + ".jsonl",
        "csv": base + ".csv",
        "meta": base + ".meta.json",
    }
    with open(paths["jsonl"], "w", encoding="utf-8") as f:
        write_jsonl(records, f)
    with open(paths["csv"], "w", encoding="utf-8", newline="") as f:
        write_csv(records, f)
    meta = {
        "session_id": cfg.session_id,
        "subject_id": cfg.subject_id,
        "seed": cfg.seed,
        "stimulus": cfg.stimulus,
        "movement_duration_ms": cfg.movement_duration_ms,
        "records": len(records),
        "aborted": len(records) < 20,
    }
    with open(paths["meta"], "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    return paths


# ── summary statistics ───────────────────────────────────────────────


@dataclass(frozen=True)
class StateStats:
    state: MentalityState
    n: int
    mean_grade: float
    std_grade: float


@dataclass(frozen=True)
class SessionSummary:
    """Per-state grade statistics plus the best expressor per grade."""

    per_state: tuple[StateStats, ...]
    best_state_by_grade: dict[int, MentalityState]


def summarize(records: list[EvaluationRecord]) -> SessionSummary:
    """Aggregate grades per grid state, in grid order.

    best_state_by_grade[g] is the state whose mean grade lies closest
    to g: the state that best expresses recommendation degree g.  Ties
    break toward the earlier grid state, so reports are deterministic.
    Input order does not matter.
    """
    if not records:
        raise ValueError("records must be non-empty")
    grid = grid_states()
    grades_by_index: dict[int, list[int]] = {}
    for r in records:
        grades_by_index.setdefault(grid.index_of(r.state), []).append(r.grade)

    per_state = []
    for i in sorted(grades_by_index):
        grades = grades_by_index[i]
        per_state.append(
            StateStats(
                state=grid[i],
                n=len(grades),
                mean_grade=statistics.fmean(grades),
                std_grade=statistics.pstdev(grades),
            )
        )

    best: dict[int, MentalityState] = {}
    for g in range(GRADE_MIN, GRADE_MAX + 1):
        winner = min(per_state, key=lambda st: (abs(st.mean_grade - g), grid.index_of(st.state)))
        best[g] = winner.state
    return SessionSummary(per_state=tuple(per_state), best_state_by_grade=best)


SUMMARY_HEADER: Final = "x_pl,x_ar,n,mean_grade,std_grade"


def write_summary_csv(summary: SessionSummary, fp) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER.split(","))
    for st in summary.per_state:
        writer.writerow(
            [
                f"{st.state.x_pl:g}",
                f"{st.state.x_ar:g}",
                st.n,
                f"{st.mean_grade:.4g}",
                f"{st.std_grade:.4g}",
            ]
        )


def format_summary(summary: SessionSummary) -> str:
    """Console table: one line per state plus the per-grade winners."""
    grid = grid_states()
    lines = ["state (x_pl, x_ar)       n   mean  std"]
    for st in summary.per_state:
        label = grid.labels[grid.index_of(st.state)]
        lines.append(
            f"({st.state.x_pl:+4.0f},{st.state.x_ar:+4.0f}) {label:<24s}"
            f"{st.n:2d}  {st.mean_grade:5.2f}  {st.std_grade:4.2f}"
        )
    lines.append("")
    for g, s in summary.best_state_by_grade.items():
        lines.append(f"grade {g} best expressed by ({s.x_pl:+.0f},{s.x_ar:+.0f})")
    return "\n".join(lines)


def is_top_arousal(s: MentalityState) -> bool:
    return math.isclose(s.x_ar, max(GRID_AROUSAL_LEVELS))


__all__ = [
    "CSV_HEADER",
    "EvaluationRecord",
    "GraderAbort",
    "SessionConfig",
    "SessionSummary",
    "StateStats",
    "bus_grader",
    "console_grader",
    "format_summary",
    "persist_session",
    "presentation_order",
    "read_jsonl",
    "records_csv",
    "run_session",
    "summarize",
    "synthetic_grader",
    "write_csv",
    "write_jsonl",
    "write_summary_csv",
]
