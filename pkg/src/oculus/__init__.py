"""Desk-scale eye-robot mascots that express recommendation intent.

The pipeline: a recommendation event with a 1..6 priority runs through
fuzzy inference against the robot's current pleasure-arousal state,
yielding a bounded state delta; the updated state maps to a 5-DOF eye
pose; a smooth keyframe movement between old and new poses goes out on
a pub/sub bus to which five simulated robots, an experiment harness,
and an operator console all speak the same JSON schema.
"""

from .bus import (
    BusMessage,
    MessageBus,
    Robot,
    build_system,
)
from .experiment import (
    EvaluationRecord,
    SessionConfig,
    persist_session,
    run_session,
    summarize,
    synthetic_grader,
)
from .fuzzy import (
    FuzzyPartition,
    FuzzyRule,
    FuzzyRuleBase,
    InferenceEngine,
    MembershipFunction,
    defuzzify_coa,
)
from .intent import (
    IntentConfig,
    RecommendationEvent,
    compute_delta,
    step,
)
from .kinematics import (
    BlinkPolicy,
    ExpressionMovement,
    EyePose,
    blink_times,
    movement_between,
    pose_from_state,
)
from .mentality import (
    MentalityState,
    StateDelta,
    apply_delta,
    grid_states,
)

__version__ = "0.1.0"

__all__ = [
    "BlinkPolicy",
    "BusMessage",
    "EvaluationRecord",
    "ExpressionMovement",
    "EyePose",
    "FuzzyPartition",
    "FuzzyRule",
    "FuzzyRuleBase",
    "InferenceEngine",
    "IntentConfig",
    "MembershipFunction",
    "MentalityState",
    "MessageBus",
    "RecommendationEvent",
    "Robot",
    "SessionConfig",
    "StateDelta",
    "apply_delta",
    "blink_times",
    "build_system",
    "compute_delta",
    "defuzzify_coa",
    "grid_states",
    "movement_between",
    "persist_session",
    "pose_from_state",
    "run_session",
    "step",
    "summarize",
    "synthetic_grader",
    "__version__",
]
