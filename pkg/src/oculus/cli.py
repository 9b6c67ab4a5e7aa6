"""Operator entry point.

Subcommands:
  serve        run the bus with N robots and the browser bridge
  experiment   run a 20-trial rating session (console, remote, or synthetic)
  pose-trace   export a movement's pose samples as CSV
  publish      inject a recommendation event into a running serve

Exit codes are a stable contract: 0 success, 2 environment problems
(port busy, connection refused), 3 configuration problems (bad rule
base), 64 usage errors.  OCULUS_RULEBASE supplies a default rule-base
path when --rulebase is not given.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import threading
import time
from typing import Sequence

from .bus import MSG_POSE_COMMAND, MSG_RECOMMENDATION, MessageBus, build_system
from .experiment import (
    SessionConfig,
    bus_grader,
    console_grader,
    format_summary,
    persist_session,
    run_session,
    summarize,
    synthetic_grader,
)
from .fuzzy import RuleBaseError
from .intent import IntentConfig, IntentContractError
from .kinematics import (
    BlinkPolicy,
    blink_movement,
    keyframe_dicts,
    movement_between,
    pose_from_state,
    write_trace,
)
from .mentality import MentalityState
from .net import DEFAULT_PORT, BusClient, BusServer, WebSocketBridge

EXIT_OK = 0
EXIT_ENVIRONMENT = 2
EXIT_CONFIG = 3
EXIT_USAGE = 64

RULEBASE_ENV = "OCULUS_RULEBASE"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract says 64.
    def error(self, message: str) -> "argparse.NoReturn":  # type: ignore[name-defined]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_state(text: str) -> MentalityState:
    """Parse 'x_pl,x_ar' into a state; raises _UsageError on bad input."""
    parts = text.split(",")
    if len(parts) != 2:
        raise _UsageError(f"state must be 'x_pl,x_ar', got {text!r}")
    try:
        return MentalityState(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise _UsageError(str(e)) from None


def _load_config(path: str | None) -> IntentConfig:
    """Rule base from --rulebase, then $OCULUS_RULEBASE, then the packaged default."""
    chosen = path or os.environ.get(RULEBASE_ENV)
    if chosen is None:
        return IntentConfig.default()
    return IntentConfig.from_file(chosen)


def build_parser() -> _Parser:
    parser = _Parser(prog="oculus", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p_serve = sub.add_parser("serve", help="run the bus with simulated robots")
    p_serve.add_argument("--port", type=int, default=DEFAULT_PORT, help="TCP port (browser bridge on port+1)")
    p_serve.add_argument("--robots", type=int, default=5, help="number of robots (default 5)")
    p_serve.add_argument("--rulebase", help="rule-base JSON path")
    p_serve.add_argument("--out", default="bus-session.ndjson", help="session log file")
    p_serve.add_argument("--seed", type=int, default=0, help="blink jitter seed")
    p_serve.add_argument("--blink", action="store_true", help="animate idle blinking")
    p_serve.add_argument("--ui-dir", help="static directory for the browser console")

    p_exp = sub.add_parser("experiment", help="run a 20-trial rating session")
    p_exp.add_argument("--subject", help="subject id (required unless --synthetic)")
    p_exp.add_argument("--seed", type=int, default=0, help="presentation-order seed")
    p_exp.add_argument("--synthetic", action="store_true", help="use the synthetic subject")
    p_exp.add_argument("--stimulus", default="book: A Brief History of Time", help="item shown to the subject")
    p_exp.add_argument("--duration-ms", type=int, default=800, dest="duration_ms", help="movement duration")
    p_exp.add_argument("--out", default="sessions", help="output directory")
    p_exp.add_argument("--rulebase", help="rule-base JSON path")
    p_exp.add_argument("--listen", action="store_true", help="expose the session bus for remote graders")
    p_exp.add_argument("--port", type=int, default=DEFAULT_PORT, help="port when --listen is set")
    p_exp.add_argument("--ui-dir", help="static directory for the browser console (with --listen)")
    p_exp.add_argument("--timeout-s", type=float, default=120.0, dest="timeout_s", help="per-trial grade timeout with --listen")

    p_trace = sub.add_parser("pose-trace", help="export movement pose samples as CSV")
    p_trace.add_argument("--from", dest="from_state", default="0,0", help="start state 'x_pl,x_ar'")
    p_trace.add_argument("--to", dest="to_state", required=True, help="end state 'x_pl,x_ar'")
    p_trace.add_argument("--duration-ms", type=int, default=800, dest="duration_ms")
    p_trace.add_argument("--rate-hz", type=float, default=50.0, dest="rate_hz")
    p_trace.add_argument("--out", help="output file (stdout when omitted)")

    p_pub = sub.add_parser("publish", help="send one recommendation event to a running serve")
    p_pub.add_argument("--port", type=int, default=DEFAULT_PORT)
    p_pub.add_argument("--priority", type=int, required=True, help="recommendation priority 1..6")
    p_pub.add_argument("--item", default="", help="item id carried in the event")
    return parser


# ── serve ────────────────────────────────────────────────────────────


def _blink_loop(bus: MessageBus, robots, stop: threading.Event, seed: int) -> None:
    """Idle blinking: each robot blinks on its own arousal-driven schedule."""
    policy = BlinkPolicy()
    rng = random.Random(seed)
    next_at = {r.robot_id: time.monotonic() * 1000 + policy.nominal_interval_ms(r.state) for r in robots}
    while not stop.wait(0.05):
        now = time.monotonic() * 1000
        for r in robots:
            if now < next_at[r.robot_id]:
                continue
            movement = blink_movement(pose_from_state(r.state), policy)
            bus.emit(
                r.source,
                MSG_POSE_COMMAND,
                {
                    "robot_id": r.robot_id,
                    "duration_ms": movement.duration_ms,
                    "keyframes": keyframe_dicts(movement),
                },
            )
            interval = max(
                policy.blink_duration_ms,
                policy.nominal_interval_ms(r.state) * rng.uniform(0.8, 1.2),
            )
            next_at[r.robot_id] = now + interval


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args.rulebase)
    except (OSError, RuleBaseError, IntentContractError, ValueError) as e:
        print(f"oculus serve: bad rule base: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.robots < 1:
        print("oculus serve: --robots must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    bus = MessageBus()
    log = open(args.out, "w", encoding="utf-8")

    def log_line(m):
        log.write(m.to_json() + "\n")
        log.flush()

    bus.subscribe(None, log_line)
    bus, robots = build_system(args.robots, config, bus=bus)

    server = BusServer(bus, port=args.port)
    bridge = WebSocketBridge(bus, port=args.port + 1, static_dir=args.ui_dir)
    try:
        server.start()
        bridge.start()
    except OSError as e:
        print(f"oculus serve: cannot bind port: {e}", file=sys.stderr)
        server.stop()
        bridge.stop()
        log.close()
        return EXIT_ENVIRONMENT

    stop = threading.Event()
    blinker = None
    if args.blink:
        blinker = threading.Thread(target=_blink_loop, args=(bus, robots, stop, args.seed), daemon=True)
        blinker.start()

    host, port = server.address
    # Flushed eagerly: supervisors wait on this line to learn the bound port.
    print(f"bus on {host}:{port}, browser bridge on {host}:{port + 1}, {len(robots)} robots", flush=True)
    print(f"logging to {args.out}; Ctrl-C stops", flush=True)
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        if blinker is not None:
            blinker.join(timeout=2.0)
        server.stop()
        bridge.stop()
        log.close()
    return EXIT_OK


# ── experiment ───────────────────────────────────────────────────────


def cmd_experiment(args: argparse.Namespace) -> int:
    if not args.synthetic and not args.subject:
        print("oculus experiment: --subject is required unless --synthetic", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _load_config(args.rulebase)
    except (OSError, RuleBaseError, IntentContractError, ValueError) as e:
        print(f"oculus experiment: bad rule base: {e}", file=sys.stderr)
        return EXIT_CONFIG

    subject = args.subject or "synthetic"
    cfg = SessionConfig(
        seed=args.seed,
        subject_id=subject,
        stimulus=args.stimulus,
        movement_duration_ms=args.duration_ms,
    )

    # Synthetic runs zero every clock so repeated runs are byte-identical.
    clock = (lambda: 0) if args.synthetic else None
    bus, _robots = build_system(5, config, clock=clock)

    server = bridge = None
    if args.listen:
        server = BusServer(bus, port=args.port)
        bridge = WebSocketBridge(bus, port=args.port + 1, static_dir=args.ui_dir)
        try:
            server.start()
            bridge.start()
        except OSError as e:
            print(f"oculus experiment: cannot bind port: {e}", file=sys.stderr)
            return EXIT_ENVIRONMENT
        host, port = server.address
        print(f"session bus on {host}:{port}, browser bridge on {host}:{port + 1}", flush=True)

    if args.synthetic:
        grader = synthetic_grader(args.seed)
    elif args.listen:
        grader = bus_grader(bus, timeout_s=args.timeout_s)
    else:
        grader = console_grader()

    try:
        records = run_session(cfg, grader, bus=bus, clock=clock)
    finally:
        if server is not None:
            server.stop()
        if bridge is not None:
            bridge.stop()

    paths = persist_session(records, cfg, args.out)
    if len(records) < 20:
        print(f"session aborted after {len(records)} trials; partial data kept")
    if records:
        print(format_summary(summarize(records)))
    print(f"wrote {paths['jsonl']}")
    print(f"wrote {paths['csv']}")
    return EXIT_OK


# ── pose-trace ───────────────────────────────────────────────────────


def cmd_pose_trace(args: argparse.Namespace) -> int:
    try:
        s_from = _parse_state(args.from_state)
        s_to = _parse_state(args.to_state)
        if args.duration_ms < 100:
            raise _UsageError(f"--duration-ms must be >= 100, got {args.duration_ms}")
        if args.rate_hz <= 0:
            raise _UsageError(f"--rate-hz must be positive, got {args.rate_hz}")
    except _UsageError as e:
        print(f"oculus pose-trace: {e}", file=sys.stderr)
        return EXIT_USAGE

    movement = movement_between(s_from, s_to, args.duration_ms)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            rows = write_trace(movement, args.rate_hz, f)
        print(f"wrote {rows} rows to {args.out}")
    else:
        write_trace(movement, args.rate_hz, sys.stdout)
    return EXIT_OK


# ── publish ──────────────────────────────────────────────────────────


def cmd_publish(args: argparse.Namespace) -> int:
    if not 1 <= args.priority <= 6:
        print(f"oculus publish: --priority must be 1..6, got {args.priority}", file=sys.stderr)
        return EXIT_USAGE
    try:
        client = BusClient(port=args.port, source=f"cli-{os.getpid()}")
    except OSError as e:
        print(f"oculus publish: cannot reach bus: {e}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    with client:
        client.register()
        payload = {"priority": args.priority}
        if args.item:
            payload["item_id"] = args.item
        client.send(MSG_RECOMMENDATION, payload)
    print(f"published priority {args.priority}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "experiment": cmd_experiment,
        "pose-trace": cmd_pose_trace,
        "publish": cmd_publish,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
