// What the console knows, fed exclusively by bus traffic.  Robots appear
// when they are first heard from, poses animate only between received
// keyframes, and a robot that stays silent too long is shown disconnected.
import { MSG_ERROR, MSG_POSE_COMMAND, MSG_REGISTER, MSG_STATE_UPDATE, NEUTRAL_POSE, keyframesOf, } from "./protocol.js";
export const STALE_AFTER_MS = 5000;
const ERROR_LOG_LIMIT = 20;
const ROBOT_SOURCE = /^robot-\d+$/;
function stripTime(frame) {
    return {
        lid_left: frame.lid_left,
        lid_right: frame.lid_right,
        yaw_left: frame.yaw_left,
        yaw_right: frame.yaw_right,
        pitch: frame.pitch,
    };
}
// Linear interpolation between the two bracketing keyframes, clamped to
// the ends — the same playback rule the robots use, so what the console
// draws is what the hardware would do.
export function interpolatePose(frames, tMs) {
    if (tMs <= frames[0].time_ms) {
        return stripTime(frames[0]);
    }
    const last = frames[frames.length - 1];
    if (tMs >= last.time_ms) {
        return stripTime(last);
    }
    let hi = 1;
    while (frames[hi].time_ms < tMs) {
        hi += 1;
    }
    const a = frames[hi - 1];
    const b = frames[hi];
    const u = (tMs - a.time_ms) / (b.time_ms - a.time_ms);
    return {
        lid_left: a.lid_left + u * (b.lid_left - a.lid_left),
        lid_right: a.lid_right + u * (b.lid_right - a.lid_right),
        yaw_left: a.yaw_left + u * (b.yaw_left - a.yaw_left),
        yaw_right: a.yaw_right + u * (b.yaw_right - a.yaw_right),
        pitch: a.pitch + u * (b.pitch - a.pitch),
    };
}
export class ConsoleModel {
    robots = new Map();
    trial = null;
    errors = [];
    apply(msg, nowMs) {
        switch (msg.type) {
            case MSG_REGISTER:
                if (ROBOT_SOURCE.test(msg.source)) {
                    this.ensureRobot(msg.source, nowMs);
                }
                break;
            case MSG_STATE_UPDATE:
                this.applyState(msg, nowMs);
                break;
            case MSG_POSE_COMMAND:
                this.applyPose(msg, nowMs);
                break;
            case MSG_ERROR:
                this.pushError(String(msg.payload["reason"] ?? "unknown error"));
                break;
            default:
                break;
        }
        // Any traffic from a robot proves it alive, whatever the type.
        const robot = this.robots.get(msg.source);
        if (robot !== undefined) {
            robot.lastSeenMs = nowMs;
        }
    }
    // Live pose for rendering.  Finishing a movement folds its last frame
    // into the settled pose, so the eyes hold where the robot left them.
    poseAt(source, nowMs) {
        const robot = this.robots.get(source);
        if (robot === undefined) {
            return NEUTRAL_POSE;
        }
        if (robot.movement !== null) {
            const t = nowMs - robot.movement.startedMs;
            const frames = robot.movement.frames;
            if (t >= frames[frames.length - 1].time_ms) {
                robot.pose = stripTime(frames[frames.length - 1]);
                robot.movement = null;
                return robot.pose;
            }
            return interpolatePose(frames, t);
        }
        return robot.pose;
    }
    isStale(source, nowMs) {
        const robot = this.robots.get(source);
        return robot !== undefined && nowMs - robot.lastSeenMs > STALE_AFTER_MS;
    }
    canGrade() {
        return this.trial !== null && !this.trial.submitted;
    }
    // One rating per trial: the second attempt (and any attempt against a
    // stale index) reports false and must not reach the bus.
    markSubmitted(index) {
        if (this.trial === null || this.trial.index !== index || this.trial.submitted) {
            return false;
        }
        this.trial.submitted = true;
        return true;
    }
    sortedSources() {
        return Array.from(this.robots.keys()).sort((a, b) => {
            const ra = this.robots.get(a).robotId ?? Number.MAX_SAFE_INTEGER;
            const rb = this.robots.get(b).robotId ?? Number.MAX_SAFE_INTEGER;
            return ra !== rb ? ra - rb : a.localeCompare(b);
        });
    }
    ensureRobot(source, nowMs) {
        let robot = this.robots.get(source);
        if (robot === undefined) {
            const m = source.match(/^robot-(\d+)$/);
            robot = {
                source,
                robotId: m !== null ? Number(m[1]) : null,
                pose: { ...NEUTRAL_POSE },
                state: null,
                movement: null,
                lastSeenMs: nowMs,
            };
            this.robots.set(source, robot);
        }
        return robot;
    }
    // Poses and states are routed by the robot_id they carry, so harness
    // traffic (source "harness", robot_id 1) lands on robot-1's card.
    targetRobot(msg, nowMs) {
        const id = msg.payload["robot_id"];
        if (typeof id === "number" && Number.isInteger(id) && id >= 1) {
            return this.ensureRobot(`robot-${id}`, nowMs);
        }
        if (ROBOT_SOURCE.test(msg.source)) {
            return this.ensureRobot(msg.source, nowMs);
        }
        return null;
    }
    applyState(msg, nowMs) {
        const robot = this.targetRobot(msg, nowMs);
        if (robot === null) {
            return;
        }
        const pl = msg.payload["x_pl"];
        const ar = msg.payload["x_ar"];
        if (typeof pl === "number" && typeof ar === "number") {
            robot.state = { x_pl: pl, x_ar: ar };
        }
        robot.lastSeenMs = nowMs;
    }
    applyPose(msg, nowMs) {
        const robot = this.targetRobot(msg, nowMs);
        if (robot === null) {
            return;
        }
        const frames = keyframesOf(msg);
        if (frames === null) {
            this.pushError(`unusable keyframes from ${msg.source}`);
            return;
        }
        robot.movement = { startedMs: nowMs, frames };
        robot.lastSeenMs = nowMs;
        // A trial index riding on the pose announces the next rating ask;
        // repeats of the current index must not reopen a submitted trial.
        const trialIndex = msg.payload["trial_index"];
        if (typeof trialIndex === "number" && Number.isInteger(trialIndex) && trialIndex >= 0) {
            if (this.trial === null || this.trial.index !== trialIndex) {
                this.trial = { index: trialIndex, submitted: false };
            }
        }
    }
    pushError(reason) {
        this.errors.push(reason);
        if (this.errors.length > ERROR_LOG_LIMIT) {
            this.errors.splice(0, this.errors.length - ERROR_LOG_LIMIT);
        }
    }
}
