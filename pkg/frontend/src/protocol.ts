// Wire schema shared with the desk bus.  The browser bridge delivers one
// JSON object per WebSocket text frame; the TCP side carries the same
// objects newline-delimited.  Everything the console displays arrived
// through here — it computes no affect state of its own.

export const MSG_REGISTER = "REGISTER";
export const MSG_RECOMMENDATION = "EVENT.RECOMMENDATION";
export const MSG_SPEECH_CATEGORY = "EVENT.SPEECH_CATEGORY";
export const MSG_STATE_UPDATE = "STATE.UPDATE";
export const MSG_POSE_COMMAND = "POSE.COMMAND";
export const MSG_RATING_SUBMIT = "RATING.SUBMIT";
export const MSG_ERROR = "ERROR";

export const MESSAGE_TYPES: ReadonlySet<string> = new Set([
    MSG_REGISTER,
    MSG_RECOMMENDATION,
    MSG_SPEECH_CATEGORY,
    MSG_STATE_UPDATE,
    MSG_POSE_COMMAND,
    MSG_RATING_SUBMIT,
    MSG_ERROR,
]);

const WIRE_FIELDS = ["type", "source", "seq", "timestamp_ms", "payload"] as const;

export interface BusMessage {
    type: string;
    source: string;
    seq: number;
    timestamp_ms: number;
    payload: Record<string, unknown>;
}

// 5-DOF joint limits; the console refuses to draw anything outside them.
export const LID_MIN = 0.0;
export const LID_MAX = 1.0;
export const YAW_LIMIT_DEG = 30.0;
export const PITCH_LIMIT_DEG = 20.0;

export interface EyePose {
    lid_left: number;
    lid_right: number;
    yaw_left: number;
    yaw_right: number;
    pitch: number;
}

export interface Keyframe extends EyePose {
    time_ms: number;
}

export const NEUTRAL_POSE: EyePose = Object.freeze({
    lid_left: 0.5,
    lid_right: 0.5,
    yaw_left: 0.0,
    yaw_right: 0.0,
    pitch: 0.0,
});

export function poseInLimits(p: EyePose): boolean {
    return (
        p.lid_left >= LID_MIN && p.lid_left <= LID_MAX &&
        p.lid_right >= LID_MIN && p.lid_right <= LID_MAX &&
        Math.abs(p.yaw_left) <= YAW_LIMIT_DEG &&
        Math.abs(p.yaw_right) <= YAW_LIMIT_DEG &&
        Math.abs(p.pitch) <= PITCH_LIMIT_DEG
    );
}

export function isIntGrade(g: unknown): g is number {
    return typeof g === "number" && Number.isInteger(g) && g >= 1 && g <= 6;
}

export class WireError extends Error {}

function isPlainObject(v: unknown): v is Record<string, unknown> {
    return typeof v === "object" && v !== null && !Array.isArray(v);
}

// Strict envelope parse: all five wire fields, nothing else, right types.
// Payload contents are vetted by whoever consumes the message type.
export function parseMessage(text: string): BusMessage {
    let doc: unknown;
    try {
        doc = JSON.parse(text);
    } catch {
        throw new WireError("invalid JSON");
    }
    if (!isPlainObject(doc)) {
        throw new WireError("message must be a JSON object");
    }
    for (const field of WIRE_FIELDS) {
        if (!(field in doc)) {
            throw new WireError(`missing field: ${field}`);
        }
    }
    for (const field of Object.keys(doc)) {
        if (!(WIRE_FIELDS as readonly string[]).includes(field)) {
            throw new WireError(`unknown field: ${field}`);
        }
    }
    const { type, source, seq, timestamp_ms, payload } = doc;
    if (typeof type !== "string" || type.length === 0) {
        throw new WireError("type must be a non-empty string");
    }
    if (typeof source !== "string" || source.length === 0) {
        throw new WireError("source must be a non-empty string");
    }
    if (typeof seq !== "number" || !Number.isInteger(seq) || seq < 1) {
        throw new WireError("seq must be a positive integer");
    }
    if (typeof timestamp_ms !== "number" || !Number.isFinite(timestamp_ms)) {
        throw new WireError("timestamp_ms must be a finite number");
    }
    if (!isPlainObject(payload)) {
        throw new WireError("payload must be an object");
    }
    return { type, source, seq, timestamp_ms, payload };
}

export function serializeMessage(msg: BusMessage): string {
    return JSON.stringify({
        type: msg.type,
        source: msg.source,
        seq: msg.seq,
        timestamp_ms: msg.timestamp_ms,
        payload: msg.payload,
    });
}

const POSE_FIELDS = ["lid_left", "lid_right", "yaw_left", "yaw_right", "pitch"] as const;

// Extract and vet a POSE.COMMAND's keyframes.  Returns null when anything
// about them is unusable: the console animates only between received,
// in-limit keyframes and never invents poses to fill the gap.
export function keyframesOf(msg: BusMessage): Keyframe[] | null {
    const raw = msg.payload["keyframes"];
    if (!Array.isArray(raw) || raw.length < 2) {
        return null;
    }
    const frames: Keyframe[] = [];
    for (const item of raw) {
        if (!isPlainObject(item)) {
            return null;
        }
        const time = item["time_ms"];
        if (typeof time !== "number" || !Number.isFinite(time) || time < 0) {
            return null;
        }
        const frame: Keyframe = {
            time_ms: time,
            lid_left: 0, lid_right: 0, yaw_left: 0, yaw_right: 0, pitch: 0,
        };
        for (const f of POSE_FIELDS) {
            const v = item[f];
            if (typeof v !== "number" || !Number.isFinite(v)) {
                return null;
            }
            frame[f] = v;
        }
        if (!poseInLimits(frame)) {
            return null;
        }
        frames.push(frame);
    }
    if (frames[0].time_ms !== 0) {
        return null;
    }
    for (let i = 1; i < frames.length; i++) {
        if (frames[i].time_ms <= frames[i - 1].time_ms) {
            return null;
        }
    }
    return frames;
}
