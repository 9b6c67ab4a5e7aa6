import { describe, expect, it } from "vitest";

import {
    PUPIL_TRAVEL,
    Surface,
    eyeCenters,
    lidOpeningPx,
    pupilOffset,
    renderEyes,
} from "../src/eyes.js";
import { ConsoleModel } from "../src/model.js";
import { BusMessage, EyePose, NEUTRAL_POSE } from "../src/protocol.js";

// Records every drawing call so assertions can replay the frame.
class RecordingSurface implements Surface {
    fillStyle: string = "";
    ops: Array<[string, ...unknown[]]> = [];

    clearRect(x: number, y: number, w: number, h: number): void {
        this.ops.push(["clearRect", x, y, w, h]);
    }
    save(): void {
        this.ops.push(["save"]);
    }
    restore(): void {
        this.ops.push(["restore"]);
    }
    beginPath(): void {
        this.ops.push(["beginPath"]);
    }
    arc(x: number, y: number, r: number, a0: number, a1: number): void {
        this.ops.push(["arc", x, y, r, a0, a1, this.fillStyle]);
    }
    rect(x: number, y: number, w: number, h: number): void {
        this.ops.push(["rect", x, y, w, h, this.fillStyle]);
    }
    fill(): void {
        this.ops.push(["fill"]);
    }
    clip(): void {
        this.ops.push(["clip"]);
    }
}

const W = 220;
const H = 140;

function drawnRects(surface: RecordingSurface): Array<[number, number, number, number]> {
    return surface.ops
        .filter((op) => op[0] === "rect")
        .map((op) => [op[1], op[2], op[3], op[4]] as [number, number, number, number]);
}

describe("pixel mapping", () => {
    it("neutral gaze centers the pupil", () => {
        const { dx, dy } = pupilOffset(0, 0, 50);
        expect(dx).toBeCloseTo(0, 12);
        expect(dy).toBeCloseTo(0, 12);
    });

    it("full pitch puts the pupil at the top of its travel", () => {
        const { dx, dy } = pupilOffset(0, 20, 50);
        expect(dx).toBe(0);
        expect(dy).toBeCloseTo(-PUPIL_TRAVEL * 50, 12);
    });

    it("full yaw puts the pupil at the side of its travel", () => {
        expect(pupilOffset(30, 0, 50).dx).toBeCloseTo(PUPIL_TRAVEL * 50, 12);
        expect(pupilOffset(-30, 0, 50).dx).toBeCloseTo(-PUPIL_TRAVEL * 50, 12);
    });

    it("mapping is linear in between", () => {
        expect(pupilOffset(15, 0, 50).dx).toBeCloseTo(PUPIL_TRAVEL * 25, 12);
        expect(pupilOffset(0, 10, 50).dy).toBeCloseTo(-PUPIL_TRAVEL * 25, 12);
    });

    it("aperture scales the visible opening from shut to wide", () => {
        expect(lidOpeningPx(0, 60)).toBe(0);
        expect(lidOpeningPx(0.5, 60)).toBe(30);
        expect(lidOpeningPx(1, 60)).toBe(60);
        // Values outside [0, 1] never widen the mapping
        expect(lidOpeningPx(-1, 60)).toBe(0);
        expect(lidOpeningPx(2, 60)).toBe(60);
    });
});

describe("renderEyes", () => {
    it("is deterministic: same pose, same draw calls", () => {
        const pose: EyePose = { lid_left: 0.7, lid_right: 0.6, yaw_left: 12, yaw_right: -7, pitch: 9 };
        const a = new RecordingSurface();
        const b = new RecordingSurface();
        renderEyes(a, pose, W, H);
        renderEyes(b, pose, W, H);
        expect(a.ops).toEqual(b.ops);
    });

    it("clears the frame and draws two clipped eyes", () => {
        const surface = new RecordingSurface();
        renderEyes(surface, NEUTRAL_POSE, W, H);
        expect(surface.ops[0]).toEqual(["clearRect", 0, 0, W, H]);
        expect(surface.ops.filter((op) => op[0] === "clip")).toHaveLength(2);
        expect(surface.ops.filter((op) => op[0] === "save")).toHaveLength(2);
        expect(surface.ops.filter((op) => op[0] === "restore")).toHaveLength(2);
    });

    it("neutral pose draws centered pupils at the layout centers", () => {
        const surface = new RecordingSurface();
        renderEyes(surface, NEUTRAL_POSE, W, H);
        const { left, right } = eyeCenters(W, H);
        const pupils = surface.ops.filter((op) => op[0] === "arc" && op[3] !== left.r);
        expect(pupils).toHaveLength(2);
        expect(pupils[0][1]).toBeCloseTo(left.cx, 12);
        expect(pupils[0][2]).toBeCloseTo(left.cy, 12);
        expect(pupils[1][1]).toBeCloseTo(right.cx, 12);
        expect(pupils[1][2]).toBeCloseTo(right.cy, 12);
    });

    it("aperture 0 draws the lids meeting at the midline", () => {
        const shut: EyePose = { ...NEUTRAL_POSE, lid_left: 0, lid_right: 0 };
        const surface = new RecordingSurface();
        renderEyes(surface, shut, W, H);
        const { left } = eyeCenters(W, H);
        const rects = drawnRects(surface);
        expect(rects).toHaveLength(4);
        // Left eye's top lid ends exactly where the bottom lid starts
        const [topX, topY, , topH] = rects[0];
        const [, bottomY] = rects[1];
        expect(topX).toBeCloseTo(left.cx - left.r, 12);
        expect(topY + topH).toBeCloseTo(left.cy, 12);
        expect(bottomY).toBeCloseTo(left.cy, 12);
    });

    it("wide open lids cover nothing", () => {
        const wide: EyePose = { ...NEUTRAL_POSE, lid_left: 1, lid_right: 1 };
        const surface = new RecordingSurface();
        renderEyes(surface, wide, W, H);
        for (const [, , , h] of drawnRects(surface)) {
            expect(h).toBeCloseTo(0, 12);
        }
    });
});

describe("frame budget", () => {
    // Desk scale is five robots; a frame must fit a 30 fps budget with
    // room to spare even while messages keep arriving.
    it("applies traffic and draws five robots well under 33 ms per frame", () => {
        const model = new ConsoleModel();
        const surfaces = new Map<string, RecordingSurface>();
        const frames = [
            { time_ms: 0, lid_left: 0.5, lid_right: 0.5, yaw_left: 0, yaw_right: 0, pitch: 0 },
            { time_ms: 400, lid_left: 0.9, lid_right: 0.9, yaw_left: 10, yaw_right: 10, pitch: 8 },
            { time_ms: 800, lid_left: 0.6, lid_right: 0.6, yaw_left: -5, yaw_right: -5, pitch: 2 },
        ];
        for (let id = 1; id <= 5; id++) {
            surfaces.set(`robot-${id}`, new RecordingSurface());
        }

        const totalFrames = 300;
        const start = performance.now();
        for (let f = 0; f < totalFrames; f++) {
            const nowMs = f * 33;
            // A fresh movement for every robot twice a second
            if (f % 15 === 0) {
                for (let id = 1; id <= 5; id++) {
                    const msg: BusMessage = {
                        type: "POSE.COMMAND", source: `robot-${id}`, seq: f + 2,
                        timestamp_ms: nowMs,
                        payload: { robot_id: id, duration_ms: 800, keyframes: frames },
                    };
                    model.apply(msg, nowMs);
                }
            }
            for (const [source, surface] of surfaces) {
                surface.ops.length = 0;
                renderEyes(surface, model.poseAt(source, nowMs), W, H);
            }
        }
        const perFrameMs = (performance.now() - start) / totalFrames;
        expect(perFrameMs).toBeLessThan(33.3);
    });
});
