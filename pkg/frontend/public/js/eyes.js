// Cartoon eye renderer: a deterministic drawing of one pose, no clock, no
// randomness.  Pixel mapping: yaw sweeps the pupil horizontally and pitch
// vertically, each up to PUPIL_TRAVEL of the eye radius at the joint
// limit (+pitch looks up, which is -y on a canvas); the lids close
// symmetrically toward the eye's midline, so aperture 0 draws the eye
// fully shut and aperture 1 leaves it uncovered.
import { PITCH_LIMIT_DEG, YAW_LIMIT_DEG } from "./protocol.js";
export const PUPIL_TRAVEL = 0.55; // fraction of eye radius at full deflection
const SCLERA_COLOR = "#f2f3f5";
const PUPIL_COLOR = "#15181d";
const LID_COLOR = "#2a3140";
const PUPIL_RADIUS = 0.34; // fraction of eye radius
export function eyeCenters(width, height) {
    const r = Math.min(width / 4.6, height / 2.4);
    const cy = height / 2;
    return {
        left: { cx: width / 2 - 1.25 * r, cy, r },
        right: { cx: width / 2 + 1.25 * r, cy, r },
    };
}
export function pupilOffset(yawDeg, pitchDeg, radius) {
    return {
        dx: (yawDeg / YAW_LIMIT_DEG) * PUPIL_TRAVEL * radius,
        dy: -(pitchDeg / PITCH_LIMIT_DEG) * PUPIL_TRAVEL * radius,
    };
}
// Half-height of the visible opening: 0 at closed lids, radius at wide open.
export function lidOpeningPx(aperture, radius) {
    return Math.max(0, Math.min(1, aperture)) * radius;
}
function drawEye(ctx, eye, aperture, yawDeg, pitchDeg) {
    const { cx, cy, r } = eye;
    ctx.save();
    // Everything stays inside the eyeball
    ctx.beginPath();
    ctx.arc(cx, cy, r, 0, 2 * Math.PI);
    ctx.clip();
    // Sclera
    ctx.fillStyle = SCLERA_COLOR;
    ctx.beginPath();
    ctx.arc(cx, cy, r, 0, 2 * Math.PI);
    ctx.fill();
    // Pupil
    const { dx, dy } = pupilOffset(yawDeg, pitchDeg, r);
    ctx.fillStyle = PUPIL_COLOR;
    ctx.beginPath();
    ctx.arc(cx + dx, cy + dy, PUPIL_RADIUS * r, 0, 2 * Math.PI);
    ctx.fill();
    // Lids close toward the midline from above and below
    const open = lidOpeningPx(aperture, r);
    ctx.fillStyle = LID_COLOR;
    ctx.beginPath();
    ctx.rect(cx - r, cy - r, 2 * r, r - open);
    ctx.fill();
    ctx.beginPath();
    ctx.rect(cx - r, cy + open, 2 * r, r - open);
    ctx.fill();
    ctx.restore();
}
export function renderEyes(ctx, pose, width, height) {
    ctx.clearRect(0, 0, width, height);
    const { left, right } = eyeCenters(width, height);
    drawEye(ctx, left, pose.lid_left, pose.yaw_left, pose.pitch);
    drawEye(ctx, right, pose.lid_right, pose.yaw_right, pose.pitch);
}
