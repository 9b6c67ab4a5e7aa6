// Console entry point: wires the bus client, the view model, and the
// canvases together.  One rendering loop; incoming messages are queued by
// the socket callback and applied between frames, so the model never
// changes mid-draw.
import { BusClient } from "./client.js";
import { renderEyes } from "./eyes.js";
import { ConsoleModel } from "./model.js";
import { MSG_RATING_SUBMIT, MSG_RECOMMENDATION, isIntGrade, } from "./protocol.js";
const CANVAS_W = 220;
const CANVAS_H = 140;
const ITEM_ID_OK = /^[A-Za-z0-9][A-Za-z0-9._:-]*$/;
function bridgeUrl() {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    return `${proto}://${location.host}/bus`;
}
function el(id) {
    const node = document.getElementById(id);
    if (node === null) {
        throw new Error(`missing element: ${id}`);
    }
    return node;
}
function makeCard(source) {
    const root = document.createElement("section");
    root.className = "robot";
    const title = document.createElement("h2");
    title.textContent = source;
    const badge = document.createElement("span");
    badge.className = "badge";
    title.appendChild(badge);
    const canvas = document.createElement("canvas");
    canvas.width = CANVAS_W;
    canvas.height = CANVAS_H;
    const stateLine = document.createElement("p");
    stateLine.className = "state";
    stateLine.textContent = "–";
    root.append(title, canvas, stateLine);
    return { root, canvas, badge, stateLine };
}
function main() {
    const model = new ConsoleModel();
    const suffix = Math.random().toString(16).slice(2, 8);
    const client = new BusClient(bridgeUrl(), `console-${suffix}`);
    const inbox = [];
    client.onMessage((msg) => inbox.push(msg));
    const statusLine = el("status");
    client.onStatus((status, queued) => {
        statusLine.textContent =
            queued > 0 ? `${status} — ${queued} message(s) queued until reconnect` : status;
        statusLine.className = `status-${status}`;
    });
    client.connect();
    const robotsRow = el("robots");
    const cards = new Map();
    // ── rating panel ─────────────────────────────────────────────
    const trialLine = el("trial");
    const gradeRow = el("grades");
    const gradeButtons = [];
    for (let g = 1; g <= 6; g++) {
        const btn = document.createElement("button");
        btn.textContent = String(g);
        btn.disabled = true;
        btn.addEventListener("click", () => {
            if (!model.canGrade() || !isIntGrade(g)) {
                return;
            }
            const index = model.trial.index;
            if (model.markSubmitted(index)) {
                client.send(MSG_RATING_SUBMIT, { trial_index: index, grade: g });
            }
        });
        gradeButtons.push(btn);
        gradeRow.appendChild(btn);
    }
    // ── event injection ──────────────────────────────────────────
    const injectForm = el("inject");
    const prioritySelect = el("priority");
    const itemInput = el("item");
    const injectNote = el("inject-note");
    injectForm.addEventListener("submit", (ev) => {
        ev.preventDefault();
        const priority = Number(prioritySelect.value);
        const item = itemInput.value.trim();
        if (!isIntGrade(priority)) {
            injectNote.textContent = "priority must be 1–6";
            return;
        }
        if (item.length > 0 && !ITEM_ID_OK.test(item)) {
            injectNote.textContent = "item id: letters, digits, . _ : - only";
            return;
        }
        const sent = client.send(MSG_RECOMMENDATION, {
            priority,
            item_id: item.length > 0 ? item : "console",
        });
        injectNote.textContent = sent ? "" : "offline — queued, will send on reconnect";
    });
    // ── render loop ──────────────────────────────────────────────
    const errorList = el("errors");
    const fpsLine = el("fps");
    let frames = 0;
    let fpsWindowStart = performance.now();
    function frame() {
        const nowMs = Date.now();
        // Apply everything that arrived since the last frame
        for (const msg of inbox.splice(0, inbox.length)) {
            model.apply(msg, nowMs);
        }
        for (const source of model.sortedSources()) {
            let card = cards.get(source);
            if (card === undefined) {
                card = makeCard(source);
                cards.set(source, card);
                robotsRow.appendChild(card.root);
            }
            const ctx = card.canvas.getContext("2d");
            if (ctx !== null) {
                renderEyes(ctx, model.poseAt(source, nowMs), CANVAS_W, CANVAS_H);
            }
            const stale = model.isStale(source, nowMs);
            card.badge.textContent = stale ? "disconnected" : "live";
            card.badge.className = stale ? "badge stale" : "badge live";
            const robot = model.robots.get(source);
            card.stateLine.textContent =
                robot.state !== null
                    ? `pl ${robot.state.x_pl.toFixed(1)}  ar ${robot.state.x_ar.toFixed(1)}`
                    : "–";
        }
        const grading = model.canGrade();
        for (const btn of gradeButtons) {
            btn.disabled = !grading;
        }
        if (model.trial === null) {
            trialLine.textContent = "no active trial";
        }
        else if (model.trial.submitted) {
            trialLine.textContent = `trial ${model.trial.index + 1}: rated, waiting for next`;
        }
        else {
            trialLine.textContent = `trial ${model.trial.index + 1}: grade the movement (1–6)`;
        }
        errorList.textContent = model.errors.slice(-5).join("\n");
        frames += 1;
        const elapsed = performance.now() - fpsWindowStart;
        if (elapsed >= 1000) {
            fpsLine.textContent = `${((frames * 1000) / elapsed).toFixed(0)} fps`;
            frames = 0;
            fpsWindowStart = performance.now();
        }
        requestAnimationFrame(frame);
    }
    requestAnimationFrame(frame);
}
main();
