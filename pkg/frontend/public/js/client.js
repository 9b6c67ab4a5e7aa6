// Bus client over the browser bridge (WebSocket endpoint next to the TCP
// port).  Handles registration, per-source sequence numbers, offline
// queueing with flush-on-reconnect, and exponential backoff.
import { MSG_REGISTER, parseMessage, serializeMessage, WireError, } from "./protocol.js";
const SOCKET_OPEN = 1; // WebSocket.OPEN, without reaching for the global
const BACKOFF_BASE_MS = 1000;
const BACKOFF_CAP_MS = 30000;
export class BusClient {
    source;
    // Frames that failed to parse; surfaced in the UI as a health signal.
    badFrames = 0;
    url;
    makeSocket;
    now;
    socket = null;
    // Never reset: the bus holds a per-source high-water mark, so a fresh
    // counter after a reconnect would be rejected as stale traffic.
    seq = 0;
    pending = [];
    attempts = 0;
    reconnectTimer = null;
    closedOnPurpose = false;
    messageHandlers = [];
    statusHandlers = [];
    currentStatus = "closed";
    constructor(url, source, opts = {}) {
        this.url = url;
        this.source = source;
        this.makeSocket = opts.makeSocket ?? ((u) => new WebSocket(u));
        this.now = opts.now ?? (() => Date.now());
    }
    get status() {
        return this.currentStatus;
    }
    get queuedCount() {
        return this.pending.length;
    }
    onMessage(handler) {
        this.messageHandlers.push(handler);
    }
    onStatus(handler) {
        this.statusHandlers.push(handler);
    }
    connect() {
        if (this.closedOnPurpose || this.socket !== null) {
            return;
        }
        this.setStatus("connecting");
        const sock = this.makeSocket(this.url);
        this.socket = sock;
        sock.onopen = () => {
            this.attempts = 0;
            this.setStatus("connected");
            // Register first, then flush whatever was queued while offline,
            // in the order it was asked for.
            this.sendNow(MSG_REGISTER, { component: this.source });
            const queued = this.pending;
            this.pending = [];
            for (const q of queued) {
                this.sendNow(q.type, q.payload);
            }
            this.setStatus("connected");
        };
        sock.onmessage = (ev) => {
            if (typeof ev.data !== "string") {
                this.badFrames += 1;
                return;
            }
            let msg;
            try {
                msg = parseMessage(ev.data);
            }
            catch (e) {
                if (e instanceof WireError) {
                    this.badFrames += 1;
                    return;
                }
                throw e;
            }
            for (const handler of this.messageHandlers) {
                handler(msg);
            }
        };
        sock.onclose = () => {
            this.socket = null;
            this.setStatus(this.closedOnPurpose ? "closed" : "connecting");
            this.scheduleReconnect();
        };
        sock.onerror = () => {
            // onclose follows; reconnect is handled there
        };
    }
    // True when the message left immediately; false when it was queued for
    // the next reconnect (callers surface that as a visible warning).
    send(type, payload) {
        if (this.socket !== null && this.socket.readyState === SOCKET_OPEN) {
            this.sendNow(type, payload);
            return true;
        }
        this.pending.push({ type, payload });
        this.setStatus(this.currentStatus);
        return false;
    }
    close() {
        this.closedOnPurpose = true;
        if (this.reconnectTimer !== null) {
            clearTimeout(this.reconnectTimer);
            this.reconnectTimer = null;
        }
        if (this.socket !== null) {
            this.socket.close();
            this.socket = null;
        }
        this.setStatus("closed");
    }
    sendNow(type, payload) {
        this.seq += 1;
        const msg = {
            type,
            source: this.source,
            seq: this.seq,
            timestamp_ms: Math.round(this.now()),
            payload,
        };
        this.socket.send(serializeMessage(msg));
    }
    scheduleReconnect() {
        if (this.closedOnPurpose || this.reconnectTimer !== null) {
            return;
        }
        const wait = Math.min(BACKOFF_BASE_MS * 2 ** this.attempts, BACKOFF_CAP_MS);
        this.reconnectTimer = setTimeout(() => {
            this.reconnectTimer = null;
            this.attempts += 1;
            this.connect();
        }, wait);
    }
    setStatus(status) {
        this.currentStatus = status;
        for (const handler of this.statusHandlers) {
            handler(status, this.pending.length);
        }
    }
}
