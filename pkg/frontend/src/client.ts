// Bus client over the browser bridge (WebSocket endpoint next to the TCP
// port).  Handles registration, per-source sequence numbers, offline
// queueing with flush-on-reconnect, and exponential backoff.

import {
    BusMessage,
    MSG_REGISTER,
    parseMessage,
    serializeMessage,
    WireError,
} from "./protocol.js";

export type Status = "connecting" | "connected" | "closed";

// The slice of the WebSocket API the client touches, so tests can inject
// a scripted fake instead of a real socket.
export interface SocketLike {
    readyState: number;
    send(data: string): void;
    close(): void;
    onopen: (() => void) | null;
    onmessage: ((ev: { data: unknown }) => void) | null;
    onclose: (() => void) | null;
    onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;
export type MessageHandler = (msg: BusMessage) => void;
export type StatusHandler = (status: Status, queued: number) => void;

const SOCKET_OPEN = 1; // WebSocket.OPEN, without reaching for the global
const BACKOFF_BASE_MS = 1000;
const BACKOFF_CAP_MS = 30000;

export interface BusClientOptions {
    makeSocket?: SocketFactory;
    now?: () => number;
}

export class BusClient {
    readonly source: string;

    // Frames that failed to parse; surfaced in the UI as a health signal.
    badFrames = 0;

    private readonly url: string;
    private readonly makeSocket: SocketFactory;
    private readonly now: () => number;
    private socket: SocketLike | null = null;
    // Never reset: the bus holds a per-source high-water mark, so a fresh
    // counter after a reconnect would be rejected as stale traffic.
    private seq = 0;
    private pending: Array<{ type: string; payload: Record<string, unknown> }> = [];
    private attempts = 0;
    private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
    private closedOnPurpose = false;
    private messageHandlers: MessageHandler[] = [];
    private statusHandlers: StatusHandler[] = [];
    private currentStatus: Status = "closed";

    constructor(url: string, source: string, opts: BusClientOptions = {}) {
        this.url = url;
        this.source = source;
        this.makeSocket = opts.makeSocket ?? ((u) => new WebSocket(u) as unknown as SocketLike);
        this.now = opts.now ?? (() => Date.now());
    }

    get status(): Status {
        return this.currentStatus;
    }

    get queuedCount(): number {
        return this.pending.length;
    }

    onMessage(handler: MessageHandler): void {
        this.messageHandlers.push(handler);
    }

    onStatus(handler: StatusHandler): void {
        this.statusHandlers.push(handler);
    }

    connect(): void {
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
            let msg: BusMessage;
            try {
                msg = parseMessage(ev.data);
            } catch (e) {
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
    send(type: string, payload: Record<string, unknown>): boolean {
        if (this.socket !== null && this.socket.readyState === SOCKET_OPEN) {
            this.sendNow(type, payload);
            return true;
        }
        this.pending.push({ type, payload });
        this.setStatus(this.currentStatus);
        return false;
    }

    close(): void {
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

    private sendNow(type: string, payload: Record<string, unknown>): void {
        this.seq += 1;
        const msg: BusMessage = {
            type,
            source: this.source,
            seq: this.seq,
            timestamp_ms: Math.round(this.now()),
            payload,
        };
        this.socket!.send(serializeMessage(msg));
    }

    private scheduleReconnect(): void {
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

    private setStatus(status: Status): void {
        this.currentStatus = status;
        for (const handler of this.statusHandlers) {
            handler(status, this.pending.length);
        }
    }
}
