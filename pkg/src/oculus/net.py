"""Network transports for the bus: raw TCP lines and a WebSocket bridge.

Two endpoints, one schema:

  - BusServer: newline-delimited JSON over TCP (default port 7451).
    Every line in either direction is one BusMessage.
  - WebSocketBridge: the same JSON objects carried in RFC 6455 text
    frames, for browser clients.  The bridge also answers plain HTTP
    GETs from an optional static directory so the operator console can
    be served from the same port.

Both endpoints broadcast all bus traffic to every connected client and
publish every inbound message onto the bus.  Slow or dead clients are
dropped rather than allowed to stall dispatch: outbound delivery goes
through a bounded per-client queue and a writer thread.
"""

from __future__ import annotations

import base64
import hashlib
import logging
import mimetypes
import os
import queue
import socket
import threading
import time
from typing import Final, Iterator

from .bus import BusMessage, MessageBus

logger = logging.getLogger(__name__)

DEFAULT_PORT: Final = 7451
_OUTBOUND_QUEUE_SIZE: Final = 4096

_WS_GUID: Final = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_OP_CONT: Final = 0x0
_OP_TEXT: Final = 0x1
_OP_CLOSE: Final = 0x8
_OP_PING: Final = 0x9
_OP_PONG: Final = 0xA

_SENTINEL: Final = object()


class _Connection:
    """One client socket with its outbound queue and writer thread."""

    def __init__(self, sock: socket.socket, encode) -> None:
        self.sock = sock
        self.encode = encode
        self.outbox: queue.Queue = queue.Queue(maxsize=_OUTBOUND_QUEUE_SIZE)
        self.alive = True
        self.writer = threading.Thread(target=self._drain, daemon=True)
        self.writer.start()

    def send(self, msg: BusMessage) -> None:
        try:
            self.outbox.put_nowait(msg)
        except queue.Full:
            # A wedged client must not stall the bus.
            self.close()

    def send_raw(self, data: bytes) -> None:
        try:
            self.outbox.put_nowait(data)
        except queue.Full:
            self.close()

    def _drain(self) -> None:
        while True:
            item = self.outbox.get()
            if item is _SENTINEL:
                return
            try:
                data = item if isinstance(item, bytes) else self.encode(item)
                self.sock.sendall(data)
            except OSError:
                self.alive = False
                return

    def close(self) -> None:
        self.alive = False
        try:
            self.outbox.put_nowait(_SENTINEL)
        except queue.Full:
            pass
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass

    def flush_and_close(self, timeout: float = 1.0) -> None:
        """Close after draining what is already queued.

        Used for protocol-level goodbyes (the WebSocket close echo) where
        the last frame must actually reach the peer; close() tears the
        socket down immediately and may drop queued frames.
        """
        self.alive = False
        try:
            self.outbox.put_nowait(_SENTINEL)
        except queue.Full:
            pass
        else:
            self.writer.join(timeout)
        self.close()


class _SocketEndpoint:
    """Accept loop plus client bookkeeping shared by both transports."""

    name = "endpoint"

    def __init__(self, bus: MessageBus, host: str = "127.0.0.1", port: int = DEFAULT_PORT) -> None:
        self.bus = bus
        self.host = host
        self.port = port
        self._server: socket.socket | None = None
        self._accept_thread: threading.Thread | None = None
        self._clients: list[_Connection] = []
        self._clients_lock = threading.Lock()
        self._running = False
        self._subscription = None

    @property
    def address(self) -> tuple[str, int]:
        """Bound address; port is the real one even when 0 was requested."""
        if self._server is None:
            return (self.host, self.port)
        return self._server.getsockname()[:2]

    def start(self) -> None:
        if self._running:
            return
        srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        srv.bind((self.host, self.port))
        srv.listen(16)
        srv.settimeout(0.5)
        self._server = srv
        self._running = True
        self._subscription = self.bus.subscribe(None, self._broadcast)
        self._accept_thread = threading.Thread(
            target=self._accept_loop, name=f"{self.name}-accept", daemon=True
        )
        self._accept_thread.start()
        logger.debug("%s listening on %s:%d", self.name, *self.address)

    def stop(self) -> None:
        if not self._running:
            return
        self._running = False
        if self._subscription is not None:
            self.bus.unsubscribe(None, self._subscription)
            self._subscription = None
        with self._clients_lock:
            clients, self._clients = self._clients, []
        for c in clients:
            c.close()
        if self._server is not None:
            try:
                self._server.close()
            except OSError:
                pass
            self._server = None
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=2.0)
            self._accept_thread = None

    def _accept_loop(self) -> None:
        while self._running and self._server is not None:
            try:
                sock, _ = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            threading.Thread(
                target=self._serve_client, args=(sock,), name=f"{self.name}-client", daemon=True
            ).start()

    def _broadcast(self, msg: BusMessage) -> None:
        with self._clients_lock:
            clients = [c for c in self._clients if c.alive]
            self._clients = clients
        for c in clients:
            c.send(msg)

    def _adopt(self, conn: _Connection) -> None:
        with self._clients_lock:
            self._clients.append(conn)

    def _discard(self, conn: _Connection) -> None:
        conn.close()
        with self._clients_lock:
            try:
                self._clients.remove(conn)
            except ValueError:
                pass

    def _serve_client(self, sock: socket.socket) -> None:
        raise NotImplementedError


# ── newline-delimited JSON over TCP ──────────────────────────────────


def _encode_line(msg: BusMessage) -> bytes:
    return (msg.to_json() + "\n").encode("utf-8")


class BusServer(_SocketEndpoint):
    """Line-per-message TCP endpoint."""

    name = "bus-tcp"

    def _serve_client(self, sock: socket.socket) -> None:
        conn = _Connection(sock, _encode_line)
        self._adopt(conn)
        buf = b""
        try:
            while self._running:
                chunk = sock.recv(65536)
                if not chunk:
                    return
                buf += chunk
                while b"\n" in buf:
                    line, buf = buf.split(b"\n", 1)
                    if line.strip():
                        self._ingest(line)
        except OSError:
            return
        finally:
            self._discard(conn)

    def _ingest(self, line: bytes) -> None:
        try:
            msg = BusMessage.from_json(line.decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as e:
            self.bus.report_error(str(e))
            return
        self.bus.publish(msg)


class BusClient:
    """Small synchronous client for the TCP endpoint.

    Stamps seq and timestamp locally; call register() once before
    publishing so the server-side bus accepts the source.
    """

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT, *, source: str = "client") -> None:
        self.source = source
        self._sock = socket.create_connection((host, port), timeout=10.0)
        self._file = self._sock.makefile("rb")
        self._seq = 0

    def register(self) -> None:
        self.send("REGISTER", {"component": self.source})

    def send(self, msg_type: str, payload: dict | None = None) -> BusMessage:
        self._seq += 1
        msg = BusMessage(
            type=msg_type,
            source=self.source,
            seq=self._seq,
            timestamp_ms=int(time.time() * 1000),
            payload=payload if payload is not None else {},
        )
        self._sock.sendall(_encode_line(msg))
        return msg

    def messages(self) -> Iterator[BusMessage]:
        """Yield broadcast messages until the connection closes."""
        for raw in self._file:
            line = raw.strip()
            if line:
                yield BusMessage.from_json(line.decode("utf-8"))

    def read(self, timeout: float | None = None) -> BusMessage:
        if timeout is not None:
            self._sock.settimeout(timeout)
        raw = self._file.readline()
        if not raw:
            raise ConnectionError("server closed the connection")
        return BusMessage.from_json(raw.decode("utf-8").strip())

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass

    def __enter__(self) -> "BusClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# ── WebSocket bridge ─────────────────────────────────────────────────


def websocket_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _ws_frame(payload: bytes, opcode: int = _OP_TEXT) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head.append(n)
    elif n < 1 << 16:
        head.append(126)
        head += n.to_bytes(2, "big")
    else:
        head.append(127)
        head += n.to_bytes(8, "big")
    return bytes(head) + payload


def _read_exact(sock: socket.socket, n: int) -> bytes:
    data = b""
    while len(data) < n:
        chunk = sock.recv(n - len(data))
        if not chunk:
            raise ConnectionError("peer closed mid-frame")
        data += chunk
    return data


def _ws_read_frame(sock: socket.socket) -> tuple[int, bytes]:
    b1, b2 = _read_exact(sock, 2)
    fin = bool(b1 & 0x80)
    opcode = b1 & 0x0F
    masked = bool(b2 & 0x80)
    length = b2 & 0x7F
    if length == 126:
        length = int.from_bytes(_read_exact(sock, 2), "big")
    elif length == 127:
        length = int.from_bytes(_read_exact(sock, 8), "big")
    mask = _read_exact(sock, 4) if masked else b""
    payload = _read_exact(sock, length) if length else b""
    if masked:
        payload = bytes(b ^ mask[i & 3] for i, b in enumerate(payload))
    if not fin:
        # Reassemble a fragmented message; control frames cannot be
        # fragmented, so only data opcodes arrive here.
        op2, rest = _ws_read_frame(sock)
        if op2 != _OP_CONT:
            raise ConnectionError("expected continuation frame")
        payload += rest
    return opcode, payload


def _encode_ws(msg: BusMessage) -> bytes:
    return _ws_frame(msg.to_json().encode("utf-8"))


class WebSocketBridge(_SocketEndpoint):
    """Browser-facing endpoint: WebSocket upgrade or static file GET.

    static_dir, when given, is the root for plain HTTP GETs; requests
    are confined to it.  Everything after the upgrade is BusMessage
    JSON, one object per text frame.
    """

    name = "bus-ws"

    def __init__(
        self,
        bus: MessageBus,
        host: str = "127.0.0.1",
        port: int = DEFAULT_PORT + 1,
        *,
        static_dir: str | None = None,
    ) -> None:
        super().__init__(bus, host, port)
        self.static_dir = os.path.realpath(static_dir) if static_dir else None

    def _serve_client(self, sock: socket.socket) -> None:
        try:
            request = self._read_request(sock)
        except (OSError, ValueError):
            sock.close()
            return
        if request is None:
            sock.close()
            return
        target, headers = request
        if headers.get("upgrade", "").lower() == "websocket":
            self._serve_websocket(sock, headers)
        else:
            self._serve_static(sock, target)

    @staticmethod
    def _read_request(sock: socket.socket) -> tuple[str, dict[str, str]] | None:
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = sock.recv(8192)
            if not chunk:
                return None
            data += chunk
            if len(data) > 65536:
                raise ValueError("request header too large")
        head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
        lines = head.split("\r\n")
        parts = lines[0].split(" ")
        if len(parts) != 3:
            raise ValueError("malformed request line")
        target = parts[1]
        headers: dict[str, str] = {}
        for line in lines[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()
        return target, headers

    # ── websocket path ───────────────────────────────────────────

    def _serve_websocket(self, sock: socket.socket, headers: dict[str, str]) -> None:
        key = headers.get("sec-websocket-key")
        if not key:
            sock.sendall(b"HTTP/1.1 400 Bad Request\r\nConnection: close\r\n\r\n")
            sock.close()
            return
        response = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {websocket_accept_key(key)}\r\n"
            "\r\n"
        )
        sock.sendall(response.encode("ascii"))
        conn = _Connection(sock, _encode_ws)
        self._adopt(conn)
        try:
            while self._running:
                opcode, payload = _ws_read_frame(sock)
                if opcode == _OP_CLOSE:
                    conn.send_raw(_ws_frame(payload[:2], _OP_CLOSE))
                    conn.flush_and_close()
                    return
                if opcode == _OP_PING:
                    conn.send_raw(_ws_frame(payload, _OP_PONG))
                    continue
                if opcode == _OP_PONG:
                    continue
                if opcode != _OP_TEXT:
                    continue
                self._ingest(payload)
        except (OSError, ConnectionError):
            return
        finally:
            self._discard(conn)

    def _ingest(self, payload: bytes) -> None:
        try:
            msg = BusMessage.from_json(payload.decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as e:
            self.bus.report_error(str(e))
            return
        self.bus.publish(msg)

    # ── static path ──────────────────────────────────────────────

    def _serve_static(self, sock: socket.socket, target: str) -> None:
        try:
            status, ctype, body = self._lookup(target)
            head = (
                f"HTTP/1.1 {status}\r\n"
                f"Content-Type: {ctype}\r\n"
                f"Content-Length: {len(body)}\r\n"
                "Connection: close\r\n"
                "\r\n"
            )
            sock.sendall(head.encode("ascii") + body)
        except OSError:
            pass
        finally:
            sock.close()

    def _lookup(self, target: str) -> tuple[str, str, bytes]:
        if self.static_dir is None:
            return "404 Not Found", "text/plain", b"no static directory configured\n"
        path = target.split("?", 1)[0]
        if path.endswith("/"):
            path += "index.html"
        candidate = os.path.realpath(os.path.join(self.static_dir, path.lstrip("/")))
        if not candidate.startswith(self.static_dir + os.sep) and candidate != self.static_dir:
            return "403 Forbidden", "text/plain", b"forbidden\n"
        if not os.path.isfile(candidate):
            return "404 Not Found", "text/plain", b"not found\n"
        ctype = mimetypes.guess_type(candidate)[0] or "application/octet-stream"
        with open(candidate, "rb") as f:
            return "200 OK", ctype, f.read()


__all__ = [
    "BusClient",
    "BusServer",
    "DEFAULT_PORT",
    "WebSocketBridge",
    "websocket_accept_key",
]
