import {
  parseServerFrame,
  ProtocolError,
  type AckFrame,
  type Assist,
  type ClientMessage,
  type ErrorFrame,
} from "./protocol.js";
import type { ViewState } from "./viewstate.js";

/** Socket surface shared by the browser WebSocket and the `ws` package,
 * so tests can drive the client over a real socket or a fake. */
export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "message" | "close" | "error",
    listener: (ev: { data?: unknown }) => void,
  ): void;
}

export type SocketFactory = (url: string) => SocketLike;

/** WebSocket.OPEN; the numeric constant is part of the standard. */
const OPEN = 1;

/** Input raised while the link is down waits at most this long. */
export const PENDING_MAX_AGE_S = 1.0;

const PENDING_MAX = 32;

/** Owns one WebSocket to the piloting service.
 *
 * All inbound traffic lands in the ViewState (telemetry) or in small
 * latest-value fields (ack, error); nothing here blocks or re-enters the
 * render path. Commands sent while disconnected are buffered up to
 * PENDING_MAX_AGE_S and flushed on the next successful open; older ones
 * are dropped because stale pilot intent is worse than none.
 */
export class PilotClient {
  lastAck: AckFrame | null = null;
  lastError: ErrorFrame | null = null;
  malformedCount = 0;

  private sock: SocketLike | null = null;
  private pending: { text: string; at: number }[] = [];

  constructor(
    readonly url: string,
    readonly vs: ViewState,
    private readonly factory: SocketFactory,
    private readonly clock: () => number,
  ) {}

  get connected(): boolean {
    return this.sock !== null && this.sock.readyState === OPEN;
  }

  connect(): void {
    if (this.sock !== null) return;
    this.vs.status = "connecting";
    const sock = this.factory(this.url);
    this.sock = sock;
    sock.addEventListener("open", () => {
      this.vs.status = "connected";
      this.flushPending();
    });
    sock.addEventListener("message", (ev) => {
      const text =
        typeof ev.data === "string" ? ev.data : String(ev.data ?? "");
      this.handleFrame(text);
    });
    sock.addEventListener("close", () => {
      if (this.sock === sock) this.sock = null;
      this.vs.status = "disconnected";
    });
    sock.addEventListener("error", () => {
      // The close event carries the state change; nothing to do here.
    });
  }

  close(): void {
    const sock = this.sock;
    this.sock = null;
    this.vs.status = "disconnected";
    sock?.close();
  }

  send(msg: ClientMessage): void {
    const text = JSON.stringify(msg);
    if (this.sock !== null && this.sock.readyState === OPEN) {
      this.sock.send(text);
      return;
    }
    this.pending.push({ text, at: this.clock() });
    this.prunePending(this.clock());
  }

  setAssist(assist: Assist, reset = false): void {
    this.send({ type: "config", assist, reset });
  }

  private handleFrame(text: string): void {
    let frame;
    try {
      frame = parseServerFrame(text);
    } catch (e) {
      if (e instanceof ProtocolError) {
        this.malformedCount += 1;
        return;
      }
      throw e;
    }
    switch (frame.type) {
      case "state":
        this.vs.pushFrame(frame, this.clock());
        break;
      case "ack":
        this.lastAck = frame;
        break;
      case "error":
        this.lastError = frame;
        break;
    }
  }

  private prunePending(now: number): void {
    this.pending = this.pending
      .filter((p) => now - p.at <= PENDING_MAX_AGE_S)
      .slice(-PENDING_MAX);
  }

  private flushPending(): void {
    this.prunePending(this.clock());
    const sock = this.sock;
    if (sock === null || sock.readyState !== OPEN) return;
    for (const p of this.pending) sock.send(p.text);
    this.pending = [];
  }
}
