import { RingBuffer } from "./ring.js";
import type { Assist, Mode, StateFrame } from "./protocol.js";

/** History window the telemetry buffer must cover, in seconds. */
export const BUFFER_SECONDS = 30;

/** A connected link with no telemetry for longer than this is stale. */
export const STALE_AFTER_S = 1.0;

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

/** Client-side mirror of the telemetry stream.
 *
 * Network callbacks only append here; rendering only reads. The buffer is
 * a bounded ring sized for BUFFER_SECONDS at the telemetry rate, so the
 * scrolling plots always have their full window and nothing grows without
 * limit. Timestamps passed in are local monotonic seconds; the frames
 * themselves carry simulation time.
 */
export class ViewState {
  readonly buffer: RingBuffer<StateFrame>;
  status: ConnectionStatus = "disconnected";
  lastFrameAt: number | null = null;

  constructor(telemetryRateHz = 20) {
    if (!Number.isFinite(telemetryRateHz) || telemetryRateHz <= 0) {
      throw new RangeError(`telemetryRateHz must be positive, got ${telemetryRateHz}`);
    }
    this.buffer = new RingBuffer<StateFrame>(
      Math.ceil(BUFFER_SECONDS * telemetryRateHz),
    );
  }

  pushFrame(frame: StateFrame, now: number): void {
    this.buffer.push(frame);
    this.lastFrameAt = now;
  }

  latest(): StateFrame | null {
    return this.buffer.last();
  }

  mode(): Mode | null {
    return this.latest()?.mode ?? null;
  }

  assist(): Assist | null {
    return this.latest()?.assist ?? null;
  }

  /** True when the link is up but telemetry stopped over a second ago. */
  isStale(now: number): boolean {
    return (
      this.status === "connected" &&
      this.lastFrameAt !== null &&
      now - this.lastFrameAt > STALE_AFTER_S
    );
  }
}
