/** Wire frames for the piloting WebSocket, with strict build/parse helpers.
 *
 * One JSON object per frame, UTF-8 text. The client sends `cmd` and
 * `config`; the server sends `state`, `ack`, and `error`. Every numeric
 * field must be finite: the transport never carries NaN or Infinity, so a
 * frame that decodes to one is malformed, not merely extreme.
 */

export type Assist = "on" | "off";

/** Supervisor mode as broadcast in telemetry ("off" when assist is off). */
export type Mode = "idle" | "balancing" | "stabilizing" | "off";

const MODES: readonly string[] = ["idle", "balancing", "stabilizing", "off"];

export interface CmdMessage {
  type: "cmd";
  t_client: number;
  dir: [number, number];
  vz: number;
  yaw: number;
}

export interface ConfigMessage {
  type: "config";
  assist?: Assist;
  reset?: boolean;
}

export type ClientMessage = CmdMessage | ConfigMessage;

export interface StateFrame {
  type: "state";
  t: number;
  pos: [number, number, number];
  vel: [number, number, number];
  tilt: [number, number];
  tilt_rate: [number, number];
  psi: number;
  omega_z: number;
  mode: Mode;
  assist: Assist;
}

export interface AckFrame {
  type: "ack";
  t_server: number;
  last_cmd_t: number | null;
}

export interface ErrorFrame {
  type: "error";
  reason: string;
}

export type ServerFrame = StateFrame | AckFrame | ErrorFrame;

export class ProtocolError extends Error {}

/** Clamp to [-1, 1]; non-finite input collapses to 0 so a broken axis can
 * never put an out-of-contract value on the wire. */
export function clamp1(x: number): number {
  if (!Number.isFinite(x)) return 0;
  return Math.min(1, Math.max(-1, x));
}

/** Build a `cmd` frame with every field pre-clamped to the wire contract. */
export function makeCmd(
  tClient: number,
  dir: readonly [number, number],
  vz: number,
  yaw: number,
): CmdMessage {
  return {
    type: "cmd",
    t_client: Number.isFinite(tClient) ? tClient : 0,
    dir: [clamp1(dir[0]), clamp1(dir[1])],
    vz: clamp1(vz),
    yaw: clamp1(yaw),
  };
}

function asFinite(v: unknown, what: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`${what} must be a finite number`);
  }
  return v;
}

function asVec(v: unknown, n: number, what: string): number[] {
  if (!Array.isArray(v) || v.length !== n) {
    throw new ProtocolError(`${what} must be a ${n}-vector`);
  }
  return v.map((x, i) => asFinite(x, `${what}[${i}]`));
}

/** Parse one server frame; throws ProtocolError on anything malformed. */
export function parseServerFrame(text: string): ServerFrame {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError("frame is not valid JSON");
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("frame must be a JSON object");
  }
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "state": {
      const mode = msg.mode;
      if (typeof mode !== "string" || !MODES.includes(mode)) {
        throw new ProtocolError(`state.mode is not a known mode: ${String(mode)}`);
      }
      const assist = msg.assist;
      if (assist !== "on" && assist !== "off") {
        throw new ProtocolError("state.assist must be 'on' or 'off'");
      }
      return {
        type: "state",
        t: asFinite(msg.t, "state.t"),
        pos: asVec(msg.pos, 3, "state.pos") as [number, number, number],
        vel: asVec(msg.vel, 3, "state.vel") as [number, number, number],
        tilt: asVec(msg.tilt, 2, "state.tilt") as [number, number],
        tilt_rate: asVec(msg.tilt_rate, 2, "state.tilt_rate") as [number, number],
        psi: asFinite(msg.psi, "state.psi"),
        omega_z: asFinite(msg.omega_z, "state.omega_z"),
        mode: mode as Mode,
        assist,
      };
    }
    case "ack": {
      const last = msg.last_cmd_t;
      return {
        type: "ack",
        t_server: asFinite(msg.t_server, "ack.t_server"),
        last_cmd_t: last === null || last === undefined
          ? null
          : asFinite(last, "ack.last_cmd_t"),
      };
    }
    case "error": {
      if (typeof msg.reason !== "string") {
        throw new ProtocolError("error.reason must be a string");
      }
      return { type: "error", reason: msg.reason };
    }
    default:
      throw new ProtocolError(`unknown frame type: ${String(msg.type)}`);
  }
}
