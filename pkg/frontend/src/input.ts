import { clamp1, makeCmd, type CmdMessage } from "./protocol.js";

/** The stick position implied by everything currently held down. */
export interface HeldInput {
  dir: [number, number];
  vz: number;
  yaw: number;
}

/** Contribution a bound key adds to the held vector while pressed. */
export interface KeyEffect {
  dirX?: number;
  dirY?: number;
  vz?: number;
  yaw?: number;
}

export type KeyMap = Record<string, KeyEffect>;

/** Default bindings (KeyboardEvent.code values). The world +z axis points
 * down, so descend is +vz. The map is documented in the app page. */
export const DEFAULT_KEYS: KeyMap = {
  ArrowUp: { dirX: 1 },
  ArrowDown: { dirX: -1 },
  ArrowRight: { dirY: 1 },
  ArrowLeft: { dirY: -1 },
  KeyQ: { yaw: -1 },
  KeyE: { yaw: 1 },
  KeyR: { vz: -1 },
  KeyF: { vz: 1 },
};

export const DEFAULT_CADENCE_HZ = 10;

/** Gamepad axes quieter than this read as centered. */
export const GAMEPAD_DEADZONE = 0.05;

function heldEquals(a: HeldInput, b: HeldInput): boolean {
  return (
    a.dir[0] === b.dir[0] &&
    a.dir[1] === b.dir[1] &&
    a.vz === b.vz &&
    a.yaw === b.yaw
  );
}

function isIdle(h: HeldInput): boolean {
  return h.dir[0] === 0 && h.dir[1] === 0 && h.vz === 0 && h.yaw === 0;
}

/** Turns key and gamepad state into a rate-limited `cmd` stream.
 *
 * Commands are emitted on input change or at the cadence while input is
 * held, never more than one per cadence period; a centered stick emits
 * nothing at all, which is what lets the supervisor fall back to Idle.
 * A change landing inside the rate window is emitted at the next allowed
 * sample, including the release edge back to zero.
 */
export class InputTracker {
  private pressed = new Set<string>();
  private gamepad: HeldInput = { dir: [0, 0], vz: 0, yaw: 0 };
  private lastEmitted: HeldInput | null = null;
  private lastEmitAt: number | null = null;
  private readonly period: number;

  constructor(
    readonly keys: KeyMap = DEFAULT_KEYS,
    cadenceHz: number = DEFAULT_CADENCE_HZ,
  ) {
    if (!Number.isFinite(cadenceHz) || cadenceHz <= 0) {
      throw new RangeError(`cadenceHz must be positive, got ${cadenceHz}`);
    }
    this.period = 1 / cadenceHz;
  }

  /** Returns true when the key is bound (callers preventDefault on it). */
  keyDown(code: string): boolean {
    if (!(code in this.keys)) return false;
    this.pressed.add(code);
    return true;
  }

  keyUp(code: string): boolean {
    if (!(code in this.keys)) return false;
    this.pressed.delete(code);
    return true;
  }

  /** Axes are [dirX, dirY, yaw, vz], passed through past the deadzone. */
  setGamepadAxes(axes: readonly number[]): void {
    const dz = (v: number | undefined): number => {
      const x = clamp1(v ?? 0);
      return Math.abs(x) < GAMEPAD_DEADZONE ? 0 : x;
    };
    this.gamepad = {
      dir: [dz(axes[0]), dz(axes[1])],
      vz: dz(axes[3]),
      yaw: dz(axes[2]),
    };
  }

  /** Held vector right now: key contributions plus gamepad, clamped. */
  current(): HeldInput {
    let dirX = this.gamepad.dir[0];
    let dirY = this.gamepad.dir[1];
    let vz = this.gamepad.vz;
    let yaw = this.gamepad.yaw;
    for (const code of this.pressed) {
      const e = this.keys[code];
      dirX += e.dirX ?? 0;
      dirY += e.dirY ?? 0;
      vz += e.vz ?? 0;
      yaw += e.yaw ?? 0;
    }
    return { dir: [clamp1(dirX), clamp1(dirY)], vz: clamp1(vz), yaw: clamp1(yaw) };
  }

  /** One scheduler step: returns the frame to send now, or null.
   *
   * Call as often as convenient; the cadence cap is enforced here, so a
   * fast caller still emits at most one command per period.
   */
  sample(now: number, tClient: number): CmdMessage | null {
    const cur = this.current();
    const due =
      this.lastEmitAt === null || now - this.lastEmitAt >= this.period - 1e-9;
    if (!due) return null;
    const changed =
      this.lastEmitted === null
        ? !isIdle(cur)
        : !heldEquals(cur, this.lastEmitted);
    if (!changed && isIdle(cur)) return null;
    this.lastEmitted = cur;
    this.lastEmitAt = now;
    return makeCmd(tClient, cur.dir, cur.vz, cur.yaw);
  }
}
