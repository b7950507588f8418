import { describe, expect, it } from "vitest";
import {
  DEFAULT_CADENCE_HZ,
  GAMEPAD_DEADZONE,
  InputTracker,
} from "../src/input.js";

describe("InputTracker", () => {
  it("emits nothing while no input is held", () => {
    const tr = new InputTracker();
    for (let k = 0; k < 20; k++) {
      expect(tr.sample(k * 0.1, k * 0.1)).toBeNull();
    }
  });

  it("emits dir=[1,0] repeatedly at the cadence while ArrowUp is held", () => {
    const tr = new InputTracker();
    expect(tr.keyDown("ArrowUp")).toBe(true);
    const first = tr.sample(0.0, 0.0);
    expect(first).not.toBeNull();
    expect(first!.dir).toEqual([1, 0]);
    expect(first!.vz).toBe(0);
    expect(first!.yaw).toBe(0);

    // Sampling faster than the cadence must not emit again.
    expect(tr.sample(0.02, 0.02)).toBeNull();
    expect(tr.sample(0.05, 0.05)).toBeNull();

    const second = tr.sample(0.1, 0.1);
    expect(second).not.toBeNull();
    expect(second!.dir).toEqual([1, 0]);
    const third = tr.sample(0.2, 0.2);
    expect(third).not.toBeNull();
  });

  it("caps emission at one command per period even across changes", () => {
    const tr = new InputTracker();
    tr.keyDown("ArrowUp");
    expect(tr.sample(0.0, 0.0)).not.toBeNull();
    tr.keyDown("ArrowRight");
    // Change arrives mid-period: held until the period elapses.
    expect(tr.sample(0.05, 0.05)).toBeNull();
    const c = tr.sample(0.1, 0.1);
    expect(c).not.toBeNull();
    expect(c!.dir).toEqual([1, 1]);
  });

  it("emits one zero command on release, then goes quiet", () => {
    const tr = new InputTracker();
    tr.keyDown("ArrowUp");
    expect(tr.sample(0.0, 0.0)).not.toBeNull();
    tr.keyUp("ArrowUp");
    const release = tr.sample(0.1, 0.1);
    expect(release).not.toBeNull();
    expect(release!.dir).toEqual([0, 0]);
    expect(release!.vz).toBe(0);
    expect(release!.yaw).toBe(0);
    for (let k = 2; k < 12; k++) {
      expect(tr.sample(k * 0.1, k * 0.1)).toBeNull();
    }
  });

  it("passes gamepad axes through past the deadzone", () => {
    const tr = new InputTracker();
    tr.setGamepadAxes([0.5, 0, 0, 0]);
    const c = tr.sample(0.0, 0.0);
    expect(c).not.toBeNull();
    expect(c!.dir).toEqual([0.5, 0]);
    expect(c!.yaw).toBe(0);
    expect(c!.vz).toBe(0);
  });

  it("zeroes axes inside the deadzone and clamps outside [-1,1]", () => {
    const tr = new InputTracker();
    tr.setGamepadAxes([GAMEPAD_DEADZONE / 2, -5, 0.3, Number.NaN]);
    const c = tr.sample(0.0, 0.0);
    expect(c).not.toBeNull();
    expect(c!.dir).toEqual([0, -1]);
    expect(c!.yaw).toBe(0.3);
    expect(c!.vz).toBe(0);
  });

  it("sums keys with gamepad and clamps the result", () => {
    const tr = new InputTracker();
    tr.keyDown("ArrowUp");
    tr.setGamepadAxes([0.8, 0, 0, 0]);
    const c = tr.sample(0.0, 0.0);
    expect(c!.dir).toEqual([1, 0]);
  });

  it("cancels opposing keys to idle", () => {
    const tr = new InputTracker();
    tr.keyDown("ArrowUp");
    tr.keyDown("ArrowDown");
    expect(tr.sample(0.0, 0.0)).toBeNull();
  });

  it("ignores unbound keys", () => {
    const tr = new InputTracker();
    expect(tr.keyDown("KeyP")).toBe(false);
    expect(tr.sample(0.0, 0.0)).toBeNull();
    expect(tr.keyUp("KeyP")).toBe(false);
  });

  it("stamps t_client and pre-clamps every emitted field", () => {
    const tr = new InputTracker();
    tr.setGamepadAxes([2, -2, 2, -2]);
    const c = tr.sample(0.0, 12.25);
    expect(c).not.toBeNull();
    expect(c!.t_client).toBe(12.25);
    expect(c!.dir).toEqual([1, -1]);
    expect(c!.yaw).toBe(1);
    expect(c!.vz).toBe(-1);
  });

  it("uses a 10 Hz default cadence", () => {
    expect(DEFAULT_CADENCE_HZ).toBe(10);
    const tr = new InputTracker();
    tr.keyDown("ArrowUp");
    let emitted = 0;
    for (let ms = 0; ms <= 1000; ms += 10) {
      if (tr.sample(ms / 1000, ms / 1000) !== null) emitted += 1;
    }
    expect(emitted).toBe(11); // t = 0.0, 0.1, ..., 1.0
  });

  it("rejects a non-positive cadence", () => {
    expect(() => new InputTracker(undefined, 0)).toThrow(RangeError);
  });
});
