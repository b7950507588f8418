import { describe, expect, it } from "vitest";
import {
  clamp1,
  makeCmd,
  parseServerFrame,
  ProtocolError,
} from "../src/protocol.js";

const STATE = {
  type: "state",
  t: 3.05,
  pos: [0.1, 0.2, -1.0],
  vel: [0.01, 0.0, 0.0],
  tilt: [0.02, -0.01],
  tilt_rate: [0.0, 0.1],
  psi: 0.4,
  omega_z: -0.02,
  mode: "balancing",
  assist: "on",
};

describe("clamp1", () => {
  it("clamps into [-1, 1] and zeroes non-finite values", () => {
    expect(clamp1(0.5)).toBe(0.5);
    expect(clamp1(2)).toBe(1);
    expect(clamp1(-7)).toBe(-1);
    expect(clamp1(Number.NaN)).toBe(0);
    expect(clamp1(Number.POSITIVE_INFINITY)).toBe(0);
  });
});

describe("makeCmd", () => {
  it("builds a clamped cmd frame", () => {
    const c = makeCmd(1.5, [2, -0.3], -4, 0.25);
    expect(c).toEqual({
      type: "cmd",
      t_client: 1.5,
      dir: [1, -0.3],
      vz: -1,
      yaw: 0.25,
    });
  });

  it("serializes with exactly the wire keys", () => {
    const keys = Object.keys(
      JSON.parse(JSON.stringify(makeCmd(0, [0.1, 0], 0, 0))),
    ).sort();
    expect(keys).toEqual(["dir", "t_client", "type", "vz", "yaw"]);
  });
});

describe("parseServerFrame", () => {
  it("parses a state frame", () => {
    const f = parseServerFrame(JSON.stringify(STATE));
    expect(f).toEqual(STATE);
  });

  it("parses ack frames with and without a last command", () => {
    expect(
      parseServerFrame('{"type":"ack","t_server":2.0,"last_cmd_t":1.5}'),
    ).toEqual({ type: "ack", t_server: 2.0, last_cmd_t: 1.5 });
    expect(
      parseServerFrame('{"type":"ack","t_server":0.0,"last_cmd_t":null}'),
    ).toEqual({ type: "ack", t_server: 0.0, last_cmd_t: null });
  });

  it("parses error frames", () => {
    expect(parseServerFrame('{"type":"error","reason":"boom"}')).toEqual({
      type: "error",
      reason: "boom",
    });
  });

  it("accepts every broadcast mode including off", () => {
    for (const mode of ["idle", "balancing", "stabilizing", "off"]) {
      const f = parseServerFrame(JSON.stringify({ ...STATE, mode }));
      expect(f.type).toBe("state");
    }
  });

  it("rejects malformed frames", () => {
    const bad = [
      "{broken",
      "[1,2]",
      '"state"',
      "{}",
      '{"type":"telemetry"}',
      JSON.stringify({ ...STATE, mode: "cruising" }),
      JSON.stringify({ ...STATE, assist: "maybe" }),
      JSON.stringify({ ...STATE, pos: [1, 2] }),
      JSON.stringify({ ...STATE, tilt: ["a", "b"] }),
      JSON.stringify({ ...STATE, omega_z: "fast" }),
      '{"type":"ack","t_server":"soon"}',
      '{"type":"error","reason":42}',
    ];
    for (const text of bad) {
      expect(() => parseServerFrame(text), text).toThrow(ProtocolError);
    }
  });

  it("rejects numbers that decode non-finite", () => {
    // JSON.parse("1e999") yields Infinity; the wire forbids it.
    const text = JSON.stringify({ ...STATE, t: 0 }).replace(
      '"t":0',
      '"t":1e999',
    );
    expect(() => parseServerFrame(text)).toThrow(ProtocolError);
  });
});
