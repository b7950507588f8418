import { PilotClient } from "./client.js";
import { DEFAULT_CADENCE_HZ, InputTracker } from "./input.js";
import { renderFrame, type TargetRing } from "./render.js";
import { ViewState } from "./viewstate.js";

/** Browser wiring: everything stateful lives in ViewState and the tracker;
 * this file only plumbs DOM events into them and paints on each frame. */

function serverAddress(): string {
  const q = new URLSearchParams(window.location.search).get("server");
  if (q !== null && q !== "") return q;
  if (window.location.host !== "") return window.location.host;
  return "127.0.0.1:8765";
}

function targetsFromConfig(cfg: unknown): TargetRing[] {
  const pilot = (cfg as { scenario?: { pilot?: Record<string, unknown> } })
    ?.scenario?.pilot;
  if (pilot === undefined || !Array.isArray(pilot.waypoints)) return [];
  const radius =
    typeof pilot.capture_radius === "number" ? pilot.capture_radius : 0.5;
  return pilot.waypoints
    .filter((w): w is number[] => Array.isArray(w) && w.length === 3)
    .map((w) => ({ x: w[0], y: w[1], z: w[2], radius }));
}

async function main(): Promise<void> {
  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("2D canvas unavailable");

  const host = serverAddress();
  const clock = (): number => performance.now() / 1000;
  const vs = new ViewState();
  const client = new PilotClient(
    `ws://${host}/pilot`,
    vs,
    (url) => new WebSocket(url),
    clock,
  );
  const tracker = new InputTracker();

  let targets: TargetRing[] = [];
  try {
    const res = await fetch(`http://${host}/config`);
    if (res.ok) targets = targetsFromConfig(await res.json());
  } catch {
    // No config is fine: the service may not be up yet; rings stay off.
  }

  window.addEventListener("keydown", (ev) => {
    if (ev.repeat) {
      if (tracker.keyDown(ev.code)) ev.preventDefault();
      return;
    }
    if (ev.code === "KeyX") {
      const next = vs.assist() === "off" ? "on" : "off";
      client.setAssist(next);
      ev.preventDefault();
      return;
    }
    if (ev.code === "KeyZ") {
      client.send({ type: "config", reset: true });
      ev.preventDefault();
      return;
    }
    if (tracker.keyDown(ev.code)) ev.preventDefault();
  });
  window.addEventListener("keyup", (ev) => {
    if (tracker.keyUp(ev.code)) ev.preventDefault();
  });
  window.addEventListener("blur", () => {
    // Lost focus means lost key-up events; treat everything as released.
    for (const code of Object.keys(tracker.keys)) tracker.keyUp(code);
  });

  client.connect();
  window.setInterval(() => {
    if (vs.status === "disconnected") client.connect();
  }, 1000);

  window.setInterval(() => {
    const pads = navigator.getGamepads?.() ?? [];
    const pad = pads.find((p) => p !== null);
    if (pad !== undefined && pad !== null) {
      tracker.setGamepadAxes(pad.axes);
    }
    const now = clock();
    const cmd = tracker.sample(now, now);
    if (cmd !== null) client.send(cmd);
  }, 1000 / (2 * DEFAULT_CADENCE_HZ));

  const paint = (): void => {
    renderFrame(ctx, vs, clock(), {
      width: canvas.width,
      height: canvas.height,
      targets,
    });
    window.requestAnimationFrame(paint);
  };
  window.requestAnimationFrame(paint);
}

void main();
