import type { Mode } from "./protocol.js";
import type { ViewState } from "./viewstate.js";

/** Subset of CanvasRenderingContext2D the renderer draws with; tests supply
 * a recording fake, the app passes the real 2D context. */
export interface DrawSurface {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  globalAlpha: number;
  save(): void;
  restore(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  rect(x: number, y: number, w: number, h: number): void;
  clip(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  translate(x: number, y: number): void;
  rotate(a: number): void;
  setLineDash(segments: number[]): void;
}

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Ring drawn at a waypoint: world position plus capture radius (m). */
export interface TargetRing {
  x: number;
  y: number;
  z: number;
  radius: number;
}

export interface RenderOptions {
  width: number;
  height: number;
  targets?: TargetRing[];
  /** World meters mapped across the smaller pane dimension. */
  metersAcross?: number;
}

/** Fixed y-scale of the rate strip charts, rad/s. */
export const PLOT_Y_SCALE = 0.5;

export type BadgeKind = "disconnected" | "stale" | Mode;

const BADGE_COLORS: Record<BadgeKind, string> = {
  disconnected: "#7a3131",
  stale: "#8a6d1f",
  idle: "#3c4654",
  balancing: "#2e6b3f",
  stabilizing: "#2f5a82",
  off: "#5b4a78",
};

/** What the mode badge should say for this frame of the UI. */
export function badgeFor(vs: ViewState, now: number): BadgeKind {
  if (vs.status !== "connected" || vs.latest() === null) return "disconnected";
  if (vs.isStale(now)) return "stale";
  return vs.mode() as Mode;
}

/** Screen regions for a given canvas size; pure so tests can anchor
 * expected plot geometry without re-deriving the layout. */
export function layoutRects(width: number, height: number): {
  badge: Rect;
  topDown: Rect;
  side: Rect;
  omegaPlot: Rect;
  tiltPlot: Rect;
} {
  const p = 10;
  const badgeH = 28;
  const paneW = (width - 3 * p) / 2;
  const contentTop = p + badgeH + p;
  const contentH = height - contentTop - p;
  const paneH = Math.floor(contentH * 0.58);
  const plotTop = contentTop + paneH + p;
  const plotH = height - plotTop - p;
  return {
    badge: { x: p, y: p, w: width - 2 * p, h: badgeH },
    topDown: { x: p, y: contentTop, w: paneW, h: paneH },
    side: { x: 2 * p + paneW, y: contentTop, w: paneW, h: paneH },
    omegaPlot: { x: p, y: plotTop, w: paneW, h: plotH },
    tiltPlot: { x: 2 * p + paneW, y: plotTop, w: paneW, h: plotH },
  };
}

/** Points of a right-aligned scrolling polyline: the newest sample sits at
 * the right edge and each sample occupies one of `slots` columns, so a
 * buffer that covers 30 s always scrolls at the same speed. y maps
 * value/yScale onto the half-height, positive up.
 */
export function polylinePoints(
  values: readonly number[],
  slots: number,
  rect: Rect,
  yScale: number,
): Array<[number, number]> {
  const n = values.length;
  const dx = slots > 1 ? rect.w / (slots - 1) : 0;
  const yc = rect.y + rect.h / 2;
  const pts: Array<[number, number]> = new Array(n);
  for (let i = 0; i < n; i++) {
    pts[i] = [
      rect.x + rect.w - (n - 1 - i) * dx,
      yc - (values[i] / yScale) * (rect.h / 2),
    ];
  }
  return pts;
}

function strokePolyline(ctx: DrawSurface, pts: Array<[number, number]>): void {
  if (pts.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i][0], pts[i][1]);
  ctx.stroke();
}

function paneFrame(ctx: DrawSurface, r: Rect, title: string): void {
  ctx.strokeStyle = "#39414d";
  ctx.lineWidth = 1;
  ctx.strokeRect(r.x, r.y, r.w, r.h);
  ctx.fillStyle = "#9aa7b5";
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(title, r.x + 6, r.y + 14);
}

function centeredNote(ctx: DrawSurface, r: Rect, text: string): void {
  ctx.fillStyle = "#8a94a1";
  ctx.font = "14px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, r.x + r.w / 2, r.y + r.h / 2);
}

function drawPlot(
  ctx: DrawSurface,
  r: Rect,
  title: string,
  series: Array<{ values: number[]; color: string }>,
  slots: number,
): void {
  paneFrame(ctx, r, title);
  const inner: Rect = { x: r.x + 4, y: r.y + 20, w: r.w - 8, h: r.h - 26 };
  ctx.save();
  ctx.beginPath();
  ctx.rect(inner.x, inner.y, inner.w, inner.h);
  ctx.clip();
  ctx.strokeStyle = "#39414d";
  ctx.setLineDash([3, 4]);
  ctx.beginPath();
  ctx.moveTo(inner.x, inner.y + inner.h / 2);
  ctx.lineTo(inner.x + inner.w, inner.y + inner.h / 2);
  ctx.stroke();
  ctx.setLineDash([]);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    strokePolyline(ctx, polylinePoints(s.values, slots, inner, PLOT_Y_SCALE));
  }
  ctx.restore();
  ctx.fillStyle = "#69727e";
  ctx.font = "10px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`+${PLOT_Y_SCALE}`, r.x + 6, inner.y + 10);
  ctx.fillText(`-${PLOT_Y_SCALE}`, r.x + 6, inner.y + inner.h - 2);
}

/** Draw one full UI frame from the current view state.
 *
 * With no telemetry at all this still paints the panes and plots, just
 * empty, with the badge reading "disconnected"; the rest of the page never
 * depends on the link being up.
 */
export function renderFrame(
  ctx: DrawSurface,
  vs: ViewState,
  now: number,
  opts: RenderOptions,
): void {
  const { width, height } = opts;
  const L = layoutRects(width, height);
  const frames = vs.buffer.toArray();
  const latest = vs.latest();
  const badge = badgeFor(vs, now);

  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);

  // Badge bar: mode chip on the left, link detail on the right.
  ctx.fillStyle = BADGE_COLORS[badge];
  ctx.fillRect(L.badge.x, L.badge.y, 130, L.badge.h);
  ctx.fillStyle = "#e8edf2";
  ctx.font = "bold 13px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(badge, L.badge.x + 65, L.badge.y + 18);
  ctx.textAlign = "left";
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillStyle = "#9aa7b5";
  const assist = vs.assist();
  const detail =
    `link ${vs.status}` +
    (assist === null ? "" : `  assist ${assist}`) +
    (latest === null ? "" : `  t=${latest.t.toFixed(2)}s`);
  ctx.fillText(detail, L.badge.x + 142, L.badge.y + 18);

  paneFrame(ctx, L.topDown, "top-down (x up, y right)");
  paneFrame(ctx, L.side, "side (altitude)");

  const targets = opts.targets ?? [];
  const meters = opts.metersAcross ?? 8;

  if (latest === null) {
    centeredNote(ctx, L.topDown, "disconnected");
    centeredNote(ctx, L.side, "disconnected");
  } else {
    drawTopDown(ctx, L.topDown, frames, targets, meters);
    drawSide(ctx, L.side, frames, targets, meters);
    if (badge === "stale") {
      centeredNote(ctx, L.topDown, "telemetry stale");
    }
  }

  drawPlot(
    ctx,
    L.omegaPlot,
    "omega_z (rad/s)",
    [{ values: frames.map((f) => f.omega_z), color: "#6fbf73" }],
    vs.buffer.capacity,
  );
  drawPlot(
    ctx,
    L.tiltPlot,
    "tilt rate (rad/s)",
    [
      { values: frames.map((f) => f.tilt_rate[0]), color: "#5fa8d3" },
      { values: frames.map((f) => f.tilt_rate[1]), color: "#d3975f" },
    ],
    vs.buffer.capacity,
  );
}

type Frames = ReadonlyArray<{
  pos: [number, number, number];
  psi: number;
  tilt: [number, number];
}>;

function drawTopDown(
  ctx: DrawSurface,
  r: Rect,
  frames: Frames,
  targets: TargetRing[],
  meters: number,
): void {
  const s = Math.min(r.w, r.h) / meters;
  const cx = r.x + r.w / 2;
  const cy = r.y + r.h / 2;
  // World x is up the screen, world y is right; z is not in this pane.
  const toScreen = (wx: number, wy: number): [number, number] => [
    cx + wy * s,
    cy - wx * s,
  ];
  ctx.save();
  ctx.beginPath();
  ctx.rect(r.x, r.y, r.w, r.h);
  ctx.clip();

  ctx.strokeStyle = "#262d36";
  ctx.lineWidth = 1;
  for (let m = 1; m <= Math.ceil(meters / 2); m++) {
    ctx.beginPath();
    ctx.arc(cx, cy, m * s, 0, 2 * Math.PI);
    ctx.stroke();
  }

  ctx.strokeStyle = "#b9a23c";
  ctx.setLineDash([5, 4]);
  for (const t of targets) {
    const [px, py] = toScreen(t.x, t.y);
    ctx.beginPath();
    ctx.arc(px, py, t.radius * s, 0, 2 * Math.PI);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  ctx.strokeStyle = "#4d7ea8";
  ctx.lineWidth = 1;
  strokePolyline(
    ctx,
    frames.map((f) => toScreen(f.pos[0], f.pos[1])),
  );

  const last = frames[frames.length - 1];
  const [vx, vy] = toScreen(last.pos[0], last.pos[1]);
  const hl = 18 / s;
  const [hx, hy] = toScreen(
    last.pos[0] + hl * Math.cos(last.psi),
    last.pos[1] + hl * Math.sin(last.psi),
  );
  ctx.strokeStyle = "#e8edf2";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(vx, vy);
  ctx.lineTo(hx, hy);
  ctx.stroke();
  ctx.fillStyle = "#e8edf2";
  ctx.beginPath();
  ctx.arc(vx, vy, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.restore();
}

function drawSide(
  ctx: DrawSurface,
  r: Rect,
  frames: Frames,
  targets: TargetRing[],
  meters: number,
): void {
  const s = Math.min(r.w, r.h) / meters;
  const cx = r.x + r.w / 2;
  const cy = r.y + r.h / 2;
  // World x runs right, +z (down) runs down the screen.
  const toScreen = (wx: number, wz: number): [number, number] => [
    cx + wx * s,
    cy + wz * s,
  ];
  ctx.save();
  ctx.beginPath();
  ctx.rect(r.x, r.y, r.w, r.h);
  ctx.clip();

  // Launch-altitude reference line (z = 0).
  ctx.strokeStyle = "#262d36";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(r.x, cy);
  ctx.lineTo(r.x + r.w, cy);
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.strokeStyle = "#b9a23c";
  ctx.setLineDash([5, 4]);
  for (const t of targets) {
    const [px, py] = toScreen(t.x, t.z);
    ctx.beginPath();
    ctx.arc(px, py, t.radius * s, 0, 2 * Math.PI);
    ctx.stroke();
  }
  ctx.setLineDash([]);

  ctx.strokeStyle = "#4d7ea8";
  ctx.lineWidth = 1;
  strokePolyline(
    ctx,
    frames.map((f) => toScreen(f.pos[0], f.pos[2])),
  );

  const last = frames[frames.length - 1];
  const [vx, vy] = toScreen(last.pos[0], last.pos[2]);
  // Gondola strut rotated by tilt_x away from straight down.
  const gx = vx + 16 * Math.sin(last.tilt[0]);
  const gy = vy + 16 * Math.cos(last.tilt[0]);
  ctx.strokeStyle = "#e8edf2";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(vx, vy);
  ctx.lineTo(gx, gy);
  ctx.stroke();
  ctx.fillStyle = "#e8edf2";
  ctx.beginPath();
  ctx.arc(vx, vy, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.restore();
}
