// Canvas scene painting: a 2.5D orthographic view of the workspace with
// three camera presets, plus the operator cues (arrows, ghost trail).
// Everything drawn here comes from the latest server message; the
// renderer never extrapolates motion between ticks.

import {
  ArrowCue,
  GhostCue,
  PoseDict,
  SceneObject,
  SceneZone,
  SessionDescriptor,
  TwistDict,
} from "./protocol.js";
import { CameraPreset, ViewStore } from "./view.js";

export const COLORS = {
  background: "#0d1117",
  grid: "#21262d",
  workspace: "#30363d",
  gripper: "#e6edf3",
  ghost: "#8b949e",
  current: "#39d2c0", // cyan: active mapping arrows
  suggested: "#3fb950", // green: exposed suggestion arrow
  estop: "#f85149",
};

const OBJECT_COLORS: Record<string, string> = {
  blue: "#58a6ff",
  red: "#f85149",
  green: "#3fb950",
  yellow: "#d29922",
};

// Subset of CanvasRenderingContext2D the renderer touches; tests drive
// it with a recording fake, the browser passes the real context.
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  textAlign: CanvasTextAlign;
  save(): void;
  restore(): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

/** What one frame actually put on the canvas, for assertions and HUD. */
export interface DrawStats {
  currentArrows: number;
  suggestedArrows: number;
  ghostSamples: number;
  objects: number;
  zones: number;
  gripperDrawn: boolean;
}

export function emptyStats(): DrawStats {
  return {
    currentArrows: 0,
    suggestedArrows: 0,
    ghostSamples: 0,
    objects: 0,
    zones: 0,
    gripperDrawn: false,
  };
}

type Vec3 = [number, number, number];

// world axes: x east, y north, z up
export function project(p: number[], camera: CameraPreset): [number, number] {
  const [x, y, z] = p;
  switch (camera) {
    case "top":
      return [x, y];
    case "side":
      return [x, z];
    case "iso":
      return [(x - y) * 0.866, z * 0.9 + (x + y) * 0.42];
  }
}

interface ViewFit {
  scale: number;
  ox: number;
  oy: number;
}

function toScreen(fit: ViewFit, u: number, v: number): [number, number] {
  return [fit.ox + u * fit.scale, fit.oy - v * fit.scale]; // v points up
}

export function fitView(
  limits: { min: number[]; max: number[] },
  camera: CameraPreset,
  width: number,
  height: number,
): ViewFit {
  const corners: Vec3[] = [];
  for (const x of [limits.min[0], limits.max[0]])
    for (const y of [limits.min[1], limits.max[1]])
      for (const z of [limits.min[2], limits.max[2]]) corners.push([x, y, z]);
  let uMin = Infinity,
    uMax = -Infinity,
    vMin = Infinity,
    vMax = -Infinity;
  for (const c of corners) {
    const [u, v] = project(c, camera);
    uMin = Math.min(uMin, u);
    uMax = Math.max(uMax, u);
    vMin = Math.min(vMin, v);
    vMax = Math.max(vMax, v);
  }
  const margin = 40;
  const scale = Math.min(
    (width - 2 * margin) / Math.max(uMax - uMin, 1e-9),
    (height - 2 * margin) / Math.max(vMax - vMin, 1e-9),
  );
  return {
    scale,
    ox: width / 2 - ((uMin + uMax) / 2) * scale,
    oy: height / 2 + ((vMin + vMax) / 2) * scale,
  };
}

function quatRotate(q: number[], v: Vec3): Vec3 {
  const [w, x, y, z] = q;
  // q * (0,v) * q^-1 expanded
  const uvx = y * v[2] - z * v[1];
  const uvy = z * v[0] - x * v[2];
  const uvz = x * v[1] - y * v[0];
  const uuvx = y * uvz - z * uvy;
  const uuvy = z * uvx - x * uvz;
  const uuvz = x * uvy - y * uvx;
  return [
    v[0] + 2 * (w * uvx + uuvx),
    v[1] + 2 * (w * uvy + uuvy),
    v[2] + 2 * (w * uvz + uuvz),
  ];
}

function quatYaw(q: number[]): number {
  const [w, x, y, z] = q;
  return Math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z));
}

// monotone-chain convex hull of projected points
function hull(points: [number, number][]): [number, number][] {
  const pts = [...points].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  if (pts.length < 3) return pts;
  const cross = (o: number[], a: number[], b: number[]) =>
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  const lower: [number, number][] = [];
  for (const p of pts) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0)
      lower.pop();
    lower.push(p);
  }
  const upper: [number, number][] = [];
  for (let i = pts.length - 1; i >= 0; i--) {
    const p = pts[i];
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0)
      upper.pop();
    upper.push(p);
  }
  return lower.slice(0, -1).concat(upper.slice(0, -1));
}

function tracePolygon(ctx: Ctx2D, fit: ViewFit, camera: CameraPreset, pts: Vec3[]): void {
  ctx.beginPath();
  pts.forEach((p, i) => {
    const [u, v] = project(p, camera);
    const [sx, sy] = toScreen(fit, u, v);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.closePath();
}

function drawGrid(
  ctx: Ctx2D,
  fit: ViewFit,
  camera: CameraPreset,
  limits: { min: number[]; max: number[] },
): void {
  const [x0, y0] = limits.min;
  const [x1, y1] = limits.max;
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  const step = 0.2;
  for (let x = Math.ceil(x0 / step) * step; x <= x1 + 1e-9; x += step) {
    ctx.beginPath();
    const [au, av] = project([x, y0, 0], camera);
    const [bu, bv] = project([x, y1, 0], camera);
    ctx.moveTo(...toScreen(fit, au, av));
    ctx.lineTo(...toScreen(fit, bu, bv));
    ctx.stroke();
  }
  for (let y = Math.ceil(y0 / step) * step; y <= y1 + 1e-9; y += step) {
    ctx.beginPath();
    const [au, av] = project([x0, y, 0], camera);
    const [bu, bv] = project([x1, y, 0], camera);
    ctx.moveTo(...toScreen(fit, au, av));
    ctx.lineTo(...toScreen(fit, bu, bv));
    ctx.stroke();
  }
  // workspace outline at table height
  ctx.strokeStyle = COLORS.workspace;
  tracePolygon(ctx, fit, camera, [
    [x0, y0, 0],
    [x1, y0, 0],
    [x1, y1, 0],
    [x0, y1, 0],
  ]);
  ctx.stroke();
}

function drawZone(ctx: Ctx2D, fit: ViewFit, camera: CameraPreset, zone: SceneZone): void {
  const color = OBJECT_COLORS[zone.color_tag] ?? COLORS.ghost;
  const n = 24;
  const pts: Vec3[] = [];
  for (let i = 0; i < n; i++) {
    const a = (i / n) * 2 * Math.PI;
    pts.push([
      zone.center[0] + zone.radius * Math.cos(a),
      zone.center[1] + zone.radius * Math.sin(a),
      zone.center[2],
    ]);
  }
  ctx.save();
  ctx.globalAlpha = 0.25;
  ctx.fillStyle = color;
  tracePolygon(ctx, fit, camera, pts);
  ctx.fill();
  ctx.restore();
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  tracePolygon(ctx, fit, camera, pts);
  ctx.stroke();
}

function drawObject(
  ctx: Ctx2D,
  fit: ViewFit,
  camera: CameraPreset,
  obj: SceneObject,
  live: { position: number[]; orientation: number[]; attached: boolean } | undefined,
): void {
  const pos = live ? live.position : obj.position;
  const quat = live ? live.orientation : obj.orientation;
  const attached = live ? live.attached : obj.attached;
  const [hx, hy, hz] = obj.half_extents;
  const corners: [number, number][] = [];
  for (const sx of [-1, 1])
    for (const sy of [-1, 1])
      for (const sz of [-1, 1]) {
        const local: Vec3 = [sx * hx, sy * hy, sz * hz];
        const w = quatRotate(quat, local);
        const [u, v] = project([pos[0] + w[0], pos[1] + w[1], pos[2] + w[2]], camera);
        corners.push(toScreen(fit, u, v));
      }
  const outline = hull(corners);
  ctx.beginPath();
  outline.forEach(([sx, sy], i) => (i === 0 ? ctx.moveTo(sx, sy) : ctx.lineTo(sx, sy)));
  ctx.closePath();
  ctx.fillStyle = OBJECT_COLORS[obj.color_tag] ?? "#6e7681";
  ctx.save();
  ctx.globalAlpha = 0.8;
  ctx.fill();
  ctx.restore();
  ctx.strokeStyle = attached ? COLORS.gripper : COLORS.workspace;
  ctx.lineWidth = attached ? 2 : 1;
  ctx.stroke();
}

function drawGripper(ctx: Ctx2D, fit: ViewFit, camera: CameraPreset, pose: PoseDict): void {
  const [u, v] = project(pose.position, camera);
  const [sx, sy] = toScreen(fit, u, v);
  const r = Math.max(5, 0.045 * fit.scale);
  ctx.strokeStyle = COLORS.gripper;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(sx, sy, r, 0, 2 * Math.PI);
  ctx.stroke();
  // heading tick from the yaw of the wrist
  const yaw = quatYaw(pose.orientation);
  const tip = project(
    [
      pose.position[0] + 0.09 * Math.cos(yaw),
      pose.position[1] + 0.09 * Math.sin(yaw),
      pose.position[2],
    ],
    camera,
  );
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  ctx.lineTo(...toScreen(fit, tip[0], tip[1]));
  ctx.stroke();
  // jaw gap tracks aperture
  const gap = r * (0.4 + 0.9 * pose.aperture);
  for (const side of [-1, 1]) {
    ctx.beginPath();
    ctx.moveTo(sx + side * gap, sy - r * 0.8);
    ctx.lineTo(sx + side * gap, sy + r * 0.8);
    ctx.stroke();
  }
}

function drawGhost(
  ctx: Ctx2D,
  fit: ViewFit,
  camera: CameraPreset,
  ghost: GhostCue,
): number {
  ctx.save();
  ctx.strokeStyle = COLORS.ghost;
  ctx.setLineDash([4, 4]);
  ctx.lineWidth = 1;
  ctx.beginPath();
  ghost.samples.forEach((p, i) => {
    const [u, v] = project(p.position, camera);
    const [sx, sy] = toScreen(fit, u, v);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.stroke();
  ctx.setLineDash([]);
  let drawn = 0;
  ghost.samples.forEach((p, i) => {
    const [u, v] = project(p.position, camera);
    const [sx, sy] = toScreen(fit, u, v);
    ctx.globalAlpha = 0.15 + (0.45 * i) / Math.max(1, ghost.samples.length - 1);
    ctx.beginPath();
    ctx.arc(sx, sy, 3, 0, 2 * Math.PI);
    ctx.stroke();
    drawn += 1;
  });
  ctx.restore();
  return drawn;
}

function twistNorms(t: TwistDict): { lin: number; ang: number; grip: number } {
  return {
    lin: Math.hypot(t.linear[0], t.linear[1], t.linear[2]),
    ang: Math.hypot(t.angular[0], t.angular[1], t.angular[2]),
    grip: Math.abs(t.aperture_rate),
  };
}

function drawArrow(ctx: Ctx2D, fit: ViewFit, camera: CameraPreset, cue: ArrowCue): boolean {
  const color = cue.kind === "suggested" ? COLORS.suggested : COLORS.current;
  ctx.strokeStyle = color;
  ctx.lineWidth = cue.kind === "suggested" ? 3 : 2;
  const { lin, ang, grip } = twistNorms(cue.twist);
  const [au, av] = project(cue.anchor, camera);
  const [ax, ay] = toScreen(fit, au, av);

  if (lin > 0.05) {
    // motion arrow: 0.4 s worth of travel, foreshortened by the camera
    const k = 0.4;
    const tipWorld = [
      cue.anchor[0] + cue.twist.linear[0] * k,
      cue.anchor[1] + cue.twist.linear[1] * k,
      cue.anchor[2] + cue.twist.linear[2] * k,
    ];
    const [tu, tv] = project(tipWorld, camera);
    const [tx, ty] = toScreen(fit, tu, tv);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(tx, ty);
    ctx.stroke();
    const angle = Math.atan2(ty - ay, tx - ax);
    const head = 8;
    ctx.beginPath();
    ctx.moveTo(tx, ty);
    ctx.lineTo(tx - head * Math.cos(angle - 0.5), ty - head * Math.sin(angle - 0.5));
    ctx.moveTo(tx, ty);
    ctx.lineTo(tx - head * Math.cos(angle + 0.5), ty - head * Math.sin(angle + 0.5));
    ctx.stroke();
  } else if (ang > 0.1) {
    // rotation glyph: open arc around the anchor
    const r = Math.max(10, 0.07 * fit.scale);
    ctx.beginPath();
    ctx.arc(ax, ay, r, -2.4, 0.8);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(ax + r * Math.cos(0.8), ay + r * Math.sin(0.8));
    ctx.lineTo(ax + r * Math.cos(0.8) - 6, ay + r * Math.sin(0.8) - 4);
    ctx.stroke();
  } else if (grip > 0.1) {
    // aperture glyph: chevrons opening or closing on the gripper
    const d = Math.max(8, 0.05 * fit.scale);
    const sign = cue.twist.aperture_rate > 0 ? 1 : -1;
    for (const side of [-1, 1]) {
      ctx.beginPath();
      ctx.moveTo(ax + side * d, ay - 6);
      ctx.lineTo(ax + side * (d - sign * 6), ay);
      ctx.lineTo(ax + side * d, ay + 6);
      ctx.stroke();
    }
  } else {
    return false; // zero twist, nothing to point at
  }
  return true;
}

/** Paint one frame from the store's latest slot; returns draw stats. */
export function renderFrame(
  ctx: Ctx2D,
  width: number,
  height: number,
  store: ViewStore,
): DrawStats {
  const stats = emptyStats();
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, width, height);

  const desc: SessionDescriptor | null = store.descriptor;
  if (!desc) {
    ctx.fillStyle = COLORS.ghost;
    ctx.font = "14px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("no session", width / 2, height / 2);
    return stats;
  }

  const camera = store.camera;
  const fit = fitView(desc.limits, camera, width, height);
  drawGrid(ctx, fit, camera, desc.limits);

  for (const zone of desc.zones) {
    drawZone(ctx, fit, camera, zone);
    stats.zones += 1;
  }

  const live = new Map(
    (store.latest?.scene.objects ?? []).map((o) => [o.id, o]),
  );
  for (const obj of desc.objects) {
    drawObject(ctx, fit, camera, obj, live.get(obj.id));
    stats.objects += 1;
  }

  const cues = store.cues;
  if (cues?.ghost) {
    stats.ghostSamples = drawGhost(ctx, fit, camera, cues.ghost);
  }

  const pose = store.record?.gripper ?? desc.start_pose;
  drawGripper(ctx, fit, camera, pose);
  stats.gripperDrawn = true;

  if (cues) {
    for (const arrow of cues.arrows) {
      if (!drawArrow(ctx, fit, camera, arrow)) continue;
      if (arrow.kind === "suggested") stats.suggestedArrows += 1;
      else stats.currentArrows += 1;
    }
  }
  return stats;
}
