// DOM side of the console: status readouts, DoF lamps, the on-screen
// actuator grid standing in for vibrotactile hardware, toasts, the
// reconnect banner, and the end-of-task overlay.

import { modeLabel } from "./protocol.js";
import { ViewStore } from "./view.js";

const DOF_COUNT = 7;
const FALLBACK_LABELS = ["x", "y", "z", "rx", "ry", "rz", "grip"];

export interface HudRefs {
  status: HTMLElement;
  session: HTMLElement;
  phase: HTMLElement;
  mode: HTMLElement;
  confidence: HTMLElement;
  confidenceFill: HTMLElement;
  switches: HTMLElement;
  clock: HTMLElement;
  camera: HTMLElement;
  estop: HTMLElement;
  lamps: { wrap: HTMLElement; fill: HTMLElement; label: HTMLElement }[];
  vibroGrid: HTMLElement;
  vibroCells: HTMLElement[];
  vibroHeading: HTMLElement;
  toasts: HTMLElement;
  banner: HTMLElement;
  overlay: HTMLElement;
  overlayBody: HTMLElement;
}

function el(doc: Document, tag: string, className: string, parent: Element): HTMLElement {
  const node = doc.createElement(tag) as HTMLElement;
  node.className = className;
  parent.appendChild(node);
  return node;
}

export function buildHud(doc: Document, mount: Element): HudRefs {
  const panel = el(doc, "div", "hud-panel", mount);

  const status = el(doc, "div", "hud-status", panel);
  const session = el(doc, "div", "hud-session", panel);

  const grid = el(doc, "div", "hud-grid", panel);
  const field = (label: string, cls: string) => {
    const box = el(doc, "div", "hud-field", grid);
    el(doc, "div", "hud-label", box).textContent = label;
    return el(doc, "div", `hud-value ${cls}`, box);
  };
  const phase = field("phase", "hud-phase");
  const mode = field("mapping", "hud-mode");
  const switches = field("switches", "hud-switches");
  const clock = field("time", "hud-clock");
  const camera = field("camera", "hud-camera");
  const estop = field("e-stop", "hud-estop");

  const confBox = el(doc, "div", "hud-field hud-conf", panel);
  el(doc, "div", "hud-label", confBox).textContent = "suggestion confidence";
  const confidence = el(doc, "div", "hud-value hud-confidence", confBox);
  const confBar = el(doc, "div", "conf-bar", confBox);
  const confidenceFill = el(doc, "div", "conf-fill", confBar);

  const lampBox = el(doc, "div", "dof-lamps", panel);
  const lamps = [];
  for (let i = 0; i < DOF_COUNT; i++) {
    const wrap = el(doc, "div", "lamp", lampBox);
    const tube = el(doc, "div", "lamp-tube", wrap);
    const fill = el(doc, "div", "lamp-fill", tube);
    const label = el(doc, "div", "lamp-label", wrap);
    label.textContent = FALLBACK_LABELS[i];
    lamps.push({ wrap, fill, label });
  }

  const vibroBox = el(doc, "div", "vibro-box", panel);
  el(doc, "div", "hud-label", vibroBox).textContent = "tactor array";
  const vibroHeading = el(doc, "div", "vibro-heading", vibroBox);
  const vibroGrid = el(doc, "div", "vibro-grid", vibroBox);
  const vibroCells: HTMLElement[] = [];
  for (let i = 0; i < 9; i++) {
    vibroCells.push(el(doc, "div", "vibro-cell", vibroGrid));
  }

  const toasts = el(doc, "div", "toast-stack", mount);
  const banner = el(doc, "div", "reconnect-banner hidden", mount);
  banner.textContent = "connection stale — no fresh state from the robot";
  const overlay = el(doc, "div", "success-overlay hidden", mount);
  const overlayCard = el(doc, "div", "overlay-card", overlay);
  el(doc, "div", "overlay-title", overlayCard).textContent = "Task complete";
  const overlayBody = el(doc, "div", "overlay-body", overlayCard);

  return {
    status,
    session,
    phase,
    mode,
    confidence,
    confidenceFill,
    switches,
    clock,
    camera,
    estop,
    lamps,
    vibroGrid,
    vibroCells,
    vibroHeading,
    toasts,
    banner,
    overlay,
    overlayBody,
  };
}

function setHidden(node: HTMLElement, hidden: boolean): void {
  node.classList.toggle("hidden", hidden);
}

export function updateHud(refs: HudRefs, store: ViewStore, nowMs: number): void {
  store.pruneToasts(nowMs);

  const conn = store.connection;
  refs.status.textContent =
    conn === "open" ? (store.metrics ? "finished" : "live") : conn;
  refs.status.className = `hud-status status-${conn}`;

  const desc = store.descriptor;
  refs.session.textContent = desc
    ? `${desc.scenario} · ${desc.variant} · seed ${desc.seed}`
    : "no session";

  const rec = store.record;
  refs.phase.textContent = rec ? rec.phase : "—";
  refs.mode.textContent = rec ? modeLabel(rec.mapping_source) : "—";
  refs.switches.textContent = `${store.userSwitches} you / ${store.autoSwitches} auto`;
  refs.clock.textContent = rec
    ? `tick ${rec.tick} · ${rec.sim_time_s.toFixed(2)} s`
    : "—";
  refs.camera.textContent = store.camera;

  refs.estop.textContent = store.estopHeld ? "HELD" : "clear";
  refs.estop.classList.toggle("estop-on", store.estopHeld);

  const conf = rec?.suggestion_confidence ?? null;
  refs.confidence.textContent = conf === null ? "—" : conf.toFixed(2);
  refs.confidenceFill.style.width = conf === null ? "0%" : `${Math.round(conf * 100)}%`;

  const dof = store.cues?.dof ?? null;
  refs.lamps.forEach((lamp, i) => {
    const level = dof ? dof.levels[i] : 0;
    lamp.fill.style.height = `${Math.round(level * 100)}%`;
    lamp.wrap.classList.toggle("lit", level > 0.05);
    if (dof && dof.labels[i]) lamp.label.textContent = dof.labels[i];
  });

  const lit = new Map(store.activeCells(nowMs).map((c) => [c.cell, c.amplitude]));
  refs.vibroCells.forEach((cell, i) => {
    const amp = lit.get(i);
    cell.classList.toggle("buzzing", amp !== undefined);
    cell.style.opacity = amp === undefined ? "" : String(0.35 + 0.65 * amp);
  });
  refs.vibroHeading.textContent = store.vibro
    ? `${store.vibro.cue.heading} · z${store.vibro.cue.z_level} · ${store.vibro.cue.mode}`
    : "idle";

  refs.toasts.textContent = "";
  for (const toast of store.toasts.slice(-5)) {
    const node = refs.toasts.ownerDocument.createElement("div");
    node.className = `toast toast-${toast.kind}`;
    node.textContent = toast.text;
    refs.toasts.appendChild(node);
  }

  setHidden(refs.banner, !(store.stale(nowMs) || conn === "closed"));
  if (conn === "closed") {
    refs.banner.textContent = "disconnected — attempting to reconnect";
  } else {
    refs.banner.textContent = "connection stale — no fresh state from the robot";
  }

  const metrics = store.metrics;
  setHidden(refs.overlay, metrics === null);
  if (metrics) {
    refs.overlayBody.textContent =
      `completed in ${metrics.completion_time_s.toFixed(2)} s · ` +
      `${metrics.user_switches} switches by you, ${metrics.auto_switches} auto · ` +
      `path ${metrics.path_length_m.toFixed(2)} m`;
  }
}
