// Client-side session state: the latest server tick, event bookkeeping,
// toasts, and the vibro animation clock. Strictly a mirror of what the
// server said; nothing in here integrates motion or predicts mappings.

import {
  CueBundle,
  DoneMsg,
  ErrorMsg,
  RunMetrics,
  ServerMessage,
  SessionDescriptor,
  SessionEvent,
  StateMsg,
  TickRecord,
  VibroCue,
  modeLabel,
} from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";
export type CameraPreset = "top" | "side" | "iso";

export const STALE_AFTER_MS = 1000;
const TOAST_TTL_MS = 4000;
const EVENT_LOG_LIMIT = 200;

export interface Toast {
  text: string;
  kind: "info" | "warn" | "event";
  untilMs: number;
}

export interface ActiveVibro {
  cue: VibroCue;
  startedAtMs: number;
}

/** One line of human-readable copy per server event type. */
export function describeEvent(event: SessionEvent): string {
  switch (event.type) {
    case "MappingAdopted": {
      if (typeof event.mode === "number") {
        return `mode switched to M${event.mode}`;
      }
      const who = event.by === "auto" ? "auto-adopted" : "adopted";
      return `AI mapping #${event.epoch} ${who}`;
    }
    case "SuggestionUpdated": {
      const conf = Number(event.confidence).toFixed(2);
      return `new suggestion #${event.epoch} for ${event.top_candidate_id} (${conf})`;
    }
    case "PerspectiveChanged": {
      const deg = ((event.yaw_offset_rad as number) * 180) / Math.PI;
      return `robot looked around (${deg.toFixed(0)}°)`;
    }
    case "PhaseChanged":
      return `phase ${event.from} → ${event.to}`;
    case "TaskDone":
      return "task complete";
    default:
      return event.type;
  }
}

export class ViewStore {
  connection: Connection = "connecting";
  descriptor: SessionDescriptor | null = null;
  camera: CameraPreset = "iso";

  // latest-state slot: rendering always reads this, old frames are dropped
  latest: StateMsg | null = null;
  lastStateAtMs = NaN;

  metrics: RunMetrics | null = null;
  userSwitches = 0;
  autoSwitches = 0;
  eventLog: SessionEvent[] = [];
  toasts: Toast[] = [];
  vibro: ActiveVibro | null = null;
  lastError: ErrorMsg | null = null;
  estopHeld = false; // local key level, mirrored to the wire by the pump

  get record(): TickRecord | null {
    return this.latest ? this.latest.record : null;
  }

  get cues(): CueBundle | null {
    return this.latest ? this.latest.cues : null;
  }

  apply(msg: ServerMessage, nowMs: number): void {
    switch (msg.type) {
      case "state":
        this.latest = msg;
        this.lastStateAtMs = nowMs;
        if (msg.cues.vibro) {
          this.vibro = { cue: msg.cues.vibro, startedAtMs: nowMs };
        }
        break;
      case "event":
        this.recordEvent(msg.event, nowMs);
        break;
      case "done":
        this.metrics = (msg as DoneMsg).metrics;
        break;
      case "SessionCreated":
        this.descriptor = msg.descriptor;
        this.latest = null;
        this.metrics = null;
        this.userSwitches = 0;
        this.autoSwitches = 0;
        this.eventLog = [];
        this.vibro = null;
        this.lastStateAtMs = NaN;
        break;
      case "error":
        this.lastError = msg;
        this.toast(`${msg.code}: ${msg.detail}`, "warn", nowMs);
        break;
      default:
        break; // hello / scenarios / pong are handled by request waiters
    }
  }

  private recordEvent(event: SessionEvent, nowMs: number): void {
    if (event.type === "MappingAdopted") {
      if (event.by === "auto") this.autoSwitches += 1;
      else this.userSwitches += 1;
    }
    this.eventLog.push(event);
    if (this.eventLog.length > EVENT_LOG_LIMIT) this.eventLog.shift();
    this.toast(describeEvent(event), "event", nowMs);
  }

  toast(text: string, kind: Toast["kind"], nowMs: number): void {
    this.toasts.push({ text, kind, untilMs: nowMs + TOAST_TTL_MS });
  }

  pruneToasts(nowMs: number): void {
    this.toasts = this.toasts.filter((t) => t.untilMs > nowMs);
  }

  /** True once the live feed has gone quiet for longer than a second. */
  stale(nowMs: number): boolean {
    if (this.metrics) return false; // finished sessions stop ticking
    if (this.connection !== "open" || this.latest === null) return false;
    return nowMs - this.lastStateAtMs > STALE_AFTER_MS;
  }

  modeText(): string {
    const rec = this.record;
    return rec ? modeLabel(rec.mapping_source) : "—";
  }

  /** Actuator cells lit right now, per the running vibro pattern. */
  activeCells(nowMs: number): { cell: number; amplitude: number }[] {
    if (!this.vibro) return [];
    const t = nowMs - this.vibro.startedAtMs;
    if (t < 0 || t > this.vibro.cue.total_ms) return [];
    const lit: { cell: number; amplitude: number }[] = [];
    for (const f of this.vibro.cue.frames) {
      if (t >= f.start_ms && t < f.start_ms + f.duration_ms) {
        lit.push({ cell: f.cell, amplitude: f.amplitude });
      }
    }
    return lit;
  }
}
