// Keyboard capture and the input pump. Held arrow keys become axis
// levels sampled at up to 60 Hz; buttons are edge-triggered so one
// physical press produces exactly one true flag no matter how many
// samples elapse while the key is down.

export type Action =
  | "axis0+"
  | "axis0-"
  | "axis1+"
  | "axis1-"
  | "mode_switch"
  | "accept"
  | "request"
  | "estop"
  | "perspective";

// keys are KeyboardEvent.key, lowercased
export const DEFAULT_BINDINGS: Record<string, Action> = {
  arrowup: "axis0+",
  arrowdown: "axis0-",
  arrowright: "axis1+",
  arrowleft: "axis1-",
  tab: "mode_switch",
  enter: "accept",
  r: "request",
  " ": "estop",
  p: "perspective",
};

const EDGE_ACTIONS: Action[] = ["mode_switch", "accept", "request", "perspective"];
const MIN_SAMPLE_INTERVAL_MS = 1000 / 60;
const STORAGE_KEY = "cockpit.bindings";

export interface PumpFrame {
  axis0: number;
  axis1: number;
  mode_switch: boolean;
  accept: boolean;
  request: boolean;
  estop: boolean;
  perspective: boolean;
}

interface KVStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class KeyboardPump {
  private bindings: Map<string, Action>;
  private held = new Set<string>();
  private edges = new Set<Action>();
  private lastSampleMs = -Infinity;
  private storage: KVStorage | null;

  constructor(storage: KVStorage | null = null) {
    this.storage = storage;
    this.bindings = new Map(Object.entries(DEFAULT_BINDINGS));
    this.loadBindings();
  }

  binding(action: Action): string | null {
    for (const [key, a] of this.bindings) if (a === action) return key;
    return null;
  }

  boundKeys(): string[] {
    return [...this.bindings.keys()];
  }

  /** Rebind an action, keeping one physical key per logical input. */
  rebind(action: Action, key: string): void {
    key = key.toLowerCase();
    const old = this.binding(action);
    if (old !== null) this.bindings.delete(old);
    this.bindings.delete(key); // key gives up whatever it used to do
    this.bindings.set(key, action);
    this.saveBindings();
  }

  keyDown(key: string): void {
    key = key.toLowerCase();
    if (this.held.has(key)) return; // auto-repeat or duplicate press
    this.held.add(key);
    const action = this.bindings.get(key);
    if (action && (EDGE_ACTIONS as string[]).includes(action)) {
      this.edges.add(action);
    }
  }

  keyUp(key: string): void {
    this.held.delete(key.toLowerCase());
  }

  releaseAll(): void {
    this.held.clear();
  }

  /** Wire keyboard events in the browser; no-op outside a window. */
  attach(win: Window): void {
    win.addEventListener("keydown", (e: KeyboardEvent) => {
      const key = e.key.toLowerCase();
      if (!this.bindings.has(key)) return;
      e.preventDefault(); // Tab focus, Space scroll
      if (e.repeat) return;
      this.keyDown(key);
    });
    win.addEventListener("keyup", (e: KeyboardEvent) => {
      this.keyUp(e.key.toLowerCase());
    });
    win.addEventListener("blur", () => this.releaseAll());
  }

  private axis(plus: Action, minus: Action): number {
    let v = 0;
    for (const key of this.held) {
      const action = this.bindings.get(key);
      if (action === plus) v += 1;
      else if (action === minus) v -= 1;
    }
    return Math.max(-1, Math.min(1, v));
  }

  private holding(action: Action): boolean {
    for (const key of this.held) if (this.bindings.get(key) === action) return true;
    return false;
  }

  /**
   * Emit one input frame, or null when called again within the 60 Hz
   * budget. Edge flags accumulated since the last emitted frame drain
   * with it; axis and estop levels reflect keys held right now.
   */
  sample(nowMs: number): PumpFrame | null {
    if (nowMs - this.lastSampleMs < MIN_SAMPLE_INTERVAL_MS) return null;
    this.lastSampleMs = nowMs;
    const frame: PumpFrame = {
      axis0: this.axis("axis0+", "axis0-"),
      axis1: this.axis("axis1+", "axis1-"),
      mode_switch: this.edges.has("mode_switch"),
      accept: this.edges.has("accept"),
      request: this.edges.has("request"),
      estop: this.holding("estop"),
      perspective: this.edges.has("perspective"),
    };
    this.edges.clear();
    return frame;
  }

  private loadBindings(): void {
    if (!this.storage) return;
    try {
      const raw = this.storage.getItem(STORAGE_KEY);
      if (!raw) return;
      const saved = JSON.parse(raw) as Record<string, Action>;
      const actions = new Set(Object.values(DEFAULT_BINDINGS));
      this.bindings = new Map();
      for (const [key, action] of Object.entries(saved)) {
        if (actions.has(action)) this.bindings.set(key.toLowerCase(), action);
      }
      // anything missing falls back to its default key
      for (const [key, action] of Object.entries(DEFAULT_BINDINGS)) {
        if (this.binding(action) === null && !this.bindings.has(key)) {
          this.bindings.set(key, action);
        }
      }
    } catch {
      this.bindings = new Map(Object.entries(DEFAULT_BINDINGS));
    }
  }

  private saveBindings(): void {
    if (!this.storage) return;
    try {
      this.storage.setItem(STORAGE_KEY, JSON.stringify(Object.fromEntries(this.bindings)));
    } catch {
      // private-mode storage failures are not fatal
    }
  }
}
