// WebSocket client for the session service. Owns the handshake and
// request/reply bookkeeping; every server message lands in the
// ViewStore, which is the single source the renderer reads.

import {
  InputMsg,
  PROTOCOL,
  ScenariosMsg,
  ServerMessage,
  SessionConfig,
  SessionCreatedMsg,
  SessionDescriptor,
} from "./protocol.js";
import { PumpFrame } from "./input.js";
import { ViewStore } from "./view.js";

export interface WSLike {
  send(data: string): void;
  close(code?: number): void;
  readyState: number;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type WSCtor = new (url: string, protocols?: string | string[]) => WSLike;

interface Waiter {
  match: (msg: ServerMessage) => boolean;
  rejectOnError: boolean;
  resolve: (msg: ServerMessage) => void;
  reject: (err: Error) => void;
}

const WS_OPEN = 1;
const OUTBOX_TTL_MS = 1000;
const REPLY_TIMEOUT_MS = 5000;

export class CockpitClient {
  private url: string;
  private store: ViewStore;
  private WS: WSCtor;
  private now: () => number;
  private socket: WSLike | null = null;
  private waiters: Waiter[] = [];
  private outbox: { raw: string; atMs: number }[] = [];
  private lastDropWarnMs = -Infinity;

  constructor(
    url: string,
    store: ViewStore,
    opts: { WS?: WSCtor; now?: () => number } = {},
  ) {
    this.url = url;
    this.store = store;
    this.WS = opts.WS ?? (globalThis.WebSocket as unknown as WSCtor);
    this.now = opts.now ?? (() => Date.now());
  }

  /** Open the socket and complete the protocol handshake. */
  connect(): Promise<void> {
    this.store.connection = "connecting";
    const socket = new this.WS(this.url, [PROTOCOL]);
    this.socket = socket;
    const helloDone = this.awaitReply((m) => m.type === "hello", true);
    socket.onopen = () => {
      this.store.connection = "open";
      this.sendJson({ type: "hello", version: PROTOCOL });
      this.flushOutbox();
    };
    socket.onmessage = (ev) => this.handle(String(ev.data));
    socket.onclose = () => {
      this.store.connection = "closed";
      this.failWaiters(new Error("connection closed"));
    };
    socket.onerror = () => {
      // onclose follows; nothing extra to do here
    };
    return helloDone.then(() => undefined);
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  get open(): boolean {
    return this.socket !== null && this.socket.readyState === WS_OPEN;
  }

  /**
   * Process one raw server frame. Exposed so a recorded session can be
   * replayed through the exact dispatch path the live socket uses.
   */
  handle(raw: string, atMs?: number): void {
    let msg: ServerMessage;
    try {
      msg = JSON.parse(raw) as ServerMessage;
    } catch {
      return; // not ours to crash on; the server never sends non-JSON
    }
    this.store.apply(msg, atMs ?? this.now());
    const idx = this.waiters.findIndex(
      (w) => w.match(msg) || (msg.type === "error" && w.rejectOnError),
    );
    if (idx >= 0) {
      const [waiter] = this.waiters.splice(idx, 1);
      if (msg.type === "error") {
        waiter.reject(new Error(`${msg.code}: ${msg.detail}`));
      } else {
        waiter.resolve(msg);
      }
    }
  }

  async createSession(
    scenario: string | object,
    config: SessionConfig = {},
    paused = false,
  ): Promise<SessionDescriptor> {
    const reply = this.awaitReply((m) => m.type === "SessionCreated", true);
    this.sendJson({ type: "create_session", scenario, config, paused });
    return ((await reply) as SessionCreatedMsg).descriptor;
  }

  async listScenarios(): Promise<string[]> {
    const reply = this.awaitReply((m) => m.type === "scenarios", true);
    this.sendJson({ type: "list_scenarios" });
    return ((await reply) as ScenariosMsg).names;
  }

  /** Ship one pump frame; estop rides along as a level every time. */
  sendInput(frame: PumpFrame): void {
    const msg: InputMsg = {
      type: "input",
      axis0: frame.axis0,
      axis1: frame.axis1,
      mode_switch: frame.mode_switch,
      accept: frame.accept,
      request: frame.request,
      estop: frame.estop,
    };
    this.sendJson(msg);
    if (frame.perspective) {
      this.sendJson({ type: "perspective_request" });
    }
  }

  pause(): void {
    this.sendJson({ type: "pause" });
  }

  resume(): void {
    this.sendJson({ type: "resume" });
  }

  step(count = 1): void {
    this.sendJson({ type: "step", count });
  }

  async ping(): Promise<void> {
    const reply = this.awaitReply((m) => m.type === "pong", false);
    this.sendJson({ type: "ping" });
    await reply;
  }

  private awaitReply(
    match: (msg: ServerMessage) => boolean,
    rejectOnError: boolean,
  ): Promise<ServerMessage> {
    return new Promise((resolve, reject) => {
      const waiter: Waiter = { match, rejectOnError, resolve, reject };
      this.waiters.push(waiter);
      setTimeout(() => {
        const idx = this.waiters.indexOf(waiter);
        if (idx >= 0) {
          this.waiters.splice(idx, 1);
          reject(new Error("timed out waiting for server reply"));
        }
      }, REPLY_TIMEOUT_MS);
    });
  }

  private failWaiters(err: Error): void {
    const pending = this.waiters.splice(0);
    for (const w of pending) w.reject(err);
  }

  private sendJson(obj: object): void {
    const raw = JSON.stringify(obj);
    if (this.open) {
      this.socket!.send(raw);
      return;
    }
    // hold up to a second of frames for a quick reconnect, drop the rest
    this.outbox.push({ raw, atMs: this.now() });
    this.pruneOutbox();
  }

  private pruneOutbox(): void {
    const cutoff = this.now() - OUTBOX_TTL_MS;
    const before = this.outbox.length;
    this.outbox = this.outbox.filter((e) => e.atMs >= cutoff);
    const dropped = before - this.outbox.length;
    if (dropped > 0 && this.now() - this.lastDropWarnMs > 1000) {
      this.lastDropWarnMs = this.now();
      this.store.toast(`link down: dropped ${dropped} stale input frame(s)`, "warn", this.now());
    }
  }

  private flushOutbox(): void {
    this.pruneOutbox();
    const queued = this.outbox.splice(0);
    for (const e of queued) this.socket!.send(e.raw);
  }
}
