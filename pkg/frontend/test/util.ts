// Shared test helpers: a recording 2D context for canvas-state
// assertions, fixture loading, and a loopback socket for client tests.

import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { Ctx2D } from "../src/render.js";
import { ServerMessage } from "../src/protocol.js";

export interface DrawOp {
  op: string;
  args: unknown[];
  stroke: string;
  fill: string;
  alpha: number;
}

type Paint = string | CanvasGradient | CanvasPattern;

/** Stand-in CanvasRenderingContext2D that records what was drawn. */
export class RecordingContext implements Ctx2D {
  fillStyle: Paint = "";
  strokeStyle: Paint = "";
  lineWidth = 1;
  globalAlpha = 1;
  font = "";
  textAlign: CanvasTextAlign = "left";
  ops: DrawOp[] = [];
  private stack: {
    fillStyle: Paint;
    strokeStyle: Paint;
    lineWidth: number;
    globalAlpha: number;
  }[] = [];

  private push(op: string, ...args: unknown[]): void {
    this.ops.push({
      op,
      args,
      stroke: String(this.strokeStyle),
      fill: String(this.fillStyle),
      alpha: this.globalAlpha,
    });
  }

  save(): void {
    this.stack.push({
      fillStyle: this.fillStyle,
      strokeStyle: this.strokeStyle,
      lineWidth: this.lineWidth,
      globalAlpha: this.globalAlpha,
    });
  }

  restore(): void {
    const s = this.stack.pop();
    if (s) {
      this.fillStyle = s.fillStyle;
      this.strokeStyle = s.strokeStyle;
      this.lineWidth = s.lineWidth;
      this.globalAlpha = s.globalAlpha;
    }
  }

  beginPath(): void {
    this.push("beginPath");
  }

  moveTo(x: number, y: number): void {
    this.push("moveTo", x, y);
  }

  lineTo(x: number, y: number): void {
    this.push("lineTo", x, y);
  }

  arc(x: number, y: number, r: number, a0: number, a1: number): void {
    this.push("arc", x, y, r, a0, a1);
  }

  closePath(): void {
    this.push("closePath");
  }

  fill(): void {
    this.push("fill");
  }

  stroke(): void {
    this.push("stroke");
  }

  fillRect(x: number, y: number, w: number, h: number): void {
    this.push("fillRect", x, y, w, h);
  }

  fillText(text: string, x: number, y: number): void {
    this.push("fillText", text, x, y);
  }

  setLineDash(segments: number[]): void {
    this.push("setLineDash", segments);
  }

  strokes(color?: string): DrawOp[] {
    return this.ops.filter(
      (o) => o.op === "stroke" && (color === undefined || o.stroke === color),
    );
  }

  /** Count arc ops that were later stroked in the given color. */
  strokedArcs(color: string): number {
    let arcsSinceBegin = 0;
    let total = 0;
    for (const o of this.ops) {
      if (o.op === "beginPath") arcsSinceBegin = 0;
      else if (o.op === "arc") arcsSinceBegin += 1;
      else if (o.op === "stroke" && o.stroke === color) {
        total += arcsSinceBegin;
        arcsSinceBegin = 0;
      }
    }
    return total;
  }

  texts(): string[] {
    return this.ops.filter((o) => o.op === "fillText").map((o) => String(o.args[0]));
  }
}

export interface Fixture {
  name: string;
  protocol: string;
  scenario: string;
  config: Record<string, unknown>;
  messages: ServerMessage[];
  inputs: Record<string, unknown>[];
}

export function loadFixture(name: string): Fixture {
  // vitest runs with the package as cwd; import.meta.url is virtual here
  const path = resolve(process.cwd(), "test", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8")) as Fixture;
}

/** Minimal socket double: captures sends, lets tests inject replies. */
export class FakeSocket {
  static instances: FakeSocket[] = [];
  readyState = 0;
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  url: string;
  protocols?: string | string[];

  constructor(url: string, protocols?: string | string[]) {
    this.url = url;
    this.protocols = protocols;
    FakeSocket.instances.push(this);
  }

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }

  // test-side controls
  acceptConnection(): void {
    this.readyState = 1;
    this.onopen?.();
  }

  receive(msg: object): void {
    this.onmessage?.({ data: JSON.stringify(msg) });
  }

  sentJson(): Record<string, unknown>[] {
    return this.sent.map((s) => JSON.parse(s) as Record<string, unknown>);
  }
}
