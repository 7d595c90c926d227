// Browser entry point: wires the socket client, keyboard pump, canvas
// renderer and HUD together. All state flows server -> store -> screen;
// key presses flow pump -> socket and never touch the drawing directly.

import { CockpitClient } from "./client.js";
import { KeyboardPump } from "./input.js";
import { buildHud, updateHud } from "./hud.js";
import { renderFrame } from "./render.js";
import { CameraPreset, ViewStore } from "./view.js";

const VARIANTS = [
  "classic",
  "admc_continuous",
  "admc_threshold",
  "admc_request",
  "admc_idle",
];

function serverUrl(): string {
  const override = new URLSearchParams(location.search).get("server");
  if (override) return `ws://${override}/session`;
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/session`;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function boot(): void {
  const canvas = byId<HTMLCanvasElement>("scene");
  const side = byId<HTMLDivElement>("side");
  const form = {
    scenario: byId<HTMLSelectElement>("pick-scenario"),
    variant: byId<HTMLSelectElement>("pick-variant"),
    vibro: byId<HTMLSelectElement>("pick-vibro"),
    seed: byId<HTMLInputElement>("pick-seed"),
    start: byId<HTMLButtonElement>("start-session"),
    note: byId<HTMLDivElement>("form-note"),
  };

  const store = new ViewStore();
  const pump = new KeyboardPump(window.localStorage);
  pump.attach(window);
  const client = new CockpitClient(serverUrl(), store);
  const hud = buildHud(document, side);

  for (const v of VARIANTS) {
    const opt = document.createElement("option");
    opt.value = v;
    opt.textContent = v;
    form.variant.appendChild(opt);
  }
  form.variant.value = "admc_continuous";

  let sessionLive = false;

  async function connect(): Promise<void> {
    try {
      await client.connect();
      const names = await client.listScenarios();
      form.scenario.textContent = "";
      for (const name of names) {
        const opt = document.createElement("option");
        opt.value = name;
        opt.textContent = name;
        form.scenario.appendChild(opt);
      }
      form.note.textContent = "connected";
    } catch (err) {
      form.note.textContent = `connect failed: ${(err as Error).message}`;
    }
  }

  form.start.addEventListener("click", async () => {
    const config: Record<string, unknown> = {
      variant: form.variant.value,
      vibro_mode: form.vibro.value,
    };
    const seed = parseInt(form.seed.value, 10);
    if (Number.isFinite(seed)) config.seed = seed;
    try {
      await client.createSession(form.scenario.value, config, false);
      sessionLive = true;
      form.note.textContent = "session running";
    } catch (err) {
      form.note.textContent = `rejected: ${(err as Error).message}`;
    }
  });

  // camera presets on the number row, outside the control bindings
  const presets: Record<string, CameraPreset> = { "1": "top", "2": "side", "3": "iso" };
  window.addEventListener("keydown", (e) => {
    const preset = presets[e.key];
    if (preset) store.camera = preset;
  });

  // reconnect with session re-create left to the operator
  setInterval(() => {
    if (store.connection === "closed") {
      sessionLive = false;
      void connect();
    }
  }, 2000);

  const ctx = canvas.getContext("2d")!;
  function frame(): void {
    const now = performance.now();
    const dpr = window.devicePixelRatio || 1;
    const w = canvas.clientWidth;
    const h = canvas.clientHeight;
    if (canvas.width !== w * dpr || canvas.height !== h * dpr) {
      canvas.width = w * dpr;
      canvas.height = h * dpr;
    }
    ctx.setTransform(dpr, 0, 0, dpr, 0, 0);

    const sample = pump.sample(now);
    if (sample && sessionLive && client.open && !store.metrics) {
      store.estopHeld = sample.estop;
      client.sendInput(sample);
    }

    renderFrame(ctx, w, h, store);
    updateHud(hud, store, now);
    requestAnimationFrame(frame);
  }

  void connect();
  requestAnimationFrame(frame);
}

boot();
