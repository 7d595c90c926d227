// Renderer geometry and cue drawing, checked against hand-built scenes.

import { describe, expect, it } from "vitest";
import {
  PROTOCOL,
  ScenePatch,
  SessionDescriptor,
  StateMsg,
  TwistDict,
} from "../src/protocol.js";
import { COLORS, fitView, project, renderFrame } from "../src/render.js";
import { ViewStore } from "../src/view.js";
import { RecordingContext } from "./util.js";

const DESC: SessionDescriptor = {
  protocol: PROTOCOL,
  scenario: "bench",
  variant: "classic",
  tick_dt: 0.05,
  seed: 1,
  limits: { min: [-0.5, -0.5, 0], max: [0.5, 0.5, 0.4] },
  objects: [
    {
      id: "b",
      half_extents: [0.03, 0.03, 0.03],
      position: [0.2, 0.1, 0.05],
      orientation: [1, 0, 0, 0],
      graspable: true,
      color_tag: "blue",
      attached: false,
    },
  ],
  zones: [{ id: "z", center: [-0.2, -0.2, 0], radius: 0.1, color_tag: "red" }],
  start_pose: { position: [0, 0, 0.2], orientation: [1, 0, 0, 0], aperture: 0.6 },
};

const ZERO_TWIST: TwistDict = { linear: [0, 0, 0], angular: [0, 0, 0], aperture_rate: 0 };

function stateMsg(over: {
  arrows?: StateMsg["cues"]["arrows"];
  ghost?: StateMsg["cues"]["ghost"];
  scene?: ScenePatch;
}): StateMsg {
  return {
    type: "state",
    record: {
      tick: 1,
      sim_time_s: 0.05,
      gripper: DESC.start_pose,
      twist: ZERO_TWIST,
      mapping_source: { kind: "classic", mode: 1 },
      suggestion_epoch: null,
      suggestion_confidence: null,
      events: [],
      phase: "Approach",
    },
    cues: {
      arrows: over.arrows ?? [],
      dof: { labels: ["x", "y", "z", "roll", "pitch", "yaw", "grip"], levels: [1, 1, 0, 0, 0, 0, 0] },
      ghost: over.ghost ?? null,
      vibro: null,
    },
    scene: over.scene ?? { objects: [] },
  };
}

function storeWith(msg: StateMsg | null): ViewStore {
  const store = new ViewStore();
  store.apply({ type: "SessionCreated", descriptor: DESC }, 0);
  if (msg) store.apply(msg, 50);
  return store;
}

describe("camera projection", () => {
  it("top preset drops height", () => {
    expect(project([0.3, -0.2, 0.4], "top")).toEqual([0.3, -0.2]);
  });

  it("side preset drops depth", () => {
    expect(project([0.3, -0.2, 0.4], "side")).toEqual([0.3, 0.4]);
  });

  it("iso preset mixes axes with height up", () => {
    const [u, v] = project([0.3, -0.2, 0.4], "iso");
    expect(u).toBeCloseTo((0.3 - -0.2) * 0.866, 9);
    expect(v).toBeCloseTo(0.4 * 0.9 + (0.3 + -0.2) * 0.42, 9);
  });

  it("fitView keeps every workspace corner inside the margin", () => {
    const fit = fitView(DESC.limits, "iso", 800, 600);
    expect(fit.scale).toBeGreaterThan(0);
    for (const x of [DESC.limits.min[0], DESC.limits.max[0]])
      for (const y of [DESC.limits.min[1], DESC.limits.max[1]])
        for (const z of [DESC.limits.min[2], DESC.limits.max[2]]) {
          const [u, v] = project([x, y, z], "iso");
          const sx = fit.ox + u * fit.scale;
          const sy = fit.oy - v * fit.scale;
          expect(sx).toBeGreaterThanOrEqual(39);
          expect(sx).toBeLessThanOrEqual(761);
          expect(sy).toBeGreaterThanOrEqual(39);
          expect(sy).toBeLessThanOrEqual(561);
        }
  });
});

describe("renderFrame", () => {
  it("without a session: placeholder text and empty stats", () => {
    const ctx = new RecordingContext();
    const store = new ViewStore();
    const stats = renderFrame(ctx, 800, 600, store);
    expect(ctx.texts()).toContain("no session");
    expect(stats.objects).toBe(0);
    expect(stats.gripperDrawn).toBe(false);
  });

  it("descriptor alone gives the start pose, objects, and zones", () => {
    const ctx = new RecordingContext();
    const stats = renderFrame(ctx, 800, 600, storeWith(null));
    expect(stats.objects).toBe(1);
    expect(stats.zones).toBe(1);
    expect(stats.gripperDrawn).toBe(true);
    expect(stats.currentArrows).toBe(0);
    expect(ctx.strokes(COLORS.gripper).length).toBeGreaterThan(0);
  });

  it("zero twists are not drawn as arrows", () => {
    const arrows: StateMsg["cues"]["arrows"] = [
      { kind: "current", anchor: [0, 0, 0.2], twist: ZERO_TWIST },
      { kind: "current", anchor: [0, 0, 0.2], twist: { linear: [0.15, 0, 0], angular: [0, 0, 0], aperture_rate: 0 } },
      { kind: "current", anchor: [0, 0, 0.2], twist: { linear: [0, 0, 0], angular: [0, 0, 0.6], aperture_rate: 0 } },
      { kind: "current", anchor: [0, 0, 0.2], twist: { linear: [0, 0, 0], angular: [0, 0, 0], aperture_rate: 0.8 } },
    ];
    const ctx = new RecordingContext();
    const stats = renderFrame(ctx, 800, 600, storeWith(stateMsg({ arrows })));
    expect(stats.currentArrows).toBe(3); // motion, rotation, aperture glyphs
    expect(stats.suggestedArrows).toBe(0);
  });

  it("a suggested arrow strokes green and heavier than the current one", () => {
    const arrows: StateMsg["cues"]["arrows"] = [
      { kind: "current", anchor: [0, 0, 0.2], twist: { linear: [0.15, 0, 0], angular: [0, 0, 0], aperture_rate: 0 } },
      { kind: "suggested", anchor: [0, 0, 0.2], twist: { linear: [0, 0.15, 0], angular: [0, 0, 0], aperture_rate: 0 } },
    ];
    const ctx = new RecordingContext();
    const stats = renderFrame(ctx, 800, 600, storeWith(stateMsg({ arrows })));
    expect(stats.currentArrows).toBe(1);
    expect(stats.suggestedArrows).toBe(1);
    expect(ctx.strokes(COLORS.suggested).length).toBeGreaterThan(0);
    expect(ctx.strokes(COLORS.current).length).toBeGreaterThan(0);
  });

  it("ghost trail draws one disc per sample", () => {
    const samples = Array.from({ length: 10 }, (_, i) => ({
      position: [0.02 * i, 0.01 * i, 0.2],
      orientation: [1, 0, 0, 0],
      aperture: 1,
    }));
    const ctx = new RecordingContext();
    const stats = renderFrame(ctx, 800, 600, storeWith(stateMsg({ ghost: { samples } })));
    expect(stats.ghostSamples).toBe(10);
    expect(ctx.strokedArcs(COLORS.ghost)).toBe(10);
  });

  it("objects follow the streamed scene, not the initial layout", () => {
    const still = new RecordingContext();
    renderFrame(still, 800, 600, storeWith(stateMsg({})));

    const moved = new RecordingContext();
    renderFrame(
      moved,
      800,
      600,
      storeWith(
        stateMsg({
          scene: {
            objects: [
              { id: "b", position: [-0.1, -0.1, 0.2], orientation: [1, 0, 0, 0], attached: true },
            ],
          },
        }),
      ),
    );
    expect(moved.ops).not.toEqual(still.ops);
    // the carried object picks up the bright outline
    expect(moved.strokes(COLORS.gripper).length).toBe(still.strokes(COLORS.gripper).length + 1);
  });
});
