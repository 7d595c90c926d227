// ViewStore bookkeeping: staleness, toast lifetimes, counter resets,
// and the copy shown for each server event.

import { describe, expect, it } from "vitest";
import { DoneMsg, SessionEvent, StateMsg } from "../src/protocol.js";
import { ViewStore, describeEvent } from "../src/view.js";
import { loadFixture } from "./util.js";

function firstState(name: string): StateMsg {
  const fx = loadFixture(name);
  return fx.messages.find((m): m is StateMsg => m.type === "state")!;
}

describe("ViewStore", () => {
  it("goes stale one second after the last state frame", () => {
    const store = new ViewStore();
    store.connection = "open";
    expect(store.stale(99_999)).toBe(false); // nothing received yet

    store.apply(firstState("classic_canonical"), 10_000);
    expect(store.stale(10_500)).toBe(false);
    expect(store.stale(10_999)).toBe(false);
    expect(store.stale(11_001)).toBe(true);

    // a fresh frame clears it
    store.apply(firstState("classic_canonical"), 11_050);
    expect(store.stale(11_500)).toBe(false);
  });

  it("a finished session is never reported stale", () => {
    const store = new ViewStore();
    store.connection = "open";
    store.apply(firstState("classic_canonical"), 10_000);
    const done = loadFixture("continuous_canonical").messages.find(
      (m): m is DoneMsg => m.type === "done",
    )!;
    store.apply(done, 10_050);
    expect(store.stale(99_999)).toBe(false);
  });

  it("toasts expire after four seconds", () => {
    const store = new ViewStore();
    store.toast("hello", "info", 1_000);
    store.pruneToasts(4_999);
    expect(store.toasts).toHaveLength(1);
    store.pruneToasts(5_001);
    expect(store.toasts).toHaveLength(0);
  });

  it("a new session wipes counters, log, metrics, and the vibro clock", () => {
    const fx = loadFixture("continuous_canonical");
    const store = new ViewStore();
    for (const msg of fx.messages) store.apply(msg, 10_000);
    expect(store.userSwitches).toBeGreaterThan(0);
    expect(store.metrics).not.toBeNull();
    expect(store.eventLog.length).toBeGreaterThan(0);

    store.apply(fx.messages[0], 20_000); // SessionCreated again
    expect(store.userSwitches).toBe(0);
    expect(store.autoSwitches).toBe(0);
    expect(store.metrics).toBeNull();
    expect(store.eventLog).toHaveLength(0);
    expect(store.latest).toBeNull();
    expect(store.vibro).toBeNull();
  });

  it("keeps the event log bounded", () => {
    const store = new ViewStore();
    for (let i = 0; i < 230; i++) {
      store.apply(
        { type: "event", event: { type: "SuggestionUpdated", epoch: i, top_candidate_id: "b", confidence: 0.5 } },
        1_000 + i,
      );
    }
    expect(store.eventLog.length).toBe(200);
    expect(store.eventLog[0].epoch).toBe(30); // oldest entries dropped
  });

  it("server errors surface as a warning toast", () => {
    const store = new ViewStore();
    store.apply({ type: "error", code: "version", detail: "unsupported protocol" }, 1_000);
    expect(store.lastError?.code).toBe("version");
    expect(store.toasts).toHaveLength(1);
    expect(store.toasts[0].kind).toBe("warn");
    expect(store.toasts[0].text).toContain("version");
  });

  it("writes one line of copy per event type", () => {
    const cases: [SessionEvent, string][] = [
      [{ type: "MappingAdopted", by: "user", mode: 2 }, "mode switched to M2"],
      [
        { type: "MappingAdopted", by: "auto", epoch: 3, top_candidate_id: "block_blue" },
        "AI mapping #3 auto-adopted",
      ],
      [
        { type: "MappingAdopted", by: "user", epoch: 2, top_candidate_id: "block_blue" },
        "AI mapping #2 adopted",
      ],
      [
        { type: "SuggestionUpdated", epoch: 4, top_candidate_id: "block_blue", confidence: 0.875 },
        "new suggestion #4 for block_blue (0.88)",
      ],
      [
        { type: "PerspectiveChanged", attempt: 1, yaw_offset_rad: 0.261799388 },
        "robot looked around (15°)",
      ],
      [{ type: "PhaseChanged", from: "Approach", to: "Grasp" }, "phase Approach → Grasp"],
      [{ type: "TaskDone" }, "task complete"],
    ];
    for (const [event, want] of cases) {
      expect(describeEvent(event)).toBe(want);
    }
  });
});
