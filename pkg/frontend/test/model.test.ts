import { describe, expect, it } from "vitest";

import type { RunEvent } from "../src/api.js";
import {
  applyEvents,
  applyState,
  backoffDelayMs,
  emptyViewModel,
  markDisconnected,
  validateTaskDescription,
} from "../src/model.js";

function roundEvent(iteration: number, overrides: Partial<RunEvent> = {}): RunEvent {
  return {
    type: "round",
    iteration,
    task: "Mine 3 wood log",
    program: `fn a${iteration}() { }`,
    feedback: [`I mined ${iteration} oak logs`],
    error: null,
    verdict: { success: false, critique: "keep going" },
    ...overrides,
  };
}

describe("applyEvents", () => {
  it("appends exactly one batch of entries per event", () => {
    const vm = emptyViewModel();
    const events = [roundEvent(1), roundEvent(2), roundEvent(3)];
    const next = applyEvents(vm, events, 3);
    const roundLines = next.log.filter((entry) => entry.kind === "round");
    expect(roundLines).toHaveLength(3);
    expect(next.cursor).toBe(3);
  });

  it("ignores a redelivered batch after a reconnect (monotonic cursor)", () => {
    let vm = emptyViewModel();
    const events = [roundEvent(1)];
    vm = applyEvents(vm, events, 1);
    const size = vm.log.length;
    vm = applyEvents(vm, events, 1); // same cursor: duplicate delivery
    expect(vm.log.length).toBe(size);
    vm = applyEvents(vm, events, 0); // stale cursor
    expect(vm.log.length).toBe(size);
  });

  it("preserves feedback template text exactly", () => {
    const message = "I cannot make an iron chestplate because I need: 7 more iron ingots";
    const vm = applyEvents(emptyViewModel(), [roundEvent(1, { feedback: [message] })], 1);
    expect(vm.log.some((entry) => entry.text === message)).toBe(true);
    expect(vm.latestFeedback).toEqual([message]);
  });

  it("tracks the latest program, feedback and error", () => {
    let vm = emptyViewModel();
    vm = applyEvents(vm, [roundEvent(1)], 1);
    vm = applyEvents(vm, [roundEvent(2, { error: "ExecutionError[static]: nope" })], 2);
    expect(vm.latestProgram).toBe("fn a2() { }");
    expect(vm.latestError).toBe("ExecutionError[static]: nope");
  });

  it("renders episode and skill events", () => {
    const events: RunEvent[] = [
      { type: "episode", task: "Mine 3 wood log", final: "success", committed_skill: "mineWood" },
      { type: "skill_added", name: "mineWood" },
      { type: "proposal", task: "Craft 1 crafting table", proposer: "human" },
    ];
    const vm = applyEvents(emptyViewModel(), events, 3);
    const texts = vm.log.map((entry) => entry.text).join("\n");
    expect(texts).toContain("episode finished: Mine 3 wood log — success (skill mineWood)");
    expect(texts).toContain("skill added: mineWood");
    expect(texts).toContain("task proposed (human): Craft 1 crafting table");
  });

  it("includes the critique line on failed rounds", () => {
    const vm = applyEvents(emptyViewModel(), [roundEvent(1)], 1);
    expect(vm.log.some((entry) => entry.kind === "critique" && entry.text === "keep going"))
      .toBe(true);
  });
});

describe("connection state", () => {
  it("applyState marks the console connected", () => {
    const vm = applyState(emptyViewModel(), {
      state: null,
      episode: null,
      iteration: 0,
      completed_tasks: [],
      failed_tasks: [],
      pending_verification: false,
      paused: false,
      running: true,
      curriculum_mode: "human",
      verifier_mode: "human",
    });
    expect(vm.connected).toBe(true);
    expect(markDisconnected(vm).connected).toBe(false);
  });

  it("backoff doubles and caps at thirty seconds", () => {
    expect(backoffDelayMs(1)).toBe(1000);
    expect(backoffDelayMs(2)).toBe(2000);
    expect(backoffDelayMs(3)).toBe(4000);
    expect(backoffDelayMs(10)).toBe(30000);
  });
});

describe("task form validation", () => {
  it("rejects empty descriptions client-side", () => {
    expect(validateTaskDescription("")).not.toBeNull();
    expect(validateTaskDescription("   ")).not.toBeNull();
    expect(validateTaskDescription("build the frame")).toBeNull();
  });
});
