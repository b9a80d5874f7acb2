// Pure view-model: everything on screen is derived from /api/state and
// /api/events, so a page reload reconstructs the identical view.

import type { RunEvent, StateResponse } from "./api.js";

export interface LogEntry {
  kind: string; // round | episode | proposal | skill | feedback | info
  text: string;
}

export interface ViewModel {
  cursor: number;
  connected: boolean;
  state: StateResponse | null;
  log: LogEntry[];
  latestProgram: string | null;
  latestFeedback: string[];
  latestError: string | null;
}

export function emptyViewModel(): ViewModel {
  return {
    cursor: 0,
    connected: false,
    state: null,
    log: [],
    latestProgram: null,
    latestFeedback: [],
    latestError: null,
  };
}

function entriesFor(event: RunEvent): LogEntry[] {
  switch (event.type) {
    case "proposal":
      return [{ kind: "proposal", text: `task proposed (${event.proposer}): ${event.task}` }];
    case "round": {
      const verdict = event.verdict as { success: boolean; critique: string } | undefined;
      const entries: LogEntry[] = [{
        kind: "round",
        text: `iteration ${event.iteration}: ${event.task} — ` +
          (verdict?.success ? "success" : "not done yet"),
      }];
      for (const line of (event.feedback as string[] | undefined) ?? []) {
        entries.push({ kind: "feedback", text: line });
      }
      if (event.error) {
        entries.push({ kind: "error", text: String(event.error) });
      }
      if (verdict && !verdict.success && verdict.critique) {
        entries.push({ kind: "critique", text: verdict.critique });
      }
      return entries;
    }
    case "episode":
      return [{
        kind: "episode",
        text: `episode finished: ${event.task} — ${event.final}` +
          (event.committed_skill ? ` (skill ${event.committed_skill})` : ""),
      }];
    case "skill_added":
      return [{ kind: "skill", text: `skill added: ${event.name}` }];
    case "curriculum_error":
      return [{ kind: "error", text: `curriculum error: ${event.error}` }];
    default:
      return [];
  }
}

// Applies a polled batch. The cursor is monotonic: a batch that does not
// advance it (reconnects, duplicated delivery) changes nothing.
export function applyEvents(vm: ViewModel, events: RunEvent[], cursor: number): ViewModel {
  if (cursor <= vm.cursor) {
    return vm;
  }
  const log = vm.log.slice();
  let latestProgram = vm.latestProgram;
  let latestFeedback = vm.latestFeedback;
  let latestError = vm.latestError;
  for (const event of events) {
    log.push(...entriesFor(event));
    if (event.type === "round") {
      latestProgram = (event.program as string | null) ?? null;
      latestFeedback = ((event.feedback as string[] | undefined) ?? []).slice();
      latestError = (event.error as string | null) ?? null;
    }
  }
  return { ...vm, cursor, log, latestProgram, latestFeedback, latestError };
}

export function applyState(vm: ViewModel, state: StateResponse): ViewModel {
  return { ...vm, state, connected: true };
}

export function markDisconnected(vm: ViewModel): ViewModel {
  return vm.connected ? { ...vm, connected: false } : vm;
}

export function validateTaskDescription(description: string): string | null {
  if (!description.trim()) {
    return "Task description must not be empty.";
  }
  return null;
}

// Reconnect backoff: 1s, 2s, 4s ... capped at 30s.
export function backoffDelayMs(failures: number): number {
  if (failures <= 0) {
    return 0;
  }
  return Math.min(30_000, 1000 * 2 ** (failures - 1));
}
