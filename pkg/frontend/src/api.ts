// Typed client for the run service. Every mutation goes through these
// documented endpoints; the console keeps no state of its own.

export interface AgentState {
  inventory: Record<string, number>;
  equipment: Record<string, string>;
  nearby_blocks: string[];
  recently_seen_blocks: string[];
  nearby_entities: string[];
  known_chests: Record<string, unknown>;
  biome: string;
  time_of_day: string;
  health: number;
  hunger: number;
  position: number[];
}

export interface EpisodeSnapshot {
  task: string | null;
  round_number: number;
  final: string | null;
  committed_skill: string | null;
}

export interface StateResponse {
  state: AgentState | null;
  episode: EpisodeSnapshot | null;
  iteration: number;
  completed_tasks: string[];
  failed_tasks: string[];
  pending_verification: boolean;
  paused: boolean;
  running: boolean;
  curriculum_mode: string;
  verifier_mode: string;
}

export interface RunEvent {
  type: string;
  [key: string]: unknown;
}

export interface EventsResponse {
  cursor: number;
  events: RunEvent[];
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function requestJson<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      detail = body.detail ?? detail;
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export function getState(): Promise<StateResponse> {
  return requestJson<StateResponse>("/api/state");
}

export function getEvents(cursor: number): Promise<EventsResponse> {
  return requestJson<EventsResponse>(`/api/events?cursor=${cursor}`);
}

export function postCritique(success: boolean, critique: string): Promise<unknown> {
  return requestJson("/api/critique", {
    method: "POST",
    body: JSON.stringify({ success, critique }),
  });
}

export function postTask(description: string): Promise<unknown> {
  return requestJson("/api/task", {
    method: "POST",
    body: JSON.stringify({ description }),
  });
}

export function postControl(action: "pause" | "resume"): Promise<unknown> {
  return requestJson("/api/control", {
    method: "POST",
    body: JSON.stringify({ action }),
  });
}
