import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, getEvents, getState, postCritique, postTask } from "../src/api.js";

function mockFetch(status: number, body: unknown): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  }));
  vi.stubGlobal("fetch", mock);
  return mock;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("posts critiques with the documented body", async () => {
    const mock = mockFetch(200, { ok: true });
    await postCritique(false, "the doorway is one block too short");
    const [path, init] = mock.mock.calls[0] as [string, RequestInit];
    expect(path).toBe("/api/critique");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({
      success: false,
      critique: "the doorway is one block too short",
    });
  });

  it("posts tasks to /api/task", async () => {
    const mock = mockFetch(200, { ok: true });
    await postTask("build the frame");
    const [path, init] = mock.mock.calls[0] as [string, RequestInit];
    expect(path).toBe("/api/task");
    expect(JSON.parse(init.body as string)).toEqual({ description: "build the frame" });
  });

  it("polls events with the cursor in the query", async () => {
    const mock = mockFetch(200, { cursor: 7, events: [] });
    const response = await getEvents(5);
    expect((mock.mock.calls[0] as [string])[0]).toBe("/api/events?cursor=5");
    expect(response.cursor).toBe(7);
  });

  it("surfaces 409 rejections as ApiError with the detail text", async () => {
    mockFetch(409, { detail: "no verification is pending" });
    await expect(postCritique(true, "")).rejects.toMatchObject({
      status: 409,
      message: "no verification is pending",
    });
  });

  it("getState returns the typed snapshot", async () => {
    mockFetch(200, { state: null, iteration: 4 });
    const state = await getState();
    expect(state.iteration).toBe(4);
  });

  it("wraps non-JSON failures with the status code", async () => {
    const mock = vi.fn(async () => ({
      ok: false,
      status: 502,
      json: async () => {
        throw new Error("not json");
      },
    }));
    vi.stubGlobal("fetch", mock);
    await expect(getState()).rejects.toBeInstanceOf(ApiError);
  });
});
