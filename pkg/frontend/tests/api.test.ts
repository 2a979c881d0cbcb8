import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiError, ServiceClient } from "../src/api";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ServiceClient", () => {
  it("posts queries to the session endpoint and returns the attempt", async () => {
    const fetchMock = vi.fn(async (..._args: unknown[]) =>
      jsonResponse({ attempt_id: "a1", status: "pending" }),
    );
    vi.stubGlobal("fetch", fetchMock);

    const client = new ServiceClient("http://svc");
    const attempt = await client.submitQuery("s1", "how many hosts?", "graph_api", "sim-alpha");

    expect(attempt.attempt_id).toBe("a1");
    const [url, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("http://svc/api/sessions/s1/query");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({
      text: "how many hosts?",
      backend: "graph_api",
      model: "sim-alpha",
    });
  });

  it("sends decisions and debug retries to the attempt endpoints", async () => {
    const fetchMock = vi.fn(async (..._args: unknown[]) =>
      jsonResponse({ status: "approved", graph_version: 1 }),
    );
    vi.stubGlobal("fetch", fetchMock);

    const client = new ServiceClient();
    await client.decide("s1", "a2", "approve");
    await client.retryDebug("s1", "a2");

    expect(fetchMock.mock.calls[0][0]).toBe("/api/sessions/s1/attempts/a2/decision");
    expect(fetchMock.mock.calls[1][0]).toBe("/api/sessions/s1/attempts/a2/debug");
  });

  it("raises ApiError with the service's detail string", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse({ detail: "an attempt is already pending" }, 409)),
    );

    const client = new ServiceClient();
    const err = await client.fetchGraph("s1").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.detail).toBe("an attempt is already pending");
    expect(err.attempt).toBeNull();
  });

  it("flattens structured validation details", async () => {
    const detail = [{ loc: ["body", "text"], msg: "field required" }];
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse({ detail }, 422)));

    const err = await new ServiceClient().fetchConfig().catch((e) => e);
    expect(err.status).toBe(422);
    expect(err.detail).toContain("field required");
  });

  it("carries the recorded attempt on gateway failures", async () => {
    const body = {
      detail: "model backend failed: connection refused",
      attempt: { attempt_id: "a1", status: "failed" },
    };
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(body, 502)));

    const err = await new ServiceClient().fetchHistory("s1").catch((e) => e);
    expect(err.status).toBe(502);
    expect(err.attempt).toEqual(body.attempt);
  });

  it("maps unreachable services to status 0", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("fetch failed");
      }),
    );

    const err = await new ServiceClient().fetchConfig().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(0);
    expect(err.detail).toContain("unreachable");
  });

  it("keeps the status line when the error body is not JSON", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response("<html>oops</html>", { status: 404, statusText: "Not Found" })),
    );

    const err = await new ServiceClient().fetchConfig().catch((e) => e);
    expect(err.status).toBe(404);
    expect(err.detail).toBe("404 Not Found");
  });
});
