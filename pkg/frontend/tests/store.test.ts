import { describe, expect, it } from "vitest";
import { ApiError, type ServiceClient } from "../src/api";
import { SessionStore } from "../src/store";
import type { Attempt, GraphDoc } from "../src/types";

const GRAPH: GraphDoc = { directed: true, nodes: { h1: {} }, edges: [] };

function attempt(overrides: Partial<Attempt>): Attempt {
  return {
    attempt_id: "a1",
    query: "q",
    backend: "graph_api",
    model: "sim-alpha",
    debug_round: 0,
    parent: null,
    code: "result = 1",
    envelope: { kind: "scalar", value: 1, graph_after: GRAPH },
    diff: {
      added_nodes: 0,
      removed_nodes: 0,
      changed_nodes: 0,
      added_edges: 0,
      removed_edges: 0,
      changed_edges: 0,
      items: [],
      truncated: false,
    },
    status: "pending",
    diagnostics: null,
    created: 0,
    ...overrides,
  };
}

interface StubCalls {
  [method: string]: unknown[][];
}

/** Client whose methods resolve or reject from a per-method script. */
function stubClient(script: Record<string, Array<unknown | Error>>): {
  client: ServiceClient;
  calls: StubCalls;
} {
  const calls: StubCalls = {};
  const consume = (method: string, args: unknown[]) => {
    (calls[method] ??= []).push(args);
    const queue = script[method];
    if (queue === undefined || queue.length === 0) {
      return Promise.reject(new Error(`unscripted call: ${method}`));
    }
    const next = queue.shift();
    return next instanceof Error ? Promise.reject(next) : Promise.resolve(next);
  };
  const client = new Proxy(
    {},
    { get: (_t, method: string) => (...args: unknown[]) => consume(method, args) },
  ) as ServiceClient;
  return { client, calls };
}

async function sessionStore(script: Record<string, Array<unknown | Error>>) {
  const { client, calls } = stubClient({
    createSession: [{ session_id: "s1" }],
    fetchGraph: [GRAPH],
    ...script,
  });
  const store = new SessionStore(client);
  await store.startSession({ application: "traffic", generator: { generator: "traffic" } });
  return { store, calls };
}

describe("SessionStore", () => {
  it("records a pending attempt after submit", async () => {
    const pending = attempt({});
    const { store } = await sessionStore({ submitQuery: [pending] });

    await store.submit("q", "graph_api", "sim-alpha");

    expect(store.current.history).toEqual([pending]);
    expect(store.current.pending).toEqual(pending);
    expect(store.current.busy).toBe(false);
  });

  it("keeps failed attempts out of the pending slot", async () => {
    const failed = attempt({
      status: "failed",
      envelope: null,
      diff: null,
      diagnostics: { error_class: "SyntaxError", message: "bad" },
    });
    const { store } = await sessionStore({ submitQuery: [failed] });

    await store.submit("q", "graph_api", "sim-alpha");

    expect(store.current.pending).toBeNull();
    expect(store.current.history).toHaveLength(1);
  });

  it("allows only one mutation in flight", async () => {
    const pending = attempt({});
    const { store, calls } = await sessionStore({ submitQuery: [pending] });

    const first = store.submit("q", "graph_api", "sim-alpha");
    const second = store.submit("q2", "graph_api", "sim-alpha");
    await Promise.all([first, second]);

    expect(calls.submitQuery).toHaveLength(1);
    expect(store.current.history).toHaveLength(1);
  });

  it("turns network failures into a retryable toast and keeps state", async () => {
    const { store } = await sessionStore({
      submitQuery: [new ApiError(0, "service unreachable: fetch failed")],
    });

    await store.submit("q", "graph_api", "sim-alpha");

    expect(store.current.history).toEqual([]);
    expect(store.current.pending).toBeNull();
    expect(store.current.busy).toBe(false);
    expect(store.current.toast?.message).toContain("unreachable");
    expect(store.current.toast?.retry).not.toBeNull();
  });

  it("retrying the toast replays the failed call", async () => {
    const pending = attempt({});
    const { store } = await sessionStore({
      submitQuery: [new ApiError(0, "service unreachable"), pending],
    });

    await store.submit("q", "graph_api", "sim-alpha");
    const retry = store.current.toast!.retry!;
    store.dismissToast();
    await retry();

    expect(store.current.pending).toEqual(pending);
    expect(store.current.toast).toBeNull();
  });

  it("mirrors the attempt recorded by the service on 502", async () => {
    const recorded = attempt({
      status: "failed",
      envelope: null,
      diff: null,
      diagnostics: { error_class: "OperationError", message: "model backend failed" },
    });
    const { store } = await sessionStore({
      submitQuery: [new ApiError(502, "model backend failed: boom", recorded)],
    });

    await store.submit("q", "graph_api", "sim-alpha");

    expect(store.current.history).toEqual([recorded]);
    expect(store.current.error).toEqual({ code: 502, message: "model backend failed: boom" });
    expect(store.current.busy).toBe(false);
  });

  it("surfaces validation failures inline", async () => {
    const { store } = await sessionStore({
      submitQuery: [new ApiError(422, "query text is empty")],
    });

    await store.submit("", "graph_api", "sim-alpha");

    expect(store.current.error).toEqual({ code: 422, message: "query text is empty" });
    expect(store.current.history).toEqual([]);
  });

  it("approving refreshes graph, version and history from the service", async () => {
    const pending = attempt({});
    const approved = attempt({ status: "approved", envelope: { kind: "scalar", value: 1 } });
    const after: GraphDoc = { directed: true, nodes: { h1: { color: "c1" } }, edges: [] };
    const { store } = await sessionStore({
      submitQuery: [pending],
      decide: [{ status: "approved", graph_version: 1 }],
      // First entry feeds startSession, the second the post-decision refresh.
      fetchGraph: [GRAPH, after],
      fetchHistory: [[approved]],
    });

    await store.submit("q", "graph_api", "sim-alpha");
    await store.decide("a1", "approve");

    expect(store.current.graph).toEqual(after);
    expect(store.current.graphVersion).toBe(1);
    expect(store.current.history).toEqual([approved]);
    expect(store.current.pending).toBeNull();
  });

  it("a conflicting decision surfaces 409 and resyncs", async () => {
    const finalized = attempt({ status: "approved", envelope: { kind: "scalar", value: 1 } });
    const { store, calls } = await sessionStore({
      decide: [new ApiError(409, "attempt a1 is not pending")],
      fetchGraph: [GRAPH, GRAPH],
      fetchHistory: [[finalized]],
    });

    await store.decide("a1", "approve");

    expect(store.current.error?.code).toBe(409);
    expect(store.current.history).toEqual([finalized]);
    expect(store.current.pending).toBeNull();
    expect(calls.fetchHistory).toHaveLength(1);
  });

  it("a debug retry appends the new attempt", async () => {
    const failed = attempt({
      attempt_id: "a1",
      status: "failed",
      envelope: null,
      diff: null,
      diagnostics: { error_class: "ImaginaryFileOrFunction", message: "no such method" },
    });
    const recovered = attempt({ attempt_id: "a2", debug_round: 1, parent: "a1" });
    const { store } = await sessionStore({
      submitQuery: [failed],
      retryDebug: [recovered],
    });

    await store.submit("q", "graph_api", "sim-alpha");
    await store.retryDebug("a1");

    expect(store.current.history.map((a) => a.attempt_id)).toEqual(["a1", "a2"]);
    expect(store.current.pending).toEqual(recovered);
  });

  it("ignores mutations when no session is open", async () => {
    const { client, calls } = stubClient({});
    const store = new SessionStore(client);

    await store.submit("q", "graph_api", "sim-alpha");
    await store.decide("a1", "approve");

    expect(calls.submitQuery).toBeUndefined();
    expect(calls.decide).toBeUndefined();
  });
});
