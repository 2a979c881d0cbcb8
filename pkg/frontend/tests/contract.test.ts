// Renders recorded service responses and checks that every figure shown in
// the DOM comes straight from the payload. The fixtures under tests/fixtures
// were captured from the session service running over its replay fixture.
import { afterEach, describe, expect, it, vi } from "vitest";
import { AttemptView } from "../src/attemptView";
import { GraphView, emptyMarks, parseDiffMarks } from "../src/graphView";
import { HistoryView } from "../src/historyView";
import { mountApp } from "../src/app";
import type { Attempt, GraphDoc } from "../src/types";

import attemptColorPending from "./fixtures/attempt_color_pending.json";
import attemptCountPending from "./fixtures/attempt_count_pending.json";
import attemptDebugRecovered from "./fixtures/attempt_debug_recovered.json";
import attemptTotalFailed from "./fixtures/attempt_total_failed.json";
import config from "./fixtures/config.json";
import error502 from "./fixtures/error_502.json";
import graphV0 from "./fixtures/graph_v0.json";
import historyAfterApprove from "./fixtures/history_after_approve.json";

const colorPending = attemptColorPending as unknown as Attempt;
const countPending = attemptCountPending as unknown as Attempt;
const debugRecovered = attemptDebugRecovered as unknown as Attempt;
const totalFailed = attemptTotalFailed as unknown as Attempt;
const graph0 = graphV0 as unknown as GraphDoc;

function host(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

function view(container: HTMLElement) {
  const noop = () => undefined;
  return new AttemptView(container, { onApprove: noop, onReject: noop, onDebug: noop });
}

afterEach(() => {
  document.body.textContent = "";
  vi.unstubAllGlobals();
});

describe("AttemptView projection", () => {
  it("shows the recorded diff counts as chips for the coloring attempt", () => {
    const container = host();
    view(container).render(colorPending, { busy: false, interactive: true });

    const chips = [...container.querySelectorAll(".chip")].map((c) => c.textContent);
    expect(chips).toContain(`~${colorPending.diff!.changed_nodes} nodes`);
    expect(colorPending.diff!.changed_nodes).toBeGreaterThan(0);
    // Counts the service reported as zero must not appear.
    expect(chips.some((c) => c!.includes("edge"))).toBe(false);
  });

  it("offers approve and reject on a pending attempt", () => {
    const container = host();
    const decisions: string[] = [];
    const attemptView = new AttemptView(container, {
      onApprove: (id) => decisions.push(`approve:${id}`),
      onReject: (id) => decisions.push(`reject:${id}`),
      onDebug: () => undefined,
    });
    attemptView.render(colorPending, { busy: false, interactive: true });

    (container.querySelector(".btn-approve") as HTMLButtonElement).click();
    (container.querySelector(".btn-reject") as HTMLButtonElement).click();
    expect(decisions).toEqual([
      `approve:${colorPending.attempt_id}`,
      `reject:${colorPending.attempt_id}`,
    ]);

    const badge = container.querySelector(".badge-pending");
    expect(badge?.textContent).toBe("pending review");
  });

  it("disables actions while a mutation is in flight", () => {
    const container = host();
    view(container).render(colorPending, { busy: true, interactive: true });
    expect((container.querySelector(".btn-approve") as HTMLButtonElement).disabled).toBe(true);
  });

  it("renders highlighted code from the payload", () => {
    const container = host();
    view(container).render(colorPending, { busy: false, interactive: true });

    const code = container.querySelector(".code-block code")!;
    expect(code.textContent).toBe(colorPending.code);
    expect(code.querySelectorAll(".tok-keyword").length).toBeGreaterThan(0);
  });

  it("shows a read-only no-changes summary for the count attempt", () => {
    const container = host();
    view(container).render(countPending, { busy: false, interactive: false });

    expect(container.querySelector(".chip-none")?.textContent).toBe("no graph changes");
    expect(container.querySelector(".btn-approve")).toBeNull();
    expect(container.querySelector(".envelope-value")?.textContent).toBe(
      String(countPending.envelope!.value),
    );
  });

  it("projects the failure class and offers a debug retry", () => {
    const container = host();
    const retried: string[] = [];
    const attemptView = new AttemptView(container, {
      onApprove: () => undefined,
      onReject: () => undefined,
      onDebug: (id) => retried.push(id),
    });
    attemptView.render(totalFailed, { busy: false, interactive: true });

    expect(container.querySelector(".badge-error-class")?.textContent).toBe(
      totalFailed.diagnostics!.error_class,
    );
    expect(container.querySelector(".diagnostics-message")?.textContent).toBe(
      totalFailed.diagnostics!.message,
    );
    const btn = container.querySelector(".btn-debug") as HTMLButtonElement;
    btn.click();
    expect(retried).toEqual([totalFailed.attempt_id]);
  });

  it("labels a recovered debug attempt with its round and parent", () => {
    const container = host();
    view(container).render(debugRecovered, { busy: false, interactive: true });

    expect(container.querySelector(".attempt-meta")?.textContent).toContain(
      `debug round ${debugRecovered.debug_round} of ${debugRecovered.parent}`,
    );
    expect(container.querySelector(".envelope-value")?.textContent).toBe(
      String(debugRecovered.envelope!.value),
    );
  });
});

describe("GraphView", () => {
  it("lays out the recorded graph as SVG with one element per node and edge", () => {
    const container = host();
    new GraphView(container).render(graph0);

    const svg = container.querySelector("svg.graph-svg")!;
    expect(svg.querySelectorAll("g.graph-node").length).toBe(Object.keys(graph0.nodes).length);
    expect(svg.querySelectorAll("line").length).toBe(graph0.edges.length);
  });

  it("marks exactly the nodes the service reported as changed", () => {
    const container = host();
    const after = colorPending.envelope!.graph_after!;
    const marks = parseDiffMarks(colorPending.diff!.items, after.directed);
    new GraphView(container).render(after, marks);

    const changed = container.querySelectorAll("g.mark-changed");
    expect(changed.length).toBe(colorPending.diff!.changed_nodes);
    // The coloring attempt assigns per-prefix colors; they must reach the SVG.
    const fills = new Set(
      [...container.querySelectorAll("g.graph-node circle")].map((c) => c.getAttribute("fill")),
    );
    expect(fills.size).toBeGreaterThan(1);
  });

  it("falls back to tables past the layout limit", () => {
    const nodes: Record<string, Record<string, unknown>> = {};
    for (let i = 0; i < 600; i++) {
      nodes[`h${i}`] = {};
    }
    const big: GraphDoc = { directed: false, nodes, edges: [] };
    const container = host();
    new GraphView(container).render(big, emptyMarks());

    expect(container.querySelector("svg")).toBeNull();
    expect(container.querySelectorAll(".graph-node-table tbody tr").length).toBe(600);
  });

  it("parses node and edge marks from diff items", () => {
    const marks = parseDiffMarks(
      [
        "+ node h9",
        "~ node h1 attr 'color' only in second",
        "+ edge h1 -> h2",
        "~ edge h2 -> h3 multiplicity 1 -> 2",
        "- node h4",
        "gibberish line",
      ],
      true,
    );
    expect([...marks.addedNodes]).toEqual(["h9"]);
    expect([...marks.changedNodes]).toEqual(["h1"]);
    expect([...marks.addedEdges]).toEqual(["h1\th2"]);
    expect([...marks.changedEdges]).toEqual(["h2\th3"]);
  });
});

describe("HistoryView", () => {
  it("shows an empty state before any query", () => {
    const container = host();
    new HistoryView(container, () => undefined).render([], null);
    expect(container.querySelector(".empty-state")).not.toBeNull();
  });

  it("lists recorded attempts in submission order and reports selection", () => {
    const container = host();
    const picked: string[] = [];
    const history = historyAfterApprove as unknown as Attempt[];
    const historyView = new HistoryView(container, (id) => picked.push(id));
    historyView.render(history, null);

    const entries = [...container.querySelectorAll(".history-entry")];
    expect(entries.length).toBe(history.length);
    expect(entries[0].querySelector(".history-query")?.textContent).toBe(history[0].query);
    (entries[0] as HTMLElement).click();
    expect(picked).toEqual([history[0].attempt_id]);
  });

  it("paginates long histories", () => {
    const container = host();
    const many: Attempt[] = [];
    for (let i = 1; i <= 20; i++) {
      many.push({ ...(historyAfterApprove as unknown as Attempt[])[0], attempt_id: `a${i}`, query: `q${i}` });
    }
    const historyView = new HistoryView(container, () => undefined);
    historyView.render(many, null);

    expect(container.querySelectorAll(".history-entry").length).toBe(8);
    expect(container.querySelector(".pager-label")?.textContent).toContain("page 1 of 3");

    const nextOf = () =>
      [...container.querySelectorAll(".btn-page")].find(
        (b) => b.textContent === "Next",
      ) as HTMLButtonElement;
    nextOf().click();
    expect(container.querySelector(".pager-label")?.textContent).toContain("page 2 of 3");
    expect(container.querySelectorAll(".history-entry").length).toBe(8);
    nextOf().click();
    expect(container.querySelector(".pager-label")?.textContent).toContain("page 3 of 3");
    expect(container.querySelectorAll(".history-entry").length).toBe(4);
    expect(nextOf().disabled).toBe(true);
  });
});

describe("App over a mocked service", () => {
  function mockService(): void {
    const router = async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const method = init?.method ?? "GET";
      const respond = (payload: unknown, status = 200) =>
        new Response(JSON.stringify(payload), {
          status,
          headers: { "content-type": "application/json" },
        });
      if (url.endsWith("/api/config")) {
        return respond(config);
      }
      if (url.endsWith("/api/sessions") && method === "POST") {
        return respond({ session_id: "s1" });
      }
      if (url.endsWith("/api/sessions/s1/graph")) {
        return respond(graphV0);
      }
      if (url.endsWith("/api/sessions/s1/query") && method === "POST") {
        return respond(error502.body, error502.status);
      }
      return respond({ detail: "no such route" }, 404);
    };
    vi.stubGlobal("fetch", vi.fn(router));
  }

  it("populates pickers from config, renders the graph, and surfaces 502 distinctly", async () => {
    mockService();
    const root = host();
    const app = mountApp(root);
    await app.start();

    const backendOptions = [...root.querySelectorAll("#backend-select option")].map(
      (o) => (o as HTMLOptionElement).value,
    );
    const modelOptions = [...root.querySelectorAll("#model-select option")].map(
      (o) => (o as HTMLOptionElement).value,
    );
    expect(backendOptions).toEqual(config.backends);
    expect(modelOptions).toEqual(config.models);

    (root.querySelector("#start-session") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      if (root.querySelector(".columns.hidden") !== null) {
        throw new Error("columns still hidden");
      }
    });

    expect(root.querySelectorAll("g.graph-node").length).toBe(Object.keys(graph0.nodes).length);
    expect(root.querySelector(".session-label")?.textContent).toContain("graph v0");

    (root.querySelector("#query-text") as HTMLTextAreaElement).value = "count the hosts";
    (root.querySelector("#submit-query") as HTMLButtonElement).click();
    await vi.waitFor(() => {
      if (root.querySelector(".err-502") === null) {
        throw new Error("no error strip yet");
      }
    });

    const strip = root.querySelector(".err-502")!;
    expect(strip.textContent).toContain("model backend failure");
    expect(strip.textContent).toContain(error502.body.detail);
    // The failed attempt the service recorded alongside the 502 shows up in history.
    expect(root.querySelectorAll(".history-entry").length).toBe(1);
  });
});
