// End-to-end operator flow against a live service process running over the
// recorded completion fixture: submit a mutating query, inspect the preview,
// approve it, and confirm the committed graph is exactly the previewed one.
// A second session rejects a removal and checks the graph stayed untouched.
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ServiceClient } from "../src/api";
import { App } from "../src/app";

// vitest runs with cwd = frontend/, one level below the repository root.
const REPO_ROOT = resolve(process.cwd(), "..");
const SERVICE_FIXTURE = join(REPO_ROOT, "fixtures", "service");

const COLOR_QUERY = "Assign each distinct /16 prefix its own color attribute on its hosts.";
const REMOVE_QUERY = "Remove every link that carried fewer than 2000 packets.";
const MODEL = "sim-alpha";

let child: ChildProcess | null = null;
let stateDir = "";
let base = "";

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const server = createServer();
    server.once("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      const port = address.port;
      server.close(() => resolvePort(port));
    });
  });
}

async function until(check: () => Promise<boolean> | boolean, what: string, ms = 30000): Promise<void> {
  const deadline = Date.now() + ms;
  for (;;) {
    try {
      if (await check()) {
        return;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((r) => setTimeout(r, 100));
  }
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  stateDir = mkdtempSync(join(tmpdir(), "console-live-"));
  child = spawn(
    "python3",
    [
      "-c",
      "import sys; from nlnetops.cli import main; sys.exit(main())",
      "serve",
      "--state-dir",
      stateDir,
      "--replay",
      SERVICE_FIXTURE,
      "--port",
      String(port),
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  const logs: string[] = [];
  child.stdout?.on("data", (d) => logs.push(String(d)));
  child.stderr?.on("data", (d) => logs.push(String(d)));
  try {
    await until(async () => (await fetch(`${base}/api/config`)).ok, "service startup");
  } catch (err) {
    throw new Error(`${String(err)}\nservice logs:\n${logs.join("")}`);
  }
});

afterAll(() => {
  child?.kill("SIGTERM");
  if (stateDir !== "") {
    rmSync(stateDir, { recursive: true, force: true });
  }
});

function freshApp(): App {
  document.body.textContent = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return new App(root, new ServiceClient(base));
}

function setInput(id: string, value: string): void {
  const el = document.getElementById(id) as HTMLInputElement | HTMLTextAreaElement;
  el.value = value;
}

function click(selector: string): void {
  const el = document.querySelector(selector) as HTMLButtonElement | null;
  if (el === null) {
    throw new Error(`nothing matches ${selector}`);
  }
  expect(el.disabled).toBe(false);
  el.click();
}

/** Drives the setup panel: traffic graph matching the recorded sessions. */
async function openSession(app: App): Promise<string> {
  await app.start();
  await until(() => app.store.current.config !== null, "config load");
  setInput("gen-nodes", "10");
  setInput("gen-edges", "20");
  setInput("gen-seed", "42");
  click("#start-session");
  await until(() => app.store.current.sessionId !== null, "session creation");
  return app.store.current.sessionId!;
}

async function submitAndAwaitPreview(app: App, query: string): Promise<void> {
  setInput("query-text", query);
  const backend = document.getElementById("backend-select") as HTMLSelectElement;
  backend.value = "graph_api";
  const model = document.getElementById("model-select") as HTMLSelectElement;
  model.value = MODEL;
  click("#submit-query");
  await until(() => app.store.current.pending !== null, "pending preview");
}

describe("operator flow against the live service", () => {
  it("submit, preview, approve: the committed graph is the previewed one", async () => {
    const app = freshApp();
    const sessionId = await openSession(app);

    await submitAndAwaitPreview(app, COLOR_QUERY);

    // The preview pane must show the approve button and the marked graph.
    expect(document.querySelector(".btn-approve")).not.toBeNull();
    expect(document.querySelectorAll("g.mark-changed").length).toBe(
      app.store.current.pending!.diff!.changed_nodes,
    );
    // Submitting is blocked while the decision is open.
    expect((document.getElementById("submit-query") as HTMLButtonElement).disabled).toBe(true);

    const previewed = structuredClone(app.store.current.pending!.envelope!.graph_after!);

    click(".btn-approve");
    await until(() => app.store.current.graphVersion === 1, "approval to commit");

    const committed = await (await fetch(`${base}/api/sessions/${sessionId}/graph`)).json();
    expect(committed).toEqual(previewed);

    // The finalized attempt keeps its result but drops the graph payload.
    const finalized = app.store.current.history.find((a) => a.status === "approved")!;
    expect(finalized.envelope!.graph_after).toBeUndefined();
    expect(document.querySelector(".session-label")?.textContent).toContain("graph v1");
  }, 60000);

  it("submit, preview, reject: the graph stays untouched", async () => {
    const app = freshApp();
    const sessionId = await openSession(app);

    const before = await (await fetch(`${base}/api/sessions/${sessionId}/graph`)).json();

    await submitAndAwaitPreview(app, REMOVE_QUERY);
    expect(app.store.current.pending!.diff!.removed_edges).toBeGreaterThan(0);

    click(".btn-reject");
    await until(
      () =>
        app.store.current.pending === null &&
        app.store.current.history.some((a) => a.status === "rejected"),
      "rejection",
    );

    const after = await (await fetch(`${base}/api/sessions/${sessionId}/graph`)).json();
    expect(after).toEqual(before);
    expect(app.store.current.graphVersion).toBe(0);
    expect(document.querySelector(".session-label")?.textContent).toContain("graph v0");
  }, 60000);

  it("deciding an already-decided attempt surfaces the conflict", async () => {
    const app = freshApp();
    await openSession(app);
    await submitAndAwaitPreview(app, COLOR_QUERY);

    const attemptId = app.store.current.pending!.attempt_id;
    click(".btn-approve");
    await until(() => app.store.current.graphVersion === 1, "approval");

    await app.store.decide(attemptId, "approve");
    expect(app.store.current.error?.code).toBe(409);
    await until(() => document.querySelector(".err-409") !== null, "conflict strip");
    // The view resynced and still shows a consistent, decided state.
    expect(app.store.current.pending).toBeNull();
    expect(app.store.current.history.filter((a) => a.status === "approved").length).toBe(1);
  }, 60000);
});
