import { ServiceClient } from "./api";
import { AttemptView } from "./attemptView";
import { errorCodeBadge } from "./format";
import { GraphView, parseDiffMarks } from "./graphView";
import { HistoryView } from "./historyView";
import { SessionStore, type SessionState } from "./store";
import type { Attempt, CreateSessionBody, GeneratorSpec } from "./types";

interface GeneratorField {
  name: string;
  label: string;
  fallback: number;
}

const GENERATOR_FIELDS: Record<string, GeneratorField[]> = {
  traffic: [
    { name: "nodes", label: "hosts", fallback: 40 },
    { name: "edges", label: "flows", fallback: 120 },
    { name: "seed", label: "seed", fallback: 0 },
  ],
  malt: [
    { name: "chassis", label: "chassis", fallback: 4 },
    { name: "switches_per_chassis", label: "switches per chassis", fallback: 3 },
    { name: "ports_per_switch", label: "ports per switch", fallback: 4 },
    { name: "seed", label: "seed", fallback: 0 },
  ],
};

/** Wires the console together: setup form, query form, graph panes, history. */
export class App {
  readonly store: SessionStore;
  private readonly els: Record<string, HTMLElement> = {};
  private mainGraph!: GraphView;
  private previewGraph!: GraphView;
  private previewAttempt!: AttemptView;
  private detailAttempt!: AttemptView;
  private historyView!: HistoryView;
  private selectedId: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    client: ServiceClient,
  ) {
    this.store = new SessionStore(client);
    this.buildSkeleton();
    this.store.subscribe((state) => this.renderAll(state));
  }

  async start(): Promise<void> {
    await this.store.loadConfig();
  }

  // -- skeleton --

  private el(tag: string, className: string, text = ""): HTMLElement {
    const node = document.createElement(tag);
    if (className !== "") {
      node.className = className;
    }
    if (text !== "") {
      node.textContent = text;
    }
    return node;
  }

  private keep(id: string, node: HTMLElement): HTMLElement {
    this.els[id] = node;
    return node;
  }

  private buildSkeleton(): void {
    this.root.textContent = "";

    const header = this.el("header", "top");
    header.appendChild(this.el("h1", "", "nlnetops console"));
    header.appendChild(this.keep("session-label", this.el("span", "session-label", "no session")));
    this.root.appendChild(header);

    const main = this.el("main", "");
    this.root.appendChild(main);

    main.appendChild(this.buildSetupPanel());

    const columns = this.keep("columns", this.el("div", "columns hidden"));
    main.appendChild(columns);

    const left = this.el("section", "panel");
    left.appendChild(this.el("h2", "", "Query"));
    left.appendChild(this.buildQueryForm());
    left.appendChild(this.keep("query-error", this.el("div", "")));
    left.appendChild(this.el("h2", "", "Awaiting review"));
    const previewAttemptHost = this.keep("preview-attempt", this.el("div", ""));
    left.appendChild(previewAttemptHost);
    columns.appendChild(left);

    const center = this.el("section", "panel");
    center.appendChild(this.el("h2", "", "Network graph"));
    center.appendChild(this.keep("graph-meta", this.el("div", "graph-meta")));
    const mainGraphHost = this.keep("main-graph", this.el("div", ""));
    center.appendChild(mainGraphHost);
    center.appendChild(this.keep("preview-heading", this.el("h2", "", "Proposed result")));
    const previewGraphHost = this.keep("preview-graph", this.el("div", ""));
    center.appendChild(previewGraphHost);
    columns.appendChild(center);

    const right = this.el("section", "panel");
    right.appendChild(this.el("h2", "", "History"));
    const historyHost = this.keep("history", this.el("div", ""));
    right.appendChild(historyHost);
    right.appendChild(this.el("h2", "", "Detail"));
    const detailHost = this.keep("detail", this.el("div", ""));
    right.appendChild(detailHost);
    columns.appendChild(right);

    this.root.appendChild(this.keep("toast", this.el("div", "hidden")));

    this.mainGraph = new GraphView(mainGraphHost);
    this.previewGraph = new GraphView(previewGraphHost);
    const actions = {
      onApprove: (id: string) => void this.store.decide(id, "approve"),
      onReject: (id: string) => void this.store.decide(id, "reject"),
      onDebug: (id: string) => void this.store.retryDebug(id),
    };
    this.previewAttempt = new AttemptView(previewAttemptHost, actions);
    this.detailAttempt = new AttemptView(detailHost, actions);
    this.historyView = new HistoryView(historyHost, (id) => {
      this.selectedId = id;
      this.renderAll(this.store.current);
    });
  }

  private buildSetupPanel(): HTMLElement {
    const panel = this.keep("setup", this.el("section", "panel"));
    panel.appendChild(this.el("h2", "", "Start a session"));

    const appLabel = this.el("label", "", "application");
    const appSelect = document.createElement("select");
    appSelect.id = "application-select";
    this.keep("application-select", appSelect);
    appSelect.addEventListener("change", () => this.renderGeneratorFields());
    panel.append(appLabel, appSelect);

    const modeLabel = this.el("label", "", "graph source");
    const modeSelect = document.createElement("select");
    modeSelect.id = "graph-source";
    for (const [value, label] of [
      ["generate", "generate a synthetic graph"],
      ["paste", "paste interchange JSON"],
    ]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = label;
      modeSelect.appendChild(option);
    }
    this.keep("graph-source", modeSelect);
    modeSelect.addEventListener("change", () => this.renderGeneratorFields());
    panel.append(modeLabel, modeSelect);

    panel.appendChild(this.keep("generator-fields", this.el("div", "field-row")));

    const pasteHost = this.keep("paste-host", this.el("div", "hidden"));
    pasteHost.appendChild(this.el("label", "", "graph JSON"));
    const pasteArea = document.createElement("textarea");
    pasteArea.id = "graph-json";
    this.keep("graph-json", pasteArea);
    pasteHost.appendChild(pasteArea);
    panel.appendChild(pasteHost);

    const startBtn = document.createElement("button");
    startBtn.className = "btn";
    startBtn.id = "start-session";
    startBtn.textContent = "Start session";
    startBtn.addEventListener("click", () => void this.startSession());
    this.keep("start-session", startBtn);
    panel.appendChild(startBtn);

    panel.appendChild(this.keep("setup-error", this.el("div", "")));
    return panel;
  }

  private buildQueryForm(): HTMLElement {
    const form = this.el("div", "");

    form.appendChild(this.el("label", "", "query"));
    const queryText = document.createElement("textarea");
    queryText.id = "query-text";
    queryText.placeholder = "e.g. How many hosts are on the network?";
    this.keep("query-text", queryText);
    form.appendChild(queryText);

    const row = this.el("div", "field-row");
    const backendCol = this.el("div", "");
    backendCol.appendChild(this.el("label", "", "backend"));
    const backendSelect = document.createElement("select");
    backendSelect.id = "backend-select";
    this.keep("backend-select", backendSelect);
    backendCol.appendChild(backendSelect);
    const modelCol = this.el("div", "");
    modelCol.appendChild(this.el("label", "", "model"));
    const modelSelect = document.createElement("select");
    modelSelect.id = "model-select";
    this.keep("model-select", modelSelect);
    modelCol.appendChild(modelSelect);
    row.append(backendCol, modelCol);
    form.appendChild(row);

    const submit = document.createElement("button");
    submit.className = "btn";
    submit.id = "submit-query";
    submit.textContent = "Submit query";
    submit.addEventListener("click", () => void this.submitQuery());
    this.keep("submit-query", submit);
    form.appendChild(submit);

    return form;
  }

  // -- event handlers --

  private async startSession(): Promise<void> {
    const application = (this.els["application-select"] as HTMLSelectElement).value;
    const mode = (this.els["graph-source"] as HTMLSelectElement).value;
    const body: CreateSessionBody = { application };
    if (mode === "paste") {
      const raw = (this.els["graph-json"] as HTMLTextAreaElement).value;
      try {
        body.graph = JSON.parse(raw);
      } catch {
        this.showError("setup-error", 422, "graph JSON does not parse");
        return;
      }
    } else {
      const generator: GeneratorSpec = { generator: application === "malt" ? "malt" : "traffic" };
      for (const field of GENERATOR_FIELDS[generator.generator] ?? []) {
        const input = this.els[`gen-${field.name}`] as HTMLInputElement | undefined;
        const value = input === undefined ? NaN : Number(input.value);
        generator[field.name] = Number.isFinite(value) ? value : field.fallback;
      }
      body.generator = generator;
    }
    await this.store.startSession(body);
  }

  private async submitQuery(): Promise<void> {
    const text = (this.els["query-text"] as HTMLTextAreaElement).value;
    const backend = (this.els["backend-select"] as HTMLSelectElement).value;
    const model = (this.els["model-select"] as HTMLSelectElement).value;
    await this.store.submit(text, backend, model);
  }

  // -- rendering --

  private renderGeneratorFields(): void {
    const application = (this.els["application-select"] as HTMLSelectElement).value;
    const mode = (this.els["graph-source"] as HTMLSelectElement).value;
    const host = this.els["generator-fields"];
    const paste = this.els["paste-host"];
    host.textContent = "";
    if (mode === "paste") {
      host.classList.add("hidden");
      paste.classList.remove("hidden");
      return;
    }
    host.classList.remove("hidden");
    paste.classList.add("hidden");
    const kind = application === "malt" ? "malt" : "traffic";
    for (const field of GENERATOR_FIELDS[kind]) {
      const col = this.el("div", "");
      col.appendChild(this.el("label", "", field.label));
      const input = document.createElement("input");
      input.type = "number";
      input.value = String(field.fallback);
      input.id = `gen-${field.name}`;
      this.keep(`gen-${field.name}`, input);
      col.appendChild(input);
      host.appendChild(col);
    }
  }

  private fillSelect(id: string, values: string[]): void {
    const select = this.els[id] as HTMLSelectElement;
    const previous = select.value;
    select.textContent = "";
    for (const value of values) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      select.appendChild(option);
    }
    if (values.includes(previous)) {
      select.value = previous;
    }
  }

  private showError(hostId: string, code: number, message: string): void {
    const host = this.els[hostId];
    host.textContent = "";
    const badge = errorCodeBadge(code);
    const strip = this.el("div", badge.cssClass);
    const label = this.el("span", "err-code", badge.label);
    strip.appendChild(label);
    strip.appendChild(document.createTextNode(message));
    host.appendChild(strip);
  }

  private previewTarget(state: SessionState): Attempt | null {
    if (state.pending !== null) {
      return state.pending;
    }
    const last = state.history[state.history.length - 1];
    if (last !== undefined && last.status === "failed") {
      return last;
    }
    return null;
  }

  private renderAll(state: SessionState): void {
    if (state.config !== null && (this.els["application-select"] as HTMLSelectElement).options.length === 0) {
      this.fillSelect("application-select", state.config.applications);
      this.renderGeneratorFields();
    }
    if (state.config !== null) {
      this.fillSelect("backend-select", state.config.backends);
      this.fillSelect("model-select", state.config.models);
    }

    const inSession = state.sessionId !== null;
    this.els["setup"].classList.toggle("hidden", inSession);
    this.els["columns"].classList.toggle("hidden", !inSession);
    this.els["session-label"].textContent = inSession
      ? `session ${state.sessionId} (${state.application ?? "?"}, graph v${state.graphVersion})`
      : "no session";

    const errorHost = inSession ? "query-error" : "setup-error";
    this.els["setup-error"].textContent = "";
    this.els["query-error"].textContent = "";
    if (state.error !== null) {
      this.showError(errorHost, state.error.code, state.error.message);
    }

    const toastHost = this.els["toast"];
    toastHost.textContent = "";
    if (state.toast === null) {
      toastHost.className = "hidden";
    } else {
      toastHost.className = "toast";
      toastHost.appendChild(document.createTextNode(state.toast.message));
      if (state.toast.retry !== null) {
        const retryBtn = document.createElement("button");
        retryBtn.className = "btn";
        retryBtn.textContent = "Retry";
        const retry = state.toast.retry;
        retryBtn.addEventListener("click", () => {
          this.store.dismissToast();
          void retry();
        });
        toastHost.appendChild(retryBtn);
      }
      const dismissBtn = document.createElement("button");
      dismissBtn.className = "btn";
      dismissBtn.textContent = "Dismiss";
      dismissBtn.addEventListener("click", () => this.store.dismissToast());
      toastHost.appendChild(dismissBtn);
    }

    if (!inSession) {
      return;
    }

    if (state.graph !== null) {
      this.els["graph-meta"].textContent =
        `${Object.keys(state.graph.nodes).length} nodes, ${state.graph.edges.length} edges, ` +
        `${state.graph.directed ? "directed" : "undirected"}`;
      this.mainGraph.render(state.graph);
    }

    const target = this.previewTarget(state);
    this.previewAttempt.render(target, { busy: state.busy, interactive: true });
    const previewGraphHost = this.els["preview-graph"];
    const previewHeading = this.els["preview-heading"];
    const after = target?.envelope?.graph_after;
    if (target !== null && after !== undefined && target.diff !== null) {
      previewHeading.classList.remove("hidden");
      previewGraphHost.classList.remove("hidden");
      this.previewGraph.render(after, parseDiffMarks(target.diff.items, after.directed));
    } else {
      previewHeading.classList.add("hidden");
      previewGraphHost.classList.add("hidden");
      previewGraphHost.textContent = "";
    }

    const submit = this.els["submit-query"] as HTMLButtonElement;
    submit.disabled = state.busy || state.pending !== null;
    submit.title = state.pending !== null ? "decide the pending attempt first" : "";

    if (this.selectedId !== null && !state.history.some((a) => a.attempt_id === this.selectedId)) {
      this.selectedId = null;
    }
    this.historyView.render(state.history, this.selectedId);
    const selected = state.history.find((a) => a.attempt_id === this.selectedId) ?? null;
    this.detailAttempt.render(selected, { busy: state.busy, interactive: false });
  }
}

export function mountApp(root: HTMLElement, baseUrl = ""): App {
  return new App(root, new ServiceClient(baseUrl));
}
