import { ApiError, ServiceClient } from "./api";
import type { Attempt, CreateSessionBody, GraphDoc, ServiceConfig } from "./types";

export interface InlineError {
  code: number;
  message: string;
}

export interface Toast {
  message: string;
  retry: (() => Promise<void>) | null;
}

export interface SessionState {
  config: ServiceConfig | null;
  sessionId: string | null;
  application: string | null;
  graph: GraphDoc | null;
  graphVersion: number;
  history: Attempt[];
  /** Attempt awaiting approve/reject, if any. */
  pending: Attempt | null;
  /** Service-reported failure shown inline near the triggering control. */
  error: InlineError | null;
  /** Transient network failure; the request never reached the service. */
  toast: Toast | null;
  /** True while a mutation is in flight; at most one per session. */
  busy: boolean;
}

type Listener = (state: SessionState) => void;

function initialState(): SessionState {
  return {
    config: null,
    sessionId: null,
    application: null,
    graph: null,
    graphVersion: 0,
    history: [],
    pending: null,
    error: null,
    toast: null,
    busy: false,
  };
}

/**
 * Client-side session state. Every field is copied from service responses;
 * the store never derives graph facts or diff numbers itself.
 */
export class SessionStore {
  private state = initialState();
  private listeners: Listener[] = [];

  constructor(private readonly client: ServiceClient) {}

  get current(): SessionState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private patch(fields: Partial<SessionState>): void {
    this.state = { ...this.state, ...fields };
    this.emit();
  }

  async loadConfig(): Promise<void> {
    try {
      const config = await this.client.fetchConfig();
      this.patch({ config, toast: null });
    } catch (err) {
      this.fail(err, () => this.loadConfig());
    }
  }

  async startSession(body: CreateSessionBody): Promise<void> {
    try {
      const ref = await this.client.createSession(body);
      const graph = await this.client.fetchGraph(ref.session_id);
      this.patch({
        sessionId: ref.session_id,
        application: body.application,
        graph,
        graphVersion: 0,
        history: [],
        pending: null,
        error: null,
        toast: null,
      });
    } catch (err) {
      this.fail(err, () => this.startSession(body));
    }
  }

  async submit(text: string, backend: string, model: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.state.busy) {
      return;
    }
    this.patch({ busy: true, error: null });
    try {
      const attempt = await this.client.submitQuery(sessionId, text, backend, model);
      this.patch({
        busy: false,
        history: [...this.state.history, attempt],
        pending: attempt.status === "pending" ? attempt : null,
        toast: null,
      });
    } catch (err) {
      this.mutationFailed(err, () => this.submit(text, backend, model));
    }
  }

  async decide(attemptId: string, decision: "approve" | "reject"): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.state.busy) {
      return;
    }
    this.patch({ busy: true, error: null });
    try {
      const result = await this.client.decide(sessionId, attemptId, decision);
      const graph = await this.client.fetchGraph(sessionId);
      const history = await this.client.fetchHistory(sessionId);
      this.patch({
        busy: false,
        graph,
        graphVersion: result.graph_version,
        history,
        pending: null,
        toast: null,
      });
    } catch (err) {
      this.mutationFailed(err, () => this.decide(attemptId, decision));
      if (err instanceof ApiError && err.status === 409) {
        // The view may be stale (e.g. the attempt was already decided);
        // pull the authoritative state back in.
        await this.resync();
      }
    }
  }

  async retryDebug(attemptId: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null || this.state.busy) {
      return;
    }
    this.patch({ busy: true, error: null });
    try {
      const attempt = await this.client.retryDebug(sessionId, attemptId);
      this.patch({
        busy: false,
        history: [...this.state.history, attempt],
        pending: attempt.status === "pending" ? attempt : null,
        toast: null,
      });
    } catch (err) {
      this.mutationFailed(err, () => this.retryDebug(attemptId));
    }
  }

  async resync(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null) {
      return;
    }
    try {
      const graph = await this.client.fetchGraph(sessionId);
      const history = await this.client.fetchHistory(sessionId);
      const pending = history.find((a) => a.status === "pending") ?? null;
      this.patch({ graph, history, pending });
    } catch (err) {
      this.fail(err, () => this.resync());
    }
  }

  dismissToast(): void {
    this.patch({ toast: null });
  }

  dismissError(): void {
    this.patch({ error: null });
  }

  /** Failure of a mutating call: record the service's verdict, drop busy. */
  private mutationFailed(err: unknown, retry: () => Promise<void>): void {
    if (err instanceof ApiError && err.status === 502 && err.attempt !== null) {
      // The service records the failed attempt before reporting 502;
      // mirror it into history so the timeline matches the server.
      this.patch({
        busy: false,
        history: [...this.state.history, err.attempt],
        error: { code: err.status, message: err.detail },
      });
      return;
    }
    this.patch({ busy: false });
    this.fail(err, retry);
  }

  private fail(err: unknown, retry: () => Promise<void>): void {
    if (err instanceof ApiError && err.status === 0) {
      // Never reached the service: keep all session state, offer a retry.
      this.patch({ toast: { message: err.detail, retry } });
      return;
    }
    if (err instanceof ApiError) {
      this.patch({ error: { code: err.status, message: err.detail } });
      return;
    }
    throw err;
  }
}
