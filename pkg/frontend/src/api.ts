import type {
  Attempt,
  CreateSessionBody,
  DecisionResult,
  GraphDoc,
  ServiceConfig,
  SessionRef,
} from "./types";

/** Service-reported failure. Status 0 means the request never reached the service. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly attempt: Attempt | null = null,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ServiceClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      throw await readError(response);
    }
    return (await response.json()) as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionRef> {
    return this.request("POST", "/api/sessions", body);
  }

  submitQuery(sessionId: string, text: string, backend: string, model: string): Promise<Attempt> {
    return this.request("POST", `/api/sessions/${sessionId}/query`, { text, backend, model });
  }

  decide(sessionId: string, attemptId: string, decision: "approve" | "reject"): Promise<DecisionResult> {
    return this.request("POST", `/api/sessions/${sessionId}/attempts/${attemptId}/decision`, {
      decision,
    });
  }

  retryDebug(sessionId: string, attemptId: string): Promise<Attempt> {
    return this.request("POST", `/api/sessions/${sessionId}/attempts/${attemptId}/debug`);
  }

  fetchGraph(sessionId: string): Promise<GraphDoc> {
    return this.request("GET", `/api/sessions/${sessionId}/graph`);
  }

  fetchHistory(sessionId: string): Promise<Attempt[]> {
    return this.request("GET", `/api/sessions/${sessionId}/history`);
  }

  fetchConfig(): Promise<ServiceConfig> {
    return this.request("GET", "/api/config");
  }
}

async function readError(response: Response): Promise<ApiError> {
  let detail = `${response.status} ${response.statusText}`.trim();
  let attempt: Attempt | null = null;
  try {
    const payload = (await response.json()) as { detail?: unknown; attempt?: Attempt };
    if (typeof payload.detail === "string") {
      detail = payload.detail;
    } else if (payload.detail !== undefined) {
      // Validation errors arrive as structured lists; flatten for display.
      detail = JSON.stringify(payload.detail);
    }
    attempt = payload.attempt ?? null;
  } catch {
    // non-JSON error body, keep the status line
  }
  return new ApiError(response.status, detail, attempt);
}
