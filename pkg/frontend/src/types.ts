// JSON shapes exchanged with the session service. These mirror the wire
// format exactly; the console never invents fields of its own.

export interface GraphEdge {
  src: string;
  dst: string;
  attrs: Record<string, unknown>;
}

export interface GraphDoc {
  directed: boolean;
  nodes: Record<string, Record<string, unknown>>;
  edges: GraphEdge[];
}

export interface DiffSummary {
  added_nodes: number;
  removed_nodes: number;
  changed_nodes: number;
  added_edges: number;
  removed_edges: number;
  changed_edges: number;
  items: string[];
  truncated: boolean;
}

export interface Envelope {
  kind: string;
  value: unknown;
  // Present only while the attempt is pending review.
  graph_after?: GraphDoc;
}

export interface Diagnostics {
  error_class: string;
  message: string;
  budget_exhausted?: boolean;
}

export type AttemptStatus = "pending" | "approved" | "rejected" | "failed";

export interface Attempt {
  attempt_id: string;
  query: string;
  backend: string;
  model: string;
  debug_round: number;
  parent: string | null;
  code: string;
  envelope: Envelope | null;
  diff: DiffSummary | null;
  status: AttemptStatus;
  diagnostics: Diagnostics | null;
  created: number;
}

export interface ServiceConfig {
  applications: string[];
  backends: string[];
  models: string[];
}

export interface DecisionResult {
  status: string;
  graph_version: number;
}

export interface SessionRef {
  session_id: string;
}

export type GeneratorSpec = { generator: string } & Record<string, unknown>;

export interface CreateSessionBody {
  application: string;
  graph?: GraphDoc;
  generator?: GeneratorSpec;
}
