import type { DiffSummary } from "./types";

// Pure presentation helpers. Everything here projects service data into
// strings and CSS classes; nothing computes graph facts on its own.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface Badge {
  label: string;
  cssClass: string;
}

export function statusBadge(status: string): Badge {
  switch (status) {
    case "pending":
      return { label: "pending review", cssClass: "badge badge-pending" };
    case "approved":
      return { label: "approved", cssClass: "badge badge-approved" };
    case "rejected":
      return { label: "rejected", cssClass: "badge badge-rejected" };
    case "failed":
      return { label: "failed", cssClass: "badge badge-failed" };
    default:
      return { label: status, cssClass: "badge" };
  }
}

/** Map an HTTP status to the distinct label/class the console renders it with. */
export function errorCodeBadge(status: number): Badge {
  switch (status) {
    case 0:
      return { label: "network error", cssClass: "err err-network" };
    case 404:
      return { label: "not found", cssClass: "err err-404" };
    case 409:
      return { label: "conflict", cssClass: "err err-409" };
    case 422:
      return { label: "invalid request", cssClass: "err err-422" };
    case 502:
      return { label: "model backend failure", cssClass: "err err-502" };
    default:
      return { label: `error ${status}`, cssClass: "err" };
  }
}

export interface Chip {
  label: string;
  kind: "added" | "removed" | "changed";
}

/** Chips for the nonzero diff counts, in added/removed/changed order. */
export function diffChips(diff: DiffSummary): Chip[] {
  const chips: Chip[] = [];
  const push = (count: number, kind: Chip["kind"], noun: string, sign: string) => {
    if (count > 0) {
      chips.push({ label: `${sign}${count} ${noun}${count === 1 ? "" : "s"}`, kind });
    }
  };
  push(diff.added_nodes, "added", "node", "+");
  push(diff.removed_nodes, "removed", "node", "-");
  push(diff.changed_nodes, "changed", "node", "~");
  push(diff.added_edges, "added", "edge", "+");
  push(diff.removed_edges, "removed", "edge", "-");
  push(diff.changed_edges, "changed", "edge", "~");
  return chips;
}

export function formatValue(value: unknown): string {
  if (value === null || value === undefined) {
    return "null";
  }
  if (typeof value === "object") {
    return JSON.stringify(value, null, 2);
  }
  return String(value);
}

export function formatTimestamp(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().replace("T", " ").slice(0, 19);
}

const PYTHON_TOKEN =
  /("""[\s\S]*?"""|'''[\s\S]*?'''|"(?:\\.|[^"\\\n])*"|'(?:\\.|[^'\\\n])*'|#[^\n]*|\b(?:False|None|True|and|as|assert|break|class|continue|def|del|elif|else|except|finally|for|from|global|if|import|in|is|lambda|nonlocal|not|or|pass|raise|return|try|while|with|yield)\b|\b\d+(?:\.\d+)?\b)/g;

const SQL_TOKEN =
  /('(?:''|[^'\n])*'|--[^\n]*|\b(?:SELECT|FROM|WHERE|GROUP|BY|ORDER|LIMIT|OFFSET|JOIN|LEFT|RIGHT|INNER|OUTER|ON|AS|COUNT|SUM|AVG|MIN|MAX|INSERT|UPDATE|DELETE|SET|VALUES|CREATE|TABLE|AND|OR|NOT|NULL|DISTINCT|HAVING|UNION|CASE|WHEN|THEN|ELSE|END|IN|IS|LIKE|BETWEEN|EXISTS|WITH)\b|\b\d+(?:\.\d+)?\b)/gi;

function tokenClass(token: string): string {
  const head = token[0];
  if (head === "#" || token.startsWith("--")) {
    return "tok-comment";
  }
  if (head === '"' || head === "'") {
    return "tok-string";
  }
  if (head >= "0" && head <= "9") {
    return "tok-number";
  }
  return "tok-keyword";
}

function highlightWith(code: string, pattern: RegExp): string {
  let html = "";
  let last = 0;
  pattern.lastIndex = 0;
  for (let m = pattern.exec(code); m !== null; m = pattern.exec(code)) {
    html += escapeHtml(code.slice(last, m.index));
    html += `<span class="${tokenClass(m[0])}">${escapeHtml(m[0])}</span>`;
    last = m.index + m[0].length;
  }
  return html + escapeHtml(code.slice(last));
}

/**
 * Returns HTML with keyword/string/comment/number spans. The relational
 * backend generates SQL; everything else that produces code is Python.
 */
export function highlightCode(code: string, backend: string): string {
  if (backend === "relational") {
    return highlightWith(code, SQL_TOKEN);
  }
  return highlightWith(code, PYTHON_TOKEN);
}
