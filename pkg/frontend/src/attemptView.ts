import { diffChips, formatTimestamp, formatValue, highlightCode, statusBadge } from "./format";
import type { Attempt } from "./types";

export interface AttemptActions {
  onApprove: (attemptId: string) => void;
  onReject: (attemptId: string) => void;
  onDebug: (attemptId: string) => void;
}

export interface AttemptRenderOptions {
  /** Disables action buttons while a mutation is in flight. */
  busy: boolean;
  /** History detail panes render without action buttons. */
  interactive: boolean;
}

/**
 * Renders one attempt: query, generated code, result envelope, diff chips,
 * status badge and diagnostics. Strictly a projection of the service's
 * attempt document; every number shown comes from the response.
 */
export class AttemptView {
  constructor(
    private readonly container: HTMLElement,
    private readonly actions: AttemptActions,
  ) {}

  render(attempt: Attempt | null, opts: AttemptRenderOptions): void {
    this.container.textContent = "";
    if (attempt === null) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No attempt selected.";
      this.container.appendChild(empty);
      return;
    }
    const card = document.createElement("div");
    card.className = `attempt-card attempt-${attempt.status}`;
    card.dataset.attemptId = attempt.attempt_id;

    card.appendChild(this.header(attempt));
    card.appendChild(this.queryLine(attempt));
    if (attempt.code !== "") {
      card.appendChild(this.codeBlock(attempt));
    }
    if (attempt.envelope !== null) {
      card.appendChild(this.envelopeBlock(attempt));
    }
    if (attempt.diff !== null) {
      card.appendChild(this.diffBlock(attempt));
    }
    if (attempt.diagnostics !== null) {
      card.appendChild(this.diagnosticsBlock(attempt));
    }
    if (opts.interactive) {
      const actionRow = this.actionRow(attempt, opts.busy);
      if (actionRow !== null) {
        card.appendChild(actionRow);
      }
    }
    this.container.appendChild(card);
  }

  private header(attempt: Attempt): HTMLElement {
    const head = document.createElement("div");
    head.className = "attempt-head";

    const id = document.createElement("span");
    id.className = "attempt-id";
    id.textContent = attempt.attempt_id;
    head.appendChild(id);

    const badge = statusBadge(attempt.status);
    const status = document.createElement("span");
    status.className = badge.cssClass;
    status.textContent = badge.label;
    head.appendChild(status);

    const meta = document.createElement("span");
    meta.className = "attempt-meta";
    let metaText = `${attempt.backend} / ${attempt.model}`;
    if (attempt.debug_round > 0) {
      metaText += ` / debug round ${attempt.debug_round} of ${attempt.parent}`;
    }
    meta.textContent = metaText;
    head.appendChild(meta);

    const when = document.createElement("span");
    when.className = "attempt-when";
    when.textContent = formatTimestamp(attempt.created);
    head.appendChild(when);

    return head;
  }

  private queryLine(attempt: Attempt): HTMLElement {
    const query = document.createElement("p");
    query.className = "attempt-query";
    query.textContent = attempt.query;
    return query;
  }

  private codeBlock(attempt: Attempt): HTMLElement {
    const pre = document.createElement("pre");
    pre.className = "code-block";
    const code = document.createElement("code");
    code.innerHTML = highlightCode(attempt.code, attempt.backend);
    pre.appendChild(code);
    return pre;
  }

  private envelopeBlock(attempt: Attempt): HTMLElement {
    const envelope = attempt.envelope!;
    const block = document.createElement("div");
    block.className = "envelope-block";
    const kind = document.createElement("span");
    kind.className = "envelope-kind";
    kind.textContent = envelope.kind;
    block.appendChild(kind);
    const value = document.createElement("pre");
    value.className = "envelope-value";
    value.textContent = formatValue(envelope.value);
    block.appendChild(value);
    return block;
  }

  private diffBlock(attempt: Attempt): HTMLElement {
    const diff = attempt.diff!;
    const block = document.createElement("div");
    block.className = "diff-block";
    const chips = diffChips(diff);
    if (chips.length === 0) {
      const none = document.createElement("span");
      none.className = "chip chip-none";
      none.textContent = "no graph changes";
      block.appendChild(none);
      return block;
    }
    for (const chip of chips) {
      const el = document.createElement("span");
      el.className = `chip chip-${chip.kind}`;
      el.textContent = chip.label;
      block.appendChild(el);
    }
    if (diff.truncated) {
      const note = document.createElement("span");
      note.className = "chip chip-note";
      note.textContent = "item list truncated";
      block.appendChild(note);
    }
    return block;
  }

  private diagnosticsBlock(attempt: Attempt): HTMLElement {
    const diag = attempt.diagnostics!;
    const block = document.createElement("div");
    block.className = "diagnostics-block";
    const badge = document.createElement("span");
    badge.className = "badge badge-error-class";
    badge.textContent = diag.error_class;
    block.appendChild(badge);
    if (diag.budget_exhausted === true) {
      const tag = document.createElement("span");
      tag.className = "badge badge-budget";
      tag.textContent = "debug budget exhausted";
      block.appendChild(tag);
    }
    const message = document.createElement("pre");
    message.className = "diagnostics-message";
    message.textContent = diag.message;
    block.appendChild(message);
    return block;
  }

  private actionRow(attempt: Attempt, busy: boolean): HTMLElement | null {
    const row = document.createElement("div");
    row.className = "attempt-actions";
    if (attempt.status === "pending") {
      const approve = document.createElement("button");
      approve.className = "btn btn-approve";
      approve.textContent = "Approve";
      approve.disabled = busy;
      approve.addEventListener("click", () => this.actions.onApprove(attempt.attempt_id));
      const reject = document.createElement("button");
      reject.className = "btn btn-reject";
      reject.textContent = "Reject";
      reject.disabled = busy;
      reject.addEventListener("click", () => this.actions.onReject(attempt.attempt_id));
      row.append(approve, reject);
      return row;
    }
    if (attempt.status === "failed" && attempt.backend !== "direct_answer") {
      const again = document.createElement("button");
      again.className = "btn btn-debug";
      again.textContent = "Retry with self-debug";
      again.disabled = busy || attempt.diagnostics?.budget_exhausted === true;
      again.addEventListener("click", () => this.actions.onDebug(attempt.attempt_id));
      row.appendChild(again);
      return row;
    }
    return null;
  }
}
