import { diffChips, statusBadge } from "./format";
import type { Attempt } from "./types";

const PAGE_SIZE = 8;

/**
 * Timeline of a session's attempts in submission order, paginated.
 * Clicking an entry opens it in a read-only detail pane via `onSelect`.
 */
export class HistoryView {
  private page = 0;
  private history: Attempt[] = [];
  private selectedId: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly onSelect: (attemptId: string) => void,
  ) {}

  render(history: Attempt[], selectedId: string | null): void {
    this.history = history;
    this.selectedId = selectedId;
    this.container.textContent = "";
    if (history.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No queries yet. Results of each query appear here.";
      this.container.appendChild(empty);
      return;
    }

    const pages = Math.ceil(history.length / PAGE_SIZE);
    if (this.page >= pages) {
      this.page = pages - 1;
    }
    const start = this.page * PAGE_SIZE;
    const visible = history.slice(start, start + PAGE_SIZE);

    const list = document.createElement("ol");
    list.className = "history-list";
    list.start = start + 1;
    for (const attempt of visible) {
      list.appendChild(this.entry(attempt, attempt.attempt_id === selectedId));
    }
    this.container.appendChild(list);

    if (pages > 1) {
      this.container.appendChild(this.pager(history.length, pages));
    }
  }

  private entry(attempt: Attempt, selected: boolean): HTMLElement {
    const item = document.createElement("li");
    item.className = selected ? "history-entry selected" : "history-entry";
    item.dataset.attemptId = attempt.attempt_id;

    const badge = statusBadge(attempt.status);
    const status = document.createElement("span");
    status.className = badge.cssClass;
    status.textContent = badge.label;

    const query = document.createElement("span");
    query.className = "history-query";
    query.textContent = attempt.query;

    const summary = document.createElement("span");
    summary.className = "history-summary";
    if (attempt.diagnostics !== null) {
      summary.textContent = attempt.diagnostics.error_class;
    } else if (attempt.diff !== null) {
      const chips = diffChips(attempt.diff);
      summary.textContent =
        chips.length === 0 ? "no graph changes" : chips.map((c) => c.label).join(", ");
    }

    item.append(status, query, summary);
    item.addEventListener("click", () => this.onSelect(attempt.attempt_id));
    return item;
  }

  private pager(total: number, pages: number): HTMLElement {
    const nav = document.createElement("div");
    nav.className = "history-pager";

    const prev = document.createElement("button");
    prev.className = "btn btn-page";
    prev.textContent = "Prev";
    prev.disabled = this.page === 0;
    prev.addEventListener("click", () => {
      this.page -= 1;
      this.render(this.history, this.selectedId);
    });

    const label = document.createElement("span");
    label.className = "pager-label";
    label.textContent = `page ${this.page + 1} of ${pages} (${total} attempts)`;

    const next = document.createElement("button");
    next.className = "btn btn-page";
    next.textContent = "Next";
    next.disabled = this.page >= pages - 1;
    next.addEventListener("click", () => {
      this.page += 1;
      this.render(this.history, this.selectedId);
    });

    nav.append(prev, label, next);
    return nav;
  }
}
