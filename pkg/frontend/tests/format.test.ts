import { describe, expect, it } from "vitest";
import {
  diffChips,
  errorCodeBadge,
  escapeHtml,
  formatTimestamp,
  formatValue,
  highlightCode,
  statusBadge,
} from "../src/format";
import type { DiffSummary } from "../src/types";

function diff(overrides: Partial<DiffSummary>): DiffSummary {
  return {
    added_nodes: 0,
    removed_nodes: 0,
    changed_nodes: 0,
    added_edges: 0,
    removed_edges: 0,
    changed_edges: 0,
    items: [],
    truncated: false,
    ...overrides,
  };
}

describe("statusBadge", () => {
  it("labels every attempt status distinctly", () => {
    const labels = ["pending", "approved", "rejected", "failed"].map(
      (s) => statusBadge(s).label,
    );
    expect(new Set(labels).size).toBe(4);
  });

  it("passes unknown statuses through", () => {
    expect(statusBadge("archived").label).toBe("archived");
  });
});

describe("errorCodeBadge", () => {
  it("renders every service error code distinctly", () => {
    const codes = [0, 404, 409, 422, 502];
    const badges = codes.map((c) => errorCodeBadge(c));
    expect(new Set(badges.map((b) => b.label)).size).toBe(codes.length);
    expect(new Set(badges.map((b) => b.cssClass)).size).toBe(codes.length);
  });

  it("falls back to the numeric code", () => {
    expect(errorCodeBadge(500).label).toBe("error 500");
  });
});

describe("diffChips", () => {
  it("emits one chip per nonzero counter", () => {
    const chips = diffChips(
      diff({ added_nodes: 2, removed_edges: 1, changed_nodes: 10 }),
    );
    expect(chips).toEqual([
      { label: "+2 nodes", kind: "added" },
      { label: "~10 nodes", kind: "changed" },
      { label: "-1 edge", kind: "removed" },
    ]);
  });

  it("is empty when nothing changed", () => {
    expect(diffChips(diff({}))).toEqual([]);
  });

  it("uses singular nouns for single elements", () => {
    expect(diffChips(diff({ added_nodes: 1 }))[0].label).toBe("+1 node");
  });
});

describe("formatValue", () => {
  it("prints scalars bare and structures as JSON", () => {
    expect(formatValue(9800978)).toBe("9800978");
    expect(formatValue("ok")).toBe("ok");
    expect(formatValue(null)).toBe("null");
    expect(formatValue({ a: 1 })).toBe('{\n  "a": 1\n}');
    expect(formatValue([1, 2])).toBe("[\n  1,\n  2\n]");
  });
});

describe("formatTimestamp", () => {
  it("formats epoch seconds as UTC date and time", () => {
    expect(formatTimestamp(0)).toBe("1970-01-01 00:00:00");
  });
});

describe("escapeHtml", () => {
  it("neutralizes markup", () => {
    expect(escapeHtml('<b a="1">&</b>')).toBe("&lt;b a=&quot;1&quot;&gt;&amp;&lt;/b&gt;");
  });
});

describe("highlightCode", () => {
  it("wraps python keywords, strings, comments and numbers", () => {
    const html = highlightCode('for n in G.nodes:  # visit\n    x = "hi" + str(42)', "graph_api");
    expect(html).toContain('<span class="tok-keyword">for</span>');
    expect(html).toContain('<span class="tok-keyword">in</span>');
    expect(html).toContain('<span class="tok-comment"># visit</span>');
    expect(html).toContain('<span class="tok-string">&quot;hi&quot;</span>');
    expect(html).toContain('<span class="tok-number">42</span>');
  });

  it("escapes markup inside code", () => {
    const html = highlightCode("if a < b:\n    pass", "graph_api");
    expect(html).toContain("a &lt; b");
    expect(html).not.toContain("<b");
  });

  it("highlights SQL for the relational backend", () => {
    const html = highlightCode("SELECT src, COUNT(*) FROM edges -- all\nWHERE kind = 'flow'", "relational");
    expect(html).toContain('<span class="tok-keyword">SELECT</span>');
    expect(html).toContain('<span class="tok-comment">-- all</span>');
    expect(html).toContain("<span class=\"tok-string\">'flow'</span>");
  });
});
