"""Prompt-size and cost sweep across graph scales.

Compares the two ways of getting an answer out of a model: generating code
against a schema (prompt size tracks the schema, not the data) and pasting
the whole graph into the prompt (size tracks the data). The sweep generates
traffic graphs of increasing size, estimates prompt tokens for a fixed
query set under both strategies, prices them per model, and flags which
strategy would overflow each model's context window at which size.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParameterError
from .gateway import ModelConfig, Usage, compute_cost
from .graphs import generate_traffic_graph
from .prompting import (
    Application,
    build_codegen_prompt,
    build_strawman_prompt,
    build_task_context,
)
from .sandbox import ExecBackendKind

# Fixed sweep queries; answers are never computed, only prompt sizes.
SWEEP_QUERIES = (
    "How many hosts are in the network?",
    "How many traffic links are there?",
    "What is the total number of bytes transferred over all links?",
    "Which host received the most bytes in total?",
    "List the hosts sorted by total outgoing traffic.",
    "How many links carried more than 500000 bytes?",
    "What is the average number of packets per link?",
    "Which pair of hosts exchanged the most traffic in both directions?",
    "How many distinct /16 address prefixes appear among the hosts?",
    "Find the host that opened the largest number of connections.",
    "Is every host reachable from every other host, ignoring direction?",
    "Report the three busiest links by byte count.",
)

# Priced against a nominal reply; the sweep measures prompts, not answers.
ASSUMED_REPLY_TOKENS = 200

SWEEP_SEED = 42


def _sweep_graph(size: int):
    """A traffic graph with roughly `size` total elements (hosts + links)."""
    n_nodes = max(2, size // 2)
    n_edges = size - n_nodes
    return generate_traffic_graph(n_nodes, n_edges, seed=SWEEP_SEED)


def cost_sweep(sizes: list[int], models: list[ModelConfig], out_dir: str) -> dict:
    """Run the sweep and write ``costs.json`` under `out_dir`."""
    if not sizes:
        raise ParameterError("sweep needs at least one size")
    if sorted(sizes) != list(sizes):
        raise ParameterError("sizes must be given in ascending order")
    if any(s < 4 for s in sizes):
        raise ParameterError("sizes below 4 elements are not meaningful")
    if not models:
        raise ParameterError("sweep needs at least one model")

    rows = []
    for size in sizes:
        g = _sweep_graph(size)
        ctx = build_task_context(Application.TRAFFIC_ANALYSIS, g)
        for query in SWEEP_QUERIES:
            codegen = build_codegen_prompt(ctx, query, ExecBackendKind.GRAPH_API)
            # A giant ceiling so the bundle is always built; overflow is
            # judged against each model's real limit below.
            strawman = build_strawman_prompt(
                g, query, 1 << 40, Application.TRAFFIC_ANALYSIS
            )
            per_model = {}
            for model in models:
                per_model[model.name] = {
                    "codegen_cost": str(
                        compute_cost(
                            Usage(codegen.estimated_tokens, ASSUMED_REPLY_TOKENS), model
                        )
                    ),
                    "strawman_cost": str(
                        compute_cost(
                            Usage(strawman.estimated_tokens, ASSUMED_REPLY_TOKENS), model
                        )
                    ),
                    "codegen_overflow": codegen.estimated_tokens > model.context_limit,
                    "strawman_overflow": strawman.estimated_tokens > model.context_limit,
                }
            rows.append(
                {
                    "size": size,
                    "query": query,
                    "codegen_tokens": codegen.estimated_tokens,
                    "strawman_tokens": strawman.estimated_tokens,
                    "models": per_model,
                }
            )

    dataset = {
        "version": 1,
        "seed": SWEEP_SEED,
        "sizes": list(sizes),
        "models": [m.name for m in models],
        "queries": list(SWEEP_QUERIES),
        "assumed_reply_tokens": ASSUMED_REPLY_TOKENS,
        "rows": rows,
        "summary": _summarize(rows, sizes, models),
    }

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "costs.json", "w", encoding="utf-8") as f:
        json.dump(dataset, f, indent=2, sort_keys=True)
        f.write("\n")
    return dataset


def _summarize(rows: list[dict], sizes: list[int], models: list[ModelConfig]) -> dict:
    by_size: dict[int, list[dict]] = {s: [] for s in sizes}
    for row in rows:
        by_size[row["size"]].append(row)

    codegen_means = []
    strawman_means = []
    for size in sizes:
        batch = by_size[size]
        codegen_means.append(sum(r["codegen_tokens"] for r in batch) / len(batch))
        strawman_means.append(sum(r["strawman_tokens"] for r in batch) / len(batch))

    center = sum(codegen_means) / len(codegen_means)
    spread_pct = max(abs(m - center) / center for m in codegen_means) * 100

    first_overflow = {}
    for model in models:
        hit = None
        for size in sizes:
            if any(
                r["models"][model.name]["strawman_overflow"] for r in by_size[size]
            ):
                hit = size
                break
        first_overflow[model.name] = hit

    codegen_ever_overflows = {
        model.name: any(
            r["models"][model.name]["codegen_overflow"] for r in rows
        )
        for model in models
    }

    return {
        "codegen_mean_tokens_by_size": codegen_means,
        "strawman_mean_tokens_by_size": strawman_means,
        "codegen_spread_pct": spread_pct,
        "strawman_strictly_increasing": all(
            a < b for a, b in zip(strawman_means, strawman_means[1:])
        ),
        "first_strawman_overflow_size": first_overflow,
        "codegen_ever_overflows": codegen_ever_overflows,
    }
