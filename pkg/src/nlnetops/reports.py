"""Report tables rendered from a run log.

Four tables: accuracy per application (models x backends), difficulty
breakdown per (application, backend), error-class taxonomy for one backend,
and the improvement comparison (pass@1 vs pass@k vs self-debug). All cells
derive from exact rational counts and render through one rounding rule, so
the same log always produces the same bytes.
"""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Optional

from .errors import InputError
from .evaluating import TAXONOMY_CLASSES, ErrorClass, EvalRecord
from .runner import RunLog
from .sandbox import ExecBackendKind


def round2(ratio: Fraction) -> str:
    value = Decimal(ratio.numerator) / Decimal(ratio.denominator)
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _chains(
    records: list[EvalRecord],
) -> dict[tuple[str, ExecBackendKind, str], dict[int, list[EvalRecord]]]:
    """Group records into self-debug chains keyed by job then attempt."""
    grouped: dict = {}
    for rec in records:
        job = grouped.setdefault((rec.case_id, rec.backend, rec.model), {})
        job.setdefault(rec.attempt_index, []).append(rec)
    for job in grouped.values():
        for chain in job.values():
            chain.sort(key=lambda r: r.debug_round)
    return grouped


def _job_passed(job: dict[int, list[EvalRecord]]) -> bool:
    return any(rec.verdict.passed for chain in job.values() for rec in chain)


def accuracy_cells(log: RunLog) -> dict[str, dict[str, dict[str, Fraction]]]:
    """app -> model -> backend -> passed/total over that app's cases."""
    case_app = {cid: info["application"] for cid, info in log.meta["cases"].items()}
    grouped = _chains(log.records)
    passed: dict = {}
    total: dict = {}
    for (case_id, backend, model), job in grouped.items():
        key = (case_app[case_id], model, backend.value)
        total[key] = total.get(key, 0) + 1
        if _job_passed(job):
            passed[key] = passed.get(key, 0) + 1
    cells: dict = {}
    for key, n in total.items():
        app, model, backend = key
        cells.setdefault(app, {}).setdefault(model, {})[backend] = Fraction(
            passed.get(key, 0), n
        )
    return cells


def difficulty_cells(
    log: RunLog,
) -> dict[str, dict[str, dict[str, dict[str, tuple[int, int]]]]]:
    """app -> backend -> model -> difficulty -> (passed, total)."""
    info = log.meta["cases"]
    grouped = _chains(log.records)
    cells: dict = {}
    for (case_id, backend, model), job in grouped.items():
        meta = info[case_id]
        slot = (
            cells.setdefault(meta["application"], {})
            .setdefault(backend.value, {})
            .setdefault(model, {})
        )
        won, total = slot.get(meta["difficulty"], (0, 0))
        slot[meta["difficulty"]] = (won + (1 if _job_passed(job) else 0), total + 1)
    return cells


def taxonomy_counts(
    log: RunLog, backend: ExecBackendKind = ExecBackendKind.GRAPH_API
) -> dict[str, dict[ErrorClass, int]]:
    """Failed-chain counts per application for one backend.

    A chain that recovers in a later round is not a failure; one that never
    passes contributes the error class of its final round. Totals therefore
    equal the number of failed chains exactly.
    """
    case_app = {cid: info["application"] for cid, info in log.meta["cases"].items()}
    counts: dict = {}
    for (case_id, rec_backend, _model), job in _chains(log.records).items():
        if rec_backend is not backend:
            continue
        app = case_app[case_id]
        for chain in job.values():
            if any(rec.verdict.passed for rec in chain):
                continue
            final = chain[-1].verdict.error_class
            per_app = counts.setdefault(app, {})
            per_app[final] = per_app.get(final, 0) + 1
    return counts


def improvement_cells(
    log: RunLog,
) -> dict[tuple[str, str, str], dict[str, Fraction]]:
    """(app, model, backend) -> pass@1 / pass@k / self-debug fractions.

    pass@1 looks at the first sample's first round only; pass@k admits any
    sample's first round; self-debug follows the first sample through its
    repair rounds.
    """
    case_app = {cid: info["application"] for cid, info in log.meta["cases"].items()}
    tallies: dict = {}
    for (case_id, backend, model), job in _chains(log.records).items():
        key = (case_app[case_id], model, backend.value)
        t = tallies.setdefault(key, {"cases": 0, "p1": 0, "pk": 0, "debug": 0})
        t["cases"] += 1
        first_chain = job.get(0, [])
        if first_chain and first_chain[0].verdict.passed:
            t["p1"] += 1
        if any(chain and chain[0].verdict.passed for chain in job.values()):
            t["pk"] += 1
        if any(rec.verdict.passed for rec in first_chain):
            t["debug"] += 1
    cells = {}
    for key, t in tallies.items():
        n = t["cases"]
        cells[key] = {
            "pass_at_1": Fraction(t["p1"], n),
            "pass_at_k": Fraction(t["pk"], n),
            "self_debug": Fraction(t["debug"], n),
        }
    return cells


# --- rendering ---


def _table_order(log: RunLog) -> tuple[list[str], list[str], list[str]]:
    apps = sorted({info["application"] for info in log.meta["cases"].values()})
    return apps, list(log.meta["models"]), list(log.meta["backends"])


def build_tables(
    log: RunLog, taxonomy_backend: ExecBackendKind = ExecBackendKind.GRAPH_API
) -> list[dict]:
    """Assemble every table as {title, header, rows} with string cells."""
    if not log.records:
        raise InputError("run log has no records to report on")
    apps, models, backends = _table_order(log)
    tables = []

    acc = accuracy_cells(log)
    for app in apps:
        per_model = acc.get(app, {})
        rows = []
        for model in models:
            row = [model]
            for backend in backends:
                ratio = per_model.get(model, {}).get(backend)
                row.append(round2(ratio) if ratio is not None else "-")
            rows.append(row)
        tables.append(
            {"title": f"accuracy ({app})", "header": ["model"] + backends, "rows": rows}
        )

    diff = difficulty_cells(log)
    for app in apps:
        per_backend = diff.get(app, {})
        for backend in backends:
            per_model = per_backend.get(backend)
            if per_model is None:
                continue
            totals = {}
            for model_cells in per_model.values():
                for level, (_, total) in model_cells.items():
                    totals[level] = total
            header = ["model"] + [
                f"{level}({totals.get(level, 0)})"
                for level in ("easy", "medium", "hard")
            ]
            rows = []
            for model in models:
                cells = per_model.get(model, {})
                row = [model]
                for level in ("easy", "medium", "hard"):
                    if level in cells:
                        won, total = cells[level]
                        row.append(round2(Fraction(won, total)))
                    else:
                        row.append("-")
                rows.append(row)
            tables.append(
                {
                    "title": f"difficulty ({app}, {backend})",
                    "header": header,
                    "rows": rows,
                }
            )

    tax = taxonomy_counts(log, taxonomy_backend)
    tax_apps = [a for a in apps if a in tax]
    if tax_apps:
        rows = []
        listed = list(TAXONOMY_CLASSES) + [
            c for c in ErrorClass if c not in TAXONOMY_CLASSES
        ]
        for cls in listed:
            counts = [tax[app].get(cls, 0) for app in tax_apps]
            if cls not in TAXONOMY_CLASSES and not any(counts):
                continue
            rows.append([cls.value] + [str(c) for c in counts])
        rows.append(
            ["total"] + [str(sum(tax[app].values())) for app in tax_apps]
        )
        tables.append(
            {
                "title": f"taxonomy ({taxonomy_backend.value})",
                "header": ["error class"] + tax_apps,
                "rows": rows,
            }
        )

    imp = improvement_cells(log)
    rows = []
    for app in apps:
        for model in models:
            for backend in backends:
                cell = imp.get((app, model, backend))
                if cell is None:
                    continue
                rows.append(
                    [
                        app,
                        model,
                        backend,
                        round2(cell["pass_at_1"]),
                        round2(cell["pass_at_k"]),
                        round2(cell["self_debug"]),
                    ]
                )
    tables.append(
        {
            "title": "improvement",
            "header": ["application", "model", "backend", "pass@1", "pass@k", "self-debug"],
            "rows": rows,
        }
    )
    return tables


def render_text(tables: list[dict]) -> str:
    out = []
    for table in tables:
        grid = [table["header"]] + table["rows"]
        widths = [max(len(row[i]) for row in grid) for i in range(len(grid[0]))]
        out.append(f"== {table['title']} ==")
        for row_no, row in enumerate(grid):
            out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
            if row_no == 0:
                out.append("  ".join("-" * widths[i] for i in range(len(widths))))
        out.append("")
    return "\n".join(out)


def render_csv(tables: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for table in tables:
        writer.writerow([f"# {table['title']}"])
        writer.writerow(table["header"])
        writer.writerows(table["rows"])
        writer.writerow([])
    return buffer.getvalue()


def render_run_report(log: RunLog, fmt: str = "table") -> str:
    tables = build_tables(log)
    if fmt == "table":
        return render_text(tables)
    if fmt == "csv":
        return render_csv(tables)
    raise InputError(f"unknown report format {fmt!r}")
