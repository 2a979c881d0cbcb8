"""Matrix orchestration: run suites across backends and models into a run log.

A run writes two artifacts under its output directory: ``records.jsonl``
(one evaluation record per line, in submission order) and ``meta.json``
(the matrix, a case index, and any defects hit along the way). Reports are
rendered from those two files alone, so a run directory is self-contained.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, InputError
from .evaluating import (
    EvalRecord,
    Suite,
    evaluate_outcome,
    golden_outcome,
    load_suite,
    run_case,
)
from .gateway import Gateway, ModelConfig
from .prompting import ESTIMATOR_ID
from .sandbox import ExecBackendKind, SandboxLimits

CODE_BACKENDS = (
    ExecBackendKind.GRAPH_API,
    ExecBackendKind.TABULAR,
    ExecBackendKind.RELATIONAL,
)


@dataclass(frozen=True)
class RunMatrix:
    """Everything a run needs except the completion backend."""

    suites: tuple[Suite, ...]
    backends: tuple[ExecBackendKind, ...]
    models: tuple[ModelConfig, ...]
    k: int = 1
    debug_budget: int = 0
    limits: SandboxLimits = SandboxLimits()
    concurrency: int = 4

    def __post_init__(self) -> None:
        if not self.suites:
            raise ConfigError("matrix needs at least one suite")
        if not self.backends:
            raise ConfigError("matrix needs at least one backend")
        if not self.models:
            raise ConfigError("matrix needs at least one model")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.debug_budget < 0:
            raise ConfigError("self-debug budget cannot be negative")
        if self.concurrency < 1:
            raise ConfigError("concurrency must be at least 1")
        seen = set()
        for suite in self.suites:
            for case in suite.cases:
                if case.id in seen:
                    raise ConfigError(f"case id {case.id} appears in more than one suite")
                seen.add(case.id)

    def digest(self) -> str:
        payload = {
            "backends": [b.value for b in self.backends],
            "debug_budget": self.debug_budget,
            "k": self.k,
            "models": [m.name for m in self.models],
            "suites": [s.path for s in self.suites],
        }
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunLog:
    meta: dict
    records: list[EvalRecord]


def _case_index(suites: tuple[Suite, ...]) -> dict:
    index = {}
    for suite in suites:
        for case in suite.cases:
            index[case.id] = {
                "application": case.application.value,
                "difficulty": case.difficulty.value,
            }
    return index


def run_matrix(matrix: RunMatrix, gateway: Gateway, out_dir: str) -> RunLog:
    """Run every (case, backend, model) job and persist the log.

    Jobs run concurrently up to the configured cap; the record file is
    written in submission order regardless of completion order. A job that
    blows up is recorded as a defect and never aborts the rest of the run.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = [
        (case, backend, model)
        for suite in matrix.suites
        for case in suite.cases
        for backend in matrix.backends
        for model in matrix.models
    ]

    started = time.time()
    results: list[list[EvalRecord]] = [[] for _ in jobs]
    defects: list[dict] = []
    defect_lock = threading.Lock()

    def work(slot: int) -> None:
        case, backend, model = jobs[slot]
        try:
            results[slot] = run_case(
                case,
                backend,
                model,
                matrix.k,
                matrix.debug_budget,
                gateway=gateway,
                limits=matrix.limits,
            )
        except Exception as exc:
            with defect_lock:
                defects.append(
                    {
                        "case_id": case.id,
                        "backend": backend.value,
                        "model": model.name,
                        "error": f"{type(exc).__name__}: {exc}",
                    }
                )

    with ThreadPoolExecutor(max_workers=matrix.concurrency) as pool:
        list(pool.map(work, range(len(jobs))))

    records = [r for slot in results for r in slot]
    meta = {
        "version": 1,
        "config_digest": matrix.digest(),
        "estimator": ESTIMATOR_ID,
        "k": matrix.k,
        "debug_budget": matrix.debug_budget,
        "backends": [b.value for b in matrix.backends],
        "models": [m.name for m in matrix.models],
        "suites": [
            {
                "application": s.application.value,
                "path": s.path,
                "cases": len(s.cases),
            }
            for s in matrix.suites
        ],
        "cases": _case_index(matrix.suites),
        "started": started,
        "finished": time.time(),
        "defects": sorted(
            defects, key=lambda d: (d["case_id"], d["backend"], d["model"])
        ),
    }

    with open(out / "records.jsonl", "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.to_doc(), sort_keys=True) + "\n")
    with open(out / "meta.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")

    return RunLog(meta=meta, records=records)


def load_run(run_dir: str) -> RunLog:
    base = Path(run_dir)
    meta_path = base / "meta.json"
    records_path = base / "records.jsonl"
    if not meta_path.is_file() or not records_path.is_file():
        raise InputError(f"{run_dir} is not a run directory (missing meta.json or records.jsonl)")
    with open(meta_path, encoding="utf-8") as f:
        meta = json.load(f)
    records = []
    with open(records_path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(EvalRecord.from_doc(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise InputError(f"{records_path}:{line_no}: bad record: {exc}") from exc
    return RunLog(meta=meta, records=records)


def validate_suite(path: str) -> list[str]:
    """Check a suite end to end; the returned list is empty when it is clean.

    Every golden program must pass against its own fixture, and for each
    case the non-reference backends must agree with the graph-api golden
    on both the value and the resulting graph.
    """
    defects: list[str] = []
    try:
        suite = load_suite(path)
    except Exception as exc:
        return [f"{path}: {type(exc).__name__}: {exc}"]

    lock = threading.Lock()

    def check(case) -> None:
        outcomes = {}
        for backend in CODE_BACKENDS:
            if backend not in case.golden_programs:
                continue
            try:
                out = golden_outcome(case, backend)
            except Exception as exc:
                with lock:
                    defects.append(f"{case.id}/{backend.value}: {exc}")
                return
            if not out.passed:
                with lock:
                    defects.append(
                        f"{case.id}/{backend.value}: golden failed "
                        f"({out.failure_phase.value}): {out.message}"
                    )
                return
            outcomes[backend] = out
        reference = outcomes.get(ExecBackendKind.GRAPH_API)
        if reference is None:
            return
        for backend, out in outcomes.items():
            if backend is ExecBackendKind.GRAPH_API:
                continue
            verdict = evaluate_outcome(out, reference, case)
            if not verdict.passed:
                with lock:
                    defects.append(
                        f"{case.id}: {backend.value} disagrees with graph_api: "
                        f"{verdict.detail}"
                    )

    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(check, suite.cases))

    return sorted(defects)
