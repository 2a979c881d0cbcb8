#!/usr/bin/env python3
"""Build the committed replay fixtures under fixtures/.

Three datasets, each a directory of per-model JSONL files:

  accuracy/     pass/fail patterns for the full backend x model matrix
  taxonomy/     a graph-api run with a chosen error-class distribution
  improvement/  a k=5, one-repair-round study on the malt suite

Replies are planned per (model, case, backend): a passing slot replies with
the case's golden program (or the golden answer for the direct path), a
failing slot replies with a template that produces the planned error class.
The script records fixtures by driving the real evaluation loop, then
replays them and asserts the resulting report cells match the plan.
"""

from __future__ import annotations

import json
import re
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from nlnetops.evaluating import ErrorClass, load_suite  # noqa: E402
from nlnetops.gateway import (  # noqa: E402
    Completion,
    Gateway,
    RecordingBackend,
    Usage,
    load_models_config,
    replay_backend_for_path,
)
from nlnetops.prompting import (  # noqa: E402
    PURPOSE_SELFDEBUG,
    estimate_tokens,
)
from nlnetops.reports import (  # noqa: E402
    accuracy_cells,
    difficulty_cells,
    improvement_cells,
    taxonomy_counts,
)
from nlnetops.runner import RunMatrix, run_matrix  # noqa: E402
from nlnetops.sandbox import ExecBackendKind  # noqa: E402

FIXTURES = REPO / "fixtures"
SUITE_DIR = REPO / "suites"
MODELS = ("sim-alpha", "sim-beta", "sim-gamma", "sim-delta")

TRAFFIC_BACKENDS = (
    ExecBackendKind.DIRECT_ANSWER,
    ExecBackendKind.RELATIONAL,
    ExecBackendKind.TABULAR,
    ExecBackendKind.GRAPH_API,
)
MALT_BACKENDS = (
    ExecBackendKind.RELATIONAL,
    ExecBackendKind.TABULAR,
    ExecBackendKind.GRAPH_API,
)

# Passing counts per difficulty block (easy, medium, hard); within a block
# the first N cases in suite order pass.
TRAFFIC_COUNTS = {
    "sim-alpha": {
        "direct_answer": (4, 3, 0),
        "relational": (6, 4, 2),
        "tabular": (4, 4, 1),
        "graph_api": (8, 8, 5),
    },
    "sim-beta": {
        "direct_answer": (3, 1, 0),
        "relational": (2, 1, 0),
        "tabular": (4, 2, 0),
        "graph_api": (8, 5, 2),
    },
    "sim-gamma": {
        "direct_answer": (3, 2, 0),
        "relational": (5, 2, 0),
        "tabular": (5, 2, 0),
        "graph_api": (8, 6, 1),
    },
    "sim-delta": {
        "direct_answer": (4, 2, 0),
        "relational": (3, 2, 0),
        "tabular": (4, 1, 1),
        "graph_api": (7, 4, 3),
    },
}
MALT_COUNTS = {
    "sim-alpha": {
        "relational": (1, 0, 0),
        "tabular": (2, 2, 1),
        "graph_api": (3, 3, 1),
    },
    "sim-beta": {
        "relational": (1, 0, 0),
        "tabular": (2, 2, 0),
        "graph_api": (2, 2, 0),
    },
    "sim-gamma": {
        "relational": (1, 0, 0),
        "tabular": (1, 1, 0),
        "graph_api": (2, 2, 1),
    },
    "sim-delta": {
        "relational": (1, 0, 0),
        "tabular": (2, 1, 0),
        "graph_api": (2, 1, 1),
    },
}

# Error-class draw for the taxonomy dataset, consumed model by model.
TRAFFIC_CLASSES = (
    [ErrorClass.SYNTAX_ERROR] * 9
    + [ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE] * 9
    + [ErrorClass.IMAGINARY_FILE_OR_FUNCTION] * 3
    + [ErrorClass.ARGUMENTS_ERROR] * 7
    + [ErrorClass.OPERATION_ERROR] * 4
    + [ErrorClass.WRONG_CALCULATION_LOGIC] * 2
    + [ErrorClass.GRAPHS_NOT_IDENTICAL] * 1
)
MALT_CLASSES = (
    [ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE] * 1
    + [ErrorClass.IMAGINARY_FILE_OR_FUNCTION] * 2
    + [ErrorClass.ARGUMENTS_ERROR] * 8
    + [ErrorClass.OPERATION_ERROR] * 2
    + [ErrorClass.WRONG_CALCULATION_LOGIC] * 3
    + [ErrorClass.GRAPHS_NOT_IDENTICAL] * 1
)
TRAFFIC_FAILS_PER_MODEL = (8, 9, 9, 9)
MALT_FAILS_PER_MODEL = (4, 4, 4, 5)

# Improvement study: first-round passes mirror the accuracy pattern for
# sim-delta on graph_api (2 easy, 1 medium, 1 hard); two of the five
# failures recover after one repair round.
IMPROVE_ROUND0 = {"malt-e1", "malt-e2", "malt-m1", "malt-h1"}
IMPROVE_RECOVER = {"malt-e3", "malt-m2"}

FAIL_TEMPLATES = {
    ErrorClass.SYNTAX_ERROR: "```python\ndef broken(:\n```",
    ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE: (
        "```python\nresult = sum(d['bandwidth'] for _, _, d in G.edges(data=True))\n```"
    ),
    ErrorClass.IMAGINARY_FILE_OR_FUNCTION: (
        "```python\nimport graph_toolkit_extras\n"
        "result = graph_toolkit_extras.summarize(G)\n```"
    ),
    ErrorClass.ARGUMENTS_ERROR: "```python\nresult = G.number_of_nodes(1, 2, 3)\n```",
    ErrorClass.OPERATION_ERROR: (
        "```python\nresult = 1 / (G.number_of_nodes() - G.number_of_nodes())\n```"
    ),
    ErrorClass.WRONG_CALCULATION_LOGIC: "```python\nresult = -12345\n```",
}

WRONG_VALUE = {
    ExecBackendKind.GRAPH_API: "```python\nresult = -12345\n```",
    ExecBackendKind.TABULAR: "```python\nresult = -12345\n```",
    ExecBackendKind.RELATIONAL: "```sql\nSELECT -12345;\n```",
    ExecBackendKind.DIRECT_ANSWER: '```json\n{"kind": "scalar", "value": -12345}\n```',
}

_ATTEMPT_MARK = re.compile(r"attempt-(\d+)")


def fence(language: str, body: str) -> str:
    if not body.endswith("\n"):
        body += "\n"
    return f"```{language}\n{body}```"


class ReplyPlanner:
    """Maps a prompt bundle back to its case and serves the planned reply."""

    def __init__(self, suites, goldens, direct_answers):
        self._queries = sorted(
            ((c.query, c) for s in suites for c in s.cases),
            key=lambda pair: len(pair[0]),
            reverse=True,
        )
        self._goldens = goldens
        self._direct = direct_answers
        self.decide = None  # set per dataset

    def _case_for(self, rendering: str):
        for query, case in self._queries:
            if json.dumps(query)[1:-1] in rendering:
                return case
        raise AssertionError("bundle does not mention any known query")

    def passing_reply(self, case, backend: ExecBackendKind) -> str:
        if backend is ExecBackendKind.DIRECT_ANSWER:
            return self._direct[case.id]
        body = self._goldens[(case.id, backend)]
        language = "sql" if backend is ExecBackendKind.RELATIONAL else "python"
        return fence(language, body)

    def graph_scratch_reply(self, case) -> str:
        golden = self._goldens[(case.id, ExecBackendKind.GRAPH_API)]
        return fence("python", golden + "G.add_node('zz_scratch')\n")

    def complete(self, bundle, cfg, n: int) -> list[Completion]:
        rendering = bundle.canonical_rendering()
        case = self._case_for(rendering)
        tokens_in = estimate_tokens(rendering)
        out = []
        for attempt in range(n):
            text = self.decide(cfg.name, case, bundle, rendering, attempt)
            out.append(
                Completion(
                    text=text,
                    usage=Usage(tokens_in, estimate_tokens(text)),
                    latency_s=0.0,
                    attempt_index=attempt,
                )
            )
        return out


def expand_passing(suite, counts: tuple[int, int, int]) -> set[str]:
    passing = set()
    by_level = {"easy": [], "medium": [], "hard": []}
    for case in suite.cases:
        by_level[case.difficulty.value].append(case.id)
    for level, n in zip(("easy", "medium", "hard"), counts):
        passing.update(by_level[level][:n])
    return passing


def spread_failures(case_ids, per_model: tuple[int, ...], stride: int, classes):
    """(model index, case id) -> ErrorClass, consuming `classes` in order."""
    plan = {}
    draw = iter(classes)
    for m_index, n_fail in enumerate(per_model):
        for t in range(n_fail):
            case_id = case_ids[(m_index + stride * t) % len(case_ids)]
            plan[(m_index, case_id)] = next(draw)
    leftovers = list(draw)
    assert not leftovers, f"{len(leftovers)} classes unassigned"
    return plan


def record_dataset(dirpath: Path, models, jobs, planner) -> None:
    """jobs: list of (suite, backends, k, debug_budget)."""
    if dirpath.exists():
        shutil.rmtree(dirpath)
    dirpath.mkdir(parents=True)
    for model in models:
        recorder = RecordingBackend(planner, str(dirpath / f"{model.name}.jsonl"))
        gateway = Gateway(recorder)
        for suite, backends, k, budget in jobs:
            matrix = RunMatrix(
                suites=(suite,),
                backends=backends,
                models=(model,),
                k=k,
                debug_budget=budget,
                concurrency=8,
            )
            with tempfile.TemporaryDirectory() as scratch:
                log = run_matrix(matrix, gateway, scratch)
            assert not log.meta["defects"], log.meta["defects"]


def replay(dirpath: Path, suites, backends, models, k: int, budget: int, out: str):
    gateway = Gateway(replay_backend_for_path(str(dirpath)))
    matrix = RunMatrix(
        suites=tuple(suites),
        backends=tuple(backends),
        models=tuple(models),
        k=k,
        debug_budget=budget,
        concurrency=8,
    )
    log = run_matrix(matrix, gateway, out)
    assert not log.meta["defects"], log.meta["defects"]
    return log


def build_accuracy(planner, traffic, malt, models) -> None:
    plans = {}
    for name in MODELS:
        per_model = {}
        for backend_name, counts in TRAFFIC_COUNTS[name].items():
            per_model[ExecBackendKind.parse(backend_name)] = expand_passing(
                traffic, counts
            )
        for backend_name, counts in MALT_COUNTS[name].items():
            per_model[ExecBackendKind.parse(backend_name)].update(
                expand_passing(malt, counts)
            )
        plans[name] = per_model

    def decide(model_name, case, bundle, rendering, attempt):
        if case.id in plans[model_name][bundle.backend]:
            return planner.passing_reply(case, bundle.backend)
        return WRONG_VALUE[bundle.backend]

    planner.decide = decide
    record_dataset(
        FIXTURES / "accuracy",
        models,
        [(traffic, TRAFFIC_BACKENDS, 1, 0), (malt, MALT_BACKENDS, 1, 0)],
        planner,
    )

    # replay and hold the cells against the plan
    with tempfile.TemporaryDirectory() as scratch:
        log_t = replay(
            FIXTURES / "accuracy", [traffic], TRAFFIC_BACKENDS, models, 1, 0,
            scratch + "/t",
        )
        log_m = replay(
            FIXTURES / "accuracy", [malt], MALT_BACKENDS, models, 1, 0,
            scratch + "/m",
        )
    for log, app, plan_table, total in (
        (log_t, "traffic", TRAFFIC_COUNTS, 24),
        (log_m, "malt", MALT_COUNTS, 9),
    ):
        acc = accuracy_cells(log)[app]
        diff = difficulty_cells(log)[app]
        for name in MODELS:
            for backend_name, counts in plan_table[name].items():
                want = Fraction(sum(counts), total)
                got = acc[name][backend_name]
                assert got == want, (app, name, backend_name, got, want)
                per_level = diff[backend_name][name]
                for level, n in zip(("easy", "medium", "hard"), counts):
                    assert per_level[level][0] == n, (app, name, backend_name, level)
    print("accuracy fixtures ok")


def build_taxonomy(planner, traffic, malt, models) -> None:
    traffic_plan = spread_failures(
        [c.id for c in traffic.cases], TRAFFIC_FAILS_PER_MODEL, 5, TRAFFIC_CLASSES
    )
    malt_plan = spread_failures(
        [c.id for c in malt.cases], MALT_FAILS_PER_MODEL, 2, MALT_CLASSES
    )
    combined = {}
    model_index = {name: i for i, name in enumerate(MODELS)}
    for (m_index, case_id), cls in {**traffic_plan, **malt_plan}.items():
        combined[(MODELS[m_index], case_id)] = cls

    def decide(model_name, case, bundle, rendering, attempt):
        cls = combined.get((model_name, case.id))
        if cls is None:
            return planner.passing_reply(case, bundle.backend)
        if cls is ErrorClass.GRAPHS_NOT_IDENTICAL:
            return planner.graph_scratch_reply(case)
        return FAIL_TEMPLATES[cls]

    planner.decide = decide
    backends = (ExecBackendKind.GRAPH_API,)
    record_dataset(
        FIXTURES / "taxonomy",
        models,
        [(traffic, backends, 1, 0), (malt, backends, 1, 0)],
        planner,
    )

    with tempfile.TemporaryDirectory() as scratch:
        log = replay(
            FIXTURES / "taxonomy", [traffic, malt], backends, models, 1, 0, scratch
        )
    counts = taxonomy_counts(log)
    want_traffic = {cls: TRAFFIC_CLASSES.count(cls) for cls in set(TRAFFIC_CLASSES)}
    want_malt = {cls: MALT_CLASSES.count(cls) for cls in set(MALT_CLASSES)}
    assert counts["traffic"] == want_traffic, counts["traffic"]
    assert counts["malt"] == want_malt, counts["malt"]
    assert sum(counts["traffic"].values()) == 35
    assert sum(counts["malt"].values()) == 17
    print("taxonomy fixtures ok")


def build_improvement(planner, malt, delta) -> None:
    def decide(model_name, case, bundle, rendering, attempt):
        if bundle.purpose == PURPOSE_SELFDEBUG:
            mark = _ATTEMPT_MARK.search(rendering)
            assert mark, "repair prompt lost its attempt marker"
            chain = int(mark.group(1))
            if case.id in IMPROVE_RECOVER and chain == 0:
                return planner.passing_reply(case, ExecBackendKind.GRAPH_API)
            return f'```python\nresult = ("debug-{chain}", -54321)\n```'
        # first round: which samples pass is part of the study design
        if case.id in IMPROVE_ROUND0:
            passing_attempt = 0
        else:
            passing_attempt = 1
        if attempt == passing_attempt:
            return planner.passing_reply(case, ExecBackendKind.GRAPH_API)
        return f'```python\nresult = ("attempt-{attempt}", -12345)\n```'

    planner.decide = decide
    record_dataset(
        FIXTURES / "improvement",
        [delta],
        [(malt, (ExecBackendKind.GRAPH_API,), 5, 1)],
        planner,
    )

    with tempfile.TemporaryDirectory() as scratch:
        log = replay(
            FIXTURES / "improvement", [malt], (ExecBackendKind.GRAPH_API,),
            [delta], 5, 1, scratch,
        )
    cells = improvement_cells(log)[("malt", "sim-delta", "graph_api")]
    assert cells["pass_at_1"] == Fraction(4, 9), cells
    assert cells["pass_at_k"] == Fraction(1), cells
    assert cells["self_debug"] == Fraction(6, 9), cells
    print("improvement fixtures ok")


def main() -> int:
    from nlnetops.evaluating import golden_outcome

    traffic = load_suite(str(SUITE_DIR / "traffic.json"))
    malt = load_suite(str(SUITE_DIR / "malt.json"))
    config = load_models_config()
    models = [config[name] for name in MODELS]

    goldens = {}
    direct_answers = {}
    for suite in (traffic, malt):
        for case in suite.cases:
            for backend, rel in case.golden_programs.items():
                goldens[(case.id, backend)] = Path(rel).read_text()
            out = golden_outcome(case, ExecBackendKind.GRAPH_API)
            payload = {"kind": out.envelope.kind, "value": out.envelope.value}
            direct_answers[case.id] = fence("json", json.dumps(payload, indent=2))

    planner = ReplyPlanner((traffic, malt), goldens, direct_answers)
    build_accuracy(planner, traffic, malt, models)
    build_taxonomy(planner, traffic, malt, models)
    build_improvement(planner, malt, config["sim-delta"])
    print("all fixtures built")
    return 0


if __name__ == "__main__":
    sys.exit(main())
