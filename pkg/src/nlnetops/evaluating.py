"""Benchmark core: run one case end to end and judge the result.

A case's golden program is the ground truth. Candidate code runs in the
sandbox, its envelope is compared to the golden envelope (value half and
graph half separately), and failures land in exactly one error class so
taxonomy counts are reproducible. Queries with non-unique correct
answers (colorings, clusterings) ship a validator program that judges
the candidate envelope instead of value comparison.
"""

from __future__ import annotations

import enum
import json
import math
import os
import re
import threading
import time
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Optional

from .errors import (
    ContextOverflowError,
    FixtureMissError,
    InputError,
    ParameterError,
    SuiteDefectError,
    TransportError,
)
from .gateway import Gateway, ModelConfig, Usage, compute_cost
from .graphs import (
    PropertyGraph,
    generate_malt,
    generate_traffic_graph,
    graph_equal,
    load_graph,
    serialize_graph,
)
from .prompting import (
    Application,
    build_codegen_prompt,
    build_selfdebug_prompt,
    build_strawman_prompt,
    build_task_context,
)
from .sandbox import (
    ExecBackendKind,
    ExecOutcome,
    FailurePhase,
    ResultEnvelope,
    SandboxLimits,
    execute,
    extract_code,
    parse_direct_answer,
)
from .sandbox.extraction import EnvelopeError


class Difficulty(enum.Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"

    @classmethod
    def parse(cls, text: str) -> "Difficulty":
        for member in cls:
            if member.value == text:
                return member
        raise SuiteDefectError(f"unknown difficulty {text!r}")


class ErrorClass(enum.Enum):
    SYNTAX_ERROR = "SyntaxError"
    IMAGINARY_GRAPH_ATTRIBUTE = "ImaginaryGraphAttribute"
    IMAGINARY_FILE_OR_FUNCTION = "ImaginaryFileOrFunction"
    ARGUMENTS_ERROR = "ArgumentsError"
    OPERATION_ERROR = "OperationError"
    WRONG_CALCULATION_LOGIC = "WrongCalculationLogic"
    GRAPHS_NOT_IDENTICAL = "GraphsNotIdentical"
    CONTEXT_OVERFLOW = "ContextOverflow"
    TIMEOUT = "Timeout"
    SANDBOX_VIOLATION = "SandboxViolation"
    ENVELOPE_MALFORMED = "EnvelopeMalformed"


# Rows of the code-failure taxonomy; the remaining classes are
# harness-level conditions reported separately.
TAXONOMY_CLASSES = (
    ErrorClass.SYNTAX_ERROR,
    ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE,
    ErrorClass.IMAGINARY_FILE_OR_FUNCTION,
    ErrorClass.ARGUMENTS_ERROR,
    ErrorClass.OPERATION_ERROR,
    ErrorClass.WRONG_CALCULATION_LOGIC,
    ErrorClass.GRAPHS_NOT_IDENTICAL,
)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    error_class: Optional[ErrorClass] = None
    detail: str = ""

    def __post_init__(self) -> None:
        if self.passed and self.error_class is not None:
            raise ParameterError("a passing verdict cannot carry an error class")
        if not self.passed and self.error_class is None:
            raise ParameterError("a failing verdict needs exactly one error class")


@dataclass(frozen=True)
class BenchmarkCase:
    id: str
    application: Application
    difficulty: Difficulty
    query: str
    fixture: dict
    golden_programs: dict[ExecBackendKind, str]
    ordered: bool = False
    mutating: bool = False
    validator: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise SuiteDefectError("case id must be non-empty")
        if not self.query.strip():
            raise SuiteDefectError(f"case {self.id}: empty query")
        if not self.golden_programs and self.validator is None:
            raise SuiteDefectError(
                f"case {self.id}: needs a golden program or a validator"
            )


@dataclass(frozen=True)
class Suite:
    application: Application
    cases: tuple[BenchmarkCase, ...]
    path: str

    def case_ids(self) -> list[str]:
        return [c.id for c in self.cases]


@dataclass(frozen=True)
class EvalRecord:
    case_id: str
    backend: ExecBackendKind
    model: str
    attempt_index: int
    debug_round: int
    code: str
    outcome: Optional[ExecOutcome]
    verdict: Verdict
    usage: Optional[Usage]
    cost: Decimal
    latency_s: float
    timestamp: float

    def to_doc(self) -> dict:
        outcome_doc = None
        if self.outcome is not None:
            env = self.outcome.envelope
            outcome_doc = {
                "status": self.outcome.status,
                "failure_phase": (
                    self.outcome.failure_phase.value if self.outcome.failure_phase else None
                ),
                "message": self.outcome.message,
                "envelope": (
                    {
                        "kind": env.kind,
                        "value": env.value,
                        "graph_after": json.loads(serialize_graph(env.graph_after)),
                    }
                    if env is not None
                    else None
                ),
            }
        return {
            "case_id": self.case_id,
            "backend": self.backend.value,
            "model": self.model,
            "attempt_index": self.attempt_index,
            "debug_round": self.debug_round,
            "code": self.code,
            "outcome": outcome_doc,
            "verdict": {
                "passed": self.verdict.passed,
                "error_class": (
                    self.verdict.error_class.value if self.verdict.error_class else None
                ),
                "detail": self.verdict.detail,
            },
            "usage": (
                {"tokens_in": self.usage.tokens_in, "tokens_out": self.usage.tokens_out}
                if self.usage
                else None
            ),
            "cost": str(self.cost),
            "latency_s": self.latency_s,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "EvalRecord":
        outcome = None
        if doc.get("outcome") is not None:
            od = doc["outcome"]
            envelope = None
            if od.get("envelope") is not None:
                ed = od["envelope"]
                envelope = ResultEnvelope(
                    kind=ed["kind"],
                    value=ed["value"],
                    graph_after=load_graph(json.dumps(ed["graph_after"])),
                )
            if od["status"] == "success":
                outcome = ExecOutcome.of_success(envelope)
            else:
                outcome = ExecOutcome.of_failure(
                    FailurePhase(od["failure_phase"]), od.get("message", "")
                )
        vd = doc["verdict"]
        verdict = Verdict(
            passed=vd["passed"],
            error_class=ErrorClass(vd["error_class"]) if vd.get("error_class") else None,
            detail=vd.get("detail", ""),
        )
        usage = None
        if doc.get("usage") is not None:
            usage = Usage(doc["usage"]["tokens_in"], doc["usage"]["tokens_out"])
        return cls(
            case_id=doc["case_id"],
            backend=ExecBackendKind.parse(doc["backend"]),
            model=doc["model"],
            attempt_index=doc["attempt_index"],
            debug_round=doc["debug_round"],
            code=doc.get("code", ""),
            outcome=outcome,
            verdict=verdict,
            usage=usage,
            cost=Decimal(doc["cost"]),
            latency_s=doc.get("latency_s", 0.0),
            timestamp=doc.get("timestamp", 0.0),
        )


# --- suite loading ---

_CASE_KEYS = {
    "id",
    "query",
    "difficulty",
    "fixture",
    "golden",
    "ordered",
    "mutating",
    "validator",
}

_FIXTURE_GENERATORS = {
    "traffic": {"nodes", "edges", "seed"},
    "malt": {"chassis", "switches_per_chassis", "ports_per_switch", "seed"},
}


def _check_fixture(case_id: str, fixture: Any) -> dict:
    if not isinstance(fixture, dict):
        raise SuiteDefectError(f"case {case_id}: fixture must be an object")
    if "path" in fixture:
        if set(fixture) != {"path"}:
            raise SuiteDefectError(f"case {case_id}: path fixture takes no other keys")
        return fixture
    gen = fixture.get("generator")
    wanted = _FIXTURE_GENERATORS.get(gen)
    if wanted is None:
        raise SuiteDefectError(f"case {case_id}: unknown fixture generator {gen!r}")
    missing = wanted - set(fixture)
    extra = set(fixture) - wanted - {"generator"}
    if missing or extra:
        raise SuiteDefectError(
            f"case {case_id}: fixture fields off (missing {sorted(missing)}, "
            f"extra {sorted(extra)})"
        )
    for key in wanted:
        if not isinstance(fixture[key], int) or isinstance(fixture[key], bool):
            raise SuiteDefectError(f"case {case_id}: fixture {key} must be an integer")
    return fixture


def load_suite(path: str) -> Suite:
    """Parse and validate a suite file; any schema defect is an error."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise SuiteDefectError(f"cannot read suite {path}: {exc}") from None
    except ValueError as exc:
        raise SuiteDefectError(f"suite {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SuiteDefectError(f"suite {path}: top level must be an object")
    if doc.get("version") != 1:
        raise SuiteDefectError(f"suite {path}: unsupported version {doc.get('version')!r}")
    application = Application.parse(doc.get("application", ""))
    raw_cases = doc.get("cases")
    if not isinstance(raw_cases, list) or not raw_cases:
        raise SuiteDefectError(f"suite {path}: cases must be a non-empty list")

    base = os.path.dirname(os.path.abspath(path))
    cases = []
    seen_ids: set[str] = set()
    for raw in raw_cases:
        if not isinstance(raw, dict):
            raise SuiteDefectError(f"suite {path}: every case must be an object")
        unknown = set(raw) - _CASE_KEYS
        if unknown:
            raise SuiteDefectError(
                f"case {raw.get('id', '?')}: unknown keys {sorted(unknown)}"
            )
        case_id = raw.get("id", "")
        if case_id in seen_ids:
            raise SuiteDefectError(f"duplicate case id {case_id!r}")
        seen_ids.add(case_id)

        golden: dict[ExecBackendKind, str] = {}
        for backend_name, rel in (raw.get("golden") or {}).items():
            backend = ExecBackendKind.parse(backend_name)
            program = os.path.join(base, rel)
            if not os.path.isfile(program):
                raise SuiteDefectError(
                    f"case {case_id}: golden program missing: {rel}"
                )
            golden[backend] = program

        validator = raw.get("validator")
        if validator is not None:
            validator = os.path.join(base, validator)
            if not os.path.isfile(validator):
                raise SuiteDefectError(f"case {case_id}: validator missing")

        fixture = _check_fixture(case_id, raw.get("fixture"))
        if "path" in fixture:
            resolved = os.path.join(base, fixture["path"])
            if not os.path.isfile(resolved):
                raise SuiteDefectError(f"case {case_id}: fixture file missing")
            fixture = {"path": resolved}

        for flag in ("ordered", "mutating"):
            if flag in raw and not isinstance(raw[flag], bool):
                raise SuiteDefectError(f"case {case_id}: {flag} must be boolean")

        cases.append(
            BenchmarkCase(
                id=case_id,
                application=application,
                difficulty=Difficulty.parse(raw.get("difficulty", "")),
                query=raw.get("query", ""),
                fixture=fixture,
                golden_programs=golden,
                ordered=raw.get("ordered", False),
                mutating=raw.get("mutating", False),
                validator=validator,
            )
        )
    return Suite(application=application, cases=tuple(cases), path=os.path.abspath(path))


_fixture_cache: dict[str, PropertyGraph] = {}
_fixture_lock = threading.Lock()


def fixture_graph(case: BenchmarkCase) -> PropertyGraph:
    """Materialize the case's input graph (cached; treat the result as read-only)."""
    key = json.dumps(case.fixture, sort_keys=True)
    with _fixture_lock:
        cached = _fixture_cache.get(key)
    if cached is not None:
        return cached
    fx = case.fixture
    if "path" in fx:
        with open(fx["path"], "r", encoding="utf-8") as f:
            g = load_graph(f.read())
    elif fx["generator"] == "traffic":
        g = generate_traffic_graph(fx["nodes"], fx["edges"], seed=fx["seed"])
    else:
        g = generate_malt(
            fx["chassis"],
            fx["switches_per_chassis"],
            fx["ports_per_switch"],
            seed=fx["seed"],
        )
    with _fixture_lock:
        _fixture_cache[key] = g
    return g


# --- value comparison ---


def _cell_eq(a: Any, b: Any, tol: float) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_cell_eq(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return set(a) == set(b) and all(_cell_eq(v, b[k], tol) for k, v in a.items())
    return type(a) is type(b) and a == b


def _multiset_eq(xs: list, ys: list, tol: float) -> bool:
    # tolerance-aware greedy matching; quadratic but benchmark rows are small
    if len(xs) != len(ys):
        return False
    unused = list(ys)
    for x in xs:
        for i, y in enumerate(unused):
            if _cell_eq(x, y, tol):
                del unused[i]
                break
        else:
            return False
    return True


def compare_values(
    candidate: ResultEnvelope,
    golden: ResultEnvelope,
    tol: float = 1e-6,
    ordered: bool = False,
) -> bool:
    """Kind-compatible comparison of the value halves; incomparable kinds are unequal."""
    if candidate.kind != golden.kind:
        return False
    if candidate.kind == "none":
        return True
    if candidate.kind == "scalar":
        return _cell_eq(candidate.value, golden.value, tol)
    if candidate.kind == "list":
        if ordered:
            return _cell_eq(candidate.value, golden.value, tol)
        return _multiset_eq(candidate.value, golden.value, tol)
    # tables: same column set, rows as maps (empty tables have no columns)
    if (candidate.columns() or frozenset()) != (golden.columns() or frozenset()):
        return False
    if ordered:
        return _cell_eq(candidate.value, golden.value, tol)
    return _multiset_eq(candidate.value, golden.value, tol)


# --- failure classification ---

_QUOTED = re.compile(r"['\"]([^'\"]*)['\"]")
_NO_SUCH_COLUMN = re.compile(r"no such column:?\s*\"?([\w.]+)", re.IGNORECASE)
_NO_SUCH_CALLABLE = re.compile(r"no such (table|function)", re.IGNORECASE)
_NAME_ERRORS = (
    "AttributeError",
    "NameError",
    "ImportError",
    "ModuleNotFoundError",
    "FileNotFoundError",
    "UnboundLocalError",
)
_ARGUMENT_WORDS = re.compile(r"argument|positional|keyword|not callable")


def _classify_runtime(message: str, schema_keys: Optional[frozenset]) -> ErrorClass:
    msg = message or ""
    head = msg.split(":", 1)[0].strip()

    column = _NO_SUCH_COLUMN.search(msg)
    if column:
        token = column.group(1).split(".")[-1]
        if schema_keys is None or token not in schema_keys:
            return ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE
        return ErrorClass.OPERATION_ERROR
    if head == "KeyError":
        quoted = _QUOTED.search(msg)
        if quoted and (schema_keys is None or quoted.group(1) not in schema_keys):
            return ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE
        return ErrorClass.OPERATION_ERROR
    if _NO_SUCH_CALLABLE.search(msg):
        return ErrorClass.IMAGINARY_FILE_OR_FUNCTION
    if head == "AttributeError":
        # a missing DataFrame/Series attribute is a hallucinated column,
        # not a hallucinated function
        tokens = _QUOTED.findall(msg)
        if (
            len(tokens) >= 2
            and tokens[0] in ("DataFrame", "Series")
            and (schema_keys is None or tokens[-1] not in schema_keys)
        ):
            return ErrorClass.IMAGINARY_GRAPH_ATTRIBUTE
        return ErrorClass.IMAGINARY_FILE_OR_FUNCTION
    if head in _NAME_ERRORS:
        return ErrorClass.IMAGINARY_FILE_OR_FUNCTION
    if head == "TypeError" and _ARGUMENT_WORDS.search(msg):
        return ErrorClass.ARGUMENTS_ERROR
    return ErrorClass.OPERATION_ERROR


def classify_error(
    outcome: Optional[ExecOutcome],
    mismatch: Optional[str] = None,
    *,
    schema_keys: Optional[frozenset] = None,
) -> ErrorClass:
    """Map a failed outcome (or a mismatch half) to exactly one error class.

    Rule order is fixed: execution phase first, then runtime-diagnostic
    heuristics, then mismatch kind. `schema_keys` is the set of attribute
    names that actually exist; None means the schema is unknown and any
    missing-key diagnostic counts as an imaginary attribute.
    """
    if outcome is not None and not outcome.passed:
        phase = outcome.failure_phase
        if phase is FailurePhase.SYNTAX:
            return ErrorClass.SYNTAX_ERROR
        if phase in (FailurePhase.TIMEOUT, FailurePhase.MEMORY):
            return ErrorClass.TIMEOUT
        if phase is FailurePhase.SANDBOX_VIOLATION:
            return ErrorClass.SANDBOX_VIOLATION
        if phase is FailurePhase.ENVELOPE_MALFORMED:
            return ErrorClass.ENVELOPE_MALFORMED
        if phase is FailurePhase.EXTRACTION:
            # no taxonomy row covers "no code block in the reply"
            return ErrorClass.OPERATION_ERROR
        return _classify_runtime(outcome.message, schema_keys)
    if mismatch == "value":
        return ErrorClass.WRONG_CALCULATION_LOGIC
    if mismatch == "graph":
        return ErrorClass.GRAPHS_NOT_IDENTICAL
    raise ParameterError("classify_error needs a failed outcome or a mismatch kind")


def schema_keys_for(g: PropertyGraph) -> frozenset:
    # id/src/dst are the reserved view columns every backend exposes
    return frozenset(g.node_attr_keys()) | frozenset(g.edge_attr_keys()) | {
        "id",
        "src",
        "dst",
    }


# --- verdicts ---


def _short(value: Any, cap: int = 160) -> str:
    text = repr(value)
    return text if len(text) <= cap else text[: cap - 1] + "…"


def _interpret_validator(envelope: ResultEnvelope) -> tuple[bool, str]:
    value = envelope.value
    if isinstance(value, bool):
        return value, ""
    if (
        isinstance(value, list)
        and len(value) == 2
        and isinstance(value[0], bool)
        and isinstance(value[1], str)
    ):
        return value[0], value[1]
    raise SuiteDefectError(
        f"validator must produce bool or [bool, reason], got {_short(value)}"
    )


def evaluate_outcome(
    candidate: ExecOutcome,
    golden: ExecOutcome,
    case: BenchmarkCase,
    tol: float = 1e-6,
    limits: SandboxLimits = SandboxLimits(),
) -> Verdict:
    """Judge a candidate outcome against the golden one.

    The value half is judged first (by the case validator when present,
    by envelope comparison otherwise), then the graph half.
    """
    if not golden.passed:
        raise SuiteDefectError(
            f"case {case.id}: golden program failed: {golden.message}"
        )
    g_input = fixture_graph(case)
    if not candidate.passed:
        return Verdict(
            passed=False,
            error_class=classify_error(candidate, schema_keys=schema_keys_for(g_input)),
            detail=candidate.message,
        )

    if case.validator is not None:
        with open(case.validator, "r", encoding="utf-8") as f:
            validator_code = f.read()
        vout = execute(
            validator_code,
            candidate.envelope.graph_after,
            ExecBackendKind.GRAPH_API,
            limits=limits,
            extras={
                "value": candidate.envelope.value,
                "kind": candidate.envelope.kind,
                "graph_input": json.loads(serialize_graph(g_input)),
            },
        )
        if not vout.passed:
            raise SuiteDefectError(
                f"case {case.id}: validator program failed: {vout.message}"
            )
        ok, reason = _interpret_validator(vout.envelope)
        if not ok:
            return Verdict(
                passed=False,
                error_class=ErrorClass.WRONG_CALCULATION_LOGIC,
                detail=f"validator rejected the answer: {reason}" if reason else
                "validator rejected the answer",
            )
    else:
        if not compare_values(candidate.envelope, golden.envelope, tol, case.ordered):
            return Verdict(
                passed=False,
                error_class=ErrorClass.WRONG_CALCULATION_LOGIC,
                detail=(
                    f"value mismatch: expected {golden.envelope.kind} "
                    f"{_short(golden.envelope.value)}, got {candidate.envelope.kind} "
                    f"{_short(candidate.envelope.value)}"
                ),
            )

    report = graph_equal(candidate.envelope.graph_after, golden.envelope.graph_after, tol)
    if not report.equal:
        return Verdict(
            passed=False,
            error_class=ErrorClass.GRAPHS_NOT_IDENTICAL,
            detail=f"graph state diverged: {report.first_difference}",
        )
    return Verdict(passed=True)


# --- golden execution (cached: same program on same fixture is deterministic) ---

_golden_cache: dict[tuple[str, str], ExecOutcome] = {}
_golden_lock = threading.Lock()

_GOLDEN_FALLBACK = (
    ExecBackendKind.GRAPH_API,
    ExecBackendKind.TABULAR,
    ExecBackendKind.RELATIONAL,
)


def golden_program_for(case: BenchmarkCase, backend: ExecBackendKind) -> tuple[ExecBackendKind, str]:
    """The golden program matching `backend`, falling back to a sibling backend.

    Cross-backend envelope consistency is a suite invariant, so a sibling
    golden judges a backend without one of its own (the direct-answer
    path always borrows one).
    """
    if backend in case.golden_programs:
        return backend, case.golden_programs[backend]
    for alt in _GOLDEN_FALLBACK:
        if alt in case.golden_programs:
            return alt, case.golden_programs[alt]
    raise SuiteDefectError(f"case {case.id}: no golden program available")


def golden_outcome(
    case: BenchmarkCase,
    backend: ExecBackendKind,
    limits: SandboxLimits = SandboxLimits(),
) -> ExecOutcome:
    golden_backend, path = golden_program_for(case, backend)
    key = (json.dumps(case.fixture, sort_keys=True), path)
    with _golden_lock:
        cached = _golden_cache.get(key)
    if cached is not None:
        return cached
    with open(path, "r", encoding="utf-8") as f:
        code = f.read()
    outcome = execute(code, fixture_graph(case), golden_backend, limits=limits)
    if not outcome.passed:
        raise SuiteDefectError(
            f"case {case.id}: golden program {os.path.basename(path)} failed "
            f"({outcome.failure_phase.value}): {outcome.message}"
        )
    with _golden_lock:
        _golden_cache[key] = outcome
    return outcome


# --- running one case ---


def _run_candidate(
    text: str,
    case: BenchmarkCase,
    backend: ExecBackendKind,
    limits: SandboxLimits,
) -> tuple[str, ExecOutcome]:
    """LLM reply text -> (code shown in the record, execution outcome)."""
    g = fixture_graph(case)
    if backend is ExecBackendKind.DIRECT_ANSWER:
        try:
            envelope = parse_direct_answer(text, g)
            return text, ExecOutcome.of_success(envelope)
        except EnvelopeError as exc:
            return text, ExecOutcome.of_failure(
                FailurePhase.ENVELOPE_MALFORMED, str(exc)
            )
    try:
        code = extract_code(text)
    except InputError as exc:
        return "", ExecOutcome.of_failure(FailurePhase.EXTRACTION, str(exc))
    return code, execute(code, g, backend, limits=limits)


def run_case(
    case: BenchmarkCase,
    backend: ExecBackendKind,
    model_cfg: ModelConfig,
    k: int,
    debug_budget: int,
    *,
    gateway: Gateway,
    limits: SandboxLimits = SandboxLimits(),
    tol: float = 1e-6,
) -> list[EvalRecord]:
    """Sample the model k times on one case; self-debug failed samples.

    Every attempt (including debug rounds) yields one record. Gateway
    errors become failed records rather than aborting the run; a golden
    failure is a suite defect and does abort.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if debug_budget < 0:
        raise ParameterError("debug budget cannot be negative")

    golden = golden_outcome(case, backend, limits)
    g = fixture_graph(case)

    def record(
        attempt: int,
        debug_round: int,
        code: str,
        outcome: Optional[ExecOutcome],
        verdict: Verdict,
        usage: Optional[Usage],
        latency: float,
    ) -> EvalRecord:
        return EvalRecord(
            case_id=case.id,
            backend=backend,
            model=model_cfg.name,
            attempt_index=attempt,
            debug_round=debug_round,
            code=code,
            outcome=outcome,
            verdict=verdict,
            usage=usage,
            cost=compute_cost(usage, model_cfg) if usage else Decimal(0),
            latency_s=latency,
            timestamp=time.time(),
        )

    try:
        if backend is ExecBackendKind.DIRECT_ANSWER:
            bundle = build_strawman_prompt(
                g, case.query, model_cfg.context_limit, case.application
            )
        else:
            ctx = build_task_context(case.application, g)
            bundle = build_codegen_prompt(ctx, case.query, backend)
    except ContextOverflowError as exc:
        # short-circuit: no model call is possible for this case at all
        verdict = Verdict(
            passed=False,
            error_class=ErrorClass.CONTEXT_OVERFLOW,
            detail=f"prompt needs ~{exc.estimated_tokens} tokens, "
            f"limit {exc.context_limit}",
        )
        return [record(0, 0, "", None, verdict, None, 0.0)]

    try:
        completions = gateway.complete(bundle, model_cfg, n=k)
    except ContextOverflowError as exc:
        verdict = Verdict(
            passed=False,
            error_class=ErrorClass.CONTEXT_OVERFLOW,
            detail=f"prompt needs ~{exc.estimated_tokens} tokens, "
            f"limit {exc.context_limit}",
        )
        return [record(0, 0, "", None, verdict, None, 0.0)]
    except (FixtureMissError, TransportError) as exc:
        verdict = Verdict(
            passed=False,
            error_class=ErrorClass.OPERATION_ERROR,
            detail=f"no completion from the model backend: {exc}",
        )
        return [record(0, 0, "", None, verdict, None, 0.0)]

    records: list[EvalRecord] = []
    for completion in completions:
        attempt = completion.attempt_index
        code, outcome = _run_candidate(completion.text, case, backend, limits)
        verdict = evaluate_outcome(outcome, golden, case, tol, limits)
        records.append(
            record(attempt, 0, code, outcome, verdict, completion.usage, completion.latency_s)
        )

        # self-debug needs an executable-code prior; the strawman path has none
        prior = bundle
        rounds = 0
        while (
            not verdict.passed
            and rounds < debug_budget
            and backend is not ExecBackendKind.DIRECT_ANSWER
        ):
            rounds += 1
            error_text = verdict.detail if outcome is None or outcome.passed else outcome.message
            try:
                debug_bundle = build_selfdebug_prompt(prior, code, error_text)
                reply = gateway.complete(debug_bundle, model_cfg, n=1)[0]
            except ContextOverflowError as exc:
                verdict = Verdict(
                    passed=False,
                    error_class=ErrorClass.CONTEXT_OVERFLOW,
                    detail=f"debug prompt needs ~{exc.estimated_tokens} tokens, "
                    f"limit {exc.context_limit}",
                )
                records.append(record(attempt, rounds, code, None, verdict, None, 0.0))
                break
            except (FixtureMissError, TransportError) as exc:
                verdict = Verdict(
                    passed=False,
                    error_class=ErrorClass.OPERATION_ERROR,
                    detail=f"no completion from the model backend: {exc}",
                )
                records.append(record(attempt, rounds, code, None, verdict, None, 0.0))
                break
            code, outcome = _run_candidate(reply.text, case, backend, limits)
            verdict = evaluate_outcome(outcome, golden, case, tol, limits)
            records.append(
                record(attempt, rounds, code, outcome, verdict, reply.usage, reply.latency_s)
            )
            prior = debug_bundle
    return records


def aggregate_pass_at_k(records: list[EvalRecord]) -> tuple[bool, float]:
    """(pass-at-k, average passing probability) over one case/backend/model.

    Samples are independent chains keyed by attempt index; a chain passes
    when any of its rounds passes.
    """
    if not records:
        raise ParameterError("cannot aggregate an empty record list")
    chains: dict[int, bool] = {}
    for r in records:
        chains[r.attempt_index] = chains.get(r.attempt_index, False) or r.verdict.passed
    passes = sum(1 for ok in chains.values() if ok)
    return passes > 0, passes / len(chains)
