"""Interactive query service: sessions, previewed attempts, approve/reject.

Each session owns a network graph. An operator submits a natural-language
query; the service generates code, runs it in the sandbox against the
session's current graph, and parks the result as a *pending* attempt with
a diff preview. The current graph changes only when the operator approves.
Failed attempts can be retried through the self-debug prompt chain.

Sessions live on disk under ``state_dir`` and survive restarts. Requests
within one session are serialized by a per-session lock; different
sessions proceed concurrently.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    AuthError,
    ContextOverflowError,
    EnvelopeError,
    FixtureMissError,
    GraphParseError,
    GraphValidationError,
    InputError,
    NlnetopsError,
    ParameterError,
    RateLimitedError,
    TransportError,
)
from .evaluating import (
    ErrorClass,
    classify_error,
    extract_code,
    parse_direct_answer,
    schema_keys_for,
)
from .gateway import (
    CompletionBackend,
    Gateway,
    ModelConfig,
    load_models_config,
)
from .graphs import (
    DiffSummary,
    MaltSchema,
    PropertyGraph,
    generate_malt,
    generate_traffic_graph,
    graph_diff,
    load_graph,
    serialize_graph,
)
from .prompting import (
    Application,
    Message,
    PromptBundle,
    build_codegen_prompt,
    build_selfdebug_prompt,
    build_strawman_prompt,
    build_task_context,
)
from .sandbox import (
    ExecBackendKind,
    ExecOutcome,
    FailurePhase,
    SandboxLimits,
    execute,
)

DEFAULT_DEBUG_BUDGET = 3

PENDING = "pending"
APPROVED = "approved"
REJECTED = "rejected"
FAILED = "failed"


class _ApiError(NlnetopsError):
    """Carries an HTTP status (and optional extra body fields) with the message."""

    def __init__(self, status_code: int, message: str, payload: Optional[dict] = None):
        super().__init__(message)
        self.status_code = status_code
        self.payload = payload or {}


def _not_found(what: str) -> _ApiError:
    return _ApiError(404, what)


def _conflict(what: str) -> _ApiError:
    return _ApiError(409, what)


def _invalid(what: str) -> _ApiError:
    return _ApiError(422, what)




# --- request bodies ---


class CreateSessionBody(BaseModel):
    application: str
    graph: Optional[dict] = None
    generator: Optional[dict] = None


class QueryBody(BaseModel):
    text: str
    backend: str
    model: str


class DecisionBody(BaseModel):
    decision: str


# --- session store ---


@dataclass
class _SessionHandle:
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """On-disk session documents plus an append-only feedback log.

    The document on disk is the source of truth; every mutation rewrites
    it atomically after the new state is fully computed, so a crash or a
    sandbox failure mid-request leaves the previous state intact.
    """

    def __init__(self, root: str):
        self.root = Path(root)
        self.sessions_dir = self.root / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.feedback_path = self.root / "feedback.jsonl"
        self._registry_lock = threading.Lock()
        self._handles: dict[str, _SessionHandle] = {}
        self._feedback_lock = threading.Lock()

    def handle(self, session_id: str) -> _SessionHandle:
        with self._registry_lock:
            h = self._handles.get(session_id)
            if h is None:
                h = self._handles[session_id] = _SessionHandle()
            return h

    def _path(self, session_id: str) -> Path:
        # ids are generated by us; reject anything that could escape the dir
        if not session_id.isalnum():
            raise _not_found(f"no session {session_id!r}")
        return self.sessions_dir / f"{session_id}.json"

    def create(self, doc: dict) -> None:
        self._write(doc)

    def load(self, session_id: str) -> dict:
        path = self._path(session_id)
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError:
            raise _not_found(f"no session {session_id!r}") from None

    def _write(self, doc: dict) -> None:
        path = self._path(doc["id"])
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(doc, f, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)

    def save(self, doc: dict) -> None:
        self._write(doc)

    def append_feedback(self, entry: dict) -> None:
        with self._feedback_lock:
            with open(self.feedback_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, sort_keys=True) + "\n")


# --- attempt documents ---

_PRIVATE_KEYS = ("bundle", "graph_after")


def _public_attempt(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k not in _PRIVATE_KEYS}


def _bundle_to_doc(bundle: PromptBundle) -> dict:
    return {
        "messages": [{"role": m.role, "content": m.content} for m in bundle.messages],
        "backend": bundle.backend.value,
        "estimated_tokens": bundle.estimated_tokens,
        "application": bundle.application.value,
        "purpose": bundle.purpose,
    }


def _bundle_from_doc(doc: dict) -> PromptBundle:
    return PromptBundle(
        messages=tuple(Message(m["role"], m["content"]) for m in doc["messages"]),
        backend=ExecBackendKind.parse(doc["backend"]),
        estimated_tokens=doc["estimated_tokens"],
        application=Application(doc["application"]),
        purpose=doc["purpose"],
    )


def _diff_to_doc(diff: DiffSummary) -> dict:
    return {
        "added_nodes": diff.added_nodes,
        "removed_nodes": diff.removed_nodes,
        "changed_nodes": diff.changed_nodes,
        "added_edges": diff.added_edges,
        "removed_edges": diff.removed_edges,
        "changed_edges": diff.changed_edges,
        "items": diff.items,
        "truncated": diff.truncated,
    }


def _envelope_preview(envelope, graph_doc: dict) -> dict:
    # graph_after rides along while the attempt awaits review; decide() drops
    # it so finalized history stays light
    return {"kind": envelope.kind, "value": envelope.value, "graph_after": graph_doc}


class SessionService:
    """The operations behind the HTTP surface, one method per endpoint."""

    def __init__(
        self,
        store: SessionStore,
        gateway: Gateway,
        models: dict[str, ModelConfig],
        limits: SandboxLimits = SandboxLimits(),
        debug_budget: int = DEFAULT_DEBUG_BUDGET,
    ):
        self.store = store
        self.gateway = gateway
        self.models = models
        self.limits = limits
        self.debug_budget = debug_budget

    # -- create --

    def create_session(self, body: CreateSessionBody) -> dict:
        try:
            app = Application(body.application)
        except ValueError:
            raise _invalid(f"unknown application {body.application!r}") from None
        if (body.graph is None) == (body.generator is None):
            raise _invalid("provide exactly one of 'graph' or 'generator'")
        try:
            g = self._materialize(app, body)
        except (GraphParseError, GraphValidationError, ParameterError, KeyError, TypeError) as exc:
            raise _invalid(f"bad graph for {app.value}: {exc}") from exc

        doc = {
            "version": 1,
            "id": secrets.token_hex(16),
            "application": app.value,
            "graph": json.loads(serialize_graph(g)),
            "graph_version": 0,
            "next_attempt": 1,
            "history": [],
        }
        self.store.create(doc)
        return {"session_id": doc["id"]}

    def _materialize(self, app: Application, body: CreateSessionBody) -> PropertyGraph:
        schema = MaltSchema() if app is Application.MALT else None
        if body.graph is not None:
            return load_graph(json.dumps(body.graph), schema=schema)
        spec = dict(body.generator or {})
        kind = spec.pop("generator", app.value)
        if kind == "traffic" and app is Application.TRAFFIC_ANALYSIS:
            return generate_traffic_graph(
                spec["nodes"], spec["edges"], seed=spec.get("seed", 0)
            )
        if kind == "malt" and app is Application.MALT:
            return generate_malt(
                spec["chassis"],
                spec["switches_per_chassis"],
                spec["ports_per_switch"],
                seed=spec.get("seed", 0),
            )
        raise ParameterError(f"generator {kind!r} does not fit application {app.value!r}")

    # -- query --

    def submit_query(self, session_id: str, body: QueryBody) -> dict:
        if not body.text.strip():
            raise _invalid("query text is empty")
        try:
            backend = ExecBackendKind.parse(body.backend)
        except ParameterError as exc:
            raise _invalid(str(exc)) from exc
        cfg = self.models.get(body.model)
        if cfg is None:
            raise _invalid(
                f"unknown model {body.model!r}; configured: {', '.join(sorted(self.models))}"
            )

        handle = self.store.handle(session_id)
        with handle.lock:
            doc = self.store.load(session_id)
            if any(a["status"] == PENDING for a in doc["history"]):
                raise _conflict("an attempt is already pending; decide it first")

            app = Application(doc["application"])
            g = load_graph(json.dumps(doc["graph"]))
            attempt = self._attempt_skeleton(doc, body.text, backend, cfg.name)

            bundle, overflow = self._build_bundle(app, g, body.text, backend, cfg)
            if overflow is not None:
                self._finish_failed(attempt, None, overflow)
            else:
                attempt["bundle"] = _bundle_to_doc(bundle)
                reply = self._complete_or_record(doc, attempt, bundle, cfg)
                self._run_reply(attempt, reply, g, backend, app)

            doc["history"].append(attempt)
            self.store.save(doc)
            return _public_attempt(attempt)

    @staticmethod
    def _schema_for(app: Application):
        return MaltSchema() if app is Application.MALT else None

    def _attempt_skeleton(
        self, doc: dict, text: str, backend: ExecBackendKind, model: str
    ) -> dict:
        attempt_id = f"a{doc['next_attempt']}"
        doc["next_attempt"] += 1
        return {
            "attempt_id": attempt_id,
            "query": text,
            "backend": backend.value,
            "model": model,
            "debug_round": 0,
            "parent": None,
            "code": "",
            "envelope": None,
            "diff": None,
            "status": PENDING,
            "diagnostics": None,
            "created": time.time(),
        }

    def _build_bundle(
        self,
        app: Application,
        g: PropertyGraph,
        text: str,
        backend: ExecBackendKind,
        cfg: ModelConfig,
    ):
        try:
            if backend is ExecBackendKind.DIRECT_ANSWER:
                bundle = build_strawman_prompt(g, text, cfg.context_limit, app)
            else:
                ctx = build_task_context(app, g)
                bundle = build_codegen_prompt(ctx, text, backend)
            if bundle.estimated_tokens > cfg.context_limit:
                raise ContextOverflowError(
                    f"prompt needs ~{bundle.estimated_tokens} tokens;"
                    f" {cfg.name} holds {cfg.context_limit}"
                )
        except ContextOverflowError as exc:
            return None, str(exc)
        return bundle, None

    def _complete_or_record(
        self, doc: dict, attempt: dict, bundle: PromptBundle, cfg: ModelConfig
    ) -> str:
        """One sample from the model; a gateway failure becomes a recorded
        failed attempt surfaced as 502 (the body carries the attempt)."""
        try:
            return self.gateway.complete(bundle, cfg, n=1)[0].text
        except (TransportError, AuthError, RateLimitedError, FixtureMissError) as exc:
            message = f"model backend failed: {exc}"
            self._finish_failed(attempt, ErrorClass.OPERATION_ERROR.value, message)
            doc["history"].append(attempt)
            self.store.save(doc)
            raise _ApiError(
                502, message, payload={"attempt": _public_attempt(attempt)}
            ) from exc

    def _run_reply(
        self,
        attempt: dict,
        reply: str,
        g: PropertyGraph,
        backend: ExecBackendKind,
        app: Application,
    ) -> None:
        """Execute the model reply; fill the attempt in place."""
        if backend is ExecBackendKind.DIRECT_ANSWER:
            attempt["code"] = reply
            try:
                envelope = parse_direct_answer(reply, g)
                outcome = ExecOutcome.of_success(envelope)
            except EnvelopeError as exc:
                outcome = ExecOutcome.of_failure(FailurePhase.ENVELOPE_MALFORMED, str(exc))
        else:
            try:
                attempt["code"] = extract_code(reply)
            except InputError as exc:
                attempt["code"] = ""
                outcome = ExecOutcome.of_failure(FailurePhase.EXTRACTION, str(exc))
            else:
                outcome = execute(attempt["code"], g, backend, limits=self.limits)

        if outcome.passed:
            after = outcome.envelope.graph_after
            schema = self._schema_for(app)
            if schema is not None:
                try:
                    schema.validate(after)
                except GraphValidationError as exc:
                    # an approvable graph must stay schema-valid
                    self._finish_failed(
                        attempt,
                        ErrorClass.WRONG_CALCULATION_LOGIC.value,
                        f"result graph violates the {app.value} schema: {exc}",
                    )
                    return
            after_doc = json.loads(serialize_graph(after))
            attempt["envelope"] = _envelope_preview(outcome.envelope, after_doc)
            attempt["diff"] = _diff_to_doc(graph_diff(g, after))
            attempt["graph_after"] = after_doc
            attempt["status"] = PENDING
        else:
            self._finish_failed(
                attempt,
                classify_error(outcome, schema_keys=schema_keys_for(g)).value,
                outcome.message,
            )

    @staticmethod
    def _finish_failed(attempt: dict, error_class: Optional[str], message: str) -> None:
        attempt["status"] = FAILED
        attempt["diagnostics"] = {
            "error_class": error_class if error_class is not None else "ContextOverflow",
            "message": message,
        }

    # -- decide --

    def decide(self, session_id: str, attempt_id: str, body: DecisionBody) -> dict:
        if body.decision not in ("approve", "reject"):
            raise _invalid(f"decision must be 'approve' or 'reject', got {body.decision!r}")
        handle = self.store.handle(session_id)
        with handle.lock:
            doc = self.store.load(session_id)
            attempt = self._find_attempt(doc, attempt_id)
            if attempt["status"] != PENDING:
                raise _conflict(f"attempt {attempt_id} is {attempt['status']}, not pending")

            if body.decision == "approve":
                doc["graph"] = attempt["graph_after"]
                doc["graph_version"] += 1
                attempt["status"] = APPROVED
            else:
                attempt["status"] = REJECTED
            attempt.pop("graph_after", None)
            attempt.pop("bundle", None)
            if attempt["envelope"] is not None:
                attempt["envelope"].pop("graph_after", None)
            self.store.save(doc)
            self.store.append_feedback(
                {
                    "session_id": session_id,
                    "attempt_id": attempt_id,
                    "query": attempt["query"],
                    "backend": attempt["backend"],
                    "model": attempt["model"],
                    "code": attempt["code"],
                    "status": attempt["status"],
                    "decided": time.time(),
                }
            )
            return {"status": attempt["status"], "graph_version": doc["graph_version"]}

    # -- debug --

    def retry_with_debug(self, session_id: str, attempt_id: str) -> dict:
        handle = self.store.handle(session_id)
        with handle.lock:
            doc = self.store.load(session_id)
            prior = self._find_attempt(doc, attempt_id)
            if prior["status"] != FAILED:
                raise _conflict(f"attempt {attempt_id} is {prior['status']}, not failed")
            backend = ExecBackendKind.parse(prior["backend"])
            if backend is ExecBackendKind.DIRECT_ANSWER:
                raise _invalid("direct-answer attempts have no code to debug")
            if prior.get("bundle") is None:
                # overflow attempts never reached the model; nothing to extend
                raise _conflict(f"attempt {attempt_id} has no prompt to extend")

            app = Application(doc["application"])
            g = load_graph(json.dumps(doc["graph"]))
            cfg = self.models.get(prior["model"])
            if cfg is None:
                raise _invalid(f"model {prior['model']!r} is no longer configured")
            attempt = self._attempt_skeleton(doc, prior["query"], backend, prior["model"])
            attempt["debug_round"] = prior["debug_round"] + 1
            attempt["parent"] = attempt_id

            if attempt["debug_round"] > self.debug_budget:
                self._finish_failed(
                    attempt,
                    prior["diagnostics"]["error_class"],
                    f"self-debug budget of {self.debug_budget} exhausted",
                )
                attempt["diagnostics"]["budget_exhausted"] = True
            else:
                bundle = build_selfdebug_prompt(
                    _bundle_from_doc(prior["bundle"]),
                    prior["code"],
                    prior["diagnostics"]["message"],
                )
                if bundle.estimated_tokens > cfg.context_limit:
                    self._finish_failed(
                        attempt, "ContextOverflow",
                        f"debug prompt needs ~{bundle.estimated_tokens} tokens;"
                        f" {cfg.name} holds {cfg.context_limit}",
                    )
                else:
                    attempt["bundle"] = _bundle_to_doc(bundle)
                    reply = self._complete_or_record(doc, attempt, bundle, cfg)
                    self._run_reply(attempt, reply, g, backend, app)

            doc["history"].append(attempt)
            self.store.save(doc)
            return _public_attempt(attempt)

    # -- reads --

    def get_graph(self, session_id: str) -> dict:
        handle = self.store.handle(session_id)
        with handle.lock:
            return self.store.load(session_id)["graph"]

    def get_history(self, session_id: str) -> list[dict]:
        handle = self.store.handle(session_id)
        with handle.lock:
            doc = self.store.load(session_id)
        return [_public_attempt(a) for a in doc["history"]]

    def get_config(self) -> dict:
        return {
            "applications": [a.value for a in Application],
            "backends": [b.value for b in ExecBackendKind],
            "models": sorted(self.models),
        }

    @staticmethod
    def _find_attempt(doc: dict, attempt_id: str) -> dict:
        for attempt in doc["history"]:
            if attempt["attempt_id"] == attempt_id:
                return attempt
        raise _not_found(f"no attempt {attempt_id!r} in session {doc['id']}")


def create_app(
    state_dir: str,
    backend: Optional[CompletionBackend] = None,
    limits: SandboxLimits = SandboxLimits(),
    debug_budget: int = DEFAULT_DEBUG_BUDGET,
) -> FastAPI:
    """Wire the service over `state_dir`; live HTTP backend unless given one."""
    if backend is None:
        from .gateway import HttpChatBackend

        backend = HttpChatBackend()
    service = SessionService(
        store=SessionStore(state_dir),
        gateway=Gateway(backend),
        models=load_models_config(),
        limits=limits,
        debug_budget=debug_budget,
    )
    app = FastAPI(title="nlnetops service", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(_ApiError)
    async def _api_error(_request, exc: _ApiError):
        return JSONResponse(
            status_code=exc.status_code, content={"detail": str(exc), **exc.payload}
        )

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody):
        return service.create_session(body)

    @app.post("/api/sessions/{session_id}/query")
    def submit_query(session_id: str, body: QueryBody):
        return service.submit_query(session_id, body)

    @app.post("/api/sessions/{session_id}/attempts/{attempt_id}/decision")
    def decide(session_id: str, attempt_id: str, body: DecisionBody):
        return service.decide(session_id, attempt_id, body)

    @app.post("/api/sessions/{session_id}/attempts/{attempt_id}/debug")
    def retry_with_debug(session_id: str, attempt_id: str):
        return service.retry_with_debug(session_id, attempt_id)

    @app.get("/api/sessions/{session_id}/graph")
    def get_graph(session_id: str):
        return service.get_graph(session_id)

    @app.get("/api/sessions/{session_id}/history")
    def get_history(session_id: str):
        return service.get_history(session_id)

    @app.get("/api/config")
    def get_config():
        return service.get_config()

    return app
