"""Uniform model access: a live HTTP chat backend plus record/replay.

Replay keys are sha256 digests of the bundle's canonical rendering, so
editing a prompt template deliberately invalidates stale fixtures. A
fixture miss is always an error; the gateway never fabricates output.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from typing import Optional, Protocol

from .errors import (
    AuthError,
    ConfigError,
    ContextOverflowError,
    FixtureMissError,
    FixtureParseError,
    ParameterError,
    RateLimitedError,
    TransportError,
)
from .prompting import PromptBundle, estimate_tokens

DEFAULT_CREDENTIAL_ENV = "NLNETOPS_LLM_KEY"
MODELS_CONFIG_ENV = "NLNETOPS_MODELS_CONFIG"


@dataclass(frozen=True)
class ModelConfig:
    name: str
    endpoint: str
    temperature: float
    max_output_tokens: int
    context_limit: int
    input_rate_per_1k: Decimal
    output_rate_per_1k: Decimal
    credential_env: str = DEFAULT_CREDENTIAL_ENV

    def __post_init__(self) -> None:
        if not 0 <= self.temperature <= 2:
            raise ConfigError(f"model {self.name}: temperature out of [0, 2]")
        if self.context_limit <= 0:
            raise ConfigError(f"model {self.name}: context limit must be positive")
        if self.input_rate_per_1k < 0 or self.output_rate_per_1k < 0:
            raise ConfigError(f"model {self.name}: pricing rates must be non-negative")
        if self.max_output_tokens <= 0:
            raise ConfigError(f"model {self.name}: max output tokens must be positive")


@dataclass(frozen=True)
class Usage:
    tokens_in: int
    tokens_out: int

    def __post_init__(self) -> None:
        if self.tokens_in < 0 or self.tokens_out < 0:
            raise ParameterError("token counts cannot be negative")


@dataclass(frozen=True)
class Completion:
    text: str
    usage: Usage
    latency_s: float
    attempt_index: int


def bundle_key(bundle: PromptBundle) -> str:
    return hashlib.sha256(bundle.canonical_rendering().encode("utf-8")).hexdigest()


class CompletionBackend(Protocol):
    def complete(self, bundle: PromptBundle, cfg: ModelConfig, n: int) -> list[Completion]: ...


class ReplayBackend:
    """Answers from a recorded fixture file; misses are errors."""

    def __init__(self, records: dict[tuple[str, int], dict]):
        self._records = records

    @classmethod
    def load(cls, path: str) -> "ReplayBackend":
        records: dict[tuple[str, int], dict] = {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                    except ValueError as exc:
                        raise FixtureParseError(f"{path}:{lineno}: not valid JSON: {exc}") from None
                    missing = {"key", "attempt", "text", "tokens_in", "tokens_out"} - set(rec)
                    if missing:
                        raise FixtureParseError(
                            f"{path}:{lineno}: record lacks fields {sorted(missing)}"
                        )
                    slot = (rec["key"], rec["attempt"])
                    if slot in records:
                        raise FixtureParseError(
                            f"{path}:{lineno}: duplicate record for key {rec['key'][:12]}… "
                            f"attempt {rec['attempt']}"
                        )
                    records[slot] = rec
        except OSError as exc:
            raise FixtureParseError(f"cannot read fixture {path}: {exc}") from None
        return cls(records)

    def complete(self, bundle: PromptBundle, cfg: ModelConfig, n: int) -> list[Completion]:
        key = bundle_key(bundle)
        completions = []
        for i in range(n):
            rec = self._records.get((key, i))
            if rec is None:
                raise FixtureMissError(key, i)
            completions.append(
                Completion(
                    text=rec["text"],
                    usage=Usage(rec["tokens_in"], rec["tokens_out"]),
                    latency_s=0.0,
                    attempt_index=i,
                )
            )
        return completions


class RecordingBackend:
    """Wraps a live backend and appends its responses to a fixture file."""

    def __init__(self, inner: CompletionBackend, path: str):
        self._inner = inner
        self._path = path
        self._lock = threading.Lock()
        self._seen: set[tuple[str, int]] = set()

    def complete(self, bundle: PromptBundle, cfg: ModelConfig, n: int) -> list[Completion]:
        completions = self._inner.complete(bundle, cfg, n)
        key = bundle_key(bundle)
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as f:
                for c in completions:
                    slot = (key, c.attempt_index)
                    if slot in self._seen:
                        continue
                    self._seen.add(slot)
                    f.write(
                        json.dumps(
                            {
                                "key": key,
                                "attempt": c.attempt_index,
                                "text": c.text,
                                "tokens_in": c.usage.tokens_in,
                                "tokens_out": c.usage.tokens_out,
                            },
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
        return completions


class PerModelBackend:
    """Routes each call to the backend registered for the model's name."""

    def __init__(self, backends: dict[str, CompletionBackend]):
        self._backends = backends

    def complete(self, bundle: PromptBundle, cfg: ModelConfig, n: int) -> list[Completion]:
        backend = self._backends.get(cfg.name)
        if backend is None:
            raise ConfigError(f"no backend configured for model {cfg.name}")
        return backend.complete(bundle, cfg, n)


def replay_backend_for_path(path: str) -> CompletionBackend:
    """A fixture file replays directly; a directory maps <model>.jsonl files."""
    if os.path.isdir(path):
        backends: dict[str, CompletionBackend] = {}
        for entry in sorted(os.listdir(path)):
            if entry.endswith(".jsonl"):
                backends[entry[: -len(".jsonl")]] = ReplayBackend.load(
                    os.path.join(path, entry)
                )
        if not backends:
            raise FixtureParseError(f"no .jsonl fixture files in {path}")
        return PerModelBackend(backends)
    return ReplayBackend.load(path)


class HttpChatBackend:
    """Chat-completions over HTTP. One request per sample, bounded retries."""

    MAX_TRANSPORT_ATTEMPTS = 3

    def __init__(self, session=None, backoff_s: float = 0.5):
        self._session = session
        self._backoff_s = backoff_s

    def _post(self, cfg: ModelConfig, payload: dict) -> dict:
        import requests

        session = self._session or requests
        key = os.environ.get(cfg.credential_env, "")
        if not key:
            raise AuthError(
                f"no credential in ${cfg.credential_env} for model {cfg.name}"
            )
        headers = {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}
        last_exc: Optional[Exception] = None
        for attempt in range(self.MAX_TRANSPORT_ATTEMPTS):
            try:
                resp = session.post(cfg.endpoint, json=payload, headers=headers, timeout=120)
            except requests.RequestException as exc:
                last_exc = exc
                time.sleep(self._backoff_s * (2**attempt))
                continue
            if resp.status_code == 429:
                raise RateLimitedError(f"model {cfg.name} rate-limited the request")
            if resp.status_code in (401, 403):
                raise AuthError(f"credential rejected for model {cfg.name}")
            if resp.status_code >= 500:
                last_exc = TransportError(f"server error {resp.status_code}")
                time.sleep(self._backoff_s * (2**attempt))
                continue
            if resp.status_code != 200:
                raise TransportError(
                    f"unexpected status {resp.status_code} from {cfg.endpoint}"
                )
            return resp.json()
        raise TransportError(f"transport failed after retries: {last_exc}")

    def complete(self, bundle: PromptBundle, cfg: ModelConfig, n: int) -> list[Completion]:
        completions = []
        prompt_text = "".join(m.content for m in bundle.messages)
        for i in range(n):
            payload = {
                "model": cfg.name,
                "messages": [
                    {"role": m.role, "content": m.content} for m in bundle.messages
                ],
                "temperature": cfg.temperature,
                "max_tokens": cfg.max_output_tokens,
            }
            started = time.monotonic()
            doc = self._post(cfg, payload)
            latency = time.monotonic() - started
            try:
                text = doc["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError):
                raise TransportError("response lacks choices[0].message.content") from None
            usage_doc = doc.get("usage") or {}
            usage = Usage(
                tokens_in=int(usage_doc.get("prompt_tokens", estimate_tokens(prompt_text))),
                tokens_out=int(usage_doc.get("completion_tokens", estimate_tokens(text))),
            )
            completions.append(
                Completion(text=text, usage=usage, latency_s=latency, attempt_index=i)
            )
        return completions


class Gateway:
    """Front door for completions: overflow guard plus per-model concurrency cap."""

    def __init__(self, backend: CompletionBackend, max_concurrent_per_model: int = 4):
        if max_concurrent_per_model < 1:
            raise ConfigError("per-model concurrency cap must be at least 1")
        self._backend = backend
        self._cap = max_concurrent_per_model
        self._sems: dict[str, threading.BoundedSemaphore] = {}
        self._sems_lock = threading.Lock()

    def _semaphore(self, model: str) -> threading.BoundedSemaphore:
        with self._sems_lock:
            if model not in self._sems:
                self._sems[model] = threading.BoundedSemaphore(self._cap)
            return self._sems[model]

    def complete(self, bundle: PromptBundle, cfg: ModelConfig, n: int = 1) -> list[Completion]:
        if n < 1:
            raise ParameterError("sample count must be at least 1")
        if bundle.estimated_tokens > cfg.context_limit:
            # enforced before any network activity
            raise ContextOverflowError(bundle.estimated_tokens, cfg.context_limit)
        with self._semaphore(cfg.name):
            completions = self._backend.complete(bundle, cfg, n)
        if len(completions) != n:
            raise TransportError(
                f"backend returned {len(completions)} completions, wanted {n}"
            )
        for i, c in enumerate(completions):
            if c.attempt_index != i:
                raise TransportError("completions out of attempt order")
        return completions


def compute_cost(usage: Usage, cfg: ModelConfig) -> Decimal:
    """Exact decimal arithmetic: tokens/1000 times the per-1k rates."""
    return (
        Decimal(usage.tokens_in) * cfg.input_rate_per_1k
        + Decimal(usage.tokens_out) * cfg.output_rate_per_1k
    ) / Decimal(1000)


def _parse_model(name: str, doc: dict) -> ModelConfig:
    try:
        pricing = doc["pricing"]
        return ModelConfig(
            name=name,
            endpoint=doc["endpoint"],
            temperature=float(doc.get("temperature", 0.0)),
            max_output_tokens=int(doc.get("max_output_tokens", 1024)),
            context_limit=int(doc["context_limit"]),
            input_rate_per_1k=Decimal(str(pricing["input_per_1k"])),
            output_rate_per_1k=Decimal(str(pricing["output_per_1k"])),
            credential_env=doc.get("credential_env", DEFAULT_CREDENTIAL_ENV),
        )
    except KeyError as exc:
        raise ConfigError(f"model {name}: missing field {exc}") from None


def load_models_config(path: Optional[str] = None) -> dict[str, ModelConfig]:
    """Load model configs from `path`, $NLNETOPS_MODELS_CONFIG, or the packaged default."""
    if path is None:
        path = os.environ.get(MODELS_CONFIG_ENV)
    if path is None:
        text = (
            resources.files("nlnetops").joinpath("configs/models.json").read_text("utf-8")
        )
    else:
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(f"cannot read models config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ConfigError(f"models config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("models"), dict):
        raise ConfigError("models config must be an object with a 'models' map")
    return {name: _parse_model(name, body) for name, body in doc["models"].items()}
