"""Prompt construction: task context, codegen/strawman/self-debug bundles.

Templates live as text files under nlnetops/prompts, one per
(application, backend, purpose), with ``{{name}}`` placeholders. Code-gen
prompts carry schema *keys* only, never node ids or attribute values, so
prompt size is independent of graph size and graph data stays private.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable

from .errors import ConfigError, ContextOverflowError, InputError, ParameterError
from .graphs import PropertyGraph, serialize_graph
from .sandbox import ExecBackendKind, program_contract

PURPOSE_CODEGEN = "codegen"
PURPOSE_STRAWMAN = "strawman"
PURPOSE_SELFDEBUG = "selfdebug"

ESTIMATOR_ID = "chars/4"


def estimate_tokens(text: str) -> int:
    """Default token estimator: ceil(len/4). Deterministic and monotone."""
    return math.ceil(len(text) / 4)


TokenEstimator = Callable[[str], int]


class Application(enum.Enum):
    TRAFFIC_ANALYSIS = "traffic"
    MALT = "malt"

    @classmethod
    def parse(cls, text: str) -> "Application":
        for member in cls:
            if member.value == text:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ParameterError(f"unknown application {text!r}; expected one of: {valid}")


@dataclass(frozen=True)
class Message:
    role: str  # system | user | assistant
    content: str


@dataclass(frozen=True)
class PromptBundle:
    messages: tuple[Message, ...]
    backend: ExecBackendKind
    estimated_tokens: int
    application: Application
    purpose: str

    def canonical_rendering(self) -> str:
        """Stable serialization used as the replay-fixture digest input."""
        payload = {
            "application": self.application.value,
            "backend": self.backend.value,
            "messages": [{"content": m.content, "role": m.role} for m in self.messages],
            "purpose": self.purpose,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))

    def first_user_content(self) -> str:
        for m in self.messages:
            if m.role == "user":
                return m.content
        raise ParameterError("bundle has no user message")


@dataclass(frozen=True)
class AppContext:
    """What the model is told about the network's shape, in prose."""

    application: Application
    schema_description: str
    conventions: str


_TRAFFIC_SCHEMA = (
    "The network is a directed communication graph. Every node is a host, "
    "keyed by its IPv4 address. Every edge is an observed traffic flow from "
    "one host to another."
)
_TRAFFIC_CONVENTIONS = (
    "Node ids are dotted IPv4 addresses; the first two octets of an address "
    "form its /16 prefix. Edge weights are cumulative counters: bytes "
    "(bytes transferred), connections (number of connections), packets "
    "(number of packets)."
)
_MALT_SCHEMA = (
    "The network is a typed topology graph for lifecycle management. Every "
    "node has a 'type' attribute, one of PACKET_SWITCH, CHASSIS, PORT, or "
    "CONTROL_POINT. Every directed edge has a 'kind' attribute: CONTAINS "
    "(the source physically contains the destination) or CONTROLS (the "
    "source is the control point of the destination)."
)
_MALT_CONVENTIONS = (
    "Ids are hierarchical: chassis 'ch1', packet switch 'ch1.s2', port "
    "'ch1.s2.p3'. A CHASSIS node carries an integer 'capacity'. A PORT "
    "node carries 'speed_gbps'. Chassis contain packet switches; packet "
    "switches contain ports; a control point controls packet switches."
)


def _inventory(keys: Iterable[str]) -> str:
    keys = sorted(keys)
    return ", ".join(keys) if keys else "(none)"


def build_task_context(app: Application, g: PropertyGraph) -> AppContext:
    """Describe the graph's schema (attribute keys only, never values)."""
    base = _TRAFFIC_SCHEMA if app is Application.TRAFFIC_ANALYSIS else _MALT_SCHEMA
    conventions = (
        _TRAFFIC_CONVENTIONS if app is Application.TRAFFIC_ANALYSIS else _MALT_CONVENTIONS
    )
    schema_description = (
        f"{base}\n"
        f"Node attributes present in this network: {_inventory(g.node_attr_keys())}. "
        f"Edge attributes present: {_inventory(g.edge_attr_keys())}."
    )
    return AppContext(
        application=app, schema_description=schema_description, conventions=conventions
    )


_PLACEHOLDER = re.compile(r"\{\{([a-z_]+)\}\}")
_template_cache: dict[str, str] = {}


def _load_template(name: str) -> str:
    if name not in _template_cache:
        ref = resources.files("nlnetops").joinpath("prompts").joinpath(name)
        try:
            _template_cache[name] = ref.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"missing prompt template {name}") from None
    return _template_cache[name]


def _render(name: str, mapping: dict[str, str]) -> str:
    def sub(match: re.Match) -> str:
        key = match.group(1)
        if key not in mapping:
            raise ConfigError(f"template {name} uses unknown placeholder {key!r}")
        return mapping[key]

    return _PLACEHOLDER.sub(sub, _load_template(name)).rstrip("\n")


def _bundle(
    messages: list[Message],
    backend: ExecBackendKind,
    app: Application,
    purpose: str,
    estimator: TokenEstimator,
) -> PromptBundle:
    total = estimator("".join(m.content for m in messages))
    return PromptBundle(
        messages=tuple(messages),
        backend=backend,
        estimated_tokens=total,
        application=app,
        purpose=purpose,
    )


def build_codegen_prompt(
    ctx: AppContext,
    query: str,
    backend: ExecBackendKind,
    estimator: TokenEstimator = estimate_tokens,
) -> PromptBundle:
    """One user message: context + program contract, ending with the query."""
    if backend is ExecBackendKind.DIRECT_ANSWER:
        raise ParameterError("codegen prompts target code-executing backends only")
    if not query or not query.strip():
        raise InputError("empty query")
    name = f"{ctx.application.value}_{backend.value}_codegen.txt"
    text = _render(
        name,
        {
            "schema_description": ctx.schema_description,
            "conventions": ctx.conventions,
            "program_contract": program_contract(backend),
            "query": query,
        },
    )
    return _bundle([Message("user", text)], backend, ctx.application, PURPOSE_CODEGEN, estimator)


def build_strawman_prompt(
    g: PropertyGraph,
    query: str,
    context_limit: int,
    application: Application,
    estimator: TokenEstimator = estimate_tokens,
) -> PromptBundle:
    """Embed the whole graph and ask for a direct answer.

    Raises ContextOverflowError (a first-class outcome, not a crash) when
    the estimate exceeds `context_limit`.
    """
    if not query or not query.strip():
        raise InputError("empty query")
    ctx = build_task_context(application, g)
    name = f"{application.value}_direct_answer_strawman.txt"
    text = _render(
        name,
        {
            "schema_description": ctx.schema_description,
            "conventions": ctx.conventions,
            "graph_json": serialize_graph(g, canonical=True),
            "answer_contract": program_contract(ExecBackendKind.DIRECT_ANSWER),
            "query": query,
        },
    )
    bundle = _bundle(
        [Message("user", text)],
        ExecBackendKind.DIRECT_ANSWER,
        application,
        PURPOSE_STRAWMAN,
        estimator,
    )
    if bundle.estimated_tokens > context_limit:
        raise ContextOverflowError(bundle.estimated_tokens, context_limit)
    return bundle


def build_selfdebug_prompt(
    prior: PromptBundle,
    code: str,
    error: str,
    error_cap: int = 2000,
    estimator: TokenEstimator = estimate_tokens,
) -> PromptBundle:
    """Append the failing code and its error, ask for a corrected program."""
    if prior.purpose not in (PURPOSE_CODEGEN, PURPOSE_SELFDEBUG):
        raise ParameterError("self-debug continues codegen conversations only")
    if len(error) > error_cap:
        error = error[-error_cap:]  # keep the tail: the final error line matters most
    name = f"{prior.application.value}_{prior.backend.value}_selfdebug.txt"
    text = _render(name, {"error": error})
    messages = list(prior.messages)
    messages.append(Message("assistant", f"```\n{code}\n```"))
    messages.append(Message("user", text))
    return _bundle(messages, prior.backend, prior.application, PURPOSE_SELFDEBUG, estimator)
