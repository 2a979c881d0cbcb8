"""Pull code or a direct-answer envelope out of raw model text."""

from __future__ import annotations

import json
import re

from ..errors import EnvelopeError, InputError, ParameterError
from ..graphs import PropertyGraph
from .types import ResultEnvelope

_FENCE = re.compile(r"```(.*?)```", re.S)
_LANG_TAG = re.compile(r"[A-Za-z0-9_+-]{0,16}")


def _fenced_bodies(text: str) -> list[str]:
    bodies = []
    for raw in _FENCE.findall(text):
        body = raw
        newline = body.find("\n")
        first_line = body[:newline] if newline >= 0 else ""
        # drop a language tag like ```python or ```sql
        if newline >= 0 and _LANG_TAG.fullmatch(first_line.strip()):
            body = body[newline + 1 :]
        bodies.append(body.strip())
    return bodies


def extract_code(llm_text: str) -> str:
    """First fenced block if present, else the whole reply trimmed.

    An empty first block falls through to the next non-empty one so the
    result is never empty for non-empty input.
    """
    if llm_text is None or not llm_text.strip():
        raise InputError("empty completion text")
    for body in _fenced_bodies(llm_text):
        if body:
            return body
    return llm_text.strip()


def parse_direct_answer(llm_text: str, g: PropertyGraph) -> ResultEnvelope:
    """Parse a strawman reply: a fenced JSON envelope {"kind":..., "value":...}.

    The graph half is always the input graph; the direct-answer path cannot
    mutate state. Raises EnvelopeError on a missing fence, unparseable
    object, or unknown kind.
    """
    if llm_text is None or not llm_text.strip():
        raise EnvelopeError("empty reply, no envelope found")
    bodies = _fenced_bodies(llm_text)
    if not any(b for b in bodies):
        raise EnvelopeError("reply has no fenced envelope block")
    last_error = "no parseable object in any fenced block"
    for body in bodies:
        if not body:
            continue
        try:
            obj = json.loads(body)
        except ValueError as exc:
            last_error = f"fenced block is not valid JSON: {exc}"
            continue
        if not isinstance(obj, dict) or "kind" not in obj:
            last_error = "fenced object lacks a 'kind' field"
            continue
        try:
            return ResultEnvelope(
                kind=obj["kind"], value=obj.get("value"), graph_after=g.copy()
            )
        except ParameterError as exc:
            raise EnvelopeError(str(exc)) from None
    raise EnvelopeError(last_error)
