"""Shared types for program execution: backend kinds, limits, envelopes.

Kept dependency-free (no pandas/networkx imports) because child processes
import this module on every execution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, BinaryIO, Optional

from ..errors import ParameterError
from ..graphs import PropertyGraph


class ExecBackendKind(enum.Enum):
    GRAPH_API = "graph_api"
    TABULAR = "tabular"
    RELATIONAL = "relational"
    DIRECT_ANSWER = "direct_answer"

    @classmethod
    def parse(cls, text: str) -> "ExecBackendKind":
        for member in cls:
            if member.value == text:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ParameterError(f"unknown backend {text!r}; expected one of: {valid}")


ENVELOPE_KINDS = ("scalar", "list", "table", "none")


@dataclass(frozen=True)
class SandboxLimits:
    """Resource ceilings for one child execution."""

    timeout_s: float = 30.0
    memory_bytes: int = 1 << 30

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ParameterError("timeout_s must be positive")
        if self.memory_bytes <= 0:
            raise ParameterError("memory_bytes must be positive")


def check_envelope_shape(kind: str, value: Any) -> None:
    """Validate the (kind, value) half of an envelope; raises ParameterError."""
    if kind not in ENVELOPE_KINDS:
        raise ParameterError(f"unknown envelope kind {kind!r}")
    if kind == "none":
        if value is not None:
            raise ParameterError("envelope kind 'none' must carry a null value")
    elif kind == "scalar":
        if isinstance(value, (list, tuple, dict)):
            raise ParameterError("scalar envelope cannot carry a collection")
    elif kind == "list":
        if not isinstance(value, (list, tuple)):
            raise ParameterError("list envelope must carry a sequence")
    elif kind == "table":
        if not isinstance(value, (list, tuple)):
            raise ParameterError("table envelope must carry a sequence of rows")
        columns = None
        for row in value:
            if not isinstance(row, dict):
                raise ParameterError("table rows must be objects mapping column to value")
            keys = frozenset(row)
            if columns is None:
                columns = keys
            elif keys != columns:
                raise ParameterError("table rows must share one column set")


@dataclass
class ResultEnvelope:
    """Typed program output plus the post-execution graph."""

    kind: str
    value: Any
    graph_after: PropertyGraph

    def __post_init__(self) -> None:
        check_envelope_shape(self.kind, self.value)

    def columns(self) -> Optional[frozenset]:
        if self.kind == "table" and self.value:
            return frozenset(self.value[0])
        return None


class FailurePhase(enum.Enum):
    EXTRACTION = "extraction"
    SYNTAX = "syntax"
    RUNTIME = "runtime"
    TIMEOUT = "timeout"
    MEMORY = "memory"
    SANDBOX_VIOLATION = "sandbox-violation"
    ENVELOPE_MALFORMED = "envelope-malformed"


@dataclass
class ExecOutcome:
    """What happened when a program ran: an envelope or a typed failure."""

    status: str
    envelope: Optional[ResultEnvelope] = None
    failure_phase: Optional[FailurePhase] = None
    message: str = ""
    raw_diagnostics: str = ""

    def __post_init__(self) -> None:
        if self.status == "success":
            if self.envelope is None or self.failure_phase is not None:
                raise ParameterError("success outcome must carry an envelope and no phase")
        elif self.status == "failure":
            if self.envelope is not None or self.failure_phase is None:
                raise ParameterError("failure outcome must carry a phase and no envelope")
        else:
            raise ParameterError(f"unknown outcome status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == "success"

    @classmethod
    def of_success(cls, envelope: ResultEnvelope) -> "ExecOutcome":
        return cls(status="success", envelope=envelope)

    @classmethod
    def of_failure(
        cls, phase: FailurePhase, message: str, raw_diagnostics: str = ""
    ) -> "ExecOutcome":
        return cls(
            status="failure",
            failure_phase=phase,
            message=message,
            raw_diagnostics=raw_diagnostics,
        )


def write_frames(fp: BinaryIO, *payloads: bytes) -> None:
    """Write length-prefixed frames: decimal byte count, newline, payload."""
    for payload in payloads:
        fp.write(str(len(payload)).encode("ascii"))
        fp.write(b"\n")
        fp.write(payload)


def read_frames(data: bytes, expected: int) -> list[bytes]:
    """Parse `expected` length-prefixed frames; raises ValueError on bad framing."""
    frames = []
    pos = 0
    for _ in range(expected):
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise ValueError("truncated frame header")
        try:
            length = int(data[pos:nl].decode("ascii"))
        except (UnicodeDecodeError, ValueError):
            raise ValueError("malformed frame length") from None
        if length < 0 or nl + 1 + length > len(data):
            raise ValueError("frame length out of range")
        frames.append(data[nl + 1 : nl + 1 + length])
        pos = nl + 1 + length
    if data[pos:].strip():
        raise ValueError("trailing bytes after final frame")
    return frames
