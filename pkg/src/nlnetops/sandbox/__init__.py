"""Isolated execution of generated and golden programs."""

from .contracts import program_contract
from .extraction import extract_code, parse_direct_answer
from .executor import execute
from .types import (
    ENVELOPE_KINDS,
    ExecBackendKind,
    ExecOutcome,
    FailurePhase,
    ResultEnvelope,
    SandboxLimits,
)

__all__ = [
    "ENVELOPE_KINDS",
    "ExecBackendKind",
    "ExecOutcome",
    "FailurePhase",
    "ResultEnvelope",
    "SandboxLimits",
    "execute",
    "extract_code",
    "parse_direct_answer",
    "program_contract",
]
