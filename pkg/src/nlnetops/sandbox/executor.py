"""Run one program against one graph in an isolated child process.

Program files are assembled as prologue + code + epilogue and launched as
`interpreter program_file graph_file out_file [extras_file]` inside a fresh
working directory. The child reports back through two length-prefixed
frames in the out file: the envelope object, then the post-execution graph.
"""

from __future__ import annotations

import json
import os
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Any, Optional

from ..errors import ParameterError
from ..graphs import PropertyGraph, load_graph, serialize_graph
from ._childlib import ENVELOPE_SENTINEL, VIOLATION_SENTINEL
from .types import (
    ExecBackendKind,
    ExecOutcome,
    FailurePhase,
    ResultEnvelope,
    SandboxLimits,
    read_frames,
)

_DIAG_CAP = 20_000

_PY_GRAPH_PROLOGUE = """\
import sys as _nl_sys
from nlnetops.sandbox import _childlib as _nl
_nl.install_guards()
G = _nl.load_graph_api(_nl_sys.argv[1])
"""

_PY_GRAPH_EPILOGUE = """
_nl.emit_graph_api(_nl_sys.argv[2], globals().get("G"), globals().get("result"))
"""

_PY_TABULAR_PROLOGUE = """\
import sys as _nl_sys
from nlnetops.sandbox import _childlib as _nl
_nl.install_guards()
nodes, edges = _nl.load_tabular(_nl_sys.argv[1])
"""

_PY_TABULAR_EPILOGUE = """
_nl.emit_tabular(_nl_sys.argv[2], globals().get("nodes"), globals().get("edges"), globals().get("result"))
"""

_PY_VALIDATOR_PROLOGUE = """\
import sys as _nl_sys
from nlnetops.sandbox import _childlib as _nl
_nl.install_guards()
G = _nl.load_graph_api(_nl_sys.argv[1])
value, kind, G_input = _nl.load_extras(_nl_sys.argv[3])
"""


@dataclass(frozen=True)
class ExecutorAdapter:
    """How to turn code text into a runnable child process."""

    interpreter: tuple[str, ...]
    prologue: str
    epilogue: str
    program_suffix: str
    python_syntax: bool  # pre-check code with compile() before launching

    def build_program(self, code: str) -> str:
        body = code if code.endswith("\n") else code + "\n"
        return self.prologue + body + self.epilogue


def _python_interpreter() -> tuple[str, ...]:
    return (sys.executable, "-I")


def _adapter_for(backend: ExecBackendKind, validator: bool = False) -> ExecutorAdapter:
    if validator:
        return ExecutorAdapter(
            interpreter=_python_interpreter(),
            prologue=_PY_VALIDATOR_PROLOGUE,
            epilogue=_PY_GRAPH_EPILOGUE,
            program_suffix=".py",
            python_syntax=True,
        )
    if backend is ExecBackendKind.GRAPH_API:
        return ExecutorAdapter(
            interpreter=_python_interpreter(),
            prologue=_PY_GRAPH_PROLOGUE,
            epilogue=_PY_GRAPH_EPILOGUE,
            program_suffix=".py",
            python_syntax=True,
        )
    if backend is ExecBackendKind.TABULAR:
        return ExecutorAdapter(
            interpreter=_python_interpreter(),
            prologue=_PY_TABULAR_PROLOGUE,
            epilogue=_PY_TABULAR_EPILOGUE,
            program_suffix=".py",
            python_syntax=True,
        )
    if backend is ExecBackendKind.RELATIONAL:
        return ExecutorAdapter(
            interpreter=(sys.executable, "-I", "-m", "nlnetops.sandbox._sql_child"),
            prologue="",
            epilogue="",
            program_suffix=".sql",
            python_syntax=False,
        )
    raise ParameterError(f"backend {backend.value} does not execute programs")


def _tail(text: str, cap: int = _DIAG_CAP) -> str:
    return text if len(text) <= cap else text[-cap:]


def _final_error_line(stderr_text: str) -> str:
    """Last non-empty stderr line: the exception summary for Python programs."""
    for line in reversed(stderr_text.splitlines()):
        line = line.strip()
        if line:
            return line
    return "program exited with a failure and no diagnostics"


def _sentinel_detail(stderr_text: str, sentinel: str) -> str:
    for line in reversed(stderr_text.splitlines()):
        if sentinel in line:
            return line.split(sentinel, 1)[1].strip()
    return ""


def _child_env(workdir: str) -> dict[str, str]:
    # deliberately not inherited from os.environ: no credentials, no proxies
    return {
        "PATH": "/usr/bin:/bin",
        "HOME": workdir,
        "TMPDIR": workdir,
        "LANG": "C.UTF-8",
        "PYTHONHASHSEED": "0",
        "OPENBLAS_NUM_THREADS": "1",
        "OMP_NUM_THREADS": "1",
        "MKL_NUM_THREADS": "1",
        "NUMEXPR_MAX_THREADS": "1",
    }


def _memory_limiter(memory_bytes: int):
    def apply_limits():
        import resource

        resource.setrlimit(resource.RLIMIT_AS, (memory_bytes, memory_bytes))
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))

    return apply_limits


def execute(
    code: str,
    g: PropertyGraph,
    backend: ExecBackendKind,
    limits: SandboxLimits = SandboxLimits(),
    extras: Optional[dict[str, Any]] = None,
) -> ExecOutcome:
    """Run `code` against `g` under `limits`; never raises for program faults.

    `extras` switches on the validator contract: the child additionally
    binds `value`, `kind`, and `G_input` from the supplied mapping (keys
    "value", "kind", "graph_input" with an interchange graph object).
    """
    if backend is ExecBackendKind.DIRECT_ANSWER:
        raise ParameterError("the direct-answer backend never executes code")
    adapter = _adapter_for(backend, validator=extras is not None)

    if adapter.python_syntax:
        try:
            compile(code, "<program>", "exec")
        except SyntaxError as exc:
            detail = f"{type(exc).__name__}: {exc.msg} (line {exc.lineno})"
            return ExecOutcome.of_failure(FailurePhase.SYNTAX, detail, detail)

    with tempfile.TemporaryDirectory(prefix="nlnetops-exec-") as workdir:
        graph_path = os.path.join(workdir, "graph.json")
        out_path = os.path.join(workdir, "outcome.bin")
        program_path = os.path.join(workdir, "program" + adapter.program_suffix)
        with open(graph_path, "w", encoding="utf-8") as f:
            f.write(serialize_graph(g))
        with open(program_path, "w", encoding="utf-8") as f:
            f.write(adapter.build_program(code))
        argv = list(adapter.interpreter) + [program_path, graph_path, out_path]
        if extras is not None:
            extras_path = os.path.join(workdir, "extras.json")
            with open(extras_path, "w", encoding="utf-8") as f:
                json.dump(extras, f, ensure_ascii=False, allow_nan=False)
            argv.append(extras_path)

        started = time.monotonic()
        proc = subprocess.Popen(
            argv,
            cwd=workdir,
            env=_child_env(workdir),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=True,
            preexec_fn=_memory_limiter(limits.memory_bytes),
        )
        try:
            stdout, stderr = proc.communicate(timeout=limits.timeout_s)
        except subprocess.TimeoutExpired:
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except OSError:
                pass
            proc.communicate()
            elapsed = time.monotonic() - started
            return ExecOutcome.of_failure(
                FailurePhase.TIMEOUT,
                f"wall-clock limit of {limits.timeout_s:g}s exceeded",
                f"killed after {elapsed:.1f}s",
            )

        stderr_text = stderr.decode("utf-8", errors="replace")
        stdout_text = stdout.decode("utf-8", errors="replace")
        raw = _tail(stderr_text)
        rc = proc.returncode

        if rc == 3 and VIOLATION_SENTINEL in stderr_text:
            return ExecOutcome.of_failure(
                FailurePhase.SANDBOX_VIOLATION,
                _sentinel_detail(stderr_text, VIOLATION_SENTINEL),
                raw,
            )
        if rc == 4 and ENVELOPE_SENTINEL in stderr_text:
            return ExecOutcome.of_failure(
                FailurePhase.ENVELOPE_MALFORMED,
                _sentinel_detail(stderr_text, ENVELOPE_SENTINEL),
                raw,
            )
        if rc == 5:
            return ExecOutcome.of_failure(
                FailurePhase.SYNTAX, _final_error_line(stderr_text), raw
            )
        if rc != 0:
            if "MemoryError" in stderr_text or rc == -signal.SIGKILL:
                return ExecOutcome.of_failure(
                    FailurePhase.MEMORY,
                    f"memory cap of {limits.memory_bytes} bytes exceeded",
                    raw,
                )
            return ExecOutcome.of_failure(
                FailurePhase.RUNTIME, _final_error_line(stderr_text), raw
            )

        try:
            with open(out_path, "rb") as f:
                frames = read_frames(f.read(), 2)
            env_obj = json.loads(frames[0].decode("utf-8"))
            graph_after = load_graph(frames[1].decode("utf-8"))
            envelope = ResultEnvelope(
                kind=env_obj["kind"], value=env_obj.get("value"), graph_after=graph_after
            )
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
            return ExecOutcome.of_failure(
                FailurePhase.ENVELOPE_MALFORMED,
                f"could not read result envelope: {detail}",
                _tail(stderr_text + "\n" + stdout_text),
            )
        return ExecOutcome.of_success(envelope)
