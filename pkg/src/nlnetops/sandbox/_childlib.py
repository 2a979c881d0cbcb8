"""Support code that runs inside sandboxed child processes.

The harness prepends a prologue that calls install_guards() and binds the
graph, then appends an epilogue that emits the result envelope. Guards do
not raise: raising could be swallowed by user-level except blocks, so a
violation prints a sentinel to stderr and hard-exits with a reserved code.

Exit codes: 0 success, 3 sandbox violation, 4 envelope serialization
failure, anything else is an ordinary runtime failure.
"""

from __future__ import annotations

import builtins
import io
import json
import os
import socket
import subprocess
import sys

from .types import write_frames

VIOLATION_SENTINEL = "__NLNETOPS_SANDBOX_VIOLATION__"
ENVELOPE_SENTINEL = "__NLNETOPS_ENVELOPE_ERROR__"

_real_open = builtins.open
_real_os_open = os.open
_workdir = None
_tab_directed = True


def _violation(detail: str) -> None:
    sys.stderr.write(f"\n{VIOLATION_SENTINEL} {detail}\n")
    sys.stderr.flush()
    os._exit(3)


def _envelope_failure(detail: str) -> None:
    sys.stderr.write(f"\n{ENVELOPE_SENTINEL} {detail}\n")
    sys.stderr.flush()
    os._exit(4)


def _inside_workdir(path) -> bool:
    try:
        real = os.path.realpath(os.path.abspath(os.fspath(path)))
    except TypeError:
        return True  # not a path (e.g. fd); leave to the real call
    if real == "/dev/null":
        return True
    return real == _workdir or real.startswith(_workdir + os.sep)


_WRITE_MODE_CHARS = set("wax+")
_WRITE_FLAGS = os.O_WRONLY | os.O_RDWR | os.O_APPEND | os.O_CREAT | os.O_TRUNC


def _guarded_open(file, mode="r", *args, **kwargs):
    if isinstance(file, (str, bytes, os.PathLike)):
        if _WRITE_MODE_CHARS & set(str(mode)) and not _inside_workdir(file):
            _violation(f"write open outside working directory: {os.fspath(file)!r}")
    return _real_open(file, mode, *args, **kwargs)


def _guarded_os_open(path, flags, *args, **kwargs):
    if isinstance(path, (str, bytes, os.PathLike)):
        if flags & _WRITE_FLAGS and not _inside_workdir(path):
            _violation(f"write open outside working directory: {os.fspath(path)!r}")
    return _real_os_open(path, flags, *args, **kwargs)


def _deny_network(*_args, **_kwargs):
    _violation("network access attempted")


def _deny_process(*_args, **_kwargs):
    _violation("process spawn attempted")


def _path_mutator(real, n_paths):
    def guarded(*args, **kwargs):
        for path in args[:n_paths]:
            if isinstance(path, (str, bytes, os.PathLike)) and not _inside_workdir(path):
                _violation(f"filesystem change outside working directory: {os.fspath(path)!r}")
        return real(*args, **kwargs)

    return guarded


def install_guards() -> None:
    """Fence the process in: no network, no writes outside the working dir."""
    global _workdir
    _workdir = os.path.realpath(os.getcwd())

    # stays a class so `class SSLSocket(socket.socket)` still imports cleanly
    class _GuardedSocket(socket.socket):
        def __init__(self, *_args, **_kwargs):
            _deny_network()

    socket.socket = _GuardedSocket
    socket.SocketType = _GuardedSocket
    socket.socketpair = _deny_network
    socket.create_connection = _deny_network
    if hasattr(socket, "create_server"):
        socket.create_server = _deny_network
    socket.getaddrinfo = _deny_network
    socket.gethostbyname = _deny_network
    socket.gethostbyaddr = _deny_network

    builtins.open = _guarded_open
    io.open = _guarded_open
    os.open = _guarded_os_open
    for name, n_paths in (
        ("remove", 1),
        ("unlink", 1),
        ("rmdir", 1),
        ("mkdir", 1),
        ("truncate", 1),
        ("rename", 2),
        ("renames", 2),
        ("replace", 2),
        ("link", 2),
        ("symlink", 2),
        ("chmod", 1),
    ):
        if hasattr(os, name):
            setattr(os, name, _path_mutator(getattr(os, name), n_paths))

    for name in (
        "fork",
        "forkpty",
        "posix_spawn",
        "posix_spawnp",
        "system",
        "popen",
        "execv",
        "execve",
        "execvp",
        "execvpe",
        "execl",
        "execle",
        "execlp",
        "execlpe",
        "spawnv",
        "spawnve",
        "spawnvp",
        "spawnvpe",
        "spawnl",
        "spawnle",
        "spawnlp",
        "spawnlpe",
    ):
        if hasattr(os, name):
            setattr(os, name, _deny_process)
    subprocess.Popen = _deny_process
    subprocess.run = _deny_process
    subprocess.call = _deny_process
    subprocess.check_call = _deny_process
    subprocess.check_output = _deny_process


# --- graph bindings ---


def _read_graph(path):
    from ..graphs import load_graph

    with _real_open(path, "r", encoding="utf-8") as f:
        return load_graph(f.read())


def load_graph_api(path):
    """Bind the interchange file at `path` as a networkx multigraph."""
    import networkx as nx

    g = _read_graph(path)
    G = nx.MultiDiGraph() if g.directed else nx.MultiGraph()
    for nid, attrs in g.nodes.items():
        G.add_node(nid, **attrs)
    for e in g.edges:
        G.add_edge(e.src, e.dst, **e.attrs)
    return G


def load_tabular(path):
    """Bind the interchange file at `path` as (nodes, edges) DataFrames."""
    global _tab_directed
    from ..graphs import project_views

    g = _read_graph(path)
    _tab_directed = g.directed
    return project_views(g)


def load_extras(path):
    """Validator bindings: (value, kind, G_input) from an extras file."""
    import networkx as nx

    from ..graphs import load_graph

    with _real_open(path, "r", encoding="utf-8") as f:
        extras = json.load(f)
    g_in = load_graph(json.dumps(extras["graph_input"]))
    G_input = nx.MultiDiGraph() if g_in.directed else nx.MultiGraph()
    for nid, attrs in g_in.nodes.items():
        G_input.add_node(nid, **attrs)
    for e in g_in.edges:
        G_input.add_edge(e.src, e.dst, **e.attrs)
    return extras["value"], extras["kind"], G_input


# --- envelope inference ---


def _scalarize(value):
    """Unwrap numpy scalars; reject values JSON cannot carry."""
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        try:
            if getattr(value, "ndim", 0) == 0:
                value = value.item()
        except (TypeError, ValueError):
            pass
    if isinstance(value, float):
        import math

        if not math.isfinite(value):
            raise ValueError("non-finite number in result")
    return value


def _coerce_cell(value):
    value = _scalarize(value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_coerce_cell(v) for v in value]
    raise ValueError(f"unsupported value of type {type(value).__name__} in result")


def _row_sort_key(item):
    return (type(item).__name__, repr(item))


def infer_envelope(result):
    """Map a program's `result` object to (kind, wire value)."""
    try:
        import pandas as pd
    except ImportError:  # pragma: no cover - pandas is a hard dependency
        pd = None

    if result is None:
        return "none", None
    if pd is not None and isinstance(result, pd.DataFrame):
        rows = []
        columns = [str(c) for c in result.columns]
        for record in result.to_dict("records"):
            row = {}
            for col in columns:
                cell = _scalarize(record[col])
                if isinstance(cell, float):
                    import math

                    if math.isnan(cell):
                        cell = None
                row[col] = _coerce_cell(cell)
            rows.append(row)
        return "table", rows
    if pd is not None and isinstance(result, pd.Series):
        rows = [
            {"key": _coerce_cell(k), "value": _coerce_cell(v)} for k, v in result.items()
        ]
        return "table", rows
    result = _scalarize(result)
    if isinstance(result, (bool, int, float, str)):
        return "scalar", result
    if isinstance(result, dict):
        rows = [
            {"key": _coerce_cell(k), "value": _coerce_cell(v)} for k, v in result.items()
        ]
        return "table", rows
    if isinstance(result, (set, frozenset)):
        return "list", [_coerce_cell(v) for v in sorted(result, key=_row_sort_key)]
    if isinstance(result, (list, tuple)):
        items = list(result)
        if items and all(isinstance(v, dict) for v in items):
            columns = set(items[0])
            if all(set(v) == columns for v in items):
                rows = [
                    {str(k): _coerce_cell(v) for k, v in row.items()} for row in items
                ]
                return "table", rows
        return "list", [_coerce_cell(v) for v in items]
    raise ValueError(f"unsupported result type {type(result).__name__}")


# --- emission ---


def _emit(out_path, kind, value, graph):
    from ..graphs import serialize_graph

    envelope_text = json.dumps(
        {"kind": kind, "value": value},
        ensure_ascii=False,
        allow_nan=False,
        separators=(",", ":"),
    )
    graph_text = serialize_graph(graph)
    with _real_open(out_path, "wb") as f:
        write_frames(f, envelope_text.encode("utf-8"), graph_text.encode("utf-8"))
        f.flush()
        os.fsync(f.fileno())
    os._exit(0)


def emit_graph_api(out_path, G, result) -> None:
    try:
        kind, value = infer_envelope(result)
        graph = _graph_api_to_property(G)
    except Exception as exc:
        _envelope_failure(f"{type(exc).__name__}: {exc}")
    _emit(out_path, kind, value, graph)


def _graph_api_to_property(G):
    from ..graphs import Edge, PropertyGraph

    if G is None or not hasattr(G, "nodes"):
        raise ValueError("the graph binding `G` was removed or replaced")
    nodes = {str(n): {str(k): _coerce_cell(v) for k, v in d.items()} for n, d in G.nodes(data=True)}
    edges = [
        Edge(str(u), str(v), {str(k): _coerce_cell(w) for k, w in d.items()})
        for u, v, d in G.edges(data=True)
    ]
    return PropertyGraph(G.is_directed(), nodes, edges)


def emit_tabular(out_path, nodes, edges, result) -> None:
    try:
        kind, value = infer_envelope(result)
        from ..graphs import rebuild_from_views

        graph = rebuild_from_views(nodes, edges, _tab_directed)
    except Exception as exc:
        _envelope_failure(f"{type(exc).__name__}: {exc}")
    _emit(out_path, kind, value, graph)
