"""Child-process runner for the relational backend.

Materializes the interchange graph into an in-memory SQLite database as
`nodes` and `edges` tables, executes the program's statements in order,
and answers with the result set of the last row-returning statement. The
graph is rebuilt from the tables afterwards, so data-modification
statements change the reported graph.

Exit codes follow the executor convention: 0 success, 4 envelope failure,
5 SQL syntax error, 1 other SQL errors.
"""

from __future__ import annotations

import json
import sqlite3
import sys

from . import _childlib

_RESERVED = {"id", "src", "dst"}


def _fail(exc: BaseException) -> None:
    message = f"{type(exc).__name__}: {exc}"
    sys.stderr.write(message + "\n")
    sys.stderr.flush()
    sys.exit(5 if "syntax error" in str(exc).lower() else 1)


def _check_scalar(owner: str, key: str, value):
    if isinstance(value, bool) or isinstance(value, (list, tuple)):
        _childlib._envelope_failure(
            f"attribute {key!r} on {owner} has a type the relational backend cannot store"
        )
    return value


def _load_tables(conn: sqlite3.Connection, doc: dict) -> None:
    nodes = doc["nodes"]
    edges = doc["edges"]
    node_cols = sorted({k for attrs in nodes.values() for k in attrs})
    edge_cols = sorted({k for e in edges for k in e["attrs"]})
    for col in node_cols + edge_cols:
        if col in _RESERVED:
            _childlib._envelope_failure(f"attribute {col!r} collides with a table column")

    quoted = lambda cols: "".join(f', "{c}"' for c in cols)
    conn.execute(f'CREATE TABLE nodes ("id" TEXT PRIMARY KEY{quoted(node_cols)})')
    conn.execute(f'CREATE TABLE edges ("src" TEXT, "dst" TEXT{quoted(edge_cols)})')
    node_stmt = (
        f"INSERT INTO nodes VALUES ({', '.join('?' * (1 + len(node_cols)))})"
    )
    for nid, attrs in nodes.items():
        row = [nid] + [_check_scalar(f"node {nid}", c, attrs.get(c)) for c in node_cols]
        conn.execute(node_stmt, row)
    edge_stmt = (
        f"INSERT INTO edges VALUES ({', '.join('?' * (2 + len(edge_cols)))})"
    )
    for e in edges:
        row = [e["src"], e["dst"]] + [
            _check_scalar(f"edge {e['src']}->{e['dst']}", c, e["attrs"].get(c))
            for c in edge_cols
        ]
        conn.execute(edge_stmt, row)


def split_statements(script: str) -> list[str]:
    """Split on statement boundaries, respecting quoted semicolons."""
    statements = []
    buf = ""
    chunks = script.split(";")
    for i, chunk in enumerate(chunks):
        buf += chunk + (";" if i < len(chunks) - 1 else "")
        if buf.strip() and sqlite3.complete_statement(buf):
            statements.append(buf.strip())
            buf = ""
    if buf.strip():
        statements.append(buf.strip())
    return statements


def _normalize_result(columns, rows):
    """Shape the last result set: 1x1 scalar, Nx1 list, else table."""
    if columns is None:
        return "none", None
    if len(columns) == 1:
        if len(rows) == 1:
            return "scalar", rows[0][0]
        return "list", [r[0] for r in rows]
    # de-duplicate repeated column labels deterministically
    seen: dict[str, int] = {}
    names = []
    for col in columns:
        seen[col] = seen.get(col, 0) + 1
        names.append(col if seen[col] == 1 else f"{col}_{seen[col]}")
    return "table", [dict(zip(names, row)) for row in rows]


def _rebuild_graph(conn: sqlite3.Connection, directed: bool):
    from ..graphs import Edge, PropertyGraph

    def fetch(table):
        cur = conn.execute(f"SELECT * FROM {table}")
        cols = [d[0] for d in cur.description]
        return cols, cur.fetchall()

    try:
        node_cols, node_rows = fetch("nodes")
        edge_cols, edge_rows = fetch("edges")
    except sqlite3.Error as exc:
        raise ValueError(f"graph tables missing after execution: {exc}") from None
    if node_cols[0] != "id" or edge_cols[:2] != ["src", "dst"]:
        raise ValueError("graph tables lost their id/src/dst columns")

    nodes = {}
    for row in node_rows:
        nid = row[0]
        if nid is None:
            raise ValueError("node table contains a null id")
        nodes[str(nid)] = {
            c: v for c, v in zip(node_cols[1:], row[1:]) if v is not None
        }
    edges = []
    for row in edge_rows:
        src, dst = row[0], row[1]
        if src is None or dst is None:
            raise ValueError("edge table contains a null endpoint")
        edges.append(
            Edge(
                str(src),
                str(dst),
                {c: v for c, v in zip(edge_cols[2:], row[2:]) if v is not None},
            )
        )
    return PropertyGraph(directed, nodes, edges)


def _authorizer(action, _arg1, _arg2, _db, _trigger):
    if action in (sqlite3.SQLITE_ATTACH, sqlite3.SQLITE_DETACH):
        return sqlite3.SQLITE_DENY
    return sqlite3.SQLITE_OK


def main(argv: list[str]) -> None:
    program_path, graph_path, out_path = argv[:3]
    with open(program_path, "r", encoding="utf-8") as f:
        program = f.read()
    with open(graph_path, "r", encoding="utf-8") as f:
        doc = json.load(f)

    conn = sqlite3.connect(":memory:")
    conn.isolation_level = None
    _load_tables(conn, doc)
    conn.set_authorizer(_authorizer)

    last_columns, last_rows = None, []
    try:
        for statement in split_statements(program):
            cur = conn.execute(statement)
            if cur.description is not None:
                last_columns = [d[0] for d in cur.description]
                last_rows = cur.fetchall()
    except sqlite3.Error as exc:
        _fail(exc)

    # pre-3.11 sqlite3 treats set_authorizer(None) as deny-all; allow explicitly
    conn.set_authorizer(lambda *_args: sqlite3.SQLITE_OK)
    try:
        kind, value = _normalize_result(last_columns, last_rows)
        graph = _rebuild_graph(conn, bool(doc["directed"]))
    except Exception as exc:
        _childlib._envelope_failure(f"{type(exc).__name__}: {exc}")
    _childlib._emit(out_path, kind, value, graph)


if __name__ == "__main__":
    main(sys.argv[1:])
