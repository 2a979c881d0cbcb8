"""Program contract text per backend, injected into code-generation prompts.

These paragraphs are the single source of truth for the binding names and
answer conventions the executor enforces; keeping them next to the executor
stops prompt and runtime drifting apart.
"""

from __future__ import annotations

from ..errors import ParameterError
from .types import ExecBackendKind

_GRAPH_API = """\
Write a Python program. The network is already loaded as the variable `G`,
a networkx MultiDiGraph (MultiGraph when the network is undirected). Node
ids are strings; node and edge attributes are stored in the usual networkx
attribute dictionaries. Do not read files, use the network, print, or
import anything beyond the Python standard library, networkx, and pandas.

Assign the final answer to a variable named `result`:
  - a number, string, or boolean for single-value answers;
  - a list for multi-value answers;
  - a list of dicts sharing the same keys for tabular answers;
  - a plain dict for mapping answers (it is reported as a key/value table);
  - None when the task only modifies the network.
To change the network, mutate `G` in place; the framework captures the
modified graph after your program ends."""

_TABULAR = """\
Write a Python program. The network is already loaded as two pandas
DataFrames: `nodes` (column `id` plus one column per node attribute) and
`edges` (columns `src` and `dst` plus one column per edge attribute).
Do not read files, use the network, print, or import anything beyond the
Python standard library and pandas.

Assign the final answer to a variable named `result`:
  - a number, string, or boolean for single-value answers;
  - a list for multi-value answers;
  - a DataFrame or a list of dicts sharing the same keys for tabular answers;
  - a plain dict for mapping answers (it is reported as a key/value table);
  - None when the task only modifies the network.
To change the network, modify (or rebind) the `nodes` / `edges` DataFrames;
the framework rebuilds the graph from them after your program ends."""

_RELATIONAL = """\
Write SQL (SQLite dialect). The network is stored in two tables: `nodes`
(column `id` plus one column per node attribute) and `edges` (columns
`src` and `dst` plus one column per edge attribute).

The result set of the LAST row-returning statement is the answer:
  - a single row with a single column is read as a single value;
  - a single column over many rows is read as a list;
  - anything wider is read as a table keyed by the selected column names,
    so alias columns (e.g. `AS key`, `AS value` for mapping answers).
Use INSERT/UPDATE/DELETE to change the network; the framework rebuilds the
graph from the tables after your script ends. Terminate every statement
with a semicolon."""

_DIRECT_ANSWER = """\
Answer the question directly from the graph data above. Reply with exactly
one fenced code block containing a single JSON object of the form
{"kind": "scalar" | "list" | "table" | "none", "value": ...}
where a table value is a list of objects sharing the same keys. Put any
explanation outside the fenced block."""


def program_contract(backend: ExecBackendKind) -> str:
    """The rules generated programs must follow for `backend`."""
    try:
        return {
            ExecBackendKind.GRAPH_API: _GRAPH_API,
            ExecBackendKind.TABULAR: _TABULAR,
            ExecBackendKind.RELATIONAL: _RELATIONAL,
            ExecBackendKind.DIRECT_ANSWER: _DIRECT_ANSWER,
        }[backend]
    except KeyError:
        raise ParameterError(f"no contract for backend {backend!r}") from None
