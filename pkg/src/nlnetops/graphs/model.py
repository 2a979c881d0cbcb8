"""Attributed property graphs: the shared state representation.

Nodes are text ids mapping to attribute dictionaries; edges are
(src, dst, attrs) triples with parallel edges allowed (edge identity is the
whole triple, compared as a multiset). Attribute values are restricted to
JSON-friendly scalars and flat lists of scalars, with no NaN/infinity.

Interchange format (exact):
    {"directed": bool,
     "nodes": {id: {attr: value, ...}, ...},
     "edges": [{"src": id, "dst": id, "attrs": {...}}, ...]}
Canonical form sorts node ids, edge triples, and attribute keys, and uses
compact separators, so equal graphs canonicalize to identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterator

from ..errors import GraphParseError, GraphValidationError

# Relative tolerance and absolute floor for float attribute comparison.
FLOAT_RTOL = 1e-6
FLOAT_ATOL = 1e-9

_SCALAR_TYPES = (int, float, str, bool)


def numbers_close(a: float, b: float, rtol: float = FLOAT_RTOL, atol: float = FLOAT_ATOL) -> bool:
    """True when two numbers agree within relative tolerance rtol (floor atol)."""
    if a == b:
        return True
    return abs(a - b) <= max(atol, rtol * max(abs(a), abs(b)))


def validate_attr_value(value: Any, where: str) -> None:
    """Reject values outside the attribute vocabulary (scalars, flat lists)."""
    if isinstance(value, bool) or isinstance(value, (int, str)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GraphValidationError(f"{where}: non-finite float value {value!r}")
        return
    if isinstance(value, list):
        for i, item in enumerate(value):
            if isinstance(item, list):
                raise GraphValidationError(f"{where}[{i}]: nested lists are not allowed")
            validate_attr_value(item, f"{where}[{i}]")
        return
    raise GraphValidationError(f"{where}: unsupported value type {type(value).__name__}")


def validate_attrs(attrs: dict, where: str) -> None:
    for key, value in attrs.items():
        if not isinstance(key, str) or not key:
            raise GraphValidationError(f"{where}: attribute keys must be non-empty text")
        validate_attr_value(value, f"{where}.{key}")


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    attrs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "attrs", dict(self.attrs))


class PropertyGraph:
    """Directed or undirected attributed graph.

    Instances are treated as immutable after construction: operations that
    change topology or attributes return a new graph. ``nodes`` maps node id
    to its attribute dict; ``edges`` is a list of :class:`Edge`.
    """

    def __init__(
        self,
        directed: bool,
        nodes: dict[str, dict] | None = None,
        edges: list[Edge] | list[tuple] | None = None,
    ):
        self.directed = bool(directed)
        self.nodes: dict[str, dict] = {}
        for node_id, attrs in (nodes or {}).items():
            if not isinstance(node_id, str) or not node_id:
                raise GraphValidationError(f"node id {node_id!r} must be non-empty text")
            if node_id in self.nodes:
                raise GraphValidationError(f"duplicate node id {node_id!r}")
            attrs = dict(attrs or {})
            validate_attrs(attrs, f"node {node_id!r}")
            self.nodes[node_id] = attrs
        self.edges: list[Edge] = []
        for e in edges or []:
            if not isinstance(e, Edge):
                src, dst, attrs = e
                e = Edge(src, dst, dict(attrs or {}))
            for endpoint in (e.src, e.dst):
                if endpoint not in self.nodes:
                    raise GraphValidationError(
                        f"edge ({e.src!r} -> {e.dst!r}) references absent node {endpoint!r}"
                    )
            validate_attrs(e.attrs, f"edge ({e.src!r} -> {e.dst!r})")
            self.edges.append(e)

    def n_nodes(self) -> int:
        return len(self.nodes)

    def n_edges(self) -> int:
        return len(self.edges)

    def node_attr_keys(self) -> set[str]:
        keys: set[str] = set()
        for attrs in self.nodes.values():
            keys.update(attrs)
        return keys

    def edge_attr_keys(self) -> set[str]:
        keys: set[str] = set()
        for e in self.edges:
            keys.update(e.attrs)
        return keys

    def copy(self) -> "PropertyGraph":
        return PropertyGraph(
            self.directed,
            {k: dict(v) for k, v in self.nodes.items()},
            [Edge(e.src, e.dst, dict(e.attrs)) for e in self.edges],
        )

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"<PropertyGraph {kind} |V|={len(self.nodes)} |E|={len(self.edges)}>"


def _attrs_sort_key(attrs: dict) -> str:
    return json.dumps(attrs, sort_keys=True, separators=(",", ":"))


def _edge_sort_key(e: Edge) -> tuple:
    return (e.src, e.dst, _attrs_sort_key(e.attrs))


def serialize_graph(g: PropertyGraph, canonical: bool = False) -> str:
    """Render a graph in the interchange format.

    canonical=True sorts nodes by id, edges by (src, dst, attrs), and
    attribute keys, yielding byte-stable output for equal graphs.
    """
    if canonical:
        nodes = {nid: dict(sorted(g.nodes[nid].items())) for nid in sorted(g.nodes)}
        edges = sorted(g.edges, key=_edge_sort_key)
    else:
        nodes = g.nodes
        edges = g.edges
    doc = {
        "directed": g.directed,
        "nodes": nodes,
        "edges": [
            {"src": e.src, "dst": e.dst, "attrs": dict(sorted(e.attrs.items())) if canonical else e.attrs}
            for e in edges
        ],
    }
    return json.dumps(doc, separators=(",", ":"), sort_keys=False, allow_nan=False)


def load_graph(text: str, schema=None) -> PropertyGraph:
    """Parse interchange text into a validated graph.

    When ``schema`` (a :class:`~nlnetops.graphs.malt.MaltSchema`) is given,
    the loaded graph must additionally satisfy it.
    """
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise GraphParseError(f"malformed graph text: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphParseError("graph document must be a single object")
    missing = {"directed", "nodes", "edges"} - set(doc)
    if missing:
        raise GraphParseError(f"graph document missing keys: {sorted(missing)}")
    if not isinstance(doc["directed"], bool):
        raise GraphParseError("'directed' must be a boolean")
    if not isinstance(doc["nodes"], dict):
        raise GraphParseError("'nodes' must be an object")
    if not isinstance(doc["edges"], list):
        raise GraphParseError("'edges' must be a list")
    edges = []
    for i, rec in enumerate(doc["edges"]):
        if not isinstance(rec, dict) or "src" not in rec or "dst" not in rec:
            raise GraphParseError(f"edge #{i} must be an object with 'src' and 'dst'")
        edges.append(Edge(rec["src"], rec["dst"], rec.get("attrs") or {}))
    g = PropertyGraph(doc["directed"], doc["nodes"], edges)
    if schema is not None:
        schema.validate(g)
    return g


@dataclass(frozen=True)
class MatchReport:
    """Outcome of a graph comparison; ``first_difference`` is set iff unequal."""

    equal: bool
    first_difference: str | None = None


def _attr_value_equal(a: Any, b: Any, rtol: float) -> bool:
    a_num = isinstance(a, (int, float)) and not isinstance(a, bool)
    b_num = isinstance(b, (int, float)) and not isinstance(b, bool)
    if a_num and b_num:
        return numbers_close(float(a), float(b), rtol=rtol)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_attr_value_equal(x, y, rtol) for x, y in zip(a, b))
    if type(a) is not type(b):
        return False
    return a == b


def _attr_maps_diff(a: dict, b: dict, rtol: float) -> str | None:
    """First differing attribute path, or None when the maps agree."""
    for key in sorted(set(a) | set(b)):
        if key not in a:
            return f"attr {key!r} only in second"
        if key not in b:
            return f"attr {key!r} only in first"
        if not _attr_value_equal(a[key], b[key], rtol):
            return f"attr {key!r}: {a[key]!r} != {b[key]!r}"
    return None


def multiset_match(xs: list, ys: list, eq) -> bool:
    """True when xs and ys pair off one-to-one under the predicate ``eq``.

    Greedy matching with backtracking; group sizes here are parallel-edge
    multiplicities, which stay small.
    """
    if len(xs) != len(ys):
        return False
    used = [False] * len(ys)

    def assign(i: int) -> bool:
        if i == len(xs):
            return True
        for j in range(len(ys)):
            if not used[j] and eq(xs[i], ys[j]):
                used[j] = True
                if assign(i + 1):
                    return True
                used[j] = False
        return False

    return assign(0)


def _iter_differences(a: PropertyGraph, b: PropertyGraph, rtol: float) -> Iterator[str]:
    if a.directed != b.directed:
        yield f"directedness differs: {a.directed} != {b.directed}"
        return
    a_ids, b_ids = set(a.nodes), set(b.nodes)
    for nid in sorted(a_ids - b_ids):
        yield f"node {nid!r} only in first graph"
    for nid in sorted(b_ids - a_ids):
        yield f"node {nid!r} only in second graph"
    for nid in sorted(a_ids & b_ids):
        d = _attr_maps_diff(a.nodes[nid], b.nodes[nid], rtol)
        if d is not None:
            yield f"node {nid!r} {d}"

    def endpoint_key(e: Edge) -> tuple:
        if a.directed:
            return (e.src, e.dst)
        return tuple(sorted((e.src, e.dst)))

    a_groups: dict[tuple, list[Edge]] = {}
    b_groups: dict[tuple, list[Edge]] = {}
    for e in a.edges:
        a_groups.setdefault(endpoint_key(e), []).append(e)
    for e in b.edges:
        b_groups.setdefault(endpoint_key(e), []).append(e)
    for key in sorted(set(a_groups) | set(b_groups)):
        xs = a_groups.get(key, [])
        ys = b_groups.get(key, [])
        label = f"edge ({key[0]!r} -> {key[1]!r})"
        if len(xs) != len(ys):
            yield f"{label} multiplicity {len(xs)} != {len(ys)}"
            continue
        if multiset_match(xs, ys, lambda p, q: _attr_maps_diff(p.attrs, q.attrs, rtol) is None):
            continue
        if len(xs) == 1:
            yield f"{label} {_attr_maps_diff(xs[0].attrs, ys[0].attrs, rtol)}"
        else:
            yield f"{label} parallel-edge attribute multisets differ"


def graph_equal(a: PropertyGraph, b: PropertyGraph, float_tol: float = FLOAT_RTOL) -> MatchReport:
    """Order-insensitive structural equality with float tolerance.

    Node and edge storage order never matters; edges compare as multisets of
    (src, dst, attrs). Numeric attribute values compare as reals (5 == 5.0),
    booleans stay distinct from numbers.
    """
    for difference in _iter_differences(a, b, float_tol):
        return MatchReport(False, difference)
    return MatchReport(True, None)


@dataclass(frozen=True)
class DiffSummary:
    """Graph delta for operator review: counts plus a capped item listing."""

    added_nodes: int
    removed_nodes: int
    changed_nodes: int
    added_edges: int
    removed_edges: int
    changed_edges: int
    items: list[str]
    truncated: bool

    @property
    def total(self) -> int:
        return (
            self.added_nodes
            + self.removed_nodes
            + self.changed_nodes
            + self.added_edges
            + self.removed_edges
            + self.changed_edges
        )

    def to_dict(self) -> dict:
        return {
            "added_nodes": self.added_nodes,
            "removed_nodes": self.removed_nodes,
            "changed_nodes": self.changed_nodes,
            "added_edges": self.added_edges,
            "removed_edges": self.removed_edges,
            "changed_edges": self.changed_edges,
            "total": self.total,
            "items": list(self.items),
            "truncated": self.truncated,
        }


def graph_diff(
    before: PropertyGraph,
    after: PropertyGraph,
    float_tol: float = FLOAT_RTOL,
    item_cap: int = 100,
) -> DiffSummary:
    """Summarize how ``after`` differs from ``before`` (counts are exact,
    the item listing is capped at ``item_cap`` entries)."""
    added_n = removed_n = changed_n = 0
    added_e = removed_e = changed_e = 0
    items: list[str] = []

    def note(text: str) -> None:
        if len(items) < item_cap:
            items.append(text)

    b_ids, a_ids = set(before.nodes), set(after.nodes)
    for nid in sorted(a_ids - b_ids):
        added_n += 1
        note(f"+ node {nid}")
    for nid in sorted(b_ids - a_ids):
        removed_n += 1
        note(f"- node {nid}")
    for nid in sorted(a_ids & b_ids):
        d = _attr_maps_diff(before.nodes[nid], after.nodes[nid], float_tol)
        if d is not None:
            changed_n += 1
            note(f"~ node {nid} {d}")

    def group(g: PropertyGraph) -> dict[tuple, list[Edge]]:
        out: dict[tuple, list[Edge]] = {}
        for e in g.edges:
            key = (e.src, e.dst) if g.directed else tuple(sorted((e.src, e.dst)))
            out.setdefault(key, []).append(e)
        return out

    before_groups, after_groups = group(before), group(after)
    for key in sorted(set(before_groups) | set(after_groups)):
        xs = before_groups.get(key, [])
        ys = after_groups.get(key, [])
        label = f"edge {key[0]} -> {key[1]}"
        if not xs:
            added_e += len(ys)
            note(f"+ {label}" + (f" x{len(ys)}" if len(ys) > 1 else ""))
        elif not ys:
            removed_e += len(xs)
            note(f"- {label}" + (f" x{len(xs)}" if len(xs) > 1 else ""))
        elif len(xs) != len(ys):
            delta = len(ys) - len(xs)
            if delta > 0:
                added_e += delta
            else:
                removed_e += -delta
            note(f"~ {label} multiplicity {len(xs)} -> {len(ys)}")
        elif not multiset_match(xs, ys, lambda p, q: _attr_maps_diff(p.attrs, q.attrs, float_tol) is None):
            changed_e += 1
            d = _attr_maps_diff(xs[0].attrs, ys[0].attrs, float_tol) if len(xs) == 1 else "parallel edges differ"
            note(f"~ {label} {d}")

    return DiffSummary(
        added_n, removed_n, changed_n, added_e, removed_e, changed_e,
        items, truncated=(added_n + removed_n + changed_n + added_e + removed_e + changed_e) > len(items),
    )
