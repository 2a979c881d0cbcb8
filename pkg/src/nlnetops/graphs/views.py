"""Tabular projections of a graph: one dataframe for nodes, one for edges.

The node table has an ``id`` column plus the union of node attribute keys;
the edge table has ``src`` and ``dst`` plus the union of edge attribute
keys. Missing attributes project to null. Row order is canonical (nodes by
id, edges by (src, dst, attrs)), so the projection is deterministic, and
together with the directedness flag it is lossless: ``rebuild_from_views``
restores an equal graph.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

from ..errors import GraphValidationError
from .model import Edge, PropertyGraph, _edge_sort_key

if TYPE_CHECKING:
    import pandas as pd

RESERVED_NODE_COLUMNS = ("id",)
RESERVED_EDGE_COLUMNS = ("src", "dst")


def project_views(g: PropertyGraph) -> tuple["pd.DataFrame", "pd.DataFrame"]:
    """Project a graph to (node_table, edge_table) dataframes."""
    import pandas as pd
    node_keys = sorted(g.node_attr_keys())
    edge_keys = sorted(g.edge_attr_keys())
    for key in node_keys:
        if key in RESERVED_NODE_COLUMNS:
            raise GraphValidationError(f"node attribute {key!r} collides with a table column")
    for key in edge_keys:
        if key in RESERVED_EDGE_COLUMNS + ("id",):
            raise GraphValidationError(f"edge attribute {key!r} collides with a table column")

    node_rows = [
        {"id": nid, **{k: g.nodes[nid].get(k) for k in node_keys}}
        for nid in sorted(g.nodes)
    ]
    edge_rows = [
        {"src": e.src, "dst": e.dst, **{k: e.attrs.get(k) for k in edge_keys}}
        for e in sorted(g.edges, key=_edge_sort_key)
    ]
    nodes_df = pd.DataFrame(node_rows, columns=["id"] + node_keys)
    edges_df = pd.DataFrame(edge_rows, columns=["src", "dst"] + edge_keys)
    return nodes_df, edges_df


def _cell_to_attr(value: Any) -> Any:
    """Convert a dataframe cell back to an attribute value; None = absent."""
    if value is None:
        return None
    if isinstance(value, list):
        return [_cell_to_attr(v) for v in value]
    if isinstance(value, float) and math.isnan(value):
        return None
    if hasattr(value, "item"):  # numpy scalar
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def rebuild_from_views(
    nodes_df: "pd.DataFrame", edges_df: "pd.DataFrame", directed: bool
) -> PropertyGraph:
    """Inverse of project_views; null cells become absent attributes.

    Node ids and endpoints are coerced to text. Integer attributes that
    pandas widened to floats compare equal under graph tolerance rules.
    """
    if "id" not in nodes_df.columns:
        raise GraphValidationError("node table must keep its 'id' column")
    if "src" not in edges_df.columns or "dst" not in edges_df.columns:
        raise GraphValidationError("edge table must keep its 'src' and 'dst' columns")
    nodes: dict[str, dict] = {}
    attr_cols = [c for c in nodes_df.columns if c != "id"]
    for row in nodes_df.to_dict("records"):
        nid = row["id"]
        if _cell_to_attr(nid) is None:
            raise GraphValidationError("node table contains a null id")
        attrs = {}
        for col in attr_cols:
            value = _cell_to_attr(row[col])
            if value is not None:
                attrs[str(col)] = value
        nodes[str(_cell_to_attr(nid))] = attrs
    edges = []
    edge_attr_cols = [c for c in edges_df.columns if c not in ("src", "dst")]
    for row in edges_df.to_dict("records"):
        src, dst = _cell_to_attr(row["src"]), _cell_to_attr(row["dst"])
        if src is None or dst is None:
            raise GraphValidationError("edge table contains a null endpoint")
        attrs = {}
        for col in edge_attr_cols:
            value = _cell_to_attr(row[col])
            if value is not None:
                attrs[str(col)] = value
        edges.append(Edge(str(src), str(dst), attrs))
    return PropertyGraph(directed, nodes, edges)
