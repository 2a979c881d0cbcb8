"""Property-graph model, serialization, comparison, projections, generators."""

from .generate import generate_malt, generate_traffic_graph
from .malt import CHASSIS, CONTAINS, CONTROL_POINT, CONTROLS, PACKET_SWITCH, PORT, MaltSchema
from .model import (
    DiffSummary,
    Edge,
    MatchReport,
    PropertyGraph,
    graph_diff,
    graph_equal,
    load_graph,
    numbers_close,
    serialize_graph,
)
from .views import project_views, rebuild_from_views

__all__ = [
    "CHASSIS",
    "CONTAINS",
    "CONTROL_POINT",
    "CONTROLS",
    "PACKET_SWITCH",
    "PORT",
    "DiffSummary",
    "Edge",
    "MaltSchema",
    "MatchReport",
    "PropertyGraph",
    "generate_malt",
    "generate_traffic_graph",
    "graph_diff",
    "graph_equal",
    "load_graph",
    "numbers_close",
    "project_views",
    "rebuild_from_views",
    "serialize_graph",
]
