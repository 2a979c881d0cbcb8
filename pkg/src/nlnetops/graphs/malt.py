"""Typed topology schema for the network lifecycle application.

A lifecycle topology is a directed property graph in which every node has a
``type`` attribute drawn from the schema's node types and every edge a
``kind`` attribute drawn from its relationship kinds. Containment edges must
form a forest: no node may be contained by two parents of the same type.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import GraphValidationError
from .model import PropertyGraph

PACKET_SWITCH = "PACKET_SWITCH"
CHASSIS = "CHASSIS"
PORT = "PORT"
CONTROL_POINT = "CONTROL_POINT"

CONTAINS = "CONTAINS"
CONTROLS = "CONTROLS"


@dataclass(frozen=True)
class MaltSchema:
    """Node-type and relationship-kind vocabulary plus required attributes.

    ``required_attrs`` maps node type -> {attr name: python type}; required
    integer attributes must be non-negative.
    """

    node_types: frozenset[str] = frozenset({PACKET_SWITCH, CHASSIS, PORT, CONTROL_POINT})
    relationship_kinds: frozenset[str] = frozenset({CONTAINS, CONTROLS})
    required_attrs: dict = field(default_factory=lambda: {CHASSIS: {"capacity": int}})

    def validate(self, g: PropertyGraph) -> None:
        """Raise GraphValidationError naming the first offending element."""
        if not g.directed:
            raise GraphValidationError("topology graph must be directed")
        for nid, attrs in g.nodes.items():
            node_type = attrs.get("type")
            if node_type is None:
                raise GraphValidationError(f"node {nid!r} missing required attr 'type'")
            if node_type not in self.node_types:
                raise GraphValidationError(f"node {nid!r} has unknown type {node_type!r}")
            for attr, pytype in self.required_attrs.get(node_type, {}).items():
                value = attrs.get(attr)
                if value is None:
                    raise GraphValidationError(f"node {nid!r} ({node_type}) missing attr {attr!r}")
                if pytype is int and (isinstance(value, bool) or not isinstance(value, int)):
                    raise GraphValidationError(f"node {nid!r} attr {attr!r} must be an integer")
                if pytype is int and value < 0:
                    raise GraphValidationError(f"node {nid!r} attr {attr!r} must be >= 0")
        contains_parents: dict[str, dict[str, str]] = {}
        for e in g.edges:
            kind = e.attrs.get("kind")
            if kind is None:
                raise GraphValidationError(f"edge ({e.src!r} -> {e.dst!r}) missing attr 'kind'")
            if kind not in self.relationship_kinds:
                raise GraphValidationError(
                    f"edge ({e.src!r} -> {e.dst!r}) has unknown relationship kind {kind!r}"
                )
            if kind == CONTAINS:
                parent_type = g.nodes[e.src].get("type", "")
                seen = contains_parents.setdefault(e.dst, {})
                if parent_type in seen and seen[parent_type] != e.src:
                    raise GraphValidationError(
                        f"node {e.dst!r} contained by two {parent_type} parents "
                        f"({seen[parent_type]!r} and {e.src!r})"
                    )
                seen[parent_type] = e.src
