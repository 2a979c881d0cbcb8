"""Deterministic synthetic graph generators for the two applications."""

from __future__ import annotations

import random

from ..errors import ParameterError
from .malt import CHASSIS, CONTAINS, CONTROL_POINT, CONTROLS, PACKET_SWITCH, PORT
from .model import Edge, PropertyGraph

# /16 prefixes the traffic generator draws node addresses from; the first is
# always used so prefix-targeted queries have hits on any graph size.
TRAFFIC_PREFIXES = ("15.76", "15.77", "12.30", "12.31", "172.16", "172.17", "10.80", "10.81")

BYTES_RANGE = (1, 10**6)
CONNECTIONS_RANGE = (1, 10**3)
PACKETS_RANGE = (1, 10**4)


def generate_traffic_graph(n_nodes: int, n_edges: int, seed: int) -> PropertyGraph:
    """Directed communication graph with random per-edge traffic weights.

    Node ids are synthetic IPv4 addresses spanning up to four /16 prefixes
    (round-robin), starting with 15.76. Each edge carries integer attrs
    bytes, connections, and packets within their documented ranges. Output
    is fully determined by (n_nodes, n_edges, seed).
    """
    if n_nodes < 1:
        raise ParameterError(f"n_nodes must be >= 1, got {n_nodes}")
    if n_edges < 0:
        raise ParameterError(f"n_edges must be >= 0, got {n_edges}")
    if n_edges > n_nodes * (n_nodes - 1):
        raise ParameterError(
            f"n_edges {n_edges} exceeds the {n_nodes * (n_nodes - 1)} distinct ordered pairs"
        )
    rng = random.Random(seed)
    n_prefixes = min(4, n_nodes, len(TRAFFIC_PREFIXES))
    ids: list[str] = []
    seen = set()
    for i in range(n_nodes):
        prefix = TRAFFIC_PREFIXES[i % n_prefixes]
        while True:
            addr = f"{prefix}.{rng.randint(0, 255)}.{rng.randint(1, 254)}"
            if addr not in seen:
                seen.add(addr)
                ids.append(addr)
                break
    pairs: list[tuple[str, str]] = []
    max_pairs = n_nodes * (n_nodes - 1)
    if max_pairs <= 200_000:
        all_pairs = [(a, b) for a in ids for b in ids if a != b]
        pairs = rng.sample(all_pairs, n_edges)
    else:
        chosen = set()
        while len(pairs) < n_edges:
            a, b = rng.choice(ids), rng.choice(ids)
            if a != b and (a, b) not in chosen:
                chosen.add((a, b))
                pairs.append((a, b))
    edges = [
        Edge(
            src,
            dst,
            {
                "bytes": rng.randint(*BYTES_RANGE),
                "connections": rng.randint(*CONNECTIONS_RANGE),
                "packets": rng.randint(*PACKETS_RANGE),
            },
        )
        for src, dst in pairs
    ]
    return PropertyGraph(True, {nid: {} for nid in ids}, edges)


def generate_malt(
    n_chassis: int, switches_per_chassis: int, ports_per_switch: int, seed: int
) -> PropertyGraph:
    """Synthetic lifecycle topology: chassis contain switches contain ports,
    plus one control point controlling every switch.

    Chassis capacities are random integers; everything else is structural.
    Node counts: n_chassis * (1 + s * (1 + p)) + 1; deterministic per seed.
    """
    for name, value in (
        ("n_chassis", n_chassis),
        ("switches_per_chassis", switches_per_chassis),
        ("ports_per_switch", ports_per_switch),
    ):
        if value < 1:
            raise ParameterError(f"{name} must be >= 1, got {value}")
    rng = random.Random(seed)
    nodes: dict[str, dict] = {}
    edges: list[Edge] = []
    switch_ids: list[str] = []
    for c in range(1, n_chassis + 1):
        chassis_id = f"ch{c}"
        nodes[chassis_id] = {"type": CHASSIS, "capacity": rng.randint(10, 500)}
        for s in range(1, switches_per_chassis + 1):
            switch_id = f"{chassis_id}.s{s}"
            nodes[switch_id] = {"type": PACKET_SWITCH}
            switch_ids.append(switch_id)
            edges.append(Edge(chassis_id, switch_id, {"kind": CONTAINS}))
            for p in range(1, ports_per_switch + 1):
                port_id = f"{switch_id}.p{p}"
                nodes[port_id] = {"type": PORT, "speed_gbps": rng.choice([10, 40, 100])}
                edges.append(Edge(switch_id, port_id, {"kind": CONTAINS}))
    nodes["cp1"] = {"type": CONTROL_POINT}
    for switch_id in switch_ids:
        edges.append(Edge("cp1", switch_id, {"kind": CONTROLS}))
    return PropertyGraph(True, nodes, edges)
