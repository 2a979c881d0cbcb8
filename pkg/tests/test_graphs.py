import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlnetops.errors import GraphParseError, GraphValidationError, ParameterError
from nlnetops.graphs import (
    Edge,
    MaltSchema,
    PropertyGraph,
    generate_malt,
    generate_traffic_graph,
    graph_diff,
    graph_equal,
    load_graph,
    project_views,
    rebuild_from_views,
    serialize_graph,
)


def small_graph():
    return PropertyGraph(
        True,
        {"a": {"color": "red"}, "b": {}, "c": {"weight": 1.5}},
        [
            Edge("a", "b", {"bytes": 100, "packets": 3}),
            Edge("b", "c", {"bytes": 7}),
            Edge("a", "b", {"bytes": 100, "packets": 3}),  # parallel edge
        ],
    )


# --- construction invariants ---


def test_dangling_edge_rejected():
    with pytest.raises(GraphValidationError, match="10.0.0.9"):
        PropertyGraph(True, {"10.0.0.1": {}}, [Edge("10.0.0.1", "10.0.0.9")])


def test_empty_node_id_rejected():
    with pytest.raises(GraphValidationError):
        PropertyGraph(True, {"": {}}, [])


def test_nan_attr_rejected():
    with pytest.raises(GraphValidationError, match="non-finite"):
        PropertyGraph(True, {"a": {"w": float("nan")}}, [])


def test_nested_list_attr_rejected():
    with pytest.raises(GraphValidationError, match="nested"):
        PropertyGraph(True, {"a": {"xs": [[1, 2]]}}, [])


def test_list_of_scalars_allowed():
    g = PropertyGraph(True, {"a": {"tags": ["x", 1, 2.5]}}, [])
    assert g.nodes["a"]["tags"] == ["x", 1, 2.5]


# --- serialization ---


def test_empty_graph_serialization_exact():
    g = PropertyGraph(True, {}, [])
    assert serialize_graph(g, canonical=True) == '{"directed":true,"nodes":{},"edges":[]}'
    assert serialize_graph(g) == '{"directed":true,"nodes":{},"edges":[]}'


def test_canonical_insensitive_to_storage_order():
    g = small_graph()
    permuted = PropertyGraph(
        True,
        {k: dict(g.nodes[k]) for k in ["c", "a", "b"]},
        [g.edges[1], g.edges[2], g.edges[0]],
    )
    assert serialize_graph(g, canonical=True) == serialize_graph(permuted, canonical=True)


def test_round_trip_preserves_graph():
    g = small_graph()
    loaded = load_graph(serialize_graph(g))
    assert graph_equal(g, loaded, float_tol=0).equal


def test_load_rejects_malformed_text():
    with pytest.raises(GraphParseError):
        load_graph("{not json")
    with pytest.raises(GraphParseError):
        load_graph('{"directed": true}')
    with pytest.raises(GraphParseError):
        load_graph('[1,2]')


def test_load_names_dangling_node():
    text = json.dumps(
        {"directed": True, "nodes": {"10.0.0.1": {}}, "edges": [{"src": "10.0.0.1", "dst": "10.0.0.9", "attrs": {}}]}
    )
    with pytest.raises(GraphValidationError, match="10.0.0.9"):
        load_graph(text)


def test_loader_handles_paper_scale_graph():
    # 5493 nodes / 6424 edges must round-trip without truncation
    n_nodes, n_edges = 5493, 6424
    nodes = {f"n{i}": {} for i in range(n_nodes)}
    edges = [
        {"src": f"n{i % n_nodes}", "dst": f"n{(i * 7 + 1) % n_nodes}", "attrs": {"kind": "CONTAINS"}}
        for i in range(n_edges)
    ]
    text = json.dumps({"directed": True, "nodes": nodes, "edges": edges})
    g = load_graph(text)
    assert g.n_nodes() == n_nodes
    assert g.n_edges() == n_edges


# --- equality ---


def test_equal_reflexive():
    g = small_graph()
    assert graph_equal(g, g).equal


def test_equal_insensitive_to_permutation():
    g = small_graph()
    permuted = PropertyGraph(
        True,
        {k: dict(g.nodes[k]) for k in ["b", "c", "a"]},
        [g.edges[2], g.edges[0], g.edges[1]],
    )
    report = graph_equal(g, permuted)
    assert report.equal
    assert report.first_difference is None


def test_unequal_names_edge_attr():
    g = small_graph()
    h = g.copy()
    h.edges[1] = Edge("b", "c", {"bytes": 8})
    report = graph_equal(g, h)
    assert not report.equal
    assert "'b'" in report.first_difference and "bytes" in report.first_difference


def test_unequal_names_missing_node():
    g = small_graph()
    h = PropertyGraph(True, {"a": {"color": "red"}, "b": {}}, [Edge("a", "b", {"bytes": 100, "packets": 3})])
    report = graph_equal(g, h)
    assert not report.equal
    assert "'c'" in report.first_difference


def test_float_tolerance_and_numeric_coercion():
    a = PropertyGraph(True, {"n": {"w": 1.0}}, [])
    b = PropertyGraph(True, {"n": {"w": 1.0 + 1e-9}}, [])
    assert graph_equal(a, b).equal
    c = PropertyGraph(True, {"n": {"w": 1}}, [])
    assert graph_equal(a, c).equal  # int 1 vs float 1.0
    d = PropertyGraph(True, {"n": {"w": True}}, [])
    assert not graph_equal(c, d).equal  # bool is not a number


def test_directedness_compared():
    a = PropertyGraph(True, {"x": {}}, [])
    b = PropertyGraph(False, {"x": {}}, [])
    assert not graph_equal(a, b).equal


def test_parallel_edge_multiset():
    base = {"a": {}, "b": {}}
    g = PropertyGraph(True, base, [Edge("a", "b", {"w": 1}), Edge("a", "b", {"w": 2})])
    h = PropertyGraph(True, base, [Edge("a", "b", {"w": 2}), Edge("a", "b", {"w": 1})])
    assert graph_equal(g, h).equal
    i = PropertyGraph(True, base, [Edge("a", "b", {"w": 1}), Edge("a", "b", {"w": 1})])
    assert not graph_equal(g, i).equal


def test_diff_summary_counts():
    g = small_graph()
    h = g.copy()
    h.nodes["a"]["color"] = "blue"
    h.nodes["d"] = {}
    h.edges.append(Edge("d", "b", {"bytes": 1}))
    d = graph_diff(g, h)
    assert d.changed_nodes == 1
    assert d.added_nodes == 1
    assert d.added_edges == 1
    assert d.total == 3
    assert not d.truncated
    assert any("+ node d" in item for item in d.items)


# --- projections ---


def test_project_empty_graph():
    nodes_df, edges_df = project_views(PropertyGraph(True, {}, []))
    assert list(nodes_df.columns) == ["id"]
    assert list(edges_df.columns) == ["src", "dst"]
    assert len(nodes_df) == 0 and len(edges_df) == 0


def test_traffic_edge_table_columns():
    g = generate_traffic_graph(10, 20, 42)
    _, edges_df = project_views(g)
    assert list(edges_df.columns) == ["src", "dst", "bytes", "connections", "packets"]


def test_project_rejects_reserved_attr_names():
    g = PropertyGraph(True, {"a": {"id": 1}}, [])
    with pytest.raises(GraphValidationError, match="id"):
        project_views(g)


def test_project_rebuild_round_trip():
    g = small_graph()
    nodes_df, edges_df = project_views(g)
    rebuilt = rebuild_from_views(nodes_df, edges_df, g.directed)
    assert graph_equal(g, rebuilt).equal


def test_project_missing_attrs_become_null_and_drop_on_rebuild():
    g = PropertyGraph(True, {"a": {"x": 5}, "b": {}}, [])
    nodes_df, edges_df = project_views(g)
    assert math.isnan(nodes_df.loc[nodes_df["id"] == "b", "x"].iloc[0])
    rebuilt = rebuild_from_views(nodes_df, edges_df, True)
    assert "x" not in rebuilt.nodes["b"]
    assert graph_equal(g, rebuilt).equal


# --- malt schema ---


def test_generated_malt_passes_schema():
    g = generate_malt(3, 2, 2, 7)
    MaltSchema().validate(g)


def test_malt_missing_type_rejected():
    g = PropertyGraph(True, {"x": {}}, [])
    with pytest.raises(GraphValidationError, match="'type'"):
        MaltSchema().validate(g)


def test_malt_unknown_kind_rejected():
    g = PropertyGraph(
        True,
        {"c": {"type": "CHASSIS", "capacity": 5}, "s": {"type": "PACKET_SWITCH"}},
        [Edge("c", "s", {"kind": "POWERS"})],
    )
    with pytest.raises(GraphValidationError, match="POWERS"):
        MaltSchema().validate(g)


def test_malt_double_containment_rejected():
    g = PropertyGraph(
        True,
        {
            "c1": {"type": "CHASSIS", "capacity": 1},
            "c2": {"type": "CHASSIS", "capacity": 2},
            "s": {"type": "PACKET_SWITCH"},
        },
        [Edge("c1", "s", {"kind": "CONTAINS"}), Edge("c2", "s", {"kind": "CONTAINS"})],
    )
    with pytest.raises(GraphValidationError, match="two CHASSIS parents"):
        MaltSchema().validate(g)


def test_malt_negative_capacity_rejected():
    g = PropertyGraph(True, {"c": {"type": "CHASSIS", "capacity": -1}}, [])
    with pytest.raises(GraphValidationError, match="capacity"):
        MaltSchema().validate(g)


# --- generators ---


def test_traffic_counts_and_ranges():
    g = generate_traffic_graph(10, 20, 42)
    assert g.n_nodes() == 10
    assert g.n_edges() == 20
    for e in g.edges:
        assert 1 <= e.attrs["bytes"] <= 10**6
        assert 1 <= e.attrs["connections"] <= 10**3
        assert 1 <= e.attrs["packets"] <= 10**4


def test_traffic_single_node():
    g = generate_traffic_graph(1, 0, 5)
    assert g.n_nodes() == 1 and g.n_edges() == 0


def test_traffic_determinism():
    a = serialize_graph(generate_traffic_graph(10, 20, 42), canonical=True)
    b = serialize_graph(generate_traffic_graph(10, 20, 42), canonical=True)
    assert a == b
    c = serialize_graph(generate_traffic_graph(10, 20, 43), canonical=True)
    assert a != c


def test_traffic_small_cost_study_size():
    # 80 total elements, split evenly between nodes and edges
    g = generate_traffic_graph(40, 40, 1)
    assert g.n_nodes() + g.n_edges() == 80


def test_traffic_spans_multiple_prefixes():
    g = generate_traffic_graph(10, 0, 42)
    prefixes = {".".join(nid.split(".")[:2]) for nid in g.nodes}
    assert "15.76" in prefixes
    assert len(prefixes) == 4


def test_traffic_parameter_errors():
    with pytest.raises(ParameterError):
        generate_traffic_graph(0, 0, 1)
    with pytest.raises(ParameterError):
        generate_traffic_graph(2, 5, 1)
    with pytest.raises(ParameterError):
        generate_traffic_graph(2, -1, 1)


def test_malt_counts_by_enumeration():
    # construction formula: c + c*s + c*s*p + 1 nodes; c*s*(1+p) CONTAINS + c*s CONTROLS
    g = generate_malt(2, 2, 2, 1)
    types = [a["type"] for a in g.nodes.values()]
    assert g.n_nodes() == 15
    assert types.count("CHASSIS") == 2
    assert types.count("PACKET_SWITCH") == 4
    assert types.count("PORT") == 8
    assert types.count("CONTROL_POINT") == 1
    kinds = [e.attrs["kind"] for e in g.edges]
    assert kinds.count("CONTAINS") == 12
    assert kinds.count("CONTROLS") == 4


def test_malt_minimal():
    g = generate_malt(1, 1, 1, 1)
    assert g.n_nodes() == 4
    assert g.n_edges() == 3


def test_malt_determinism_and_schema():
    a = serialize_graph(generate_malt(3, 2, 2, 7), canonical=True)
    b = serialize_graph(generate_malt(3, 2, 2, 7), canonical=True)
    assert a == b
    MaltSchema().validate(generate_malt(5, 3, 4, 11))


def test_malt_parameter_errors():
    with pytest.raises(ParameterError):
        generate_malt(0, 1, 1, 1)


# --- property tests ---

attr_scalars = st.one_of(
    st.integers(-1000, 1000),
    st.floats(allow_nan=False, allow_infinity=False, width=32),
    st.text(max_size=8),
    st.booleans(),
)
attr_values = st.one_of(attr_scalars, st.lists(attr_scalars, max_size=3))
attr_maps = st.dictionaries(st.text(min_size=1, max_size=6), attr_values, max_size=4)


@st.composite
def graphs(draw):
    directed = draw(st.booleans())
    ids = draw(st.lists(st.text(min_size=1, max_size=6), unique=True, min_size=0, max_size=6))
    nodes = {nid: draw(attr_maps) for nid in ids}
    edges = []
    if ids:
        n_edges = draw(st.integers(0, 8))
        for _ in range(n_edges):
            src = draw(st.sampled_from(ids))
            dst = draw(st.sampled_from(ids))
            edges.append(Edge(src, dst, draw(attr_maps)))
    return PropertyGraph(directed, nodes, edges)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_round_trip_property(g):
    assert graph_equal(g, load_graph(serialize_graph(g)), float_tol=0).equal
    assert graph_equal(g, load_graph(serialize_graph(g, canonical=True)), float_tol=0).equal


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_equality_reflexive_and_symmetric_property(g):
    assert graph_equal(g, g).equal
    h = load_graph(serialize_graph(g))
    assert graph_equal(g, h).equal == graph_equal(h, g).equal


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_canonical_equality_implies_graph_equality(g):
    h = load_graph(serialize_graph(g, canonical=True))
    assert serialize_graph(g, canonical=True) == serialize_graph(h, canonical=True)
    assert graph_equal(g, h, float_tol=0).equal
