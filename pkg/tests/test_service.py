"""Session service over its HTTP surface, replies replayed from fixtures."""

import json
import threading
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from nlnetops.gateway import replay_backend_for_path
from nlnetops.graphs import generate_traffic_graph, load_graph, serialize_graph
from nlnetops.service import create_app

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "service"
MODEL = "sim-alpha"
GENERATOR = {"generator": "traffic", "nodes": 10, "edges": 20, "seed": 42}

COUNT_QUERY = "How many hosts are on the network?"
COLOR_QUERY = "Assign each distinct /16 prefix its own color attribute on its hosts."
REMOVE_QUERY = "Remove every link that carried fewer than 2000 packets."
TOTAL_QUERY = "What is the total number of bytes exchanged on the network?"
BUSIEST_QUERY = "List the five busiest hosts by outgoing bytes."


@pytest.fixture()
def client(tmp_path):
    app = create_app(str(tmp_path / "state"), backend=replay_backend_for_path(str(FIXTURE)))
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def strict_client(tmp_path):
    """Same service but with no self-debug budget at all."""
    app = create_app(
        str(tmp_path / "state"),
        backend=replay_backend_for_path(str(FIXTURE)),
        debug_budget=0,
    )
    with TestClient(app) as c:
        yield c


def new_session(client, body=None):
    r = client.post(
        "/api/sessions", json=body or {"application": "traffic", "generator": GENERATOR}
    )
    assert r.status_code == 200, r.text
    return r.json()["session_id"]


def ask(client, sid, query, backend="graph_api", model=MODEL):
    return client.post(
        f"/api/sessions/{sid}/query",
        json={"text": query, "backend": backend, "model": model},
    )


def decide(client, sid, aid, decision):
    return client.post(
        f"/api/sessions/{sid}/attempts/{aid}/decision", json={"decision": decision}
    )


class TestCreateSession:
    def test_generator_session_matches_fixture_graph(self, client):
        sid = new_session(client)
        got = client.get(f"/api/sessions/{sid}/graph").json()
        want = json.loads(serialize_graph(generate_traffic_graph(10, 20, seed=42)))
        assert got == want

    def test_ids_are_distinct_and_unguessable_length(self, client):
        a, b = new_session(client), new_session(client)
        assert a != b
        assert len(a) >= 32

    def test_explicit_graph_accepted(self, client):
        doc = json.loads(serialize_graph(generate_traffic_graph(6, 9, seed=1)))
        sid = new_session(client, {"application": "traffic", "graph": doc})
        assert client.get(f"/api/sessions/{sid}/graph").json() == doc

    def test_malt_schema_violation_rejected(self, client):
        bad = {
            "directed": True,
            "nodes": {"x": {"type": "NOT_A_MALT_TYPE"}},
            "edges": [],
        }
        r = client.post("/api/sessions", json={"application": "malt", "graph": bad})
        assert r.status_code == 422

    def test_unknown_application_rejected(self, client):
        r = client.post("/api/sessions", json={"application": "pastry", "generator": GENERATOR})
        assert r.status_code == 422

    def test_graph_and_generator_together_rejected(self, client):
        doc = json.loads(serialize_graph(generate_traffic_graph(6, 9, seed=1)))
        r = client.post(
            "/api/sessions",
            json={"application": "traffic", "graph": doc, "generator": GENERATOR},
        )
        assert r.status_code == 422


class TestSubmitQuery:
    def test_read_only_query_pends_with_empty_diff(self, client):
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY).json()
        assert a["status"] == "pending"
        assert a["envelope"]["kind"] == "scalar" and a["envelope"]["value"] == 10
        assert a["diff"]["changed_nodes"] == 0
        assert a["diff"]["added_edges"] == a["diff"]["removed_edges"] == 0
        assert "graph_after" not in a and "bundle" not in a

    def test_pending_envelope_previews_graph_after(self, client):
        sid = new_session(client)
        a = ask(client, sid, COLOR_QUERY).json()
        after = a["envelope"]["graph_after"]
        assert all("color" in attrs for attrs in after["nodes"].values())
        # the preview is not yet the session graph
        current = client.get(f"/api/sessions/{sid}/graph").json()
        assert current != after
        decide(client, sid, a["attempt_id"], "approve")
        assert client.get(f"/api/sessions/{sid}/graph").json() == after
        # finalized history drops the preview graph
        history = client.get(f"/api/sessions/{sid}/history").json()
        assert "graph_after" not in history[0]["envelope"]

    def test_coloring_query_diff_touches_node_attrs_only(self, client):
        sid = new_session(client)
        a = ask(client, sid, COLOR_QUERY).json()
        assert a["status"] == "pending"
        d = a["diff"]
        assert d["changed_nodes"] == 10
        assert d["added_nodes"] == d["removed_nodes"] == 0
        assert d["added_edges"] == d["removed_edges"] == d["changed_edges"] == 0
        assert any("color" in str(item) for item in d["items"])

    def test_query_never_changes_current_graph(self, client):
        sid = new_session(client)
        before = client.get(f"/api/sessions/{sid}/graph").json()
        ask(client, sid, COLOR_QUERY)
        assert client.get(f"/api/sessions/{sid}/graph").json() == before

    def test_second_query_while_pending_conflicts(self, client):
        sid = new_session(client)
        assert ask(client, sid, COUNT_QUERY).status_code == 200
        r = ask(client, sid, COLOR_QUERY)
        assert r.status_code == 409

    def test_unknown_session_404(self, client):
        assert ask(client, "deadbeef" * 4, COUNT_QUERY).status_code == 404

    def test_bad_backend_and_model_422(self, client):
        sid = new_session(client)
        assert ask(client, sid, COUNT_QUERY, backend="quantum").status_code == 422
        assert ask(client, sid, COUNT_QUERY, model="sim-omega").status_code == 422
        assert ask(client, sid, "   ").status_code == 422

    def test_gateway_failure_is_502_with_recorded_attempt(self, client):
        sid = new_session(client)
        r = ask(client, sid, "Which host hums the loudest at night?")
        assert r.status_code == 502
        body = r.json()
        assert body["attempt"]["status"] == "failed"
        assert body["attempt"]["diagnostics"]["error_class"] == "OperationError"
        history = client.get(f"/api/sessions/{sid}/history").json()
        assert [a["status"] for a in history] == ["failed"]
        # a failed attempt is not pending, so the session stays usable
        assert ask(client, sid, COUNT_QUERY).status_code == 200

    def test_failed_attempt_carries_error_class(self, client):
        sid = new_session(client)
        a = ask(client, sid, TOTAL_QUERY).json()
        assert a["status"] == "failed"
        assert a["diagnostics"]["error_class"] == "ImaginaryFileOrFunction"
        assert "total_traffic" in a["diagnostics"]["message"]

    def test_prose_reply_fails_as_syntax_error(self, client):
        # no fence: the whole reply is treated as the program
        sid = new_session(client)
        a = ask(client, sid, BUSIEST_QUERY).json()
        assert a["status"] == "failed"
        assert a["diagnostics"]["error_class"] == "SyntaxError"

    def test_direct_answer_pends_without_mutation(self, client):
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY, backend="direct_answer").json()
        assert a["status"] == "pending"
        assert a["envelope"]["kind"] == "scalar" and a["envelope"]["value"] == 10
        assert a["diff"]["changed_nodes"] == 0


class TestDecide:
    def test_approve_commits_graph_after(self, client):
        sid = new_session(client)
        a = ask(client, sid, COLOR_QUERY).json()
        r = decide(client, sid, a["attempt_id"], "approve").json()
        assert r == {"status": "approved", "graph_version": 1}
        g = client.get(f"/api/sessions/{sid}/graph").json()
        assert all("color" in attrs for attrs in g["nodes"].values())

    def test_reject_leaves_graph_unchanged(self, client):
        sid = new_session(client)
        before = client.get(f"/api/sessions/{sid}/graph").json()
        a = ask(client, sid, REMOVE_QUERY).json()
        assert a["diff"]["removed_edges"] > 0
        r = decide(client, sid, a["attempt_id"], "reject").json()
        assert r == {"status": "rejected", "graph_version": 0}
        assert client.get(f"/api/sessions/{sid}/graph").json() == before

    def test_approve_removal_drops_edges(self, client):
        sid = new_session(client)
        before = load_graph(json.dumps(client.get(f"/api/sessions/{sid}/graph").json()))
        a = ask(client, sid, REMOVE_QUERY).json()
        decide(client, sid, a["attempt_id"], "approve")
        after = load_graph(json.dumps(client.get(f"/api/sessions/{sid}/graph").json()))
        assert len(after.edges) == len(before.edges) - a["diff"]["removed_edges"]

    def test_decide_twice_conflicts(self, client):
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY).json()
        assert decide(client, sid, a["attempt_id"], "approve").status_code == 200
        assert decide(client, sid, a["attempt_id"], "approve").status_code == 409

    def test_decide_failed_attempt_conflicts(self, client):
        sid = new_session(client)
        a = ask(client, sid, TOTAL_QUERY).json()
        assert decide(client, sid, a["attempt_id"], "approve").status_code == 409

    def test_unknown_attempt_404_and_bad_decision_422(self, client):
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY).json()
        assert decide(client, sid, "a999", "approve").status_code == 404
        assert decide(client, sid, a["attempt_id"], "maybe").status_code == 422

    def test_feedback_log_appended(self, tmp_path):
        state = tmp_path / "state"
        app = create_app(str(state), backend=replay_backend_for_path(str(FIXTURE)))
        with TestClient(app) as client:
            sid = new_session(client)
            a = ask(client, sid, COUNT_QUERY).json()
            decide(client, sid, a["attempt_id"], "reject")
        lines = (state / "feedback.jsonl").read_text().splitlines()
        assert len(lines) == 1
        entry = json.loads(lines[0])
        assert entry["query"] == COUNT_QUERY and entry["status"] == "rejected"


class TestDebug:
    def test_debug_recovers_failed_attempt(self, client):
        sid = new_session(client)
        a = ask(client, sid, TOTAL_QUERY).json()
        r = client.post(f"/api/sessions/{sid}/attempts/{a['attempt_id']}/debug")
        assert r.status_code == 200
        b = r.json()
        assert b["status"] == "pending"
        assert b["debug_round"] == 1 and b["parent"] == a["attempt_id"]
        assert b["envelope"]["kind"] == "scalar" and b["envelope"]["value"] == 9800978
        history = client.get(f"/api/sessions/{sid}/history").json()
        assert [x["attempt_id"] for x in history] == [a["attempt_id"], b["attempt_id"]]
        assert history[0]["status"] == "failed"  # original preserved

    def test_debug_on_pending_attempt_conflicts(self, client):
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY).json()
        r = client.post(f"/api/sessions/{sid}/attempts/{a['attempt_id']}/debug")
        assert r.status_code == 409

    def test_exhausted_budget_flags_without_model_call(self, strict_client):
        sid = new_session(strict_client)
        a = ask(strict_client, sid, TOTAL_QUERY).json()
        r = strict_client.post(f"/api/sessions/{sid}/attempts/{a['attempt_id']}/debug")
        assert r.status_code == 200
        b = r.json()
        assert b["status"] == "failed"
        assert b["diagnostics"]["budget_exhausted"] is True


class TestReadsAndPersistence:
    def test_history_in_submission_order(self, client):
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY).json()
        decide(client, sid, a["attempt_id"], "reject")
        b = ask(client, sid, COLOR_QUERY).json()
        history = client.get(f"/api/sessions/{sid}/history").json()
        assert [x["attempt_id"] for x in history] == [a["attempt_id"], b["attempt_id"]]
        assert [x["status"] for x in history] == ["rejected", "pending"]

    def test_sessions_survive_restart(self, tmp_path):
        state = str(tmp_path / "state")
        backend = replay_backend_for_path(str(FIXTURE))
        with TestClient(create_app(state, backend=backend)) as client:
            sid = new_session(client)
            a = ask(client, sid, COLOR_QUERY).json()
            decide(client, sid, a["attempt_id"], "approve")
        with TestClient(create_app(state, backend=backend)) as client:
            g = client.get(f"/api/sessions/{sid}/graph").json()
            assert all("color" in attrs for attrs in g["nodes"].values())
            assert len(client.get(f"/api/sessions/{sid}/history").json()) == 1

    def test_config_lists_pickers(self, client):
        cfg = client.get("/api/config").json()
        assert "graph_api" in cfg["backends"] and "direct_answer" in cfg["backends"]
        assert MODEL in cfg["models"]
        assert cfg["applications"] == ["traffic", "malt"]

    def test_sessions_do_not_block_each_other(self, client):
        ids = [new_session(client) for _ in range(3)]
        results = {}

        def worker(sid):
            results[sid] = ask(client, sid, COUNT_QUERY).json()["status"]

        threads = [threading.Thread(target=worker, args=(sid,)) for sid in ids]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(v == "pending" for v in results.values())
