"""Record service responses for the console's contract tests.

Drives the session service over the recorded completion fixture and dumps
selected response bodies as JSON files under frontend/tests/fixtures/. The
console's tests render these and check that every displayed figure matches
the recorded payload, so the UI provably invents nothing.

Run from the repository root:

    python3 tools/build_ui_fixtures.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from nlnetops.errors import TransportError
from nlnetops.gateway import Completion, CompletionBackend, replay_backend_for_path
from nlnetops.service import create_app

OUT_DIR = ROOT / "frontend" / "tests" / "fixtures"
SERVICE_FIXTURE = ROOT / "fixtures" / "service"

GENERATOR = {"generator": "traffic", "nodes": 10, "edges": 20, "seed": 42}
COUNT_QUERY = "How many hosts are on the network?"
COLOR_QUERY = "Assign each distinct /16 prefix its own color attribute on its hosts."
TOTAL_QUERY = "What is the total number of bytes exchanged on the network?"
MODEL = "sim-alpha"


class FailingBackend(CompletionBackend):
    def complete(self, bundle, cfg, n=1) -> list[Completion]:
        raise TransportError("connection refused")


def new_session(client: TestClient) -> str:
    r = client.post("/api/sessions", json={"application": "traffic", "generator": GENERATOR})
    assert r.status_code == 200, r.text
    return r.json()["session_id"]


def dump(name: str, payload) -> None:
    path = OUT_DIR / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {path.relative_to(ROOT)}")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    backend = replay_backend_for_path(str(SERVICE_FIXTURE))

    with tempfile.TemporaryDirectory() as state_dir:
        app = create_app(state_dir=state_dir, backend=backend)
        client = TestClient(app)

        dump("config", client.get("/api/config").json())

        # Mutating flow: color the hosts, inspect the preview, approve.
        sid = new_session(client)
        dump("graph_v0", client.get(f"/api/sessions/{sid}/graph").json())
        r = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": COLOR_QUERY, "backend": "graph_api", "model": MODEL},
        )
        assert r.status_code == 200, r.text
        pending = r.json()
        assert pending["status"] == "pending"
        dump("attempt_color_pending", pending)

        # A second query while one is pending is refused.
        r = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": COUNT_QUERY, "backend": "graph_api", "model": MODEL},
        )
        assert r.status_code == 409
        dump("error_409", {"status": 409, "body": r.json()})

        aid = pending["attempt_id"]
        r = client.post(
            f"/api/sessions/{sid}/attempts/{aid}/decision", json={"decision": "approve"}
        )
        assert r.status_code == 200, r.text
        dump("decision_approved", r.json())
        dump("graph_v1", client.get(f"/api/sessions/{sid}/graph").json())
        dump("history_after_approve", client.get(f"/api/sessions/{sid}/history").json())

        # Read-only flow: the count query leaves the graph untouched.
        sid = new_session(client)
        r = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": COUNT_QUERY, "backend": "graph_api", "model": MODEL},
        )
        assert r.status_code == 200, r.text
        assert r.json()["status"] == "pending"
        dump("attempt_count_pending", r.json())

        # Failure plus recovery through one self-debug round.
        sid = new_session(client)
        r = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": TOTAL_QUERY, "backend": "graph_api", "model": MODEL},
        )
        assert r.status_code == 200, r.text
        failed = r.json()
        assert failed["status"] == "failed", failed
        dump("attempt_total_failed", failed)
        r = client.post(f"/api/sessions/{sid}/attempts/{failed['attempt_id']}/debug")
        assert r.status_code == 200, r.text
        assert r.json()["status"] == "pending"
        dump("attempt_debug_recovered", r.json())

        # Validation failure: unknown backend name.
        sid = new_session(client)
        r = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": COUNT_QUERY, "backend": "quantum", "model": MODEL},
        )
        assert r.status_code == 422
        dump("error_422", {"status": 422, "body": r.json()})

    # Gateway outage: the service records the failed attempt and returns 502.
    with tempfile.TemporaryDirectory() as state_dir:
        app = create_app(state_dir=state_dir, backend=FailingBackend())
        client = TestClient(app)
        sid = new_session(client)
        r = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": COUNT_QUERY, "backend": "graph_api", "model": MODEL},
        )
        assert r.status_code == 502, r.text
        dump("error_502", {"status": 502, "body": r.json()})

    print("done")


if __name__ == "__main__":
    main()
