"""Walk one operator session end to end: query, preview, approve.

Runs the service in-process against the recorded replies under
fixtures/service, so the full loop works offline. The same flow is what
the web console drives over HTTP.
"""

import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from nlnetops.gateway import replay_backend_for_path
from nlnetops.service import create_app

REPO = Path(__file__).resolve().parent.parent

COLOR_QUERY = "Assign each distinct /16 prefix its own color attribute on its hosts."


def run() -> int:
    backend = replay_backend_for_path(str(REPO / "fixtures" / "service"))
    with tempfile.TemporaryDirectory() as state:
        client = TestClient(create_app(state, backend=backend))

        sid = client.post(
            "/api/sessions",
            json={
                "application": "traffic",
                "generator": {"generator": "traffic", "nodes": 10, "edges": 20, "seed": 42},
            },
        ).json()["session_id"]
        print(f"session {sid[:12]}… opened on a 10-host traffic graph")

        attempt = client.post(
            f"/api/sessions/{sid}/query",
            json={"text": COLOR_QUERY, "backend": "graph_api", "model": "sim-alpha"},
        ).json()
        print(f"\noperator: {COLOR_QUERY}")
        print(f"\ngenerated code ({attempt['status']}):\n{attempt['code']}")
        d = attempt["diff"]
        print(
            f"preview diff: {d['changed_nodes']} nodes changed,"
            f" {d['added_edges']} edges added, {d['removed_edges']} removed"
        )

        decision = client.post(
            f"/api/sessions/{sid}/attempts/{attempt['attempt_id']}/decision",
            json={"decision": "approve"},
        ).json()
        print(f"\napproved -> graph version {decision['graph_version']}")

        graph = client.get(f"/api/sessions/{sid}/graph").json()
        colors = sorted({attrs["color"] for attrs in graph["nodes"].values()})
        print(f"committed graph now carries colors: {', '.join(colors)}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
