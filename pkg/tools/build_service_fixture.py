"""Record the replay fixture that the service tests run against.

Drives the real service through scripted model replies, capturing each
prompt/reply pair under fixtures/service/. Every scenario starts from a
fresh session over the same (10, 20, seed 42) traffic graph so each
recorded bundle is reachable independently of test ordering. The script
re-drives everything through the written fixture before declaring success.
"""

import shutil
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from nlnetops.gateway import Completion, RecordingBackend, Usage, replay_backend_for_path
from nlnetops.prompting import estimate_tokens
from nlnetops.service import create_app

REPO = Path(__file__).resolve().parent.parent
OUT_DIR = REPO / "fixtures" / "service"
MODEL = "sim-alpha"

COUNT_QUERY = "How many hosts are on the network?"
COLOR_QUERY = "Assign each distinct /16 prefix its own color attribute on its hosts."
REMOVE_QUERY = "Remove every link that carried fewer than 2000 packets."
TOTAL_QUERY = "What is the total number of bytes exchanged on the network?"
BUSIEST_QUERY = "List the five busiest hosts by outgoing bytes."

GENERATOR = {"generator": "traffic", "nodes": 10, "edges": 20, "seed": 42}


def fence(code: str) -> str:
    return f"Here is the program.\n\n```python\n{code}\n```\n"


COUNT_CODE = "result = G.number_of_nodes()\n"

COLOR_CODE = """\
prefixes = sorted({n.rsplit(".", 2)[0] for n in G.nodes()})
colors = {p: "color-%d" % (i + 1) for i, p in enumerate(prefixes)}
for n in G.nodes():
    G.nodes[n]["color"] = colors[n.rsplit(".", 2)[0]]
result = None
"""

REMOVE_CODE = """\
doomed = [
    (u, v, k)
    for u, v, k, d in G.edges(keys=True, data=True)
    if d["packets"] < 2000
]
G.remove_edges_from(doomed)
result = None
"""

BAD_TOTAL_CODE = "result = G.total_traffic()\n"

GOOD_TOTAL_CODE = "result = sum(d['bytes'] for _, _, d in G.edges(data=True))\n"


class ScriptedBackend:
    """Routes each prompt to its scripted reply by purpose and query text."""

    def complete(self, bundle, cfg, n):
        assert n == 1, f"service should sample once, asked for {n}"
        text = self._reply(bundle)
        return [
            Completion(
                text=text,
                usage=Usage(estimate_tokens(bundle.first_user_content()), 64),
                latency_s=0.0,
                attempt_index=0,
            )
        ]

    def _reply(self, bundle) -> str:
        if bundle.purpose == "selfdebug":
            return fence(GOOD_TOTAL_CODE)
        if bundle.purpose == "strawman":
            return 'The answer is below.\n\n```json\n{"kind": "scalar", "value": 10}\n```\n'
        content = bundle.first_user_content()
        for query, reply in (
            (COUNT_QUERY, fence(COUNT_CODE)),
            (COLOR_QUERY, fence(COLOR_CODE)),
            (REMOVE_QUERY, fence(REMOVE_CODE)),
            (TOTAL_QUERY, fence(BAD_TOTAL_CODE)),
            (BUSIEST_QUERY, "Sorry, I cannot help with that."),
        ):
            if query in content:
                return reply
        raise AssertionError(f"no scripted reply matches: {content[:160]}")


def new_session(client) -> str:
    r = client.post("/api/sessions", json={"application": "traffic", "generator": GENERATOR})
    assert r.status_code == 200, r.text
    return r.json()["session_id"]


def ask(client, sid, query, backend="graph_api"):
    r = client.post(
        f"/api/sessions/{sid}/query",
        json={"text": query, "backend": backend, "model": MODEL},
    )
    assert r.status_code == 200, r.text
    return r.json()


def drive(backend) -> list[dict]:
    """Run every scenario once; return the attempt payloads for comparison."""
    seen = []
    with tempfile.TemporaryDirectory() as state:
        app = create_app(state, backend=backend)
        client = TestClient(app)

        # read-only count: empty diff, then approve
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY)
        assert a["status"] == "pending" and a["envelope"]["value"] == 10, a
        assert a["diff"]["changed_nodes"] == 0 and a["diff"]["removed_edges"] == 0
        r = client.post(
            f"/api/sessions/{sid}/attempts/{a['attempt_id']}/decision",
            json={"decision": "approve"},
        )
        assert r.json() == {"status": "approved", "graph_version": 1}, r.text
        seen.append(a)

        # coloring mutation: changed node attrs only
        sid = new_session(client)
        a = ask(client, sid, COLOR_QUERY)
        assert a["status"] == "pending", a
        assert a["diff"]["changed_nodes"] == 10, a["diff"]
        assert a["diff"]["added_edges"] == a["diff"]["removed_edges"] == 0
        client.post(
            f"/api/sessions/{sid}/attempts/{a['attempt_id']}/decision",
            json={"decision": "approve"},
        )
        g = client.get(f"/api/sessions/{sid}/graph").json()
        assert all("color" in attrs for attrs in g["nodes"].values())
        seen.append(a)

        # edge removal
        sid = new_session(client)
        a = ask(client, sid, REMOVE_QUERY)
        assert a["status"] == "pending" and a["diff"]["removed_edges"] > 0, a
        seen.append(a)

        # failure then self-debug recovery
        sid = new_session(client)
        a = ask(client, sid, TOTAL_QUERY)
        assert a["status"] == "failed", a
        assert a["diagnostics"]["error_class"] == "ImaginaryFileOrFunction", a
        r = client.post(f"/api/sessions/{sid}/attempts/{a['attempt_id']}/debug")
        b = r.json()
        assert r.status_code == 200 and b["status"] == "pending", r.text
        assert b["envelope"]["value"] == 9800978, b
        seen.append(a)
        seen.append(b)

        # reply without a code fence
        sid = new_session(client)
        a = ask(client, sid, BUSIEST_QUERY)
        assert a["status"] == "failed", a
        seen.append(a)

        # strawman path
        sid = new_session(client)
        a = ask(client, sid, COUNT_QUERY, backend="direct_answer")
        assert a["status"] == "pending" and a["envelope"]["value"] == 10
        seen.append(a)
    return seen


def main() -> int:
    if OUT_DIR.exists():
        shutil.rmtree(OUT_DIR)
    OUT_DIR.mkdir(parents=True)

    recorded = drive(RecordingBackend(ScriptedBackend(), str(OUT_DIR / f"{MODEL}.jsonl")))
    replayed = drive(replay_backend_for_path(str(OUT_DIR)))

    strip = lambda a: {k: v for k, v in a.items() if k != "created"}
    assert [strip(a) for a in recorded] == [strip(a) for a in replayed], "replay drift"

    lines = sum(1 for _ in open(OUT_DIR / f"{MODEL}.jsonl"))
    print(f"service fixture ready: {lines} replies under {OUT_DIR}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
