"""Run the MALT suite against recorded model replies and print the report.

No network access needed: replies come from fixtures/accuracy. The run
directory lands in a temp dir and is rendered with the same code path as
`nlnetops report`.
"""

import sys
import tempfile
from pathlib import Path

from nlnetops.cli import main

REPO = Path(__file__).resolve().parent.parent


def run() -> int:
    with tempfile.TemporaryDirectory() as out:
        code = main(
            [
                "run",
                "--suite", str(REPO / "suites" / "malt.json"),
                "--backends", "relational,tabular,graph_api",
                "--models", "sim-alpha,sim-beta,sim-gamma,sim-delta",
                "--k", "1",
                "--self-debug", "0",
                "--replay", str(REPO / "fixtures" / "accuracy"),
                "--out", out,
                "--concurrency", "8",
            ]
        )
        if code != 0:
            return code
        print()
        return main(["report", "--run", out, "--format", "table"])


if __name__ == "__main__":
    sys.exit(run())
