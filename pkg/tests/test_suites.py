"""Checks over the shipped suites: goldens, validators, and mutants."""

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

from nlnetops.evaluating import (
    Difficulty,
    ErrorClass,
    evaluate_outcome,
    fixture_graph,
    golden_outcome,
    load_suite,
)
from nlnetops.graphs import graph_equal
from nlnetops.sandbox import ExecBackendKind, execute

SUITE_DIR = Path(__file__).resolve().parent.parent / "suites"
CODE_BACKENDS = (
    ExecBackendKind.GRAPH_API,
    ExecBackendKind.TABULAR,
    ExecBackendKind.RELATIONAL,
)
TRAFFIC_IDS = ["traffic-%s%d" % (d, i) for d in "emh" for i in range(1, 9)]
MALT_IDS = ["malt-%s%d" % (d, i) for d in "emh" for i in range(1, 4)]


@pytest.fixture(scope="module")
def suites():
    return {
        "traffic": load_suite(str(SUITE_DIR / "traffic.json")),
        "malt": load_suite(str(SUITE_DIR / "malt.json")),
    }


@pytest.fixture(scope="module")
def cases(suites):
    return {c.id: c for s in suites.values() for c in s.cases}


@pytest.fixture(scope="module")
def goldens(cases):
    """Warm every (case, backend) golden once, in parallel."""

    def run(job):
        case, be = job
        return (case.id, be), golden_outcome(case, be)

    jobs = [(c, be) for c in cases.values() for be in CODE_BACKENDS]
    with ThreadPoolExecutor(max_workers=8) as pool:
        return dict(pool.map(run, jobs))


def test_suite_shapes(suites):
    traffic, malt = suites["traffic"], suites["malt"]
    assert [c.id for c in traffic.cases] == TRAFFIC_IDS
    assert [c.id for c in malt.cases] == MALT_IDS
    for suite, per_level in ((traffic, 8), (malt, 3)):
        for level in Difficulty:
            count = sum(1 for c in suite.cases if c.difficulty is level)
            assert count == per_level


def test_flags_are_where_expected(cases):
    ordered = {cid for cid, c in cases.items() if c.ordered}
    mutating = {cid for cid, c in cases.items() if c.mutating}
    validated = {cid for cid, c in cases.items() if c.validator is not None}
    assert ordered == {"traffic-m2"}
    assert mutating == {"traffic-h5", "traffic-h6", "malt-h1", "malt-h3"}
    assert validated == {"traffic-h1", "traffic-h2"}


@pytest.mark.parametrize("cid", TRAFFIC_IDS + MALT_IDS)
def test_golden_passes_on_every_backend(cid, cases, goldens):
    for be in CODE_BACKENDS:
        out = goldens[(cid, be)]
        assert out.passed, f"{cid}/{be.value}: {out.message}"


@pytest.mark.parametrize("cid", TRAFFIC_IDS + MALT_IDS)
def test_backends_agree(cid, cases, goldens):
    """Each golden is the same program three ways, so all must pass together."""
    case = cases[cid]
    reference = goldens[(cid, ExecBackendKind.GRAPH_API)]
    for be in (ExecBackendKind.TABULAR, ExecBackendKind.RELATIONAL):
        verdict = evaluate_outcome(goldens[(cid, be)], reference, case)
        assert verdict.passed, f"{cid}/{be.value}: {verdict.detail}"


def test_mutating_goldens_transform_the_graph_identically(cases, goldens):
    for cid in ("traffic-h5", "traffic-h6", "malt-h1", "malt-h3"):
        before = fixture_graph(cases[cid])
        after = goldens[(cid, ExecBackendKind.GRAPH_API)].envelope.graph_after
        assert not graph_equal(after, before).equal
        for be in (ExecBackendKind.TABULAR, ExecBackendKind.RELATIONAL):
            other = goldens[(cid, be)].envelope.graph_after
            report = graph_equal(other, after)
            assert report.equal, f"{cid}/{be.value}: {report.first_difference}"


def test_known_answers(goldens):
    """Spot checks computed by hand from the seeded fixtures."""
    g = ExecBackendKind.GRAPH_API
    value = lambda cid: goldens[(cid, g)].envelope.value
    assert value("traffic-e1") == 10
    assert value("traffic-e2") == 20
    assert value("traffic-e3") == 9800978
    assert value("traffic-e4") == 9126
    assert value("traffic-e6") == 11
    assert value("traffic-e7") == 1
    assert value("traffic-e8") == "15.77.140.63"
    assert value("traffic-m3") == pytest.approx(490048.9)
    assert value("traffic-m5") == "12.31.111.60"
    assert value("traffic-m7") == 4
    assert value("traffic-h3") == 10
    assert value("traffic-h4") == 4
    assert value("traffic-h8") == 8909073
    assert value("malt-e1") == 6
    assert value("malt-e2") == ["ch1", "ch2", "ch3"]
    assert value("malt-e3") == 175
    assert value("malt-m2") == "ch2"
    assert value("malt-m3") == 261
    spare = {r["key"]: r["value"] for r in value("malt-h2")}
    assert spare == {"ch1": 15, "ch2": -203, "ch3": -91}


def test_validator_accepts_any_consistent_coloring(cases, goldens):
    # Different color names than the golden's must still pass.
    case = cases["traffic-h1"]
    code = (
        'prefixes = sorted({n.rsplit(".", 2)[0] for n in G.nodes()})\n'
        'result = {p: "paint-%d" % (40 - i) for i, p in enumerate(prefixes)}\n'
    )
    out = execute(code, fixture_graph(case), ExecBackendKind.GRAPH_API)
    verdict = evaluate_outcome(
        out, goldens[(case.id, ExecBackendKind.GRAPH_API)], case
    )
    assert verdict.passed, verdict.detail


def test_validator_accepts_relabelled_clusters(cases, goldens):
    case = cases["traffic-h2"]
    code = (
        'result = {n: "zone " + n.rsplit(".", 2)[0] for n in G.nodes()}\n'
    )
    out = execute(code, fixture_graph(case), ExecBackendKind.GRAPH_API)
    verdict = evaluate_outcome(
        out, goldens[(case.id, ExecBackendKind.GRAPH_API)], case
    )
    assert verdict.passed, verdict.detail


def test_validator_rejects_missing_prefix(cases, goldens):
    case = cases["traffic-h1"]
    code = (
        'prefixes = sorted({n.rsplit(".", 2)[0] for n in G.nodes()})[:-1]\n'
        'result = {p: "color-%d" % (i + 1) for i, p in enumerate(prefixes)}\n'
    )
    out = execute(code, fixture_graph(case), ExecBackendKind.GRAPH_API)
    verdict = evaluate_outcome(
        out, goldens[(case.id, ExecBackendKind.GRAPH_API)], case
    )
    assert not verdict.passed
    assert verdict.error_class is ErrorClass.WRONG_CALCULATION_LOGIC


@pytest.fixture(scope="module")
def mutants():
    with open(SUITE_DIR / "mutants" / "manifest.json") as f:
        manifest = json.load(f)
    return manifest["mutants"]


def test_every_case_has_a_mutant(mutants, cases):
    assert set(mutants) == set(cases)


@pytest.mark.parametrize("cid", TRAFFIC_IDS + MALT_IDS)
def test_mutant_runs_clean_but_is_caught(cid, mutants, cases, goldens):
    spec = mutants[cid]
    case = cases[cid]
    code = (SUITE_DIR / "mutants" / spec["program"]).read_text()
    be = ExecBackendKind(spec["backend"])
    out = execute(code, fixture_graph(case), be)
    assert out.passed, f"{cid}: mutant must execute cleanly, got {out.message!r}"
    verdict = evaluate_outcome(out, goldens[(cid, be)], case)
    assert not verdict.passed, f"{cid}: mutant slipped through"
    assert verdict.error_class in (
        ErrorClass.WRONG_CALCULATION_LOGIC,
        ErrorClass.GRAPHS_NOT_IDENTICAL,
    ), f"{cid}: classified as {verdict.error_class}"
