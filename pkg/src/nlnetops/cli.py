"""Command-line entry point.

Subcommands: `run` executes a suite/backend/model matrix, `report` renders
the tables for a finished run, `cost-sweep` compares prompt-size scaling,
`validate-suite` checks suite assets, and `serve` starts the interactive
session service. Exit code 0 means no configuration or suite defects.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, NlnetopsError
from .evaluating import load_suite
from .gateway import Gateway, load_models_config
from .sandbox import ExecBackendKind


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlnetops")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark matrix")
    run.add_argument("--suite", nargs="+", action="extend", required=True,
                     help="suite file; repeatable")
    run.add_argument("--backends", required=True,
                     help="comma-separated execution backends")
    run.add_argument("--models", required=True,
                     help="comma-separated model names")
    run.add_argument("--k", type=int, default=1, help="samples per case")
    run.add_argument("--self-debug", type=int, default=0, dest="self_debug",
                     help="repair rounds per failing sample")
    mode = run.add_mutually_exclusive_group(required=True)
    mode.add_argument("--replay", metavar="FIXTURE",
                      help="serve completions from a recorded fixture")
    mode.add_argument("--record", metavar="FIXTURE",
                      help="call the live endpoint and record completions")
    mode.add_argument("--live", action="store_true",
                      help="call the live endpoint without recording")
    run.add_argument("--out", required=True, help="run output directory")
    run.add_argument("--concurrency", type=int, default=4)

    report = sub.add_parser("report", help="render tables for a finished run")
    report.add_argument("--run", required=True, dest="run_dir")
    report.add_argument("--format", choices=("table", "csv"), default="table")

    sweep = sub.add_parser("cost-sweep", help="prompt-size scaling comparison")
    sweep.add_argument("--sizes", required=True,
                       help="comma-separated element counts, ascending")
    sweep.add_argument("--models", required=True)
    sweep.add_argument("--out", required=True)

    validate = sub.add_parser("validate-suite", help="check suite assets")
    validate.add_argument("--suite", nargs="+", action="extend", required=True)

    serve = sub.add_parser("serve", help="start the interactive session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--state-dir", required=True,
                       help="directory holding session state")
    serve.add_argument("--replay", metavar="FIXTURE",
                       help="serve completions from a recorded fixture")
    serve.add_argument("--live", action="store_true",
                       help="call the live endpoint")

    return parser


def _csv_list(text: str) -> list[str]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise NlnetopsError(f"empty list argument: {text!r}")
    return items


def _resolve_models(names: list[str]):
    config = load_models_config()
    missing = [n for n in names if n not in config]
    if missing:
        raise ConfigError(
            f"unknown model(s) {', '.join(missing)}; configured: {', '.join(sorted(config))}"
        )
    return [config[name] for name in names]


def _make_backend(args):
    from .gateway import HttpChatBackend, RecordingBackend, replay_backend_for_path

    if args.replay:
        return replay_backend_for_path(args.replay)
    live = HttpChatBackend()
    if getattr(args, "record", None):
        return RecordingBackend(live, args.record)
    return live


def _cmd_run(args) -> int:
    from .runner import RunMatrix, run_matrix

    suites = tuple(load_suite(path) for path in args.suite)
    backends = tuple(ExecBackendKind.parse(b) for b in _csv_list(args.backends))
    models = tuple(_resolve_models(_csv_list(args.models)))
    matrix = RunMatrix(
        suites=suites,
        backends=backends,
        models=models,
        k=args.k,
        debug_budget=args.self_debug,
        concurrency=args.concurrency,
    )
    gateway = Gateway(_make_backend(args))
    log = run_matrix(matrix, gateway, args.out)
    passed = sum(1 for r in log.records if r.verdict.passed)
    print(f"run complete: {len(log.records)} records, {passed} passing, "
          f"{len(log.meta['defects'])} defects -> {args.out}")
    for defect in log.meta["defects"]:
        print(f"  defect: {defect['case_id']}/{defect['backend']}/{defect['model']}: "
              f"{defect['error']}", file=sys.stderr)
    return 1 if log.meta["defects"] else 0


def _cmd_report(args) -> int:
    from .reports import render_run_report
    from .runner import load_run

    log = load_run(args.run_dir)
    sys.stdout.write(render_run_report(log, args.format))
    return 0


def _cmd_cost_sweep(args) -> int:
    from .costs import cost_sweep

    sizes = [int(s) for s in _csv_list(args.sizes)]
    models = _resolve_models(_csv_list(args.models))
    dataset = cost_sweep(sizes, models, args.out)
    summary = dataset["summary"]
    print(f"cost sweep over sizes {dataset['sizes']} -> {args.out}/costs.json")
    print(f"  codegen token spread: {summary['codegen_spread_pct']:.2f}%")
    print(f"  strawman strictly increasing: {summary['strawman_strictly_increasing']}")
    for model, size in sorted(summary["first_strawman_overflow_size"].items()):
        print(f"  {model}: strawman overflows at size {size}")
    return 0


def _cmd_validate_suite(args) -> int:
    from .runner import validate_suite

    defective = 0
    for path in args.suite:
        defects = validate_suite(path)
        if defects:
            defective += 1
            print(f"{path}: {len(defects)} defect(s)")
            for d in defects:
                print(f"  {d}")
        else:
            print(f"{path}: ok")
    return 1 if defective else 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    backend = _make_backend(args) if (args.replay or args.live) else None
    app = create_app(state_dir=args.state_dir, backend=backend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "report": _cmd_report,
    "cost-sweep": _cmd_cost_sweep,
    "validate-suite": _cmd_validate_suite,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NlnetopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
