"""Command line front end.

Exit codes: 0 success, 1 validation error, 2 IO error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .core import BlimpError
from .harness import (
    Scenario,
    compare,
    compute_metrics,
    load_scenario,
    read_trace,
    simulate,
    write_run_metadata,
    write_trace,
)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="blimpsim",
        description="Blimp simulator: headless runs, comparisons, live service.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its trace")
    run.add_argument("--scenario", required=True)
    run.add_argument("--out", required=True, help="trace CSV path")
    run.add_argument("--assist", choices=("on", "off"))
    run.add_argument("--seed", type=int)

    cmp_ = sub.add_parser("compare",
                          help="run assist on/off pair, write a JSON report")
    cmp_.add_argument("--scenario", required=True)
    cmp_.add_argument("--out", required=True, help="report JSON path")

    met = sub.add_parser("metrics", help="metrics of an existing trace")
    met.add_argument("--trace", required=True)
    met.add_argument("--scenario", help="scenario for task geometry (optional)")

    srv = sub.add_parser("serve", help="interactive WebSocket piloting service")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--scenario", required=True)
    srv.add_argument("--out-dir", default=".",
                     help="directory for the recorded session (default: cwd)")
    return ap


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if args.assist is not None:
        sc = dataclasses.replace(sc, assist=args.assist)
    if args.seed is not None:
        sc = dataclasses.replace(sc, seed=args.seed)
    trace, _ = simulate(sc)
    write_trace(trace, args.out)
    write_run_metadata(args.out, sc)
    report = compute_metrics(trace, sc)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_compare(args) -> int:
    sc = load_scenario(args.scenario)
    sc_on = dataclasses.replace(sc, assist="on")
    sc_off = dataclasses.replace(sc, assist="off")
    report = compare(sc_on, sc_off)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_metrics(args) -> int:
    trace = read_trace(args.trace)
    sc = load_scenario(args.scenario) if args.scenario else Scenario()
    report = compute_metrics(trace, sc)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve_forever

    sc = load_scenario(args.scenario)
    serve_forever(sc, port=args.port, out_dir=args.out_dir)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "compare": _cmd_compare,
                "metrics": _cmd_metrics, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except OSError as e:
        print(f"IO error: {e}", file=sys.stderr)
        return 2
    except (BlimpError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
