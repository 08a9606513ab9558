"""Command line entry point."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import IrosError, StageFailed
from .pipeline import (
    REPORT_KINDS,
    latest_completed,
    load_config,
    report,
    run_dirs,
    run_until,
    step,
)

# each data subcommand runs the pipeline through its final stage
_TARGETS = {
    "ingest": "ingest",
    "demand": "consolidate",
    "exceptions": "exceptions",
    "prioritize": "prioritize",
    "features": "features",
    "cluster-series": "cluster",
    "tune": "tune",
    "forecast": "forecast",
    "plan": "summarize",
}

_HELP = {
    "ingest": "copy and normalize the source data",
    "demand": "consolidate demand events into buckets",
    "exceptions": "score demand exceptions",
    "prioritize": "group SKUs into priority classes",
    "features": "extract series features",
    "cluster-series": "cluster series by feature profile",
    "tune": "shortlist and select forecast models",
    "forecast": "produce point forecasts",
    "plan": "optimize replenishment and summarize orders",
}


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation errors (exit 1); 2 means a stage failed
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="iros", description="Inventory replenishment decision support."
    )
    parser.add_argument("--config", default="iros.conf",
                        help="pipeline config file (default: %(default)s)")
    parser.add_argument("--run-dir", default="runs",
                        help="directory holding run artifacts (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the base random seed")

    pipe_flags = _Parser(add_help=False)
    pipe_flags.add_argument("--refresh-priorities", action="store_true",
                            help="recompute priority classes instead of reusing them")

    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in _HELP.items():
        sub.add_parser(name, help=text, parents=[pipe_flags])

    sp = sub.add_parser("step", help="advance the window with new demand events",
                        parents=[pipe_flags])
    sp.add_argument("--events", required=True, help="CSV of new demand events")

    rp = sub.add_parser("report", help="emit analysis files from a completed run")
    rp.add_argument("--kind", required=True, choices=REPORT_KINDS)
    rp.add_argument("--run", default=None, help="run id (default: latest completed)")

    sv = sub.add_parser("serve", help="start the plan review API")
    sv.add_argument("--bind", default="127.0.0.1:8571", help="host:port to listen on")
    return parser


def _report_run(root: Path, run_id: str | None) -> Path:
    if run_id is not None:
        run = root / run_id
        if not run.is_dir():
            raise IrosError(f"no run directory {run}")
        return run
    run = latest_completed(root)
    if run is None:
        dirs = run_dirs(root)
        if not dirs:
            raise IrosError(f"no runs under {root}")
        run = dirs[-1]
    return run


def _dispatch(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config))
    if args.seed is not None:
        cfg = replace(cfg, seed_base=args.seed)
    root = Path(args.run_dir)

    if args.command in _TARGETS:
        man = run_until(cfg, root, _TARGETS[args.command],
                        refresh_priorities=args.refresh_priorities)
        last = man.stages[-1]
        print(f"{man.run_id}: {len(man.stages)} stage(s) done, "
              f"last {last.name} ({last.seconds:.2f}s)")
        return 0

    if args.command == "step":
        man = step(cfg, root, Path(args.events),
                   refresh_priorities=args.refresh_priorities)
        counts: dict[str, int] = {}
        for label in man.stability.values():
            counts[label] = counts.get(label, 0) + 1
        parts = ", ".join(f"{counts.get(k, 0)} {k}"
                          for k in ("stable", "unstable", "pending"))
        print(f"{man.run_id}: advanced from {man.prior_run_id}; {parts}")
        return 0

    if args.command == "report":
        run = _report_run(root, args.run)
        for path in report(cfg, run, args.kind):
            print(path)
        return 0

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        host, _, port = args.bind.rpartition(":")
        app = create_app(cfg, root)
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
        return 0

    raise IrosError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except StageFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IrosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
