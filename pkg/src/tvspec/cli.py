"""Command line entry point: ``tvspec experiment | segment | simulate``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import EXPERIMENT_DEFAULTS, ExperimentSpec, emit_table, run_experiment
from .exceptions import DegenerateInputError, FormatError
from .io import read_scenario, series_to_csv
from .segment import SegmentConfig, emit_report, ingest, segment
from .simulate import simulate_transition_record

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_DEGENERATE = 3


def _int_list(text):
    return tuple(int(v) for v in text.split(","))


def _k_range(text):
    """``"2:10"`` → ``(2, ..., 10)``; a comma list is taken as is."""
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":"))
        return tuple(range(lo, hi + 1))
    return _int_list(text)


def _format_for(path, default="csv"):
    suffix = Path(path).suffix.lower() if path else ""
    return {".json": "json", ".md": "markdown", ".csv": "csv"}.get(suffix, default)


def build_parser():
    parser = argparse.ArgumentParser(prog="tvspec", description="Spectral TV clustering, benchmarks and sea-state segmentation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="replicate a clustering benchmark")
    exp.add_argument("--id", required=True, choices=sorted(EXPERIMENT_DEFAULTS))
    exp.add_argument("--T", type=_int_list, default=None, help="comma-separated series lengths")
    exp.add_argument("--N", type=int, default=100, help="replications")
    exp.add_argument("--k", type=_int_list, default=None, help="comma-separated cluster counts")
    exp.add_argument("--measures", type=lambda s: tuple(s.split(",")), default=None)
    exp.add_argument("--linkage", choices=("complete", "average"), default="complete")
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--format", choices=("csv", "json", "markdown"), default=None)
    exp.add_argument("--out", default=None, help="output file (stdout when omitted)")

    seg = sub.add_parser("segment", help="segment a wave record into stationary periods")
    seg.add_argument("--in", dest="inp", required=True, help="CSV with header t,x")
    seg.add_argument("--window-s", type=float, default=1800.0)
    seg.add_argument("--linkage", choices=("complete", "average"), default="average")
    seg.add_argument("--k-range", type=_k_range, default=tuple(range(2, 11)))
    seg.add_argument("--k", type=int, default=None, help="force the number of clusters")
    seg.add_argument("--min-run", type=int, default=3)
    seg.add_argument(
        "--min-silhouette", type=float, default=0.5, help="below this mean silhouette the record is one cluster"
    )
    seg.add_argument("--out", default=None, help="report file, .json or .csv (stdout when omitted)")
    seg.add_argument("--emit-gnuplot", default=None, metavar="DIR")

    sim = sub.add_parser("simulate", help="simulate a multi-phase record from a scenario file")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default=None)
    sim.add_argument("--labels", default=None, help="also write per-window ground truth (CSV)")
    return parser


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_experiment(args):
    spec = ExperimentSpec(
        experiment=args.id,
        T=args.T,
        N=args.N,
        k=args.k,
        measures=args.measures,
        linkage=args.linkage,
        seed=args.seed,
        n_jobs=args.jobs,
    )
    table = run_experiment(spec)
    _emit(emit_table(table, args.format or _format_for(args.out)), args.out)
    return EXIT_OK


def _cmd_segment(args):
    ts = ingest(args.inp)
    cfg = SegmentConfig(
        window_len_s=args.window_s,
        linkage=args.linkage,
        k_range=args.k_range,
        k=args.k,
        min_run=args.min_run,
        min_silhouette=args.min_silhouette,
    )
    report = segment(ts, cfg)
    fmt = _format_for(args.out, "json")
    _emit(emit_report(report, "csv" if fmt == "csv" else "json"), args.out)
    if args.emit_gnuplot:
        emit_report(report, "gnuplot", args.emit_gnuplot)
    return EXIT_OK


def _cmd_simulate(args):
    scenario = read_scenario(args.scenario)
    record, labels = simulate_transition_record(scenario, args.seed)
    _emit(series_to_csv(record), args.out)
    if args.labels:
        rows = ["window,label"] + [f"{i},{int(lab)}" for i, lab in enumerate(labels)]
        Path(args.labels).write_text("\n".join(rows) + "\n")
    return EXIT_OK


COMMANDS = {"experiment": _cmd_experiment, "segment": _cmd_segment, "simulate": _cmd_simulate}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2, which is reserved for format errors here
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DegenerateInputError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
