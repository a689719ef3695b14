"""Command-line entry point: ``discpath mine | apply | report``.

Exit codes: 0 ok, 2 usage, 3 file I/O, 4 schema or malformed input,
5 empty working subset / zero usable rows.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import resource
import sys
import time
from pathlib import Path

from .data import EmptySubsetError, Mode, Schema, SchemaError, confusion_counts, load_dataset
from .histogram import HistogramConfig
from .objective import DEFAULT_ALPHA_LADDER, ObjectiveConfig
from .pipeline import mine, root_histograms
from .report import (apply_path, emit_report, format_table, parse_report, predictions_csv,
                     write_atomic)
from .search import Rule

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SCHEMA, EXIT_EMPTY = 0, 2, 3, 4, 5
THREADS_ENV = "DISCPATH_THREADS"

log = logging.getLogger("discpath")


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _csv_list(text):
    return [s.strip() for s in text.split(",") if s.strip()]


def _float_list(text):
    return [float(s) for s in _csv_list(text)]


def _add_schema_flags(p):
    p.add_argument("input", type=Path, help="CSV file with a header row")
    p.add_argument("--truth", default="truth", help="ground-truth column (default: truth)")
    p.add_argument("--pred", default="prediction",
                   help="base-classifier prediction column (default: prediction)")
    p.add_argument("--features", type=_csv_list, default=None,
                   help="comma-separated feature columns (default: all other columns)")
    p.add_argument("--exclude", type=_csv_list, default=[],
                   help="comma-separated columns to drop from the features (default: none)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discpath", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging; repeat for debug (default: warnings only)")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mine", help="search for ranked discrimination paths")
    _add_schema_flags(m)
    m.add_argument("--mode", choices=[x.value for x in Mode], default=Mode.REDUCE_FP.value,
                   help="reduce-fp purges alarms, improve-tp rescues misses (default: reduce-fp)")
    m.add_argument("--delta-max", type=float, required=True,
                   help="budget for the secondary metric as a fraction, e.g. 0.05 (required)")
    m.add_argument("--alpha", type=float, default=None,
                   help="fixed alpha' weight; disables tuning (default: tune over the ladder)")
    m.add_argument("--alpha-ladder", type=_float_list, default=list(DEFAULT_ALPHA_LADDER),
                   help="comma-separated alpha' candidates (default: 0.25,0.5,1,2,4)")
    m.add_argument("--target", type=float, default=1.0, help="primary target fraction (default: 1.0)")
    m.add_argument("--depth", type=int, default=3, help="maximum rules per path (default: 3)")
    m.add_argument("--beam", type=int, default=3, help="children per node (default: 3)")
    m.add_argument("--fine-bins", type=int, default=256, help="fine histogram bins (default: 256)")
    m.add_argument("--p-pure", type=float, default=0.99,
                   help="purity at which adjacent bins merge (default: 0.99)")
    m.add_argument("--min-bin-count", type=int, default=1,
                   help="objects a fine bin needs to count as mixed (default: 1)")
    m.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or all cores)")
    m.add_argument("-o", "--output", type=Path, default=None, help="report file (default: stdout)")
    m.add_argument("--format", choices=["json", "text"], default="json",
                   help="report format (default: json)")
    m.add_argument("--include-timing", action="store_true",
                   help="embed wall time and peak memory in the report (default: off, keeps output reproducible)")
    m.add_argument("--dump-histograms", type=Path, default=None,
                   help="write root-level reduced histograms as JSON (default: off)")

    a = sub.add_parser("apply", help="apply a mined path and write revised predictions")
    _add_schema_flags(a)
    a.add_argument("--rules", type=Path, required=True,
                   help="rules JSON or a report from `mine` (required)")
    a.add_argument("--rank", type=int, default=None,
                   help="path rank to use from a report (default: the selected path)")
    a.add_argument("--mode", choices=[x.value for x in Mode], default=None,
                   help="override the mode stored in the rules file (default: from file, else reduce-fp)")
    a.add_argument("-o", "--output", type=Path, default=None,
                   help="revised predictions CSV (default: stdout)")

    r = sub.add_parser("report", help="render a JSON report as tables")
    r.add_argument("report", type=Path, help="JSON report written by `mine`")
    r.add_argument("--top", type=int, default=None, help="show only the first N paths (default: all)")
    return parser


class _Fail(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _load(args):
    schema = Schema(truth=args.truth, prediction=args.pred, features=args.features,
                    exclude=tuple(args.exclude))
    try:
        ds = load_dataset(args.input, schema)
    except FileNotFoundError as exc:
        raise _Fail(EXIT_IO, str(exc))
    except OSError as exc:
        raise _Fail(EXIT_IO, str(exc))
    if ds.dropped_rows:
        print(f"dropped {ds.dropped_rows} rows with missing or non-numeric features", file=sys.stderr)
    return ds


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
        return
    try:
        write_atomic(output, text)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {output}: {exc}")


def cmd_mine(args) -> int:
    try:
        cfg = ObjectiveConfig(mode=args.mode, constraint=args.delta_max,
                              alpha_prime=args.alpha or 1.0, target=args.target,
                              total_depth=args.depth, beam_width=args.beam)
        hist_cfg = HistogramConfig(args.fine_bins, args.p_pure, args.min_bin_count)
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc))
    if args.alpha is None and not args.alpha_ladder:
        raise _Fail(EXIT_USAGE, "alpha ladder is empty")
    threads = args.threads if args.threads is not None else default_threads()

    ds = _load(args)
    start = time.perf_counter()
    report = mine(ds, cfg, hist_cfg, threads=threads,
                  alpha_ladder=None if args.alpha is not None else args.alpha_ladder)
    elapsed = time.perf_counter() - start
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0
    if args.include_timing:
        report.timing = {"seconds": round(elapsed, 3), "peak_rss_mb": round(peak_mb, 1)}

    if args.dump_histograms is not None:
        _emit(json.dumps(root_histograms(ds, cfg, hist_cfg), indent=2) + "\n", args.dump_histograms)
    _emit(emit_report(report, args.format), args.output)
    if args.output is not None:
        sys.stdout.write(format_table(report, top=10))
    print(f"{len(report.paths)} paths from {report.n_nodes} nodes in {elapsed:.2f} s "
          f"(peak rss {peak_mb:.0f} MB)", file=sys.stderr)
    return EXIT_OK


def _read_rules(path: Path, rank):
    """Returns (rules given by feature name, mode or None)."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}")
    if not text.strip():
        return [], None
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise _Fail(EXIT_SCHEMA, f"malformed rules file: {exc}")
    if isinstance(doc, list):
        doc = {"rules": doc}
    if not isinstance(doc, dict):
        raise _Fail(EXIT_SCHEMA, "malformed rules file: expected an object or a list")

    mode = doc.get("mode") or doc.get("config", {}).get("mode")
    if "paths" in doc:
        paths = doc["paths"]
        if rank is not None:
            if not 1 <= rank <= len(paths):
                raise _Fail(EXIT_SCHEMA, f"rank {rank} outside 1..{len(paths)}")
            entry = paths[rank - 1]
        else:
            entry = next((p for p in paths if p["node_id"] == doc.get("selected_node")), None)
        rules = entry["rules"] if entry else []
    else:
        rules = doc.get("rules", [])
    try:
        return [(r["feature"], r["op"], float(r["threshold"])) for r in rules], mode
    except (KeyError, TypeError, ValueError) as exc:
        raise _Fail(EXIT_SCHEMA, f"malformed rule entry: {exc}")


def cmd_apply(args) -> int:
    named, file_mode = _read_rules(args.rules, args.rank)
    try:
        mode = Mode(args.mode or file_mode or Mode.REDUCE_FP.value)
    except ValueError as exc:
        raise _Fail(EXIT_SCHEMA, str(exc))
    ds = _load(args)
    try:
        rules = [Rule(ds.feature_index(name), op, t) for name, op, t in named]
    except ValueError as exc:
        raise _Fail(EXIT_SCHEMA, str(exc))
    revised = apply_path(rules, ds, mode)
    _emit(predictions_csv(ds, revised), args.output)

    before = confusion_counts(ds)
    after = confusion_counts(type(ds)(ds.features, ds.feature_names, ds.truth, revised, ds.row_ids))
    stream = sys.stdout if args.output is not None else sys.stderr
    print(f"before: tp={before.tp} fp={before.fp} tn={before.tn} fn={before.fn}", file=stream)
    print(f"after:  tp={after.tp} fp={after.fp} tn={after.tn} fn={after.fn}", file=stream)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        text = args.report.read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {args.report}: {exc}")
    try:
        report = parse_report(text)
    except ValueError as exc:
        raise _Fail(EXIT_SCHEMA, str(exc))
    sys.stdout.write(format_table(report, top=args.top))
    return EXIT_OK


COMMANDS = {"mine": cmd_mine, "apply": cmd_apply, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except EmptySubsetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
