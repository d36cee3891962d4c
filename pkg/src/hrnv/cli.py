"""Command-line front end: analyze, batch, detect, compare, serve.

Flag defaults mirror the analysis defaults throughout the package (outlier
threshold 0.2, n = m = 1, Lomb PSD, 0-0.04 / 0.04-0.15 / 0.15-0.4 Hz bands,
entropy embedding 2 with tolerance factor 0.15).

Exit codes: 0 success, 1 record-level error in --strict mode, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .core import MetricsReport
from .errors import BatchTypeViolation, CountMismatch, HrnvError
from .freq_domain import FreqConfig, PSD_METHODS
from .io_formats import InputDescriptor, RecordError, read_peaks, write_peaks, write_report
from .nonlinear import DfaConfig, EntropyConfig
from .pipeline import (
    AnalysisRequest,
    analyze,
    analyze_batch,
    compare_annotations,
    relative_error,
)
from .preprocess import REPAIR_ACTIONS, PreprocessConfig
from .qrs import SNAP_MODES, DetectorConfig, detect_r_peaks, remove_baseline
from .transform import enumerate_plans

_UNIT_NAMES = {"s": "seconds", "ms": "milliseconds"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except HrnvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hrnv",
        description="Heart rate n-variability (HRnV) and HRV analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    input_flags = argparse.ArgumentParser(add_help=False)
    input_flags.add_argument("--type", choices=("ecg", "rri", "peaks"), default="rri",
                             help="input data type (default: %(default)s)")
    input_flags.add_argument("--fs", type=float, help="sampling rate in Hz (required for ecg)")
    input_flags.add_argument("--unit", choices=("s", "ms"), default="s",
                             help="unit of rri inputs (default: %(default)s)")
    input_flags.add_argument("--prefix", default="", help="record-ID prefix to strip")
    input_flags.add_argument("--postfix", default="", help="record-ID postfix to strip")

    detect_flags = argparse.ArgumentParser(add_help=False)
    detect_flags.add_argument("--segment", type=_parse_range, metavar="START:END",
                              help="half-open sample range to analyze")
    detect_flags.add_argument("--baseline-remove", action="store_true",
                              help="remove baseline drift before QRS detection")
    detect_flags.add_argument("--snap-mode", choices=SNAP_MODES, default="auto",
                              help="snap detected peaks to a local extremum (default: %(default)s)")
    detect_flags.add_argument("--snap-window-ms", type=float, default=50.0,
                              help="snap search window (default: %(default)s)")
    detect_flags.add_argument("--refractory-ms", type=float, default=250.0,
                              help="detector refractory period (default: %(default)s)")
    detect_flags.add_argument("--threshold-fraction", type=float, default=0.3,
                              help="adaptive threshold fraction (default: %(default)s)")

    analysis_flags = argparse.ArgumentParser(add_help=False)
    analysis_flags.add_argument("--outlier-threshold", type=float, default=0.20,
                                help="median-of-5 outlier threshold (default: %(default)s)")
    analysis_flags.add_argument("--outlier-action", choices=REPAIR_ACTIONS, default="remove",
                                help="repair action for flagged intervals (default: %(default)s)")
    analysis_flags.add_argument("--mode", choices=("single", "m=n", "all"), default="single",
                                help="plan mode (default: %(default)s)")
    analysis_flags.add_argument("--n", type=int, default=1,
                                help="summation parameter n (default: %(default)s)")
    analysis_flags.add_argument("--m", type=int, default=1,
                                help="stride parameter m (default: %(default)s)")
    analysis_flags.add_argument("--psd", choices=PSD_METHODS, default="lomb",
                                help="PSD estimator (default: %(default)s)")
    analysis_flags.add_argument("--vlf", type=_parse_band, default=(0.0, 0.04), metavar="LO:HI",
                                help="VLF band edges in Hz (default: 0:0.04)")
    analysis_flags.add_argument("--lf", type=_parse_band, default=(0.04, 0.15), metavar="LO:HI",
                                help="LF band edges in Hz (default: 0.04:0.15)")
    analysis_flags.add_argument("--hf", type=_parse_band, default=(0.15, 0.4), metavar="LO:HI",
                                help="HF band edges in Hz (default: 0.15:0.4)")
    analysis_flags.add_argument("--resample-hz", type=float, default=4.0,
                                help="even-grid resampling rate for welch/fft/burg (default: %(default)s)")
    analysis_flags.add_argument("--burg-order", type=int, default=16,
                                help="AR order for the Burg estimator (default: %(default)s)")
    analysis_flags.add_argument("--entropy-embedding", type=int, default=2,
                                help="entropy template length (default: %(default)s)")
    analysis_flags.add_argument("--entropy-tolerance", type=float, default=0.15,
                                help="entropy tolerance as a fraction of SDRR (default: %(default)s)")

    p_analyze = sub.add_parser(
        "analyze", parents=[input_flags, detect_flags, analysis_flags],
        help="analyze a single input file",
    )
    p_analyze.add_argument("--input", required=True, help="input file path")
    p_analyze.add_argument("--out", help="write a CSV report here")
    p_analyze.add_argument("--strict", action="store_true",
                           help="exit nonzero on record-level errors")
    p_analyze.set_defaults(handler=_cmd_analyze)

    p_batch = sub.add_parser(
        "batch", parents=[input_flags, detect_flags, analysis_flags],
        help="analyze many files into one consolidated report",
    )
    p_batch.add_argument("--inputs", nargs="*", default=[], help="input file paths")
    p_batch.add_argument("--input-dir", help="directory of input files")
    p_batch.add_argument("--glob", default="*", help="pattern for --input-dir (default: %(default)s)")
    p_batch.add_argument("--out", required=True, help="consolidated CSV report path")
    p_batch.add_argument("--jobs", type=int, default=1, help="parallel workers (default: %(default)s)")
    p_batch.add_argument("--unattended-ecg", action="store_true",
                         help="allow ECG inputs with no manual review (extension; off by default)")
    p_batch.add_argument("--strict", action="store_true",
                         help="exit nonzero when any record fails")
    p_batch.set_defaults(handler=_cmd_batch)

    p_detect = sub.add_parser(
        "detect", parents=[detect_flags],
        help="detect R peaks in an ECG and write a peaks file",
    )
    p_detect.add_argument("--input", required=True, help="ECG file path")
    p_detect.add_argument("--fs", type=float, required=True, help="sampling rate in Hz")
    p_detect.add_argument("--prefix", default="", help="record-ID prefix to strip")
    p_detect.add_argument("--postfix", default="", help="record-ID postfix to strip")
    p_detect.add_argument("--out", required=True, help="peaks file path")
    p_detect.set_defaults(handler=_cmd_detect)

    p_compare = sub.add_parser(
        "compare", help="compare two peaks files (l1 distance) or two report CSVs (relative errors)",
    )
    p_compare.add_argument("--kind", choices=("peaks", "reports"), required=True)
    p_compare.add_argument("file_a")
    p_compare.add_argument("file_b")
    p_compare.set_defaults(handler=_cmd_compare)

    p_serve = sub.add_parser("serve", help="start the local peak-review server")
    p_serve.add_argument("--host", default="127.0.0.1", help="bind address (default: %(default)s)")
    p_serve.add_argument("--port", type=int, default=8765, help="port (default: %(default)s)")
    p_serve.add_argument("--ui-dir", default=None,
                         help="directory of built UI assets (default: ./frontend/dist if present)")
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def _parse_range(text: str) -> tuple[int, int]:
    try:
        start, _, end = text.partition(":")
        return int(start), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END, got {text!r}") from None


def _parse_band(text: str) -> tuple[float, float]:
    try:
        lo, _, hi = text.partition(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _descriptor(args, parser: argparse.ArgumentParser, path: str) -> InputDescriptor:
    if args.type == "ecg" and args.fs is None:
        parser.error("--type ecg requires --fs")
    return InputDescriptor(
        path=path,
        kind=args.type,
        fs=args.fs,
        rri_unit=_UNIT_NAMES[args.unit],
        prefix=args.prefix,
        postfix=args.postfix,
    )


def _request(args, parser: argparse.ArgumentParser, path: str) -> AnalysisRequest:
    mode = {"single": "single", "m=n": "m_equals_n", "all": "all"}[args.mode]
    try:
        enumerate_plans(mode, args.n, args.m)
        return AnalysisRequest(
            input=_descriptor(args, parser, path),
            segment=args.segment,
            baseline_remove=args.baseline_remove,
            detector=DetectorConfig(
                refractory_ms=args.refractory_ms,
                threshold_fraction=args.threshold_fraction,
                snap_window_ms=args.snap_window_ms,
                snap_mode=args.snap_mode,
            ),
            preprocess=PreprocessConfig(
                threshold=args.outlier_threshold, action=args.outlier_action
            ),
            plan_mode=mode,
            n=args.n,
            m=args.m,
            freq=FreqConfig(
                method=args.psd, vlf=args.vlf, lf=args.lf, hf=args.hf,
                resample_hz=args.resample_hz, burg_order=args.burg_order,
            ),
            entropy=EntropyConfig(
                embedding=args.entropy_embedding, tolerance_factor=args.entropy_tolerance
            ),
            dfa=DfaConfig(),
        )
    except (HrnvError, ValueError) as exc:
        parser.error(str(exc))
        raise AssertionError("unreachable")


def _cmd_analyze(args, parser) -> int:
    request = _request(args, parser, args.input)
    try:
        reports = analyze(request)
    except (HrnvError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.out:
            write_report([], args.out, errors=[
                RecordError(request.input.record_id(), type(exc).__name__, str(exc))
            ])
        return 1 if args.strict else 0
    for report in reports:
        _print_report(report)
    if args.out:
        write_report(reports, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_batch(args, parser) -> int:
    paths = list(args.inputs)
    if args.input_dir:
        paths.extend(sorted(str(p) for p in Path(args.input_dir).glob(args.glob)))
    requests = [_request(args, parser, p) for p in paths]
    try:
        reports, errors = analyze_batch(
            requests, jobs=args.jobs, allow_unattended_ecg=args.unattended_ecg
        )
    except BatchTypeViolation as exc:
        parser.error(str(exc))
        raise AssertionError("unreachable")
    write_report(reports, args.out, errors=errors)
    print(f"wrote {args.out}: {len(reports)} report row(s), {len(errors)} error row(s)")
    for err in errors:
        print(f"  failed {err.record_id}: {err.stage}: {err.message}", file=sys.stderr)
    return 1 if (errors and args.strict) else 0


def _cmd_detect(args, parser) -> int:
    from dataclasses import replace

    from .core import EcgRecord
    from .io_formats import read_signal

    desc = InputDescriptor(path=args.input, kind="ecg", fs=args.fs,
                           prefix=args.prefix, postfix=args.postfix)
    record = read_signal(desc)
    assert isinstance(record, EcgRecord)
    if args.segment is not None:
        record = replace(record, segment=args.segment)
    if args.baseline_remove:
        record = remove_baseline(record)
    cfg = DetectorConfig(
        refractory_ms=args.refractory_ms,
        threshold_fraction=args.threshold_fraction,
        snap_window_ms=args.snap_window_ms,
        snap_mode=args.snap_mode,
    )
    peaks = detect_r_peaks(record, cfg)
    write_peaks(args.out, peaks, segment=args.segment)
    print(f"wrote {args.out}: {len(peaks)} peak(s)")
    return 0


def _cmd_compare(args, parser) -> int:
    if args.kind == "peaks":
        a, _ = read_peaks(args.file_a)
        b, _ = read_peaks(args.file_b)
        try:
            distance = compare_annotations(a, b)
        except CountMismatch as exc:
            print(f"not comparable: {exc}")
            return 1
        print(f"d_l1 = {distance} samples over {len(a)} peaks")
        return 0
    return _compare_report_files(args.file_a, args.file_b)


def _compare_report_files(path_a: str, path_b: str) -> int:
    """Cellwise guarded relative error between two report CSVs keyed by
    (record_id, n, m); NA cells are compared for status agreement."""
    rows_a = _load_report_rows(path_a)
    rows_b = _load_report_rows(path_b)
    common = sorted(rows_a.keys() & rows_b.keys())
    if not common:
        print("no common (record, n, m) rows")
        return 1
    worst = 0.0
    worst_name = ""
    mismatches = []
    for key in common:
        row_a, row_b = rows_a[key], rows_b[key]
        for column in row_a.keys() & row_b.keys():
            if not column.startswith("hr"):
                continue
            cell_a, cell_b = row_a[column], row_b[column]
            if "" in (cell_a, cell_b):
                continue
            if cell_a == "NA" or cell_b == "NA":
                if cell_a != cell_b:
                    mismatches.append((key, column))
                continue
            eps = relative_error(float(cell_a), float(cell_b))
            if eps > worst:
                worst, worst_name = eps, f"{key} {column}"
    print(f"compared {len(common)} row(s); max relative error {worst:.3e} ({worst_name})")
    for key, column in mismatches:
        print(f"  status mismatch at {key} {column}")
    return 0


def _load_report_rows(path: str) -> dict:
    with open(path, encoding="utf-8", newline="") as fh:
        return {
            (row["record_id"], row["n"], row["m"]): row
            for row in csv.DictReader(fh)
            if row.get("n")  # skip error rows
        }


def _cmd_serve(args, parser) -> int:
    import uvicorn

    from .server import create_app

    ui_dir = args.ui_dir
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend/dist"
    uvicorn.run(create_app(static_dir=ui_dir), host=args.host, port=args.port, log_level="info")
    return 0


def _print_report(report: MetricsReport) -> None:
    print(f"record {report.record_id}  (n={report.n}, m={report.m})")
    stats = report.ibi_stats
    if stats.original_total is not None:
        print(
            f"  beats: {stats.beat_count}  "
            f"(original {stats.original_total}, abnormal {stats.abnormal}, "
            f"clean {stats.clean_pct:.1f}%)"
        )
    else:
        print(f"  beats: {stats.beat_count}")
    for name, value in report.metric_values().items():
        shown = "NA" if value is None else f"{value:.6g}"
        print(f"  {name:>18}: {shown}")
    print()


if __name__ == "__main__":
    sys.exit(main())
