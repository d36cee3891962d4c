"""Readers and writers for the toolkit's plain-text file formats.

Signals and interval files are single-column or single-row numeric text
(.txt/.csv); layout is auto-detected. Peaks files are a small commented
header (`# record=`, `# fs_hz=`, optional `# segment=start:end`) followed by
one integer sample index per line. Report files are CSV with one row per
(record, n, m) and per-plan metric columns named ``hr{n}v{m}_{metric}``.

All files are UTF-8, newline-delimited, with `.` as the decimal separator
regardless of locale.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .core import EcgRecord, IbiSeries, MetricsReport, PeakAnnotations, extract_record_id
from .errors import EmptyFile, MalformedNumeric, MixedLayout, SchemaViolation, WriteFailure

INPUT_KINDS = ("ecg", "rri", "peaks")
RRI_UNITS = ("seconds", "milliseconds")

_SEPARATORS = re.compile(r"[,;\s]+")


@dataclass(frozen=True)
class InputDescriptor:
    path: str
    kind: str
    fs: Optional[float] = None
    rri_unit: str = "seconds"
    prefix: str = ""
    postfix: str = ""

    def __post_init__(self):
        if self.kind not in INPUT_KINDS:
            raise ValueError(f"kind must be one of {INPUT_KINDS}, got {self.kind!r}")
        if self.rri_unit not in RRI_UNITS:
            raise ValueError(f"rri_unit must be one of {RRI_UNITS}, got {self.rri_unit!r}")
        if self.kind == "ecg" and (self.fs is None or self.fs <= 0):
            raise ValueError("ecg inputs require a positive sampling rate")

    def record_id(self) -> str:
        return extract_record_id(Path(self.path).name, self.prefix, self.postfix)


def parse_numeric_text(text: str) -> np.ndarray:
    """Parse a single-column or single-row numeric file body.

    If the first non-blank line holds more than one numeric field, row layout
    is assumed and no further data lines may follow; in column layout every
    line must hold exactly one field.

    Raises:
        EmptyFile: no numeric data at all.
        MixedLayout: both multi-row and multi-column content present.
        MalformedNumeric: a field failed to parse (line/field reported).
    """
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        rows.append((lineno, [f for f in _SEPARATORS.split(stripped) if f]))

    if not rows:
        raise EmptyFile("no numeric data found")

    first_line, first_fields = rows[0]
    if len(first_fields) > 1:
        if len(rows) > 1:
            raise MixedLayout(
                f"row layout detected on line {first_line} but more data lines follow"
            )
        return np.array([_parse_field(f, first_line, i + 1) for i, f in enumerate(first_fields)])

    values = []
    for lineno, fields_ in rows:
        if len(fields_) > 1:
            raise MixedLayout(f"column layout established but line {lineno} has {len(fields_)} fields")
        values.append(_parse_field(fields_[0], lineno, 1))
    return np.array(values)


def _parse_field(token: str, line: int, field: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MalformedNumeric(f"cannot parse {token!r} as a number", line, field) from None
    if not np.isfinite(value):
        raise MalformedNumeric(f"non-finite value {token!r}", line, field)
    return value


def signal_from_text(desc: InputDescriptor, text: str) -> EcgRecord | IbiSeries:
    """Build the in-memory record for an ecg or rri input from file text."""
    values = parse_numeric_text(text)
    record_id = desc.record_id()
    if desc.kind == "ecg":
        return EcgRecord(record_id=record_id, fs=float(desc.fs), samples=values)
    if desc.kind != "rri":
        raise ValueError(f"signal_from_text handles ecg/rri, not {desc.kind!r}")
    intervals = values * 1000.0 if desc.rri_unit == "seconds" else values
    if np.any(intervals <= 0):
        bad = int(np.argmax(intervals <= 0))
        raise MalformedNumeric("non-positive interval", bad + 1, 1)
    return IbiSeries(record_id=record_id, intervals_ms=intervals)


def read_signal(desc: InputDescriptor) -> EcgRecord | IbiSeries:
    """Read an ecg or rri input file. RRI values are normalized to ms."""
    return signal_from_text(desc, Path(desc.path).read_text(encoding="utf-8"))


def write_peaks(
    path: str, peaks: PeakAnnotations, segment: Optional[tuple[int, int]] = None
) -> None:
    """Write an annotation file; read_peaks(write_peaks(x)) reproduces the
    peak sequence and fs exactly (version restarts at 0)."""
    lines = [f"# record={peaks.record_id}", f"# fs_hz={peaks.fs!r}"]
    if segment is not None:
        lines.append(f"# segment={segment[0]}:{segment[1]}")
    lines.extend(str(int(p)) for p in peaks.peaks)
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise WriteFailure(f"cannot write peaks file {path}: {exc}") from exc


def read_peaks(path: str) -> tuple[PeakAnnotations, Optional[tuple[int, int]]]:
    """Read an annotation file back.

    Raises:
        SchemaViolation: missing header keys, malformed lines, or
            non-strictly-increasing indices.
    """
    record_id: Optional[str] = None
    fs: Optional[float] = None
    segment: Optional[tuple[int, int]] = None
    indices: list[int] = []

    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, _, value = stripped[1:].strip().partition("=")
            key = key.strip()
            value = value.strip()
            if key == "record":
                record_id = value
            elif key == "fs_hz":
                try:
                    fs = float(value)
                except ValueError:
                    raise SchemaViolation(f"bad fs_hz value {value!r} on line {lineno}") from None
            elif key == "segment":
                try:
                    start, _, end = value.partition(":")
                    segment = (int(start), int(end))
                except ValueError:
                    raise SchemaViolation(f"bad segment value {value!r} on line {lineno}") from None
            continue
        try:
            indices.append(int(stripped))
        except ValueError:
            raise SchemaViolation(f"bad peak index {stripped!r} on line {lineno}") from None

    if record_id is None:
        raise SchemaViolation("missing '# record=' header")
    if fs is None or fs <= 0:
        raise SchemaViolation("missing or non-positive '# fs_hz=' header")
    arr = np.asarray(indices, dtype=np.int64)
    if len(arr) and np.any(np.diff(arr) <= 0):
        raise SchemaViolation("peak indices must be strictly increasing")
    return PeakAnnotations(record_id=record_id, fs=fs, peaks=arr, version=0), segment


@dataclass(frozen=True)
class RecordError:
    """A per-record failure carried through a batch as data, not control flow."""

    record_id: str
    stage: str
    message: str


# Beat-stat columns appended after the metric columns of each plan.
_BEAT_STAT_COLUMNS = ("beat_count",)
_BEAT_STAT_COLUMNS_11 = ("beat_count", "original_beats", "abnormal_beats", "clean_beats", "clean_pct")


def _format_number(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.10g}"


def _plan_columns(n: int, m: int, metric_names: list[str]) -> list[str]:
    prefix = f"hr{n}v{m}_"
    stats = _BEAT_STAT_COLUMNS_11 if (n, m) == (1, 1) else _BEAT_STAT_COLUMNS
    return [prefix + name for name in metric_names] + [prefix + s for s in stats]


def write_report(
    reports: list[MetricsReport],
    path: str,
    errors: list[RecordError] | None = None,
) -> None:
    """Write the consolidated CSV: one row per (record, n, m) plus one row
    per record-level error.

    Metric cells use 10 significant digits; a metric the plan could not
    compute is the literal ``NA``; cells belonging to another plan's columns
    are left empty.
    """
    errors = errors or []
    metric_names = _canonical_metric_names()
    plans = sorted({(r.n, r.m) for r in reports})
    header = ["record_id", "n", "m", "error"]
    for n, m in plans:
        header.extend(_plan_columns(n, m, metric_names))

    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for report in reports:
                writer.writerow(_report_row(report, header, metric_names))
            for err in errors:
                row = [""] * len(header)
                row[0] = err.record_id
                row[3] = f"{err.stage}: {err.message}"
                writer.writerow(row)
    except OSError as exc:
        raise WriteFailure(f"cannot write report file {path}: {exc}") from exc


def _report_row(report: MetricsReport, header: list[str], metric_names: list[str]) -> list[str]:
    prefix = f"hr{report.n}v{report.m}_"
    cells = {"record_id": report.record_id, "n": str(report.n), "m": str(report.m), "error": ""}
    values = report.metric_values()
    for name in metric_names:
        cells[prefix + name] = _format_number(values.get(name))
    stats = report.ibi_stats
    cells[prefix + "beat_count"] = str(stats.beat_count)
    if (report.n, report.m) == (1, 1):
        cells[prefix + "original_beats"] = _format_number(stats.original_total)
        cells[prefix + "abnormal_beats"] = _format_number(stats.abnormal)
        cells[prefix + "clean_beats"] = _format_number(stats.clean)
        cells[prefix + "clean_pct"] = _format_number(stats.clean_pct)
    return [cells.get(col, "") for col in header]


def _canonical_metric_names() -> list[str]:
    from .freq_domain import FreqMetrics
    from .nonlinear import NonlinearMetrics
    from .time_domain import TimeMetrics

    names: list[str] = []
    for cls in (TimeMetrics, FreqMetrics, NonlinearMetrics):
        names.extend(f.name for f in fields(cls) if not f.metadata.get("meta"))
    return names
