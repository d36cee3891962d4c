"""Shared data types of the pipeline.

Peaks, intervals, transformed interval series and metric reports are all
immutable value objects: edits produce new instances (annotations carry a
version counter bumped once per accepted edit batch), so values can be shared
freely between threads.

Intervals are stored in milliseconds internally regardless of the input unit;
readers normalize at the I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from enum import IntEnum
from typing import TYPE_CHECKING, Optional

import numpy as np

from .errors import FewerThanTwoPeaks

if TYPE_CHECKING:
    from .freq_domain import FreqMetrics
    from .nonlinear import NonlinearMetrics
    from .time_domain import TimeMetrics


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


class IntervalFlag(IntEnum):
    """Per-interval quality label. Removed intervals are simply absent."""

    CLEAN = 0
    NON_SINUS = 1
    INTERPOLATED = 2


@dataclass(frozen=True)
class IbiStats:
    """Beat counts of an interval series (taken before any repair)."""

    total: int
    abnormal: int
    clean: int

    @property
    def clean_pct(self) -> float:
        return 100.0 * self.clean / self.total if self.total else 0.0


@dataclass(frozen=True)
class EcgRecord:
    """Sampled single-channel voltage trace.

    ``segment`` is an optional half-open ``(start, end)`` sample-index range
    selected for analysis.
    """

    record_id: str
    fs: float
    samples: np.ndarray
    segment: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.fs <= 0:
            raise ValueError(f"sampling rate must be positive, got {self.fs}")
        object.__setattr__(self, "samples", _freeze(np.asarray(self.samples, dtype=float)))
        if self.segment is not None:
            start, end = self.segment
            if not (0 <= start < end <= len(self.samples)):
                raise ValueError(
                    f"segment {self.segment} outside sample range [0, {len(self.samples)})"
                )
            object.__setattr__(self, "segment", (int(start), int(end)))

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.fs

    def segment_slice(self) -> slice:
        if self.segment is None:
            return slice(0, len(self.samples))
        return slice(self.segment[0], self.segment[1])


@dataclass(frozen=True)
class PeakAnnotations:
    """Ordered R-peak sample indices for one record.

    ``version`` increases by exactly 1 per accepted edit batch; detection
    results start a fresh lineage at version 0.
    """

    record_id: str
    fs: float
    peaks: np.ndarray
    version: int = 0

    def __post_init__(self):
        peaks = np.asarray(self.peaks, dtype=np.int64)
        if peaks.ndim != 1:
            raise ValueError("peaks must be a flat index sequence")
        if len(peaks) and np.any(np.diff(peaks) <= 0):
            raise ValueError("peak indices must be strictly increasing")
        if len(peaks) and peaks[0] < 0:
            raise ValueError("peak indices must be nonnegative")
        object.__setattr__(self, "peaks", _freeze(peaks))

    def __len__(self) -> int:
        return len(self.peaks)


@dataclass(frozen=True)
class IbiSeries:
    """Inter-beat intervals in milliseconds with per-interval quality flags.

    ``onset_times_ms[i]`` is the cumulative sum of ``intervals_ms[: i + 1]``.
    ``stats`` counts total/abnormal/clean intervals as of the last flagging
    pass (pre-repair counts survive repair so clean percentage stays honest).
    """

    record_id: str
    intervals_ms: np.ndarray
    onset_times_ms: np.ndarray = field(default=None)  # type: ignore[assignment]
    flags: np.ndarray = field(default=None)  # type: ignore[assignment]
    stats: IbiStats = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        intervals = np.asarray(self.intervals_ms, dtype=float)
        if len(intervals) and np.any(intervals <= 0):
            raise ValueError("all intervals must be positive")
        object.__setattr__(self, "intervals_ms", _freeze(intervals))

        onsets = self.onset_times_ms
        if onsets is None:
            onsets = np.cumsum(intervals)
        object.__setattr__(self, "onset_times_ms", _freeze(np.asarray(onsets, dtype=float)))

        flags = self.flags
        if flags is None:
            flags = np.full(len(intervals), IntervalFlag.CLEAN, dtype=np.uint8)
        object.__setattr__(self, "flags", _freeze(np.asarray(flags, dtype=np.uint8)))
        if len(self.flags) != len(intervals):
            raise ValueError("flags must align with intervals")

        if self.stats is None:
            n = len(intervals)
            object.__setattr__(self, "stats", IbiStats(total=n, abnormal=0, clean=n))

    def __len__(self) -> int:
        return len(self.intervals_ms)


@dataclass(frozen=True)
class RnimSeries:
    """An interval sequence built by summing ``n`` parent intervals with
    window starts ``m`` beats apart.

    ``onset_times_ms`` anchors each value on the time axis for spectral
    analysis: cumulative sums of the values themselves when ``m == n``
    (windows tile time), the parent onset time of each window's first beat
    when ``m < n`` (overlapping windows do not tile time).
    """

    n: int
    m: int
    values_ms: np.ndarray
    source_len: int
    onset_times_ms: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.asarray(self.values_ms, dtype=float)
        expected = max(0, (self.source_len - self.n + 1) // self.m)
        if len(values) != expected:
            raise ValueError(
                f"length {len(values)} violates the length law "
                f"floor((N - n + 1)/m) = {expected} for N={self.source_len}, "
                f"n={self.n}, m={self.m}"
            )
        object.__setattr__(self, "values_ms", _freeze(values))
        onsets = self.onset_times_ms
        if onsets is None:
            onsets = np.cumsum(values)
        object.__setattr__(self, "onset_times_ms", _freeze(np.asarray(onsets, dtype=float)))

    def __len__(self) -> int:
        return len(self.values_ms)


@dataclass(frozen=True)
class ReportBeatStats:
    """Beat counts attached to one report.

    The abnormal-beat breakdown and clean percentage are populated only for
    the conventional (n=1, m=1) analysis; other plans carry just the beat
    count of their transformed series.
    """

    beat_count: int
    original_total: Optional[int] = None
    abnormal: Optional[int] = None
    clean: Optional[int] = None
    clean_pct: Optional[float] = None


@dataclass(frozen=True)
class MetricsReport:
    """The full metric set for one (record, n, m) triple.

    ``not_computable`` maps metric names to the reason they could not be
    evaluated; those metrics are ``None`` in their family dataclass.
    """

    record_id: str
    n: int
    m: int
    time: Optional["TimeMetrics"]
    freq: Optional["FreqMetrics"]
    nonlinear: Optional["NonlinearMetrics"]
    ibi_stats: ReportBeatStats
    not_computable: dict[str, str] = field(default_factory=dict)

    _FAMILIES = ("time", "freq", "nonlinear")

    def metric_values(self) -> dict[str, Optional[float]]:
        """Flatten the three metric families to an ordered name -> value map.

        Estimator/band metadata fields are excluded; ``None`` marks a metric
        listed in ``not_computable``.
        """
        out: dict[str, Optional[float]] = {}
        for family in self._FAMILIES:
            block = getattr(self, family)
            if block is None:
                continue
            for f in fields(block):
                if f.metadata.get("meta"):
                    continue
                out[f.name] = getattr(block, f.name)
        return out

    def to_dict(self) -> dict:
        """JSON-ready representation (used by the review server)."""
        out: dict = {
            "record_id": self.record_id,
            "n": self.n,
            "m": self.m,
            "metrics": self.metric_values(),
            "ibi_stats": {
                "beat_count": self.ibi_stats.beat_count,
                "original_total": self.ibi_stats.original_total,
                "abnormal": self.ibi_stats.abnormal,
                "clean": self.ibi_stats.clean,
                "clean_pct": self.ibi_stats.clean_pct,
            },
            "not_computable": dict(self.not_computable),
        }
        if self.freq is not None:
            out["psd_method"] = self.freq.method
            out["bands_hz"] = self.freq.bands_hz
        return out


def ibi_from_peaks(peaks: PeakAnnotations) -> IbiSeries:
    """Convert R-peak sample indices to an inter-beat interval series.

    ``intervals_ms[i] = (peaks[i+1] - peaks[i]) / fs * 1000``; all intervals
    start out flagged clean.

    Raises:
        FewerThanTwoPeaks: the record cannot yield any interval.
    """
    if len(peaks) < 2:
        raise FewerThanTwoPeaks(
            f"record {peaks.record_id!r} has {len(peaks)} peak(s); need at least 2"
        )
    intervals = np.diff(peaks.peaks) / peaks.fs * 1000.0
    return IbiSeries(record_id=peaks.record_id, intervals_ms=intervals)


def extract_record_id(filename: str, prefix: str, postfix: str) -> str:
    """Strip a leading prefix and trailing postfix from a filename.

    Both affixes must match (the empty affix always matches) and leave a
    nonempty remainder; otherwise the full filename is returned, which is the
    default record-ID behavior.
    """
    if len(prefix) + len(postfix) >= len(filename):
        return filename
    if not filename.startswith(prefix):
        return filename
    if postfix and not filename.endswith(postfix):
        return filename
    return filename[len(prefix): len(filename) - len(postfix)]
