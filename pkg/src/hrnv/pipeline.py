"""End-to-end analysis orchestration and the comparison harness.

A single analysis runs detection (ECG inputs only), interval extraction,
outlier flagging and repair (once, on the original RRI), then builds one
transformed series per plan and computes all three metric families for each.
A failed metric family becomes not-computable entries; a failed record in a
batch becomes an error row. Neither aborts anything else.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .core import (
    EcgRecord,
    IbiSeries,
    MetricsReport,
    PeakAnnotations,
    ReportBeatStats,
    ibi_from_peaks,
)
from .errors import BatchTypeViolation, CountMismatch, EmptySeries, HrnvError, PlanMismatch
from .freq_domain import FreqConfig, FreqMetrics, compute_freq_metrics
from .io_formats import InputDescriptor, RecordError, read_peaks, read_signal
from .nonlinear import DfaConfig, EntropyConfig, NonlinearMetrics, compute_nonlinear_metrics
from .preprocess import PreprocessConfig, flag_outliers, repair
from .qrs import DetectorConfig, detect_r_peaks, remove_baseline
from .time_domain import TimeMetrics, compute_time_metrics
from .transform import build_rrnim, enumerate_plans

EPSILON_GUARD = 1e-8


@dataclass(frozen=True)
class AnalysisRequest:
    """Everything needed to analyze one input end to end."""

    input: InputDescriptor
    segment: Optional[tuple[int, int]] = None
    baseline_remove: bool = False
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    plan_mode: str = "single"
    n: int = 1
    m: Optional[int] = 1
    freq: FreqConfig = field(default_factory=FreqConfig)
    entropy: EntropyConfig = field(default_factory=EntropyConfig)
    dfa: DfaConfig = field(default_factory=DfaConfig)
    out: Optional[str] = None


def analyze(request: AnalysisRequest) -> list[MetricsReport]:
    """Run the full pipeline for one request; one report per (n, m) plan."""
    ibi = _extract_ibi(request)
    return analyze_ibi(
        ibi,
        plan_mode=request.plan_mode,
        n=request.n,
        m=request.m,
        preprocess_cfg=request.preprocess,
        freq_cfg=request.freq,
        entropy_cfg=request.entropy,
        dfa_cfg=request.dfa,
    )


def _extract_ibi(request: AnalysisRequest) -> IbiSeries:
    desc = request.input
    if desc.kind == "rri":
        loaded = read_signal(desc)
        assert isinstance(loaded, IbiSeries)
        return loaded
    if desc.kind == "peaks":
        peaks, _ = read_peaks(desc.path)
        return ibi_from_peaks(peaks)
    record = read_signal(desc)
    assert isinstance(record, EcgRecord)
    if request.segment is not None:
        record = replace(record, segment=request.segment)
    if request.baseline_remove:
        record = remove_baseline(record)
    peaks = detect_r_peaks(record, request.detector)
    return ibi_from_peaks(peaks)


def analyze_ibi(
    ibi: IbiSeries,
    plan_mode: str = "single",
    n: int = 1,
    m: Optional[int] = 1,
    preprocess_cfg: PreprocessConfig | None = None,
    freq_cfg: FreqConfig | None = None,
    entropy_cfg: EntropyConfig | None = None,
    dfa_cfg: DfaConfig | None = None,
) -> list[MetricsReport]:
    """Flag and repair the original RRI once, then analyze every plan.

    The (1, 1) report carries the abnormal-beat breakdown and clean
    percentage of the original RRI; other plans carry only their beat count.
    """
    preprocess_cfg = preprocess_cfg or PreprocessConfig()
    freq_cfg = freq_cfg or FreqConfig()
    entropy_cfg = entropy_cfg or EntropyConfig()
    dfa_cfg = dfa_cfg or DfaConfig()

    flagged = flag_outliers(ibi, preprocess_cfg)
    repaired = repair(flagged, preprocess_cfg)

    reports = []
    for n_i, m_i in enumerate_plans(plan_mode, n, m):
        series = build_rrnim(repaired, n_i, m_i)
        not_computable: dict[str, str] = {}

        try:
            time_metrics, nc = compute_time_metrics(series)
        except EmptySeries:
            time_metrics = TimeMetrics()
            nc = {f: "empty series" for f in TimeMetrics.__dataclass_fields__}
        not_computable.update(nc)

        freq_metrics, nc = compute_freq_metrics(series, freq_cfg)
        not_computable.update(nc)

        nonlinear_metrics, nc = compute_nonlinear_metrics(series, entropy_cfg, dfa_cfg)
        not_computable.update(nc)

        if (n_i, m_i) == (1, 1):
            stats = ReportBeatStats(
                beat_count=len(series),
                original_total=repaired.stats.total,
                abnormal=repaired.stats.abnormal,
                clean=repaired.stats.clean,
                clean_pct=repaired.stats.clean_pct,
            )
        else:
            stats = ReportBeatStats(beat_count=len(series))

        reports.append(
            MetricsReport(
                record_id=ibi.record_id,
                n=n_i,
                m=m_i,
                time=time_metrics,
                freq=freq_metrics,
                nonlinear=nonlinear_metrics,
                ibi_stats=stats,
                not_computable=not_computable,
            )
        )
    return reports


def analyze_batch(
    requests: list[AnalysisRequest],
    jobs: int = 1,
    allow_unattended_ecg: bool = False,
) -> tuple[list[MetricsReport], list[RecordError]]:
    """Analyze many inputs; per-record failures are data, not control flow.

    Output report order matches input order regardless of completion order.

    Raises:
        BatchTypeViolation: an ECG input is present without the explicit
            unattended-ECG flag (ECG normally requires manual peak review).
    """
    for request in requests:
        if request.input.kind == "ecg" and not allow_unattended_ecg:
            raise BatchTypeViolation(
                f"batch input {request.input.path!r} is ECG; "
                "pass the unattended-ECG flag to auto-detect without review"
            )

    def run(request: AnalysisRequest) -> Union[list[MetricsReport], RecordError]:
        try:
            return analyze(request)
        except (HrnvError, OSError, ValueError) as exc:
            return RecordError(
                record_id=request.input.record_id(),
                stage=type(exc).__name__,
                message=str(exc),
            )

    if jobs > 1 and len(requests) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, requests))
    else:
        results = [run(r) for r in requests]

    reports: list[MetricsReport] = []
    errors: list[RecordError] = []
    for result in results:
        if isinstance(result, RecordError):
            errors.append(result)
        else:
            reports.extend(result)
    return reports, errors


def compare_annotations(a: PeakAnnotations, b: PeakAnnotations) -> int:
    """Summed absolute difference of peak sample indices (l1 distance).

    Raises:
        CountMismatch: the annotation sets have different sizes (the error
            carries both counts).
    """
    if len(a) != len(b):
        raise CountMismatch(len(a), len(b))
    return int(sum(abs(int(x) - int(y)) for x, y in zip(a.peaks, b.peaks)))


@dataclass(frozen=True)
class ReportComparison:
    """Per-metric guarded relative errors between two reports."""

    epsilon: dict[str, float]
    agreed_not_computable: list[str]
    status_mismatches: list[str]

    @property
    def max_epsilon(self) -> float:
        return max(self.epsilon.values()) if self.epsilon else 0.0


def relative_error(x_h: float, x_p: float) -> float:
    """|x_h - x_p| / (|x_p| + 1e-8); the guard keeps zero references finite."""
    return abs(x_h - x_p) / (abs(x_p) + EPSILON_GUARD)


def compare_reports(h: MetricsReport, p: MetricsReport) -> ReportComparison:
    """Relative error for every common numeric metric; metrics that are
    not computable on either side are compared for status agreement only.

    Raises:
        PlanMismatch: the reports describe different (record, n, m) triples.
    """
    if (h.record_id, h.n, h.m) != (p.record_id, p.n, p.m):
        raise PlanMismatch(
            f"cannot compare ({h.record_id}, {h.n}, {h.m}) with ({p.record_id}, {p.n}, {p.m})"
        )
    hv = h.metric_values()
    pv = p.metric_values()
    epsilon: dict[str, float] = {}
    agreed: list[str] = []
    mismatched: list[str] = []
    for name in hv.keys() & pv.keys():
        a, b = hv[name], pv[name]
        if a is None and b is None:
            agreed.append(name)
        elif a is None or b is None:
            mismatched.append(name)
        else:
            epsilon[name] = relative_error(a, b)
    return ReportComparison(
        epsilon=epsilon,
        agreed_not_computable=sorted(agreed),
        status_mismatches=sorted(mismatched),
    )
