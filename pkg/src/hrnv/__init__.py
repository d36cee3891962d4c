"""Heart rate n-variability (HRnV) and conventional HRV analysis toolkit.

Converts raw single-channel ECG or inter-beat-interval data into HRnV/HRV
metrics: QRS detection, RR-interval cleaning, the RRnIm interval transform,
and time/frequency/nonlinear metric computation, with a batch CLI and a
local review server for interactive peak editing.
"""

from .core import (
    EcgRecord,
    IbiSeries,
    IbiStats,
    IntervalFlag,
    MetricsReport,
    PeakAnnotations,
    ReportBeatStats,
    RnimSeries,
    extract_record_id,
    ibi_from_peaks,
)
from .freq_domain import FreqConfig, FreqMetrics, PsdEstimate, Tachogram
from .io_formats import InputDescriptor, RecordError
from .nonlinear import DfaConfig, EntropyConfig, NonlinearMetrics
from .pipeline import AnalysisRequest, ReportComparison, analyze, analyze_batch, analyze_ibi
from .preprocess import PreprocessConfig
from .qrs import DetectorConfig
from .time_domain import TimeMetrics
from .transform import build_rrnim, enumerate_plans

__version__ = "0.1.0"

__all__ = [
    "AnalysisRequest",
    "DetectorConfig",
    "DfaConfig",
    "EcgRecord",
    "EntropyConfig",
    "FreqConfig",
    "FreqMetrics",
    "IbiSeries",
    "IbiStats",
    "InputDescriptor",
    "IntervalFlag",
    "MetricsReport",
    "NonlinearMetrics",
    "PeakAnnotations",
    "PreprocessConfig",
    "PsdEstimate",
    "RecordError",
    "ReportBeatStats",
    "ReportComparison",
    "RnimSeries",
    "Tachogram",
    "TimeMetrics",
    "analyze",
    "analyze_batch",
    "analyze_ibi",
    "build_rrnim",
    "enumerate_plans",
    "extract_record_id",
    "ibi_from_peaks",
    "__version__",
]
