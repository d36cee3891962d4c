"""Time-domain metrics of an interval series (original RRI or RRnIm).

Conventions, documented so cross-tool comparisons are interpretable:

* SDRR/SDHR use the sample standard deviation (divisor M - 1).
* Skewness and kurtosis are the biased standardized moments; kurtosis is
  non-excess (a Gaussian scores 3).
* The NN50x difference threshold is n * 50 ms for an RRnIm series.
* The triangular index histogram uses a fixed 1/128 s bin width aligned at 0,
  not rescaled with n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import RnimSeries
from .errors import EmptySeries

TRIANGULAR_BIN_MS = 1000.0 / 128.0


@dataclass(frozen=True)
class TimeMetrics:
    avg_rr_ms: Optional[float] = None
    sdrr_ms: Optional[float] = None
    avg_hr_bpm: Optional[float] = None
    sdhr_bpm: Optional[float] = None
    rmssd_ms: Optional[float] = None
    nn50x_count: Optional[float] = None
    pnn50x_pct: Optional[float] = None
    skewness: Optional[float] = None
    kurtosis: Optional[float] = None
    triangular_index: Optional[float] = None


def compute_time_metrics(series: RnimSeries) -> tuple[TimeMetrics, dict[str, str]]:
    """Compute all time-domain metrics for one series.

    Returns the metrics plus a map of metric name -> reason for every metric
    whose precondition failed (those are None in the result). Difference- and
    dispersion-based metrics need at least 2 intervals; the means need 1.

    Raises:
        EmptySeries: the series has no values at all.
    """
    v = series.values_ms
    count = len(v)
    if count == 0:
        raise EmptySeries("cannot compute time metrics of an empty series")

    not_computable: dict[str, str] = {}
    hr = 60000.0 / v
    out: dict[str, Optional[float]] = {
        "avg_rr_ms": float(np.mean(v)),
        "avg_hr_bpm": float(np.mean(hr)),
    }

    if count < 2:
        reason = "needs at least 2 intervals"
        for name in (
            "sdrr_ms", "sdhr_bpm", "rmssd_ms", "nn50x_count", "pnn50x_pct",
            "skewness", "kurtosis", "triangular_index",
        ):
            not_computable[name] = reason
        return TimeMetrics(**out), not_computable

    out["sdrr_ms"] = float(np.std(v, ddof=1))
    out["sdhr_bpm"] = float(np.std(hr, ddof=1))

    diffs = np.diff(v)
    out["rmssd_ms"] = float(np.sqrt(np.mean(diffs ** 2)))
    threshold_ms = 50.0 * series.n
    nn50x = int(np.sum(np.abs(diffs) > threshold_ms))
    out["nn50x_count"] = float(nn50x)
    out["pnn50x_pct"] = 100.0 * nn50x / (count - 1)

    sigma = float(np.std(v))
    if sigma > 0:
        z = (v - np.mean(v)) / sigma
        out["skewness"] = float(np.mean(z ** 3))
        out["kurtosis"] = float(np.mean(z ** 4))
    else:
        not_computable["skewness"] = "zero variance"
        not_computable["kurtosis"] = "zero variance"

    bins = np.floor(v / TRIANGULAR_BIN_MS).astype(np.int64)
    _, bin_counts = np.unique(bins, return_counts=True)
    out["triangular_index"] = count / int(bin_counts.max())

    return TimeMetrics(**out), not_computable
