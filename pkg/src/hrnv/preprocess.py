"""Flagging and repair of non-sinus intervals and outliers in the original RRI.

An interval is abnormal when it deviates from the median of the (up to) five
adjacent intervals centered on it by more than a fractional threshold
(default 20%). Flagged intervals are either removed or replaced by a cubic
spline / PCHIP / linear interpolant of the clean neighbours over onset time.

Preprocessing runs exactly once, on the original RRI; transformed series are
built from the repaired RRI with no second pass.
"""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .core import IbiSeries, IbiStats, IntervalFlag
from .errors import NothingClean

REPAIR_ACTIONS = ("remove", "spline", "pchip", "linear")


@dataclass(frozen=True)
class PreprocessConfig:
    """Outlier rule settings. ``neighborhood`` is fixed at 5 intervals."""

    threshold: float = 0.20
    action: str = "remove"
    neighborhood: int = 5

    def __post_init__(self):
        if not 0 < self.threshold < 1:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.action not in REPAIR_ACTIONS:
            raise ValueError(f"action must be one of {REPAIR_ACTIONS}, got {self.action!r}")


def flag_outliers(ibi: IbiSeries, cfg: PreprocessConfig | None = None) -> IbiSeries:
    """Flag interval i as non-sinus iff |x_i - med_i| / med_i > threshold.

    ``med_i`` is the median of the window of up to 5 intervals centered at i,
    truncated at the series edges (no padding). Values are unchanged; flags
    are recomputed from values alone, so flagging is idempotent.
    """
    cfg = cfg or PreprocessConfig()
    x = ibi.intervals_ms
    n = len(x)
    half = cfg.neighborhood // 2

    flags = np.full(n, IntervalFlag.CLEAN, dtype=np.uint8)
    for i in range(n):
        window = x[max(0, i - half): min(n, i + half + 1)]
        med = float(np.median(window))
        if abs(x[i] - med) / med > cfg.threshold:
            flags[i] = IntervalFlag.NON_SINUS

    abnormal = int(np.sum(flags == IntervalFlag.NON_SINUS))
    return IbiSeries(
        record_id=ibi.record_id,
        intervals_ms=x,
        onset_times_ms=ibi.onset_times_ms,
        flags=flags,
        stats=IbiStats(total=n, abnormal=abnormal, clean=n - abnormal),
    )


def repair(ibi: IbiSeries, cfg: PreprocessConfig | None = None) -> IbiSeries:
    """Remove or interpolate the intervals flagged by :func:`flag_outliers`.

    Interpolants are fitted to the clean (onset_time, value) pairs and
    evaluated at each flagged interval's original onset time; intervals are
    samples of a continuous tachogram, so interpolation happens over time,
    not beat index. An interpolated value that comes out non-positive
    (possible with unclamped splines at wild outliers) falls back to removal
    to preserve positivity.

    The pre-repair ``stats`` are carried through so the clean percentage is
    always computed on the original flags.

    Raises:
        NothingClean: every interval is flagged; repair is impossible.
    """
    cfg = cfg or PreprocessConfig()
    flagged = ibi.flags == IntervalFlag.NON_SINUS
    if not np.any(flagged):
        return ibi
    clean = ~flagged
    if not np.any(clean):
        raise NothingClean(f"record {ibi.record_id!r}: every interval is flagged")

    if cfg.action == "remove":
        return _rebuild(ibi, ibi.intervals_ms[clean], ibi.flags[clean])

    t_clean = ibi.onset_times_ms[clean]
    v_clean = ibi.intervals_ms[clean]
    t_bad = ibi.onset_times_ms[flagged]
    if cfg.action == "linear":
        repaired = np.interp(t_bad, t_clean, v_clean)
    elif cfg.action == "spline":
        repaired = _curve(CubicSpline, t_clean, v_clean, t_bad)
    else:
        repaired = _curve(PchipInterpolator, t_clean, v_clean, t_bad)

    values = ibi.intervals_ms.copy()
    values[flagged] = repaired
    flags = ibi.flags.copy()
    flags[flagged] = IntervalFlag.INTERPOLATED

    bad_fill = values <= 0
    if np.any(bad_fill):
        warnings.warn(
            f"record {ibi.record_id!r}: {int(np.sum(bad_fill))} interpolated "
            "interval(s) were non-positive and were removed instead",
            stacklevel=2,
        )
        values, flags = values[~bad_fill], flags[~bad_fill]

    return _rebuild(ibi, values, flags)


def _curve(kind, t_clean, v_clean, t_bad):
    # Spline families need >= 2 support points; degenerate support degrades
    # to the single clean value.
    if len(t_clean) < 2:
        return np.full(len(t_bad), v_clean[0])
    return kind(t_clean, v_clean)(t_bad)


def _rebuild(ibi: IbiSeries, values: np.ndarray, flags: np.ndarray) -> IbiSeries:
    return IbiSeries(
        record_id=ibi.record_id,
        intervals_ms=values,
        onset_times_ms=np.cumsum(values),
        flags=flags,
        stats=ibi.stats,
    )
