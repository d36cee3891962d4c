"""Power spectral density estimation and frequency-band metrics.

Four estimators are provided: the Lomb-Scargle periodogram (default, works
directly on the unevenly sampled tachogram), plus Welch, plain FFT
periodogram, and Burg autoregressive estimates computed on an evenly
resampled tachogram.

All estimators share one normalization: the returned PSD is rescaled so that
its rectangle-rule integral over the returned grid equals the sample variance
of the analyzed series. That single convention makes the four estimators
comparable and keeps Parseval checks meaningful. Grids cover (0, hf_hi]; DC
is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import lombscargle, periodogram, welch as _welch

from .core import RnimSeries
from .errors import BurgOrderTooHigh, TooFewIntervals, TooShort

PSD_METHODS = ("lomb", "welch", "fft", "burg")

Band = tuple[float, float]


@dataclass(frozen=True)
class FreqConfig:
    method: str = "lomb"
    vlf: Band = (0.0, 0.04)
    lf: Band = (0.04, 0.15)
    hf: Band = (0.15, 0.4)
    resample_hz: float = 4.0
    burg_order: int = 16
    oversample: int = 4

    def __post_init__(self):
        if self.method not in PSD_METHODS:
            raise ValueError(f"method must be one of {PSD_METHODS}, got {self.method!r}")
        edges = [self.vlf[0], self.vlf[1], self.lf[0], self.lf[1], self.hf[0], self.hf[1]]
        ordered = (
            0 <= edges[0] < edges[1] <= edges[2] < edges[3] <= edges[4] < edges[5]
        )
        if not ordered:
            raise ValueError(f"band edges must be ordered, got vlf={self.vlf} lf={self.lf} hf={self.hf}")
        if self.resample_hz <= 2 * self.hf[1]:
            raise ValueError(
                f"resample_hz={self.resample_hz} must exceed twice the HF upper edge {self.hf[1]}"
            )
        if self.burg_order < 1:
            raise ValueError("burg_order must be >= 1")
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")


@dataclass(frozen=True)
class PsdEstimate:
    freqs_hz: np.ndarray
    power: np.ndarray  # ms^2/Hz
    method: str


@dataclass(frozen=True)
class Tachogram:
    """Evenly resampled, mean-removed interval series."""

    values_ms: np.ndarray
    rate_hz: float


@dataclass(frozen=True)
class FreqMetrics:
    vlf_peak_hz: Optional[float] = None
    lf_peak_hz: Optional[float] = None
    hf_peak_hz: Optional[float] = None
    vlf_power_ms2: Optional[float] = None
    lf_power_ms2: Optional[float] = None
    hf_power_ms2: Optional[float] = None
    vlf_power_pct: Optional[float] = None
    lf_power_pct: Optional[float] = None
    hf_power_pct: Optional[float] = None
    lf_norm_nu: Optional[float] = None
    hf_norm_nu: Optional[float] = None
    lf_hf_ratio: Optional[float] = None
    total_power_ms2: Optional[float] = None
    method: str = field(default="", metadata={"meta": True})
    bands_hz: dict = field(default_factory=dict, metadata={"meta": True})


FREQ_METRIC_NAMES = tuple(
    f.name for f in FreqMetrics.__dataclass_fields__.values() if not f.metadata.get("meta")
)


def _rescale_to_variance(freqs: np.ndarray, power: np.ndarray, variance: float) -> np.ndarray:
    """Rectangle-rule integral over the grid is forced to the series variance."""
    if len(freqs) < 2 or variance <= 0:
        return np.zeros_like(power)
    df = freqs[1] - freqs[0]
    raw = float(np.sum(power) * df)
    if raw <= 0:
        return np.zeros_like(power)
    return power * (variance / raw)


def lomb_psd(series: RnimSeries, cfg: FreqConfig | None = None) -> PsdEstimate:
    """Lomb-Scargle periodogram of the mean-centered (onset, value) pairs.

    Grid: f_k = k * df with df = 1 / (oversample * T), up to the HF upper
    edge; short records simply lack low-frequency resolution.

    Raises:
        TooFewIntervals: fewer than 4 intervals.
    """
    cfg = cfg or FreqConfig()
    v = series.values_ms
    if len(v) < 4:
        raise TooFewIntervals(f"spectral estimation needs >= 4 intervals, got {len(v)}")
    t = series.onset_times_ms / 1000.0
    span = float(t[-1] - t[0])
    if span <= 0:
        raise TooFewIntervals("degenerate time span")

    df = 1.0 / (cfg.oversample * span)
    n_freqs = int(np.floor(cfg.hf[1] / df))
    if n_freqs < 2:
        raise TooFewIntervals("record too short for any frequency resolution")
    freqs = df * np.arange(1, n_freqs + 1)

    y = v - np.mean(v)
    raw = lombscargle(t, y, 2.0 * np.pi * freqs)
    power = _rescale_to_variance(freqs, raw, float(np.var(v, ddof=1)))
    return PsdEstimate(freqs_hz=freqs, power=power, method="lomb")


def resample_even(series: RnimSeries, rate_hz: float) -> Tachogram:
    """Cubic-spline interpolation of (onset, value) onto a uniform grid.

    The grid spans [first, last] onset time at ``rate_hz``; the mean is
    removed from the result.

    Raises:
        TooFewIntervals: fewer than 4 intervals.
    """
    v = series.values_ms
    if len(v) < 4:
        raise TooFewIntervals(f"resampling needs >= 4 intervals, got {len(v)}")
    t = series.onset_times_ms / 1000.0
    spline = CubicSpline(t, v)
    n = int(np.floor((t[-1] - t[0]) * rate_hz)) + 1
    grid = t[0] + np.arange(n) / rate_hz
    values = spline(grid)
    return Tachogram(values_ms=values - np.mean(values), rate_hz=rate_hz)


def _truncate(freqs: np.ndarray, power: np.ndarray, hf_hi: float):
    keep = (freqs > 0) & (freqs <= hf_hi * (1 + 1e-12))
    return freqs[keep], power[keep]


def welch_psd(tach: Tachogram, cfg: FreqConfig | None = None) -> PsdEstimate:
    """Averaged periodogram over Hamming-windowed, 50%-overlapping segments
    of min(256, length) samples.

    Raises:
        TooShort: tachogram shorter than 64 samples.
    """
    cfg = cfg or FreqConfig()
    x = tach.values_ms
    if len(x) < 64:
        raise TooShort(f"Welch needs >= 64 samples, got {len(x)}")
    nperseg = min(256, len(x))
    freqs, power = _welch(
        x, fs=tach.rate_hz, window="hamming", nperseg=nperseg,
        noverlap=nperseg // 2, detrend=False,
    )
    freqs, power = _truncate(freqs, power, cfg.hf[1])
    power = _rescale_to_variance(freqs, power, float(np.var(x, ddof=1)))
    return PsdEstimate(freqs_hz=freqs, power=power, method="welch")


def fft_psd(tach: Tachogram, cfg: FreqConfig | None = None) -> PsdEstimate:
    """Single full-length periodogram of the mean-removed tachogram.

    Raises:
        TooShort: tachogram shorter than 16 samples.
    """
    cfg = cfg or FreqConfig()
    x = tach.values_ms
    if len(x) < 16:
        raise TooShort(f"FFT periodogram needs >= 16 samples, got {len(x)}")
    freqs, power = periodogram(x, fs=tach.rate_hz, window="boxcar", detrend="constant")
    freqs, power = _truncate(freqs, power, cfg.hf[1])
    power = _rescale_to_variance(freqs, power, float(np.var(x, ddof=1)))
    return PsdEstimate(freqs_hz=freqs, power=power, method="fft")


def _burg_ar(x: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Burg recursion: reflection coefficients from joint minimization of
    forward/backward prediction error. Returns the prediction-error filter
    [1, a_1, ..., a_p] and the residual error power."""
    n = len(x)
    f = np.asarray(x, dtype=float).copy()
    b = f.copy()
    a = np.ones(1)
    power = float(np.dot(f, f)) / n
    for k in range(1, order + 1):
        fk = f[k:]
        bk = b[k - 1: n - 1]
        den = float(np.dot(fk, fk) + np.dot(bk, bk))
        refl = -2.0 * float(np.dot(fk, bk)) / den if den > 0 else 0.0
        a = np.concatenate([a, [0.0]]) + refl * np.concatenate([[0.0], a[::-1]])
        f_new = fk + refl * bk
        b_new = bk + refl * fk
        f[k:] = f_new
        b[k:] = b_new
        power *= 1.0 - refl * refl
    return a, power


def burg_psd(tach: Tachogram, cfg: FreqConfig | None = None) -> PsdEstimate:
    """Autoregressive spectrum of order ``burg_order`` via the Burg recursion,
    evaluated on the same grid the FFT periodogram would use.

    Raises:
        BurgOrderTooHigh: tachogram not longer than the AR order.
    """
    cfg = cfg or FreqConfig()
    x = tach.values_ms
    if len(x) <= cfg.burg_order:
        raise BurgOrderTooHigh(
            f"Burg order {cfg.burg_order} needs more than {cfg.burg_order} samples, got {len(x)}"
        )
    a, err_power = _burg_ar(x, cfg.burg_order)

    freqs = np.fft.rfftfreq(len(x), d=1.0 / tach.rate_hz)
    freqs = freqs[(freqs > 0) & (freqs <= cfg.hf[1] * (1 + 1e-12))]
    lags = np.arange(len(a))
    transfer = np.exp(-2j * np.pi * np.outer(freqs / tach.rate_hz, lags)) @ a
    power = err_power / (tach.rate_hz * np.abs(transfer) ** 2)
    power = _rescale_to_variance(freqs, power, float(np.var(x, ddof=1)))
    return PsdEstimate(freqs_hz=freqs, power=power, method="burg")


def _band_integral(freqs: np.ndarray, power: np.ndarray, lo: float, hi: float) -> float:
    """Trapezoidal integral of the PSD over [lo, hi], with linear
    interpolation at the band edges (clamped below the first grid point, so
    the VLF band reaches its 0 Hz lower edge). Adjacent bands tile [lo, hi]
    exactly, so band powers sum to the total integral."""
    a = lo
    b = min(hi, float(freqs[-1]))
    if a >= b:
        return 0.0
    inner = (freqs > a) & (freqs < b)
    xs = np.concatenate([[a], freqs[inner], [b]])
    ys = np.concatenate([
        [np.interp(a, freqs, power)], power[inner], [np.interp(b, freqs, power)],
    ])
    return float(np.trapezoid(ys, xs))


def band_metrics(
    psd: PsdEstimate, cfg: FreqConfig | None = None
) -> tuple[FreqMetrics, dict[str, str]]:
    """Band powers, percentages, normalized LF/HF, LF/HF ratio, total power.

    Total power is the sum of the three band integrals over
    [vlf_lo, hf_hi], so the three percentages always sum to 100 when total
    power is positive. Quantities whose denominator is zero come back as
    None with a reason.
    """
    cfg = cfg or FreqConfig()
    out: dict[str, Optional[float]] = {}
    not_computable: dict[str, str] = {}

    bands = {"vlf": cfg.vlf, "lf": cfg.lf, "hf": cfg.hf}
    powers: dict[str, float] = {}
    for name, (lo, hi) in bands.items():
        powers[name] = _band_integral(psd.freqs_hz, psd.power, lo, hi)
        out[f"{name}_power_ms2"] = powers[name]
        in_band = (psd.freqs_hz >= lo) & (psd.freqs_hz <= hi)
        if np.any(in_band) and powers[name] > 0:
            band_freqs = psd.freqs_hz[in_band]
            out[f"{name}_peak_hz"] = float(band_freqs[np.argmax(psd.power[in_band])])
        else:
            not_computable[f"{name}_peak_hz"] = "no power in band"

    total = powers["vlf"] + powers["lf"] + powers["hf"]
    out["total_power_ms2"] = total
    if total > 0:
        for name in bands:
            out[f"{name}_power_pct"] = 100.0 * powers[name] / total
    else:
        for name in bands:
            not_computable[f"{name}_power_pct"] = "zero total power"

    lf_hf = powers["lf"] + powers["hf"]
    if lf_hf > 0:
        out["lf_norm_nu"] = 100.0 * powers["lf"] / lf_hf
        out["hf_norm_nu"] = 100.0 * powers["hf"] / lf_hf
    else:
        not_computable["lf_norm_nu"] = "zero LF+HF power"
        not_computable["hf_norm_nu"] = "zero LF+HF power"

    if powers["hf"] > 0:
        out["lf_hf_ratio"] = powers["lf"] / powers["hf"]
    else:
        not_computable["lf_hf_ratio"] = "zero HF power"

    metrics = FreqMetrics(
        **out, method=psd.method,
        bands_hz={"vlf": list(cfg.vlf), "lf": list(cfg.lf), "hf": list(cfg.hf)},
    )
    return metrics, not_computable


def compute_psd(series: RnimSeries, cfg: FreqConfig) -> PsdEstimate:
    """Dispatch to the configured estimator (resampling first when needed)."""
    if cfg.method == "lomb":
        return lomb_psd(series, cfg)
    tach = resample_even(series, cfg.resample_hz)
    if cfg.method == "welch":
        return welch_psd(tach, cfg)
    if cfg.method == "fft":
        return fft_psd(tach, cfg)
    return burg_psd(tach, cfg)


def compute_freq_metrics(
    series: RnimSeries, cfg: FreqConfig | None = None
) -> tuple[FreqMetrics, dict[str, str]]:
    """All frequency-domain metrics for one series.

    Series too short for the configured estimator yield a fully
    not-computable family rather than an error.
    """
    cfg = cfg or FreqConfig()
    try:
        psd = compute_psd(series, cfg)
    except (TooFewIntervals, TooShort, BurgOrderTooHigh) as exc:
        reason = str(exc)
        empty = FreqMetrics(
            method=cfg.method,
            bands_hz={"vlf": list(cfg.vlf), "lf": list(cfg.lf), "hf": list(cfg.hf)},
        )
        return empty, {name: reason for name in FREQ_METRIC_NAMES}
    return band_metrics(psd, cfg)
