"""R-peak detection on single-channel ECG, plus annotation editing.

The detector is an energy detector: zero-phase 5-25 Hz band-pass, squaring,
centered 150 ms moving-window integration, an adaptive threshold equal to a
fraction of the exponentially decaying running peak of the integrated signal,
a 250 ms refractory period, and search-back at half threshold whenever the
gap since the last beat exceeds a multiple of the running median RR.
Detected positions are optionally snapped to the local extremum of the
waveform, with automatic polarity selection for inverted leads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import median_filter, uniform_filter1d
from scipy.signal import butter, filtfilt, find_peaks

from .core import EcgRecord, PeakAnnotations
from .errors import DuplicatePeak, OutOfRange, SamplingRateTooLow, SegmentTooShort, UnknownPeak

SNAP_MODES = ("none", "local_max", "local_min", "auto")

# Two-stage moving-median baseline estimator windows.
_BASELINE_WINDOWS_MS = (200.0, 600.0)
# Exponential decay half-life of the running peak estimate.
_RUNNING_PEAK_HALF_LIFE_S = 3.0


@dataclass(frozen=True)
class DetectorConfig:
    bandpass_low_hz: float = 5.0
    bandpass_high_hz: float = 25.0
    integration_window_ms: float = 150.0
    refractory_ms: float = 250.0
    threshold_fraction: float = 0.3
    searchback_factor: float = 1.5
    snap_window_ms: float = 50.0
    snap_mode: str = "auto"

    def __post_init__(self):
        if not 0 < self.bandpass_low_hz < self.bandpass_high_hz:
            raise ValueError("need 0 < bandpass_low_hz < bandpass_high_hz")
        if self.refractory_ms <= 0:
            raise ValueError("refractory_ms must be positive")
        if not 0 < self.threshold_fraction < 1:
            raise ValueError("threshold_fraction must be in (0, 1)")
        if self.snap_mode not in SNAP_MODES:
            raise ValueError(f"snap_mode must be one of {SNAP_MODES}")


def _odd_window(ms: float, fs: float) -> int:
    w = max(1, int(round(ms * fs / 1000.0)))
    return w + 1 if w % 2 == 0 else w


def remove_baseline(signal: EcgRecord) -> EcgRecord:
    """Subtract a two-stage moving-median baseline estimate (200 ms then
    600 ms windows).

    The signal is extended by anti-symmetric reflection before filtering so
    the baseline follows a drift slope right up to the record edges.
    Constants are removed exactly; QRS-width content passes through because
    complexes are narrower than half the first window.
    """
    if len(signal.samples) < 1:
        raise ValueError("cannot remove baseline of an empty signal")
    x = signal.samples
    w1 = _odd_window(_BASELINE_WINDOWS_MS[0], signal.fs)
    w2 = _odd_window(_BASELINE_WINDOWS_MS[1], signal.fs)
    pad = min(w1 + w2, len(x) - 1)
    if pad > 0:
        head = 2.0 * x[0] - x[pad:0:-1]
        tail = 2.0 * x[-1] - x[-2: -pad - 2: -1]
        padded = np.concatenate([head, x, tail])
    else:
        padded = x.copy()
    baseline = median_filter(median_filter(padded, size=w1), size=w2)
    if pad > 0:
        baseline = baseline[pad: pad + len(x)]
    return replace(signal, samples=x - baseline)


def _bandpass(x: np.ndarray, fs: float, low: float, high: float) -> np.ndarray:
    # Clamp the upper corner below Nyquist for low sampling rates.
    high = min(high, 0.45 * fs)
    b, a = butter(3, [low, high], btype="bandpass", fs=fs)
    return filtfilt(b, a, x)


def detect_r_peaks(signal: EcgRecord, cfg: DetectorConfig | None = None) -> PeakAnnotations:
    """Detect R peaks in the record (restricted to its selected segment).

    Returned indices are absolute sample positions, strictly increasing, and
    never closer than the refractory period.

    Raises:
        SamplingRateTooLow: fs below 60 Hz.
        SegmentTooShort: analyzed span below 2 seconds.
    """
    cfg = cfg or DetectorConfig()
    fs = signal.fs
    if fs < 60:
        raise SamplingRateTooLow(f"QRS detection needs fs >= 60 Hz, got {fs}")
    seg = signal.segment_slice()
    x = signal.samples[seg]
    if len(x) < 2 * fs:
        raise SegmentTooShort(f"QRS detection needs >= 2 s of signal, got {len(x) / fs:.2f} s")

    filtered = _bandpass(x, fs, cfg.bandpass_low_hz, cfg.bandpass_high_hz)
    energy = filtered ** 2
    win = max(1, int(round(cfg.integration_window_ms * fs / 1000.0)))
    integrated = uniform_filter1d(energy, size=win, mode="reflect")

    refractory = max(1, int(round(cfg.refractory_ms * fs / 1000.0)))
    local_peaks = _threshold_scan(integrated, fs, refractory, cfg)
    peaks = np.asarray(local_peaks, dtype=np.int64) + seg.start

    annotations = PeakAnnotations(record_id=signal.record_id, fs=fs, peaks=peaks)
    mode = cfg.snap_mode
    if mode == "auto" and len(peaks):
        median_amp = float(np.median(signal.samples[peaks]))
        mode = "local_max" if median_amp >= float(np.median(x)) else "local_min"
    if mode in ("local_max", "local_min") and len(peaks):
        annotations = snap_peaks(signal, annotations, mode, cfg.snap_window_ms)
        annotations = _enforce_refractory(annotations, refractory)
    return annotations


def _threshold_scan(
    integrated: np.ndarray, fs: float, refractory: int, cfg: DetectorConfig
) -> list[int]:
    """Adaptive-threshold acceptance over local maxima of the integrated
    energy, with search-back for long gaps."""
    candidates, _ = find_peaks(integrated, distance=refractory)
    if len(candidates) == 0:
        return []

    decay = np.log(2.0) / (_RUNNING_PEAK_HALF_LIFE_S * fs)
    running_peak = float(np.percentile(integrated, 98))
    if running_peak <= 0:
        return []

    accepted: list[int] = []
    rr_history: deque[int] = deque(maxlen=8)
    skipped: list[int] = []
    last_t = int(candidates[0])

    def accept(idx: int) -> None:
        if accepted:
            rr_history.append(idx - accepted[-1])
        accepted.append(idx)

    for c in candidates:
        c = int(c)
        running_peak *= float(np.exp(-decay * (c - last_t)))
        last_t = c
        threshold = cfg.threshold_fraction * running_peak
        height = float(integrated[c])
        if height >= threshold:
            if accepted and rr_history:
                gap = c - accepted[-1]
                if gap > cfg.searchback_factor * float(np.median(rr_history)):
                    _search_back(
                        integrated, skipped, accepted[-1], c, refractory,
                        0.5 * threshold, accept,
                    )
            accept(c)
            running_peak = max(running_peak, height)
            skipped = []
        else:
            skipped.append(c)
    return accepted


def _search_back(integrated, skipped, prev, nxt, refractory, threshold, accept) -> None:
    viable = [
        s for s in skipped
        if prev + refractory <= s <= nxt - refractory and integrated[s] >= threshold
    ]
    if viable:
        accept(max(viable, key=lambda s: integrated[s]))


def _enforce_refractory(peaks: PeakAnnotations, refractory: int) -> PeakAnnotations:
    if len(peaks) < 2:
        return peaks
    kept = [int(peaks.peaks[0])]
    for p in peaks.peaks[1:]:
        if int(p) - kept[-1] >= refractory:
            kept.append(int(p))
    if len(kept) == len(peaks):
        return peaks
    return replace(peaks, peaks=np.asarray(kept, dtype=np.int64))


def snap_peaks(
    signal: EcgRecord, peaks: PeakAnnotations, mode: str, window_ms: float
) -> PeakAnnotations:
    """Move each peak to the argmax (local_max) or argmin (local_min) of the
    waveform within +-window_ms.

    A move that would break the strict increase of the sequence is discarded:
    the offending peak keeps its original position. The version counter is
    unchanged (snapping is a refinement, not an edit batch).
    """
    if window_ms <= 0:
        raise ValueError("window_ms must be positive")
    if mode not in ("local_max", "local_min"):
        raise ValueError(f"mode must be local_max or local_min, got {mode!r}")
    half = max(1, int(round(window_ms * signal.fs / 1000.0)))
    x = signal.samples
    pick = np.argmax if mode == "local_max" else np.argmin

    snapped: list[int] = []
    for p in peaks.peaks:
        p = int(p)
        lo = max(0, p - half)
        hi = min(len(x), p + half + 1)
        candidate = lo + int(pick(x[lo:hi]))
        if snapped and candidate <= snapped[-1]:
            candidate = p
        if snapped and candidate <= snapped[-1]:
            # Even the original would collide; drop the later peak.
            continue
        snapped.append(candidate)
    return replace(peaks, peaks=np.asarray(snapped, dtype=np.int64))


def apply_peak_edits(
    peaks: PeakAnnotations,
    add: list[int] | None = None,
    remove: list[int] | None = None,
    n_samples: int | None = None,
) -> PeakAnnotations:
    """Apply one edit batch: (old set minus removals) union additions.

    The result is re-sorted and the version counter incremented by exactly 1.

    Raises:
        UnknownPeak: a removal target is not annotated.
        DuplicatePeak: an addition is already present (or repeated).
        OutOfRange: an addition lies outside [0, n_samples).
    """
    add = [int(a) for a in (add or [])]
    remove = [int(r) for r in (remove or [])]
    current = set(int(p) for p in peaks.peaks)

    for r in remove:
        if r not in current:
            raise UnknownPeak(f"peak {r} is not annotated")
    surviving = current - set(remove)

    for a in add:
        if a in surviving:
            raise DuplicatePeak(f"peak {a} is already annotated")
        if a < 0 or (n_samples is not None and a >= n_samples):
            raise OutOfRange(f"peak {a} outside sample range [0, {n_samples})")
        surviving.add(a)

    return replace(
        peaks,
        peaks=np.asarray(sorted(surviving), dtype=np.int64),
        version=peaks.version + 1,
    )
