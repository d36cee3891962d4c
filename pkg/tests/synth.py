"""Synthetic signal generators with ground truth, shared across tests."""

from __future__ import annotations

import numpy as np

# (amplitude, center offset ms, sigma ms) per wave of one beat template
_BEAT_WAVES = (
    (0.12, -180.0, 25.0),   # P
    (-0.12, -40.0, 9.0),    # Q
    (1.00, 0.0, 11.0),      # R
    (-0.18, 40.0, 9.0),     # S
    (0.35, 230.0, 55.0),    # T
)


def synthetic_ecg(
    duration_s: float,
    fs: float,
    hr_bpm: float,
    *,
    modulation_depth: float = 0.03,
    modulation_hz: float = 0.1,
    noise_snr_db: float | None = None,
    drift: np.ndarray | None = None,
    invert: bool = False,
    seed: int = 0,
):
    """Gaussian-template ECG train with known R apex sample indices.

    Beat-to-beat intervals are sinusoidally modulated around 60/hr_bpm; each
    R apex is centered exactly on its sample so the returned indices are
    exact ground truth. SNR is relative to the clean train's mean power.
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * fs))
    x = np.zeros(n)

    peak_indices = []
    t_beat = 0.5
    rr_base = 60.0 / hr_bpm
    margin = int(0.35 * fs)
    while True:
        idx = int(round(t_beat * fs))
        if idx >= n - margin:
            break
        peak_indices.append(idx)
        rr = rr_base * (1.0 + modulation_depth * np.sin(2 * np.pi * modulation_hz * t_beat))
        t_beat += rr

    for idx in peak_indices:
        _add_beat(x, idx, fs)

    if invert:
        x = -x
    if noise_snr_db is not None:
        sigma = np.sqrt(np.mean(x ** 2) / 10.0 ** (noise_snr_db / 10.0))
        x = x + rng.normal(0.0, sigma, n)
    if drift is not None:
        x = x + drift
    return x, np.asarray(peak_indices, dtype=np.int64)


def _add_beat(x: np.ndarray, idx: int, fs: float) -> None:
    for amp, offset_ms, sigma_ms in _BEAT_WAVES:
        center = idx + offset_ms * fs / 1000.0
        sigma = sigma_ms * fs / 1000.0
        lo = max(0, int(center - 4 * sigma))
        hi = min(len(x), int(center + 4 * sigma) + 1)
        if lo >= hi:
            continue
        t = np.arange(lo, hi)
        x[lo:hi] += amp * np.exp(-0.5 * ((t - center) / sigma) ** 2)


def modulated_tachogram(
    duration_s: float,
    mean_ms: float = 900.0,
    amp_ms: float = 50.0,
    freq_hz: float = 0.1,
    extra: list[tuple[float, float]] | None = None,
) -> np.ndarray:
    """Interval series whose value tracks one or more sinusoids of beat time.

    ``extra`` adds (amp_ms, freq_hz) tones on top of the primary one.
    """
    tones = [(amp_ms, freq_hz)] + list(extra or [])
    intervals = []
    t = 0.0
    while t < duration_s:
        value = mean_ms + sum(a * np.sin(2 * np.pi * f * t) for a, f in tones)
        intervals.append(value)
        t += value / 1000.0
    return np.asarray(intervals)


def white_noise_tachogram(
    count: int, mean_ms: float = 900.0, sd_ms: float = 40.0, seed: int = 0
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    values = mean_ms + sd_ms * rng.standard_normal(count)
    return np.clip(values, 0.2 * mean_ms, None)
