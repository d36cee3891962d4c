"""Poincaré geometry, approximate/sample entropy, and DFA scaling exponents.

Both entropies use the Chebyshev (max-norm) template distance and a tolerance
r = tolerance_factor * SDRR of the analyzed series, so they are invariant
under shifting or (jointly with r) rescaling the intervals. Counting is kept
in exact integers; only the final log/mean steps are floating point, which
makes the results reproducible against definitional brute-force oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import RnimSeries
from .errors import TooShort


@dataclass(frozen=True)
class EntropyConfig:
    """Template length and tolerance for ApEn/SampEn.

    The embedding here is the entropy template length, unrelated to the
    stride parameter m of the interval transform.
    """

    embedding: int = 2
    tolerance_factor: float = 0.15

    def __post_init__(self):
        if self.embedding < 1:
            raise ValueError(f"embedding must be >= 1, got {self.embedding}")
        if self.tolerance_factor <= 0:
            raise ValueError(f"tolerance_factor must be > 0, got {self.tolerance_factor}")


@dataclass(frozen=True)
class DfaConfig:
    """Box-size ranges for the short- and long-range DFA exponents.

    The long-range upper bound is capped at min(alpha2_max_cap, M // 4) so
    every box size keeps at least 4 boxes for a stable fluctuation estimate.
    """

    alpha1_min: int = 4
    alpha1_max: int = 16
    alpha2_min: int = 16
    alpha2_max_cap: int = 64


@dataclass(frozen=True)
class NonlinearMetrics:
    sd1_ms: Optional[float] = None
    sd2_ms: Optional[float] = None
    apen: Optional[float] = None
    sampen: Optional[float] = None
    dfa_alpha1: Optional[float] = None
    dfa_alpha2: Optional[float] = None


def poincare(series: RnimSeries) -> tuple[float, float]:
    """Width (SD1) and length (SD2) of the lag-1 return map.

    SD1 is the sample std of (x[i+1] - x[i]) / sqrt(2), SD2 of
    (x[i+1] + x[i]) / sqrt(2).

    Raises:
        TooShort: fewer than 3 intervals.
    """
    v = series.values_ms
    if len(v) < 3:
        raise TooShort(f"Poincare needs >= 3 intervals, got {len(v)}")
    sd1 = float(np.std((v[1:] - v[:-1]) / np.sqrt(2.0), ddof=1))
    sd2 = float(np.std((v[1:] + v[:-1]) / np.sqrt(2.0), ddof=1))
    return sd1, sd2


def _tolerance(v: np.ndarray, cfg: EntropyConfig) -> float:
    return cfg.tolerance_factor * float(np.std(v, ddof=1))


def _match_counts(v: np.ndarray, k: int, r: float) -> np.ndarray:
    """For each k-length template, the number of templates (self included)
    within Chebyshev distance r."""
    nt = len(v) - k + 1
    templates = np.lib.stride_tricks.sliding_window_view(v, k)
    counts = np.empty(nt, dtype=np.int64)
    for i in range(nt):
        dist = np.max(np.abs(templates - templates[i]), axis=1)
        counts[i] = int(np.sum(dist <= r))
    return counts


def apen(series: RnimSeries, cfg: EntropyConfig | None = None) -> float:
    """Approximate entropy: Phi(m) - Phi(m+1) with self-matches included,
    where Phi(k) is the mean log of the fraction of templates within r of
    each k-length template.

    Raises:
        TooShort: length must exceed embedding + 1.
    """
    cfg = cfg or EntropyConfig()
    v = series.values_ms
    if len(v) <= cfg.embedding + 1:
        raise TooShort(
            f"ApEn needs more than {cfg.embedding + 1} intervals, got {len(v)}"
        )
    r = _tolerance(v, cfg)

    def phi(k: int) -> float:
        counts = _match_counts(v, k, r)
        return float(np.mean(np.log(counts / (len(v) - k + 1))))

    return phi(cfg.embedding) - phi(cfg.embedding + 1)


def sampen(
    series: RnimSeries, cfg: EntropyConfig | None = None
) -> tuple[Optional[float], Optional[str]]:
    """Sample entropy: -ln(A/B) over template pairs with self-matches
    excluded; B counts pairs matching at the embedding length, A at one more.

    Both lengths draw templates from the same first M - m start positions so
    the A/B ratio is a genuine conditional probability.

    Returns (value, None), or (None, reason) when no pairs match at either
    length (the two degenerate cases carry distinct reasons).

    Raises:
        TooShort: length must exceed embedding + 1.
    """
    cfg = cfg or EntropyConfig()
    v = series.values_ms
    m = cfg.embedding
    if len(v) <= m + 1:
        raise TooShort(f"SampEn needs more than {m + 1} intervals, got {len(v)}")
    r = _tolerance(v, cfg)
    nt = len(v) - m

    short = np.lib.stride_tricks.sliding_window_view(v, m)[:nt]
    long = np.lib.stride_tricks.sliding_window_view(v, m + 1)[:nt]
    b_pairs = 0
    a_pairs = 0
    for i in range(nt - 1):
        b_pairs += int(np.sum(np.max(np.abs(short[i + 1:] - short[i]), axis=1) <= r))
        a_pairs += int(np.sum(np.max(np.abs(long[i + 1:] - long[i]), axis=1) <= r))

    if b_pairs == 0:
        return None, "no template pairs match at the embedding length"
    if a_pairs == 0:
        return None, "no template pairs match at the extended length"
    return float(-np.log(a_pairs / b_pairs)), None


def dfa(
    series: RnimSeries, cfg: DfaConfig | None = None
) -> tuple[Optional[float], Optional[float]]:
    """Short- and long-range scaling exponents of the detrended fluctuation.

    The mean-centered series is integrated into a profile; for each box size
    the profile is split into complete non-overlapping boxes from the left,
    each box is linearly detrended, and F(s) is the rms residual over all
    covered points. Each exponent is the slope of log F(s) vs log s over its
    configured box-size range.

    Exponents whose length precondition fails (20 for alpha1, 64 for alpha2)
    or whose range degenerates come back as None.

    Raises:
        TooShort: series too short for even the short-range exponent.
    """
    cfg = cfg or DfaConfig()
    v = series.values_ms
    count = len(v)
    if count < 20:
        raise TooShort(f"DFA needs >= 20 intervals, got {count}")

    profile = np.cumsum(v - np.mean(v))

    def fluctuation(s: int) -> float:
        n_boxes = count // s
        boxes = profile[: n_boxes * s].reshape(n_boxes, s)
        t = np.arange(s, dtype=float)
        coeffs = np.polyfit(t, boxes.T, 1)
        residuals = boxes.T - (np.outer(t, coeffs[0]) + coeffs[1])
        return float(np.sqrt(np.mean(residuals ** 2)))

    def slope(sizes: np.ndarray) -> Optional[float]:
        f = np.array([fluctuation(int(s)) for s in sizes])
        if np.any(f <= 0):
            return None  # zero fluctuation (e.g. constant series)
        return float(np.polyfit(np.log(sizes), np.log(f), 1)[0])

    alpha1 = slope(np.arange(cfg.alpha1_min, cfg.alpha1_max + 1))

    alpha2 = None
    if count >= 64:
        upper = min(cfg.alpha2_max_cap, count // 4)
        sizes2 = np.arange(cfg.alpha2_min, upper + 1)
        if len(sizes2) >= 2:
            alpha2 = slope(sizes2)
    return alpha1, alpha2


def compute_nonlinear_metrics(
    series: RnimSeries,
    entropy_cfg: EntropyConfig | None = None,
    dfa_cfg: DfaConfig | None = None,
) -> tuple[NonlinearMetrics, dict[str, str]]:
    """All nonlinear metrics for one series, with per-metric gating.

    Metrics whose preconditions fail are None and listed in the returned
    reason map instead of raising.
    """
    entropy_cfg = entropy_cfg or EntropyConfig()
    dfa_cfg = dfa_cfg or DfaConfig()
    count = len(series.values_ms)
    out: dict[str, Optional[float]] = {}
    not_computable: dict[str, str] = {}

    if count >= 3:
        out["sd1_ms"], out["sd2_ms"] = poincare(series)
    else:
        not_computable["sd1_ms"] = not_computable["sd2_ms"] = "needs at least 3 intervals"

    if count > entropy_cfg.embedding + 1:
        out["apen"] = apen(series, entropy_cfg)
        value, reason = sampen(series, entropy_cfg)
        if value is None:
            not_computable["sampen"] = reason or "no matches"
        else:
            out["sampen"] = value
    else:
        reason = f"needs more than {entropy_cfg.embedding + 1} intervals"
        not_computable["apen"] = not_computable["sampen"] = reason

    if count >= 20:
        alpha1, alpha2 = dfa(series, dfa_cfg)
        if alpha1 is None:
            not_computable["dfa_alpha1"] = "degenerate fluctuation"
        else:
            out["dfa_alpha1"] = alpha1
        if alpha2 is None:
            not_computable["dfa_alpha2"] = (
                "needs at least 64 intervals and a non-degenerate box range"
                if count < 64 else "degenerate fluctuation or box range"
            )
        else:
            out["dfa_alpha2"] = alpha2
    else:
        not_computable["dfa_alpha1"] = "needs at least 20 intervals"
        not_computable["dfa_alpha2"] = "needs at least 64 intervals"

    return NonlinearMetrics(**out), not_computable
