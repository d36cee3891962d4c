"""Construction of RRnIm interval series and enumeration of analysis plans.

Given a clean interval series X of length N and parameters 1 <= m <= n, the
transformed series Y has M = floor((N - n + 1) / m) elements,

    Y[i] = X[i*m] + X[i*m + 1] + ... + X[i*m + n - 1]      (0-based)

i.e. sums of n consecutive intervals whose window starts are m beats apart.
m = n gives non-overlapping windows; n = m = 1 is the identity.
"""

from __future__ import annotations

import numpy as np

from .core import IbiSeries, RnimSeries
from .errors import InvalidParameters

PlanMode = str  # "single" | "m_equals_n" | "all"


def build_rrnim(ibi: IbiSeries, n: int, m: int) -> RnimSeries:
    """Build the RRnIm series for one (n, m) pair.

    Summation is strictly left-to-right within each window so results are
    bit-reproducible across runs and platforms. A zero-length series (when
    N < n) is a legal value, not an error.

    Raises:
        InvalidParameters: unless 1 <= m <= n.
    """
    if n < 1 or m < 1 or m > n:
        raise InvalidParameters(f"require 1 <= m <= n, got n={n}, m={m}")

    x = ibi.intervals_ms
    count = max(0, (len(x) - n + 1) // m)
    starts = np.arange(count) * m

    # Accumulate one parent interval per pass: values[i] gathers
    # x[starts[i]], then + x[starts[i]+1], ... exactly left to right.
    values = x[starts].copy() if count else np.empty(0)
    for j in range(1, n):
        values = values + x[starts + j]

    return RnimSeries(
        n=n,
        m=m,
        values_ms=values,
        source_len=len(x),
        onset_times_ms=_onset_times(ibi, n, m, values, starts),
    )


def _onset_times(
    ibi: IbiSeries, n: int, m: int, values: np.ndarray, starts: np.ndarray
) -> np.ndarray:
    """Time anchor for each transformed interval.

    Non-overlapping windows (m == n) tile time, so their own cumulative sums
    are the beat times. Overlapping windows (m < n) do not; each value is
    anchored at the parent onset time of its window's first beat, which keeps
    timestamps strictly monotone.
    """
    if m == n:
        return np.cumsum(values)
    anchors = np.empty(len(starts))
    for i, s in enumerate(starts):
        anchors[i] = 0.0 if s == 0 else ibi.onset_times_ms[s - 1]
    return anchors


def enumerate_plans(mode: PlanMode, n: int, m: int | None = None) -> list[tuple[int, int]]:
    """Expand an analysis mode into concrete (n, m) pairs.

    ``single`` -> [(n, m)]; ``m_equals_n`` -> [(n, n)]; ``all`` -> every
    (n', m') with 1 <= m' <= n' <= n, ordered by n' then m'.

    Raises:
        InvalidParameters: on an unknown mode, n < 1, or (for single mode)
            a missing m or m > n.
    """
    if n < 1:
        raise InvalidParameters(f"n must be a positive integer, got {n}")
    if mode == "single":
        if m is None:
            raise InvalidParameters("single mode requires m")
        if m < 1 or m > n:
            raise InvalidParameters(f"require 1 <= m <= n, got n={n}, m={m}")
        return [(n, m)]
    if mode == "m_equals_n":
        return [(n, n)]
    if mode == "all":
        return [(np_, mp) for np_ in range(1, n + 1) for mp in range(1, np_ + 1)]
    raise InvalidParameters(f"unknown plan mode {mode!r}")
