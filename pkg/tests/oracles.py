"""Brute-force definitional oracles, independent of the library code paths.

These enumerate the definitions directly (nested Python loops, 1-based index
algebra where the definition is 1-based) and are deliberately slow.
"""

from __future__ import annotations

import math

import numpy as np


def rrnim_oracle(x, n: int, m: int) -> list[float]:
    """Windowed-sum series straight from the definition:
    Y_i = sum_{j=1..n} X_{(i-1)m+j}, i = 1..floor((N-n+1)/m), 1-based."""
    x = list(x)
    big_n = len(x)
    if big_n < n:
        return []
    big_m = (big_n - n + 1) // m
    out = []
    for i in range(1, big_m + 1):
        total = 0.0
        for j in range(1, n + 1):
            total += x[(i - 1) * m + j - 1]  # 1-based -> 0-based
        out.append(total)
    return out


def _chebyshev(a, b) -> float:
    return max(abs(u - v) for u, v in zip(a, b))


def apen_oracle(x, m: int, r: float) -> float:
    """Approximate entropy by full pairwise enumeration, self-matches
    included: Phi(m) - Phi(m+1), Phi(k) = mean_i ln(C_i), C_i the fraction
    of k-templates within r of template i."""
    x = list(x)
    big_n = len(x)

    def phi(k: int) -> float:
        nt = big_n - k + 1
        counts = []
        for i in range(nt):
            c = 0
            for j in range(nt):
                if _chebyshev(x[i: i + k], x[j: j + k]) <= r:
                    c += 1
            counts.append(c)
        return float(np.mean(np.log(np.asarray(counts) / nt)))

    return phi(m) - phi(m + 1)


def sampen_oracle(x, m: int, r: float):
    """Sample entropy by full pair enumeration, self-matches excluded; both
    template lengths draw from the first N - m start positions. Returns
    (value, None) or (None, reason)."""
    x = list(x)
    nt = len(x) - m
    b_pairs = 0
    a_pairs = 0
    for i in range(nt):
        for j in range(i + 1, nt):
            if _chebyshev(x[i: i + m], x[j: j + m]) <= r:
                b_pairs += 1
            if _chebyshev(x[i: i + m + 1], x[j: j + m + 1]) <= r:
                a_pairs += 1
    if b_pairs == 0:
        return None, "no m matches"
    if a_pairs == 0:
        return None, "no m+1 matches"
    return float(-np.log(a_pairs / b_pairs)), None


def entropy_tolerance(x, factor: float = 0.15) -> float:
    return factor * float(np.std(np.asarray(x, dtype=float), ddof=1))


def quadrature_band_power(freqs, power, lo: float, hi: float, steps: int = 20000) -> float:
    """Midpoint-rule quadrature of an interpolated PSD over [lo, hi]."""
    grid = np.linspace(lo, hi, steps + 1)
    mids = 0.5 * (grid[:-1] + grid[1:])
    return float(np.sum(np.interp(mids, freqs, power)) * (hi - lo) / steps)


def dl1_oracle(a, b) -> int:
    return sum(abs(int(u) - int(v)) for u, v in zip(a, b))


def relative_error_oracle(x_h: float, x_p: float) -> float:
    return math.fabs(x_h - x_p) / (math.fabs(x_p) + 1e-8)
