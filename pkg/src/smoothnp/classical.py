"""Ordinary sign and Wilcoxon signed-rank statistics and their exact null laws."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import _backend
from .sample import as_values

MAX_SIGN_N = 64
MAX_WILCOXON_N = 60


def sign_statistic(x) -> int:
    """Number of observations >= 0 (a zero counts as positive)."""
    return int(np.count_nonzero(as_values(x) >= 0.0))


def wilcoxon_statistic(x) -> int:
    """Number of Walsh pairs i <= j with x_i + x_j >= 0."""
    v = as_values(x)
    return int(_backend.walsh_count_rows(np.ascontiguousarray(v[None, :]))[0])


def wilcoxon_statistic_direct(x) -> int:
    """Double loop over i <= j; reference for :func:`wilcoxon_statistic`."""
    v = as_values(x)
    n = v.size
    return sum(1 for i in range(n) for j in range(i, n) if v[i] + v[j] >= 0.0)


@dataclass(frozen=True)
class ExactDistribution:
    """Exact null law of an integer statistic supported on 0..max."""

    statistic_name: str
    n: int
    counts: tuple  # integer counts, total 2**n

    @property
    def max(self) -> int:
        return len(self.counts) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(len(self.counts))

    @property
    def mass(self) -> np.ndarray:
        total = 1 << self.n
        return np.array([float(Fraction(c, total)) for c in self.counts])

    def upper_tail(self, value) -> float:
        """P(T >= value)."""
        k = int(np.ceil(value))
        if k <= 0:
            return 1.0
        if k > self.max:
            return 0.0
        return float(Fraction(sum(self.counts[k:]), 1 << self.n))

    def upper_tail_array(self) -> np.ndarray:
        """P(T >= k) for k = 0..max, accumulated in exact integers."""
        tails = np.cumsum(np.array(self.counts[::-1], dtype=object))[::-1]
        total = 1 << self.n
        return np.array([float(Fraction(int(t), total)) for t in tails])

    def critical_value(self, alpha: float) -> int:
        """Smallest k with P(T >= k) <= alpha (max + 1 when none)."""
        tails = self.upper_tail_array()
        ok = np.nonzero(tails <= alpha)[0]
        return int(ok[0]) if ok.size else self.max + 1

    def moments(self) -> tuple[Fraction, Fraction]:
        total = 1 << self.n
        mean = Fraction(sum(k * c for k, c in enumerate(self.counts)), total)
        second = Fraction(sum(k * k * c for k, c in enumerate(self.counts)), total)
        return mean, second - mean * mean


@lru_cache(maxsize=None)
def exact_sign_distribution(n: int) -> ExactDistribution:
    if not 1 <= n <= MAX_SIGN_N:
        raise ValueError(f"n must lie in 1..{MAX_SIGN_N}")
    return ExactDistribution("sign", n, tuple(comb(n, k) for k in range(n + 1)))


@lru_cache(maxsize=None)
def exact_wilcoxon_distribution(n: int) -> ExactDistribution:
    """Coefficients of prod_{r=1..n} (1 + t**r), as exact integers."""
    if not 1 <= n <= MAX_WILCOXON_N:
        raise ValueError(f"n must lie in 1..{MAX_WILCOXON_N}")
    top = n * (n + 1) // 2
    counts = [0] * (top + 1)
    counts[0] = 1
    for r in range(1, n + 1):
        for w in range(r * (r + 1) // 2, r - 1, -1):
            counts[w] += counts[w - r]
    return ExactDistribution("wilcoxon", n, tuple(counts))


def classical_null_moments(test: str, n: int) -> tuple[float, float]:
    if n < 1:
        raise ValueError("n must be >= 1")
    if test == "sign":
        return n / 2.0, n / 4.0
    if test == "wilcoxon":
        return n * (n + 1) / 4.0, n * (n + 1) * (2 * n + 1) / 24.0
    raise ValueError(f"unknown test {test!r}")
