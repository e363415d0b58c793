"""Edgeworth approximations, Cornish-Fisher critical values and p-values for
the smoothed statistics, plus the general kernel-CDF and U-statistic
expansions they specialise.

All p-values are one-sided upper-tail (alternative theta > 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import hermite, norm_cdf, norm_pdf, norm_ppf
from .smoothed import SmoothedStatistic


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def clamp_probability(p: float) -> tuple[float, bool]:
    """Clip to [0, 1]; the flag reports whether clipping happened."""
    if p < 0.0:
        return 0.0, True
    if p > 1.0:
        return 1.0, True
    return float(p), False


def _check_n(n: int) -> None:
    if n < 2:
        raise ValueError("Edgeworth approximations need n >= 2")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly inside (0, 1)")


# -- smoothed sign ---------------------------------------------------------

def edgeworth_cdf_sign(y, n: int):
    """Phi(y) - phi(y) H3(y) / (24 n)."""
    _check_n(n)
    y = np.asarray(y, dtype=float)
    return _scalar(norm_cdf(y) - norm_pdf(y) * hermite(3, y) / (24.0 * n))


def _require_simple(stat: SmoothedStatistic, name: str) -> None:
    if stat.name != name:
        raise ValueError(f"expected a {name} statistic, got {stat.name}")
    if stat.config.variance_mode != "simple":
        raise ValueError("Edgeworth p-values need simple null moments; "
                         "use the normal approximation for density-adjusted statistics")


def pvalue_smoothed_sign(stat: SmoothedStatistic) -> float:
    _require_simple(stat, "smoothed_sign")
    n = stat.n
    y = 2.0 / math.sqrt(n) * (stat.raw_value - n / 2.0)
    return clamp_probability(1.0 - edgeworth_cdf_sign(y, n))[0]


def cornish_fisher_sign(alpha: float, n: int) -> tuple[float, float]:
    """Corrected alpha-quantile of the standardized statistic and of s-tilde.

    Reject when the observed statistic is >= the second value at 1 - alpha.
    """
    _check_alpha(alpha)
    _check_n(n)
    z = norm_ppf(alpha)
    h3 = z ** 3 - 3.0 * z
    c = z + h3 / (24.0 * n)
    s = n / 2.0 + math.sqrt(n) / 2.0 * z + h3 / (48.0 * math.sqrt(n))
    return c, s


# -- smoothed Wilcoxon -----------------------------------------------------

def wilcoxon_null_sd(n: int) -> float:
    return math.sqrt(n ** 3 / 12.0 + n ** 2 / 8.0)


def _wilcoxon_poly(x):
    return 0.35 * x ** 3 - 1.05 * x


def edgeworth_cdf_wilcoxon(x, n: int):
    """Phi(x) - phi(x) (7/20 x^3 - 21/20 x) / n."""
    _check_n(n)
    x = np.asarray(x, dtype=float)
    return _scalar(norm_cdf(x) - norm_pdf(x) * _wilcoxon_poly(x) / n)


def pvalue_smoothed_wilcoxon(stat: SmoothedStatistic) -> float:
    _require_simple(stat, "smoothed_wilcoxon")
    n = stat.n
    x = (stat.raw_value - n * (n + 1) / 4.0) / wilcoxon_null_sd(n)
    return clamp_probability(1.0 - edgeworth_cdf_wilcoxon(x, n))[0]


def cornish_fisher_wilcoxon(alpha: float, n: int) -> tuple[float, float]:
    _check_alpha(alpha)
    _check_n(n)
    z = norm_ppf(alpha)
    c = z + _wilcoxon_poly(z) / n
    return c, n * (n + 1) / 4.0 + wilcoxon_null_sd(n) * c


# -- general expansions ----------------------------------------------------

@dataclass(frozen=True)
class KernelCdfContext:
    """Inputs of the kernel distribution-function expansion at a point x0."""

    F0: float
    f0: float
    A11: float
    A21: float
    bandwidth: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.F0 < 1.0:
            raise ValueError("F0 must lie strictly inside (0, 1)")

    @property
    def b30(self) -> float:
        return (1.0 - 2.0 * self.F0) / math.sqrt(self.F0 * (1.0 - self.F0))

    @property
    def b31(self) -> float:
        return 3.0 * self.f0 * (self.A11 - self.A21) / (self.F0 * (1.0 - self.F0)) ** 1.5

    @property
    def b40(self) -> float:
        F = self.F0
        return (1.0 - 3.0 * F + 3.0 * F * F) / (F * (1.0 - F))


def kernel_cdf_expansion(y, ctx: KernelCdfContext):
    """Expansion of P(standardized kernel CDF estimate at x0 <= y)."""
    y = np.asarray(y, dtype=float)
    n, h = ctx.n, ctx.bandwidth
    phi = norm_pdf(y)
    h2 = hermite(2, y)
    q1 = ctx.b30 / 6.0 * h2
    q1s = ctx.b31 / 6.0 * h2
    q2 = ctx.b40 / 24.0 * hermite(3, y) - ctx.b30 ** 2 / 72.0 * hermite(5, y)
    val = norm_cdf(y) - phi * q1 / math.sqrt(n) - h * phi * q1s / math.sqrt(n) - phi * q2 / n
    return _scalar(val)


@dataclass(frozen=True)
class UStatMoments:
    """Moments of the Hoeffding components of the smoothed Wilcoxon statistic."""

    xi_sq: float
    a1: float
    a2: float
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float

    def __post_init__(self):
        if not self.xi_sq > 0:
            raise ValueError("xi_sq must be positive")

    @property
    def kappa3(self) -> float:
        return self.a1 + 3.0 * self.a2

    @property
    def kappa4(self) -> float:
        return self.b1 - 3.0 * self.xi_sq ** 2 + 12.0 * (self.b2 + self.b3)

    @classmethod
    def null_limits(cls) -> "UStatMoments":
        """Small-bandwidth limits under the null hypothesis."""
        return cls(xi_sq=1 / 3, a1=0.0, a2=0.0, b1=1 / 5, b2=-2 / 45,
                   b3=2 / 15, b4=-1 / 6, b5=1 / 3)


def ustat_expansion(x, n: int, m: UStatMoments):
    """Q_n(x) = Phi(x) - phi(x) (P1(x)/sqrt(n) + P2(x)/n)."""
    x = np.asarray(x, dtype=float)
    xi = math.sqrt(m.xi_sq)
    k3 = m.kappa3
    p1 = k3 * (x * x - 1.0) / (6.0 * xi ** 3)
    p2 = ((m.b4 + m.b5 / 4.0) * x / m.xi_sq
          + m.kappa4 * hermite(3, x) / (24.0 * xi ** 4)
          + k3 * k3 * hermite(5, x) / (72.0 * xi ** 6))
    return _scalar(norm_cdf(x) - norm_pdf(x) * (p1 / math.sqrt(n) + p2 / n))
