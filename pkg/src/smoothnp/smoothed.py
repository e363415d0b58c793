"""Kernel-smoothed sign and Wilcoxon statistics and their null moments."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .kernels import BandwidthRule, Kernel, bandwidth, get_kernel, kernel_moment
from .sample import as_values

VARIANCE_MODES = ("simple", "density_adjusted")


class ApproximationWarning(UserWarning):
    """Simple null moments requested for a kernel that does not justify them."""


@dataclass(frozen=True)
class SmoothedConfig:
    """Kernel, bandwidth and variance mode for a smoothed statistic.

    ``density_adjusted`` uses supplied density functionals: ``f0`` and
    ``f2_0`` (f(0), f''(0)) for the sign statistic, ``int_f_cubed`` for the
    Wilcoxon statistic.
    """

    kernel: Kernel
    bandwidth: float
    variance_mode: str = "simple"
    f0: float | None = None
    f2_0: float | None = None
    int_f_cubed: float | None = None

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if self.variance_mode not in VARIANCE_MODES:
            raise ValueError(f"variance_mode must be one of {VARIANCE_MODES}")
        for name in ("f0", "f2_0", "int_f_cubed"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def build(cls, kernel: str | Kernel, n: int, rule: BandwidthRule | None = None,
              **kwargs) -> "SmoothedConfig":
        k = get_kernel(kernel) if isinstance(kernel, str) else kernel
        h = bandwidth(rule or BandwidthRule(), n)
        return cls(k, h, **kwargs)

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.name, "bandwidth": self.bandwidth,
                "variance_mode": self.variance_mode, "f0": self.f0,
                "f2_0": self.f2_0, "int_f_cubed": self.int_f_cubed}


@dataclass(frozen=True)
class SmoothedStatistic:
    name: str
    raw_value: float
    n: int
    null_mean: float
    null_variance: float
    config: SmoothedConfig
    theta: float = 0.0
    notes: tuple = field(default=())

    @property
    def standardized(self) -> float:
        return (self.raw_value - self.null_mean) / math.sqrt(self.null_variance)

    def to_dict(self) -> dict:
        return {"name": self.name, "raw_value": self.raw_value, "n": self.n,
                "null_mean": self.null_mean, "null_variance": self.null_variance,
                "standardized": self.standardized, "theta": self.theta,
                "config": self.config.to_dict(), "notes": list(self.notes)}


def _row(x) -> np.ndarray:
    return np.ascontiguousarray(as_values(x)[None, :])


def smoothed_sign_value(x, cfg: SmoothedConfig, theta: float = 0.0) -> float:
    """n - sum_i K((theta - x_i) / h)."""
    b, c = cfg.kernel.cdf_table()
    row = _row(x)
    return row.shape[1] - float(_backend.sign_sum_rows(row, theta, cfg.bandwidth, b, c)[0])


def smoothed_wilcoxon_value(x, cfg: SmoothedConfig, theta: float = 0.0) -> float:
    """n(n+1)/2 - sum_{i<=j} K((2 theta - x_i - x_j) / (2h))."""
    b, c = cfg.kernel.cdf_table()
    row = _row(x)
    n = row.shape[1]
    return n * (n + 1) / 2.0 - float(_backend.walsh_sum_rows(row, theta, cfg.bandwidth, b, c)[0])


def smoothed_wilcoxon_direct(x, cfg: SmoothedConfig, theta: float = 0.0) -> float:
    v = as_values(x)
    b, c = cfg.kernel.cdf_table()
    n = v.size
    return n * (n + 1) / 2.0 - float(_backend.walsh_sum_direct(
        np.ascontiguousarray(v), theta, cfg.bandwidth, b, c))


def null_moments_smoothed_sign(n: int, cfg: SmoothedConfig) -> tuple[float, float, tuple]:
    """Null mean and variance of the smoothed sign statistic, plus notes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mean = n / 2.0
    a11 = kernel_moment(cfg.kernel, 1, 1)
    if cfg.variance_mode == "simple":
        notes = ()
        if abs(a11) > 1e-8:
            msg = (f"simple variance n/4 assumes A[1,1] = 0; kernel "
                   f"{cfg.kernel.name!r} has A[1,1] = {a11:.3g}")
            warnings.warn(msg, ApproximationWarning, stacklevel=2)
            notes = (msg,)
        return mean, n / 4.0, notes
    if cfg.f0 is None or cfg.f2_0 is None:
        raise ValueError("density_adjusted sign moments need f0 and f2_0")
    h = cfg.bandwidth
    a13 = kernel_moment(cfg.kernel, 1, 3)
    var = n / 4.0 - 2.0 * n * h * cfg.f0 * a11 - n * h ** 3 / 3.0 * cfg.f2_0 * a13
    if not var > 0:
        raise ValueError("density-adjusted variance is not positive")
    return mean, var, ()


def null_moments_smoothed_wilcoxon(n: int, cfg: SmoothedConfig) -> tuple[float, float, tuple]:
    if n < 1:
        raise ValueError("n must be >= 1")
    mean = n * (n + 1) / 4.0
    base = n * n * (2 * n + 3) / 24.0
    if cfg.variance_mode == "simple":
        notes = ()
        if cfg.kernel.order != 4:
            msg = (f"simple variance n^2(2n+3)/24 assumes a fourth-order kernel; "
                   f"{cfg.kernel.name!r} has order {cfg.kernel.order}")
            warnings.warn(msg, ApproximationWarning, stacklevel=2)
            notes = (msg,)
        return mean, base, notes
    if cfg.int_f_cubed is None:
        raise ValueError("density_adjusted Wilcoxon moments need int_f_cubed")
    a02 = kernel_moment(cfg.kernel, 0, 2)
    var = base - 4.0 * n ** 3 * cfg.bandwidth ** 2 * a02 * cfg.int_f_cubed
    if not var > 0:
        raise ValueError("density-adjusted variance is not positive")
    return mean, var, ()


def smoothed_sign(x, cfg: SmoothedConfig, theta: float = 0.0) -> SmoothedStatistic:
    v = as_values(x)
    mean, var, notes = null_moments_smoothed_sign(v.size, cfg)
    return SmoothedStatistic("smoothed_sign", smoothed_sign_value(v, cfg, theta), v.size,
                             mean, var, cfg, theta, notes)


def smoothed_wilcoxon(x, cfg: SmoothedConfig, theta: float = 0.0) -> SmoothedStatistic:
    v = as_values(x)
    mean, var, notes = null_moments_smoothed_wilcoxon(v.size, cfg)
    return SmoothedStatistic("smoothed_wilcoxon", smoothed_wilcoxon_value(v, cfg, theta), v.size,
                             mean, var, cfg, theta, notes)


def normal_int_f_cubed() -> float:
    """int phi(x)^3 dx = 1 / (2 pi sqrt 3)."""
    return 1.0 / (2.0 * math.pi * math.sqrt(3.0))
