"""Test decisions and confidence intervals for the location parameter."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from .classical import (
    MAX_SIGN_N,
    MAX_WILCOXON_N,
    classical_null_moments,
    exact_sign_distribution,
    exact_wilcoxon_distribution,
    sign_statistic,
    wilcoxon_statistic,
)
from .distributions import norm_cdf, norm_ppf, student_t_quantile, student_t_sf
from .edgeworth import (
    clamp_probability,
    cornish_fisher_sign,
    cornish_fisher_wilcoxon,
    edgeworth_cdf_sign,
    edgeworth_cdf_wilcoxon,
    wilcoxon_null_sd,
)
from .kernels import kernel_moment
from .sample import as_values
from .smoothed import SmoothedConfig, smoothed_sign, smoothed_wilcoxon

TESTS = ("smoothed_sign", "smoothed_wilcoxon", "sign", "wilcoxon", "t")
ALTERNATIVES = ("greater", "two-sided")
DEFAULT_KERNELS = {"smoothed_sign": "a11zero", "smoothed_wilcoxon": "epanechnikov4"}


class InvariantError(RuntimeError):
    """An internal consistency check failed at run time."""


def t_statistic(x) -> float:
    """sqrt(n) * mean / sqrt(unbiased variance)."""
    v = as_values(x)
    if v.size < 2:
        raise ValueError("the t statistic needs n >= 2")
    var = float(np.var(v, ddof=1))
    if var <= 0.0:
        raise ValueError("zero sample variance")
    return math.sqrt(v.size) * float(np.mean(v)) / math.sqrt(var)


@dataclass
class TestOutcome:
    __test__ = False  # not a pytest class

    test_name: str
    n: int
    statistic: float
    null_mean: float | None
    null_variance: float | None
    standardized: float
    p_normal: float
    p_edgeworth: float | None
    p_exact: float | None
    alpha: float
    alternative: str
    threshold: float | list
    decision: str
    clamped: bool = False
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    def to_dict(self) -> dict:
        return asdict(self)


def _two_sided(p_upper: float) -> float:
    return min(1.0, 2.0 * min(p_upper, 1.0 - p_upper))


def default_config(test: str, n: int) -> SmoothedConfig:
    return SmoothedConfig.build(DEFAULT_KERNELS[test], n)


def _decide_smoothed(test, v, alpha, cfg, alternative):
    n = v.size
    cfg = cfg or default_config(test, n)
    if test == "smoothed_sign":
        stat = smoothed_sign(v, cfg)
        cdf, cf = edgeworth_cdf_sign, cornish_fisher_sign
        y_edge = 2.0 / math.sqrt(n) * (stat.raw_value - n / 2.0)
    else:
        stat = smoothed_wilcoxon(v, cfg)
        cdf, cf = edgeworth_cdf_wilcoxon, cornish_fisher_wilcoxon
        y_edge = (stat.raw_value - n * (n + 1) / 4.0) / wilcoxon_null_sd(n)
    z = stat.standardized
    p_norm = 1.0 - float(norm_cdf(z))
    p_edge = None
    clamped = False
    if cfg.variance_mode == "simple":
        p_edge, clamped = clamp_probability(1.0 - cdf(y_edge, n))
    if alternative == "greater":
        if cfg.variance_mode == "simple":
            threshold = cf(1.0 - alpha, n)[1]
        else:
            threshold = stat.null_mean + math.sqrt(stat.null_variance) * norm_ppf(1.0 - alpha)
        reject = stat.raw_value >= threshold
    else:
        if cfg.variance_mode == "simple":
            threshold = [cf(alpha / 2.0, n)[1], cf(1.0 - alpha / 2.0, n)[1]]
        else:
            sd = math.sqrt(stat.null_variance)
            zq = norm_ppf(1.0 - alpha / 2.0)
            threshold = [stat.null_mean - sd * zq, stat.null_mean + sd * zq]
        reject = stat.raw_value <= threshold[0] or stat.raw_value >= threshold[1]
        p_norm = _two_sided(p_norm)
        if p_edge is not None:
            p_edge = _two_sided(p_edge)
    return TestOutcome(test, n, stat.raw_value, stat.null_mean, stat.null_variance, z,
                       p_norm, p_edge, None, alpha, alternative, threshold,
                       "reject" if reject else "retain", clamped,
                       {**cfg.to_dict(), "test": test}, list(stat.notes))


def _decide_classical(test, v, alpha, alternative):
    n = v.size
    if test == "sign":
        value = sign_statistic(v)
        dist = exact_sign_distribution(n) if n <= MAX_SIGN_N else None
    else:
        value = wilcoxon_statistic(v)
        dist = exact_wilcoxon_distribution(n) if n <= MAX_WILCOXON_N else None
    mean, var = classical_null_moments(test, n)
    z = (value - mean) / math.sqrt(var)
    p_norm = 1.0 - float(norm_cdf(z))
    notes = []
    if dist is None:
        notes.append("n beyond the exact-distribution range; decision uses the normal approximation")
        if alternative == "greater":
            p_exact = None
            threshold = mean + math.sqrt(var) * norm_ppf(1.0 - alpha)
            reject = value >= threshold
        else:
            p_exact = None
            p_norm = _two_sided(p_norm)
            threshold = [mean - math.sqrt(var) * norm_ppf(1 - alpha / 2),
                         mean + math.sqrt(var) * norm_ppf(1 - alpha / 2)]
            reject = p_norm <= alpha
    elif alternative == "greater":
        p_exact = dist.upper_tail(value)
        threshold = dist.critical_value(alpha)
        reject = value >= threshold
    else:
        upper = dist.upper_tail(value)
        lower = dist.upper_tail(dist.max - value)  # symmetric null law
        p_exact = min(1.0, 2.0 * min(upper, lower))
        p_norm = _two_sided(p_norm)
        hi = dist.critical_value(alpha / 2.0)
        threshold = [dist.max - hi, hi]
        reject = p_exact <= alpha
    return TestOutcome(test, n, float(value), mean, var, z, p_norm, None, p_exact, alpha,
                       alternative, threshold, "reject" if reject else "retain",
                       config={"test": test}, notes=notes)


def _decide_t(v, alpha, alternative):
    n = v.size
    t = t_statistic(v)
    p_norm = 1.0 - float(norm_cdf(t))
    p_exact = student_t_sf(n - 1, t)
    if alternative == "greater":
        threshold = student_t_quantile(n - 1, 1.0 - alpha)
        reject = t >= threshold
    else:
        q = student_t_quantile(n - 1, 1.0 - alpha / 2.0)
        threshold = [-q, q]
        reject = abs(t) >= q
        p_norm = _two_sided(p_norm)
        p_exact = _two_sided(p_exact)
    return TestOutcome("t", n, t, None, None, t, p_norm, None, p_exact, alpha, alternative,
                       threshold, "reject" if reject else "retain", config={"test": "t"})


def decide(test: str, x, alpha: float = 0.05, cfg: SmoothedConfig | None = None,
           alternative: str = "greater") -> TestOutcome:
    """Run one of the five tests of H0: theta = 0.

    Smoothed tests reject when the statistic reaches its Cornish-Fisher
    critical value; the classical tests use their exact null laws and the
    t test uses Student's t quantile.
    """
    if test not in TESTS:
        raise ValueError(f"unknown test {test!r}; expected one of {TESTS}")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    v = as_values(x)
    if test in DEFAULT_KERNELS:
        if v.size < 2:
            raise ValueError("smoothed tests need n >= 2")
        return _decide_smoothed(test, v, alpha, cfg, alternative)
    if test == "t":
        return _decide_t(v, alpha, alternative)
    return _decide_classical(test, v, alpha, alternative)


# -- confidence intervals ----------------------------------------------------

@dataclass
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie strictly inside (0, 1)")
        if self.lower > self.upper:
            raise InvariantError("confidence interval endpoints are inverted")

    def contains(self, theta: float) -> bool:
        return self.lower <= theta <= self.upper

    def to_dict(self) -> dict:
        return asdict(self)


class _ShiftedCurve:
    """theta -> N - sum_a K((theta - a) / h) over sorted locations a.

    For the sign statistic the locations are the observations, for the
    Wilcoxon statistic they are the Walsh averages (x_i + x_j) / 2.
    """

    def __init__(self, locations: np.ndarray, cfg: SmoothedConfig):
        self.a = np.sort(locations)
        self.h = cfg.bandwidth
        self.r = cfg.kernel.radius
        self.breaks, self.coefs = cfg.kernel.cdf_table()

    def __call__(self, theta: float) -> float:
        lo = np.searchsorted(self.a, theta - self.h * self.r, side="right")
        hi = np.searchsorted(self.a, theta + self.h * self.r, side="left")
        band = self.a[lo:hi]
        s = lo + float(np.sum(_backend.kernel_cdf(
            np.ascontiguousarray((theta - band) / self.h), self.breaks, self.coefs)))
        return self.a.size - s

    def grid(self, thetas: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over ascending thetas."""
        lo = np.searchsorted(self.a, thetas - self.h * self.r, side="right")
        hi = np.searchsorted(self.a, thetas + self.h * self.r, side="left")
        width = np.maximum(hi - lo, 0)
        owner = np.repeat(np.arange(thetas.size), width)
        offset = np.arange(owner.size) - np.repeat(np.cumsum(width) - width, width)
        t = (thetas[owner] - self.a[lo[owner] + offset]) / self.h
        band = np.bincount(owner, weights=_backend.kernel_cdf(
            np.ascontiguousarray(t), self.breaks, self.coefs), minlength=thetas.size)
        return self.a.size - (lo + band)


def _bisect(curve, a: float, b: float, level: float, tol: float) -> tuple[float, int]:
    # curve(a) > level >= curve(b)
    it = 0
    while b - a > tol:
        m = 0.5 * (a + b)
        if curve(m) > level:
            a = m
        else:
            b = m
        it += 1
    return 0.5 * (a + b), it


def _sign_changes(values: np.ndarray, level: float) -> int:
    above = values > level
    return int(np.count_nonzero(above[1:] != above[:-1]))


def confidence_interval(method: str, x, level: float = 0.95,
                        cfg: SmoothedConfig | None = None, *, grid_points: int = 512,
                        tol: float = 1e-8, strict: bool = True) -> ConfidenceInterval:
    """Invert the shifted smoothed statistic.

    The upper endpoint is the last theta where the curve is still above the
    lower critical value, the lower endpoint the first theta where it falls
    below the upper one. Taking the outermost crossings keeps the interval
    conservative when the kernel makes the curve non-monotone.

    The thresholds come from the distribution-free expansions, which hold
    for a kernel with A[1,1] = 0 (sign) or of fourth order (Wilcoxon).
    Other kernels are refused unless ``strict=False``, in which case the
    interval is computed anyway and flagged in the diagnostics.
    """
    if method not in DEFAULT_KERNELS:
        raise ValueError(f"method must be one of {tuple(DEFAULT_KERNELS)}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie strictly inside (0, 1)")
    v = as_values(x)
    n = v.size
    if n < 2:
        raise ValueError("confidence intervals need n >= 2")
    cfg = cfg or default_config(method, n)
    if cfg.variance_mode != "simple":
        raise ValueError("confidence intervals use the distribution-free simple moments")
    alpha = 1.0 - level
    if method == "smoothed_sign":
        matched = abs(kernel_moment(cfg.kernel, 1, 1)) <= 1e-8
        if strict and not matched:
            raise ValueError("the sign interval needs a kernel with A[1,1] = 0 (e.g. a11zero)")
        locations = v
        lo_crit = cornish_fisher_sign(alpha / 2.0, n)[1]
        hi_crit = cornish_fisher_sign(1.0 - alpha / 2.0, n)[1]
    else:
        matched = cfg.kernel.order == 4
        if strict and not matched:
            raise ValueError("the Wilcoxon interval needs a fourth-order kernel (e.g. epanechnikov4)")
        i, j = np.triu_indices(n)
        locations = 0.5 * (v[i] + v[j])
        lo_crit = cornish_fisher_wilcoxon(alpha / 2.0, n)[1]
        hi_crit = cornish_fisher_wilcoxon(1.0 - alpha / 2.0, n)[1]
    curve = _ShiftedCurve(locations, cfg)
    top = float(locations.size)
    if not (0.0 < lo_crit < top and 0.0 < hi_crit < top):
        raise ValueError("critical values fall outside the statistic's range; "
                         "the sample is too small for this level")
    pad = cfg.bandwidth * cfg.kernel.radius
    thetas = np.linspace(locations.min() - pad, locations.max() + pad, grid_points)
    values = curve.grid(thetas)

    above_lo = np.nonzero(values > lo_crit)[0]
    below_hi = np.nonzero(values < hi_crit)[0]
    if above_lo.size == 0 or below_hi.size == 0 or above_lo[-1] == grid_points - 1 \
            or below_hi[0] == 0:
        raise ValueError("no crossing of the critical values (degenerate sample)")
    k = above_lo[-1]
    upper, it_u = _bisect(curve, thetas[k], thetas[k + 1], lo_crit, tol)
    k = below_hi[0]
    lower, it_l = _bisect(curve, thetas[k - 1], thetas[k], hi_crit, tol)

    increasing = float(np.max(np.diff(values)))
    if cfg.kernel.is_nonnegative() and increasing > 1e-9:
        raise InvariantError("shifted statistic increased in theta for a nonnegative kernel")
    diagnostics = {
        "grid_points": grid_points,
        "tol": tol,
        "critical_values": [lo_crit, hi_crit],
        "crossings_upper": _sign_changes(values, lo_crit),
        "crossings_lower": _sign_changes(values, hi_crit),
        "monotone_on_grid": increasing <= 1e-9,
        "bisection_steps": [it_l, it_u],
        "kernel": cfg.kernel.name,
        "bandwidth": cfg.bandwidth,
        "order_matched": matched,
    }
    return ConfidenceInterval(lower, upper, level, method, diagnostics)
