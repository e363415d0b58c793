"""Independent checks: exact enumeration of the sign/Wilcoxon p-value
comparison and quadrature evaluation of the null moment constants and
density identities used by the expansions."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .classical import exact_sign_distribution, exact_wilcoxon_distribution
from .distributions import DistributionModel, norm_ppf
from .kernels import Kernel

MAX_ENUM_N = 24
_CHUNK_BITS = 20


# -- exact enumeration ----------------------------------------------------

@dataclass
class LevelCounts:
    alpha: float
    z: float
    in_region: int
    s_wins: int
    w_wins: int
    ties: int

    @property
    def ratio(self) -> float | None:
        return self.w_wins / self.s_wins if self.s_wins else None

    def to_dict(self) -> dict:
        return {**asdict(self), "ratio": self.ratio}


@dataclass
class EnumerationReport:
    n: int
    alphas: list
    z_decimals: int | None
    method: str
    levels: list = field(default_factory=list)

    def __post_init__(self):
        for lv in self.levels:
            if lv.s_wins + lv.w_wins + lv.ties != lv.in_region:
                raise AssertionError("enumeration counts do not add up")

    def level(self, alpha: float) -> LevelCounts:
        for lv in self.levels:
            if math.isclose(lv.alpha, alpha):
                return lv
        raise KeyError(alpha)

    def to_dict(self) -> dict:
        return {"n": self.n, "alphas": list(self.alphas), "z_decimals": self.z_decimals,
                "method": self.method, "levels": [lv.to_dict() for lv in self.levels]}


def _region_z(alpha: float, z_decimals: int | None) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly inside (0, 1)")
    z = norm_ppf(alpha)
    return round(z, z_decimals) if z_decimals is not None else z


def _integer_tails(counts) -> np.ndarray:
    """Upper-tail counts #(T >= k) as exact Python integers."""
    return np.cumsum(np.array(counts[::-1], dtype=object))[::-1]


def _tables(n: int):
    s_tail = _integer_tails(exact_sign_distribution(n).counts)
    w_tail = _integer_tails(exact_wilcoxon_distribution(n).counts)
    mu_w = n * (n + 1) / 4.0
    sd_w = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0)
    return s_tail, w_tail, mu_w, sd_w


def _classify(s, w, s_tail, w_tail, n, mu_w, sd_w, z):
    """Boolean masks (in region, S smaller, W smaller) for arrays of (S, W)."""
    region = ((s - n / 2.0) / math.sqrt(n / 4.0) >= z) | ((w - mu_w) / sd_w >= z)
    ps = s_tail[s]
    pw = w_tail[w]
    # both tails share the denominator 2**n, so integer comparison is exact
    s_less = np.array(ps < pw, dtype=bool)
    w_less = np.array(pw < ps, dtype=bool)
    return region, s_less, w_less


def _enumerate_chunk(start: int, stop: int, n: int, weights: np.ndarray):
    m = np.arange(start, stop, dtype=np.int64)
    bits = (m[:, None] >> np.arange(n, dtype=np.int64)) & 1
    s = bits.sum(axis=1)
    w = bits @ weights
    return s, w


def enumerate_pvalue_comparison(n: int, alphas=(0.9, 0.95, 0.975), *,
                                z_decimals: int | None = None,
                                workers: int = 1) -> EnumerationReport:
    """Compare exact sign and signed-rank p-values over all 2**n sign patterns.

    Observations are taken as +-1, ..., +-n, so S is the number of positive
    entries and W the sum of their ranks. A pattern enters the region for a
    level when either standardized statistic reaches the normal quantile at
    that level. Within the region the test with the strictly smaller exact
    upper-tail p-value wins; equal p-values are ties.

    ``z_decimals`` rounds the quantile before use (2 reproduces a table of
    quantiles printed to two decimals).
    """
    if not 2 <= n <= MAX_ENUM_N:
        raise ValueError(f"enumeration needs 2 <= n <= {MAX_ENUM_N}")
    alphas = [float(a) for a in alphas]
    zs = [_region_z(a, z_decimals) for a in alphas]
    s_tail, w_tail, mu_w, sd_w = _tables(n)
    weights = np.arange(1, n + 1, dtype=np.int64)
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)

    def work(start):
        s, w = _enumerate_chunk(start, min(start + step, total), n, weights)
        out = []
        for z in zs:
            region, s_less, w_less = _classify(s, w, s_tail, w_tail, n, mu_w, sd_w, z)
            out.append((int(region.sum()), int((region & s_less).sum()),
                        int((region & w_less).sum())))
        return out

    starts = range(0, total, step)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    levels = []
    for k, (a, z) in enumerate(zip(alphas, zs)):
        reg = sum(p[k][0] for p in parts)
        sw = sum(p[k][1] for p in parts)
        ww = sum(p[k][2] for p in parts)
        levels.append(LevelCounts(a, z, reg, sw, ww, reg - sw - ww))
    return EnumerationReport(n, alphas, z_decimals, "enumeration", levels)


def joint_size_sum_counts(n: int) -> list:
    """N[s][w] = number of subsets of {1..n} with s elements summing to w."""
    top = n * (n + 1) // 2
    table = [[0] * (top + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for r in range(1, n + 1):
        for s in range(r, 0, -1):
            prev, cur = table[s - 1], table[s]
            for w in range(top, r - 1, -1):
                if prev[w - r]:
                    cur[w] += prev[w - r]
    return table


def count_pvalue_comparison(n: int, alphas=(0.9, 0.95, 0.975), *,
                            z_decimals: int | None = None) -> EnumerationReport:
    """Same counts as :func:`enumerate_pvalue_comparison`, from the joint
    (size, sum) distribution instead of pattern enumeration. Works for n
    well beyond the enumeration limit."""
    if not 2 <= n <= 60:
        raise ValueError("joint counting needs 2 <= n <= 60")
    alphas = [float(a) for a in alphas]
    zs = [_region_z(a, z_decimals) for a in alphas]
    s_tail, w_tail, mu_w, sd_w = _tables(n)
    table = joint_size_sum_counts(n)
    cells = [(s, w, c) for s, row in enumerate(table) for w, c in enumerate(row) if c]
    s = np.array([c[0] for c in cells])
    w = np.array([c[1] for c in cells])
    mult = np.array([c[2] for c in cells], dtype=object)
    levels = []
    for a, z in zip(alphas, zs):
        region, s_less, w_less = _classify(s, w, s_tail, w_tail, n, mu_w, sd_w, z)
        reg = int(mult[region].sum()) if region.any() else 0
        sw = int(mult[region & s_less].sum()) if (region & s_less).any() else 0
        ww = int(mult[region & w_less].sum()) if (region & w_less).any() else 0
        levels.append(LevelCounts(a, z, reg, sw, ww, reg - sw - ww))
    return EnumerationReport(n, alphas, z_decimals, "joint-dp", levels)


# -- moment constants -----------------------------------------------------

@dataclass
class ConstantCheck:
    name: str
    value: float
    target: float
    tol: float

    @property
    def error(self) -> float:
        return abs(self.value - self.target)

    @property
    def passed(self) -> bool:
        return self.error <= self.tol

    def to_dict(self) -> dict:
        return {**asdict(self), "error": self.error, "passed": self.passed}


@dataclass
class CheckReport:
    kind: str
    checks: list
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> ConstantCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "passed": self.passed, "meta": self.meta,
                "checks": [c.to_dict() for c in self.checks]}


class _GaussLegendre:
    """Fixed Gauss-Legendre rule on subintervals of [0, 1]."""

    def __init__(self, nodes: int):
        t, w = np.polynomial.legendre.leggauss(nodes)
        self.t = 0.5 * (t + 1.0)
        self.w = 0.5 * w

    def on(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        x = a[..., None] + (b - a)[..., None] * self.t
        return x, (b - a)[..., None] * self.w

    def integrate(self, f, a: float = 0.0, b: float = 1.0) -> float:
        x, w = self.on(a, b)
        return float(np.sum(f(x) * w))

    def integrate_split(self, g, a=0.0, b=1.0, cut=None) -> float:
        """int_a^b g(u) du with an optional breakpoint."""
        if cut is None or not a < cut < b:
            return self.integrate(g, a, b)
        return self.integrate(g, a, cut) + self.integrate(g, cut, b)

    def integrate_unit_square(self, g) -> float:
        """int int_{[0,1]^2} g(u, v) dv du, splitting v at 1 - u."""
        u, wu = self.on(0.0, 1.0)
        u, wu = u.ravel(), wu.ravel()
        lo_v, lo_w = self.on(np.zeros_like(u), 1.0 - u)
        hi_v, hi_w = self.on(1.0 - u, np.ones_like(u))
        inner = (np.sum(g(u[:, None], lo_v) * lo_w, axis=1)
                 + np.sum(g(u[:, None], hi_v) * hi_w, axis=1))
        return float(np.sum(inner * wu))


def check_moment_constants(resolution: int = 1000, tol: float = 1e-6) -> CheckReport:
    """Null-limit moment constants of the smoothed Wilcoxon expansion.

    Under the null the observations enter only through u = F(X), so each
    constant is an integral over the unit interval or square. The kernel
    indicator limit 1{u + v >= 1} is integrated by splitting at u + v = 1.
    """
    if resolution < 1000:
        raise ValueError("resolution must be at least 1000 nodes")
    gl = _GaussLegendre(resolution)

    def ind(u, v):
        return (u + v >= 1.0).astype(float)

    xi_sq = gl.integrate(lambda t: (2 * t - 1) ** 2)
    b1 = gl.integrate(lambda t: (2 * t - 1) ** 4)
    a1 = gl.integrate(lambda t: (2 * t - 1) ** 3)
    a2 = gl.integrate_unit_square(
        lambda u, v: (2 * u - 1) * (2 * v - 1) * (ind(u, v) - u - v + 0.5))
    block = gl.integrate(lambda t: (0.5 - t) ** 2 * (t * t / 2 - t / 2))
    b2 = gl.integrate_unit_square(
        lambda u, v: 16 * (u - 0.5) ** 2 * (v - 0.5) * (ind(u, v) - u - (v - 0.5)))

    # conditional expectation g(w) = E_u[(2u - 1) 1{u + w >= 1}] = w - w^2
    def g(w):
        lo = 1.0 - w
        x, wt = gl.on(lo, np.ones_like(w))
        return np.sum((2 * x - 1) * wt, axis=-1)

    b3 = 4.0 * gl.integrate(lambda w: (g(w) - 1.0 / 3.0) ** 2)
    b4 = gl.integrate_split(lambda u: (2 * u - 1) * (2 * (u >= 0.5) - 1.0), cut=0.5) - 2.0 / 3.0
    b5 = 4.0 * gl.integrate_unit_square(lambda u, v: (ind(u, v) - u - v + 0.5) ** 2)

    checks = [
        ConstantCheck("xi_sq", xi_sq, 1 / 3, tol),
        ConstantCheck("a1", a1, 0.0, tol),
        ConstantCheck("a2", a2, 0.0, tol),
        ConstantCheck("b1", b1, 1 / 5, tol),
        ConstantCheck("b2_block", block, -1 / 240, tol),
        ConstantCheck("b2", b2, -2 / 45, tol),
        ConstantCheck("b3", b3, 2 / 15, tol),
        ConstantCheck("b4", b4, -1 / 6, tol),
        ConstantCheck("b5", b5, 1 / 3, tol),
    ]
    kappa4 = b1 - 3 * xi_sq ** 2 + 12 * (b2 + b3)
    checks.append(ConstantCheck("kappa4", kappa4, 14 / 15, 10 * tol))
    return CheckReport("moment_constants", checks, {"resolution": resolution})


# -- density identities ---------------------------------------------------

def _quad_line(f, model: DistributionModel) -> float:
    lo, hi = model.effective_support(1e-16)
    c = model.location
    left = integrate.quad(f, lo, c, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    right = integrate.quad(f, c, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return left + right


def check_density_identities(model: DistributionModel, tol: float = 1e-7) -> CheckReport:
    """E[F(X) f'(X)] = -1/2 int f^3 and E[f'(X)] = 0, by quadrature.

    The closed-form int f^3 of the model is checked as well.
    """
    lhs = _quad_line(lambda x: model.cdf(x) * model.pdf_derivative(x) * model.pdf(x), model)
    cube = _quad_line(lambda x: model.pdf(x) ** 3, model)
    mean_fp = _quad_line(lambda x: model.pdf_derivative(x) * model.pdf(x), model)
    closed = model.density_functionals()["int_f_cubed"]
    checks = [
        ConstantCheck("E[F f']", lhs, -0.5 * cube, tol),
        ConstantCheck("E[f']", mean_fp, 0.0, 1e-9),
        ConstantCheck("int f^3", cube, closed, tol),
    ]
    return CheckReport("density_identities", checks,
                       {"model": model.family, "scale": model.scale, "location": model.location})


# -- expectation of the smoothed indicator --------------------------------

@dataclass
class ConvergenceReport:
    model: str
    kernel: str
    theta: float
    bandwidths: list
    deviations: list
    slope: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def smoothed_expectation(model: DistributionModel, kernel: Kernel, h: float,
                         theta: float = 0.0) -> float:
    """E[K((theta - X) / h)] = int k(u) F(theta - h u) du."""
    def f(u):
        return kernel.density(u) * model.cdf(theta - h * u)

    total = 0.0
    for a, b in zip(kernel.breaks, kernel.breaks[1:]):
        total += integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return total


def check_expectation_convergence(model: DistributionModel, kernel: Kernel, hs,
                                  theta: float = 0.0) -> ConvergenceReport:
    """Deviation E[K((theta - X)/h)] - F(theta) over a decreasing bandwidth list.

    The fitted log-log slope measures the bias order (about 2 for an order-2
    kernel). At theta equal to the centre of a symmetric model the deviation
    vanishes identically and no slope is reported.
    """
    hs = [float(h) for h in hs]
    if any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("bandwidths must be positive and strictly decreasing")
    target = float(model.cdf(theta))
    devs = [smoothed_expectation(model, kernel, h, theta) - target for h in hs]
    slope = None
    mags = np.abs(devs)
    if len(hs) >= 2 and np.all(mags > 1e-13):
        slope = float(np.polyfit(np.log(hs), np.log(mags), 1)[0])
    return ConvergenceReport(model.family, kernel.name, theta, hs, devs, slope)


def run_all(resolution: int = 1000) -> dict:
    """Every deterministic check, as used by the ``verify`` command."""
    from .kernels import get_kernel

    out = {"moment_constants": check_moment_constants(resolution).to_dict(),
           "density_identities": [check_density_identities(DistributionModel(f)).to_dict()
                                  for f in ("normal", "logistic", "laplace")]}
    hs = [0.4, 0.2, 0.1, 0.05]
    conv = check_expectation_convergence(DistributionModel("normal"), get_kernel("epanechnikov"),
                                         hs, theta=0.5)
    out["expectation_convergence"] = conv.to_dict()
    rep = enumerate_pvalue_comparison(10)
    out["enumeration_n10"] = rep.to_dict()
    out["passed"] = (out["moment_constants"]["passed"]
                     and all(d["passed"] for d in out["density_identities"])
                     and conv.slope is not None and abs(conv.slope - 2.0) <= 0.25
                     and [(lv.s_wins, lv.w_wins) for lv in rep.levels]
                     == [(25, 82), (25, 48), (5, 21)])
    return out
