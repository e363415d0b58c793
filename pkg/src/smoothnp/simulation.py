"""Seeded Monte Carlo experiments for the smoothed tests.

Replication ``r`` always draws its sample from the stream
``derive(seed, r)``, and replications are processed in fixed-size blocks
whose partial sums are merged in block order. A report therefore depends
only on the configuration, never on the number of worker threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend
from .classical import classical_null_moments
from .distributions import DistributionModel, norm_cdf, norm_ppf, student_t_quantile
from .edgeworth import (
    cornish_fisher_sign,
    cornish_fisher_wilcoxon,
    edgeworth_cdf_sign,
    edgeworth_cdf_wilcoxon,
)
from .inference import t_statistic  # noqa: F401  (re-exported)
from .kernels import BandwidthRule, get_kernel
from .rng import uniform_block
from .smoothed import (
    ApproximationWarning,
    SmoothedConfig,
    null_moments_smoothed_sign,
    null_moments_smoothed_wilcoxon,
)

EXPERIMENTS = ("tail_comparison", "edgeworth_accuracy", "power", "equivalence")
CSV_COLUMNS = ("model", "n", "theta", "alpha", "test", "estimate", "se")
DEFAULT_SEED = 20240607


@dataclass(frozen=True)
class SimulationConfig:
    """One experiment cell.

    ``alphas`` are quantile levels (z_alpha thresholds) for
    ``tail_comparison`` and ``edgeworth_accuracy``, and significance levels
    for ``power``; they default to 0.95 and 0.05 respectively.
    ``equivalence`` ignores them. ``statistic`` picks the
    smoothed statistic studied by ``edgeworth_accuracy``.
    """

    experiment: str
    model: DistributionModel = field(default_factory=lambda: DistributionModel("normal"))
    n: int = 30
    theta: float = 0.0
    replications: int = 100_000
    seed: int = DEFAULT_SEED
    alphas: tuple | None = None
    statistic: str = "sign"
    kernel_sign: str = "a11zero"
    kernel_wilcoxon: str = "epanechnikov4"
    bandwidth_rule: BandwidthRule = field(default_factory=BandwidthRule)
    variance_mode: str = "simple"
    block_size: int = 2000
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.block_size < 1 or self.workers < 1:
            raise ValueError("block_size and workers must be >= 1")
        if self.statistic not in ("sign", "wilcoxon"):
            raise ValueError("statistic must be 'sign' or 'wilcoxon'")
        if self.alphas is None:
            object.__setattr__(self, "alphas", (0.05,) if self.experiment == "power" else (0.95,))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ValueError("alphas must lie strictly inside (0, 1)")
        get_kernel(self.kernel_sign)
        get_kernel(self.kernel_wilcoxon)

    def smoothed_configs(self) -> tuple[SmoothedConfig, SmoothedConfig]:
        extra = {}
        if self.variance_mode == "density_adjusted":
            extra = self.model.density_functionals()
        sc = SmoothedConfig.build(self.kernel_sign, self.n, self.bandwidth_rule,
                                  variance_mode=self.variance_mode, **extra)
        wc = SmoothedConfig.build(self.kernel_wilcoxon, self.n, self.bandwidth_rule,
                                  variance_mode=self.variance_mode, **extra)
        return sc, wc

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "model": self.model.family,
                "location": self.model.location, "scale": self.model.scale,
                "n": self.n, "theta": self.theta, "replications": self.replications,
                "seed": self.seed, "alphas": list(self.alphas), "statistic": self.statistic,
                "kernel_sign": self.kernel_sign, "kernel_wilcoxon": self.kernel_wilcoxon,
                "bandwidth_rule": self.bandwidth_rule.describe(),
                "variance_mode": self.variance_mode, "block_size": self.block_size,
                "workers": self.workers}


@dataclass
class Cell:
    model: str
    n: int
    theta: float
    alpha: float | None
    test: str
    estimate: float
    se: float | None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"model": self.model, "n": self.n, "theta": self.theta, "alpha": self.alpha,
                "test": self.test, "estimate": self.estimate, "se": self.se, **self.extra}


@dataclass
class ExperimentReport:
    config: dict
    cells: list
    wall_time: float = 0.0

    def cell(self, test: str, alpha: float | None = None, **match) -> Cell:
        for c in self.cells:
            if c.test != test:
                continue
            if alpha is not None and not math.isclose(c.alpha, alpha):
                continue
            if all(getattr(c, k) == v for k, v in match.items()):
                return c
        raise KeyError((test, alpha, match))

    def to_dict(self) -> dict:
        return {"config": self.config, "wall_time": self.wall_time,
                "cells": [c.to_dict() for c in self.cells]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in self.cells:
            w.writerow(["" if getattr(c, k) is None else repr(getattr(c, k))
                        if isinstance(getattr(c, k), float) else getattr(c, k)
                        for k in CSV_COLUMNS])
        return buf.getvalue()

    def same_results(self, other: "ExperimentReport") -> bool:
        """Equality of every cell, ignoring wall time."""
        return [c.to_dict() for c in self.cells] == [c.to_dict() for c in other.cells]


def merge_reports(reports) -> ExperimentReport:
    reports = list(reports)
    return ExperimentReport({"parts": [r.config for r in reports]},
                            [c for r in reports for c in r.cells],
                            sum(r.wall_time for r in reports))


def proportion_se(p: float, r: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / r)


# -- engine ---------------------------------------------------------------

def _draw(cfg: SimulationConfig, start: int, count: int) -> np.ndarray:
    u = uniform_block(cfg.seed, start, count, cfg.n)
    x = cfg.model.from_uniforms(u) + cfg.theta
    return np.ascontiguousarray(x)


def _run_blocks(cfg: SimulationConfig, fn) -> dict:
    """Apply ``fn`` to each block and add the results in block order."""
    starts = list(range(0, cfg.replications, cfg.block_size))

    def work(start):
        count = min(cfg.block_size, cfg.replications - start)
        return fn(_draw(cfg, start, count))

    if cfg.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    total = {}
    for part in parts:
        for k, v in part.items():
            total[k] = total[k] + v if k in total else v
    return total


class _Statistics:
    """Vectorized smoothed and classical statistics for sample blocks."""

    def __init__(self, cfg: SimulationConfig):
        self.n = cfg.n
        self.sc, self.wc = cfg.smoothed_configs()
        self.sign_table = self.sc.kernel.cdf_table()
        self.walsh_table = self.wc.kernel.cdf_table()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ApproximationWarning)
            self.sign_moments = null_moments_smoothed_sign(cfg.n, self.sc)[:2]
            self.walsh_moments = null_moments_smoothed_wilcoxon(cfg.n, self.wc)[:2]
        self.notes = [str(w.message) for w in caught]

    def smoothed_sign(self, x):
        return self.n - _backend.sign_sum_rows(x, 0.0, self.sc.bandwidth, *self.sign_table)

    def smoothed_wilcoxon(self, x):
        top = self.n * (self.n + 1) / 2.0
        return top - _backend.walsh_sum_rows(x, 0.0, self.wc.bandwidth, *self.walsh_table)

    def z_sign(self, s):
        m, v = self.sign_moments
        return (s - m) / math.sqrt(v)

    def z_wilcoxon(self, w):
        m, v = self.walsh_moments
        return (w - m) / math.sqrt(v)


def _t_rows(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    sd = np.std(x, axis=1, ddof=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(sd > 0, math.sqrt(n) * x.mean(axis=1) / sd, np.nan)


def _finish(cfg: SimulationConfig, cells: list, t0: float, notes=()) -> ExperimentReport:
    conf = cfg.to_dict()
    if notes:
        conf["notes"] = list(notes)
    return ExperimentReport(conf, cells, time.perf_counter() - t0)


def run_tail_comparison(cfg: SimulationConfig) -> ExperimentReport:
    """Which smoothed test has the smaller Edgeworth p-value in the tail region.

    A replication is in the region for level a when either standardized
    statistic reaches z_a. Counts of strict wins and ties are reported per
    level as proportions of all replications.
    """
    if cfg.experiment != "tail_comparison":
        raise ValueError("config is not a tail_comparison experiment")
    t0 = time.perf_counter()
    st = _Statistics(cfg)
    n = cfg.n
    zs = [norm_ppf(a) for a in cfg.alphas]

    def fn(x):
        zsn = st.z_sign(st.smoothed_sign(x))
        zw = st.z_wilcoxon(st.smoothed_wilcoxon(x))
        ps = 1.0 - np.asarray(edgeworth_cdf_sign(zsn, n))
        pw = 1.0 - np.asarray(edgeworth_cdf_wilcoxon(zw, n))
        out = {}
        for k, z in enumerate(zs):
            region = (zsn >= z) | (zw >= z)
            out[f"region{k}"] = int(region.sum())
            out[f"s{k}"] = int((region & (ps < pw)).sum())
            out[f"w{k}"] = int((region & (pw < ps)).sum())
        return out

    tot = _run_blocks(cfg, fn)
    r = cfg.replications
    cells = []
    name = cfg.model.family
    for k, a in enumerate(cfg.alphas):
        s, w, reg = tot[f"s{k}"], tot[f"w{k}"], tot[f"region{k}"]
        for test, count in (("S~", s), ("W~", w), ("tie", reg - s - w), ("region", reg)):
            p = count / r
            cells.append(Cell(name, n, cfg.theta, a, test, p, proportion_se(p, r),
                              {"count": count}))
        cells.append(Cell(name, n, cfg.theta, a, "W~/S~", w / s if s else None, None))
    return _finish(cfg, cells, t0, st.notes)


def run_edgeworth_accuracy(cfg: SimulationConfig) -> ExperimentReport:
    """Monte Carlo tail probability of the standardized statistic at z_a,
    next to the Edgeworth and plain normal approximations."""
    if cfg.experiment != "edgeworth_accuracy":
        raise ValueError("config is not an edgeworth_accuracy experiment")
    t0 = time.perf_counter()
    st = _Statistics(cfg)
    n = cfg.n
    zs = [norm_ppf(a) for a in cfg.alphas]
    if cfg.statistic == "sign":
        def stat(x):
            return st.z_sign(st.smoothed_sign(x))
        edge = [1.0 - edgeworth_cdf_sign(z, n) for z in zs]
        label = "S~"
    else:
        def stat(x):
            return st.z_wilcoxon(st.smoothed_wilcoxon(x))
        edge = [1.0 - edgeworth_cdf_wilcoxon(z, n) for z in zs]
        label = "W~"

    def fn(x):
        z = stat(x)
        return {f"hit{k}": int((z >= zk).sum()) for k, zk in enumerate(zs)}

    tot = _run_blocks(cfg, fn)
    r = cfg.replications
    cells = []
    for k, (a, zk) in enumerate(zip(cfg.alphas, zs)):
        p = tot[f"hit{k}"] / r
        cells.append(Cell(cfg.model.family, n, cfg.theta, a, f"{label}:true", p,
                          proportion_se(p, r), {"count": tot[f"hit{k}"]}))
        cells.append(Cell(cfg.model.family, n, cfg.theta, a, f"{label}:edge", float(edge[k]), None))
        cells.append(Cell(cfg.model.family, n, cfg.theta, a, f"{label}:normal",
                          float(1.0 - norm_cdf(zk)), None))
    return _finish(cfg, cells, t0, st.notes)


def run_power_study(cfg: SimulationConfig) -> ExperimentReport:
    """Rejection frequencies of the smoothed sign, smoothed Wilcoxon and t tests."""
    if cfg.experiment != "power":
        raise ValueError("config is not a power experiment")
    t0 = time.perf_counter()
    st = _Statistics(cfg)
    n = cfg.n
    simple = cfg.variance_mode == "simple"
    thresholds = []
    for a in cfg.alphas:
        if simple:
            s_thr = cornish_fisher_sign(1.0 - a, n)[1]
            w_thr = cornish_fisher_wilcoxon(1.0 - a, n)[1]
        else:
            q = norm_ppf(1.0 - a)
            s_thr = st.sign_moments[0] + math.sqrt(st.sign_moments[1]) * q
            w_thr = st.walsh_moments[0] + math.sqrt(st.walsh_moments[1]) * q
        thresholds.append((s_thr, w_thr, student_t_quantile(n - 1, 1.0 - a)))

    def fn(x):
        s = st.smoothed_sign(x)
        w = st.smoothed_wilcoxon(x)
        t = _t_rows(x)
        out = {}
        for k, (s_thr, w_thr, t_thr) in enumerate(thresholds):
            out[f"S{k}"] = int((s >= s_thr).sum())
            out[f"W{k}"] = int((w >= w_thr).sum())
            out[f"T{k}"] = int((t >= t_thr).sum())
        return out

    tot = _run_blocks(cfg, fn)
    r = cfg.replications
    cells = []
    for k, a in enumerate(cfg.alphas):
        for key, test in (("S", "S~"), ("W", "W~"), ("T", "t")):
            p = tot[f"{key}{k}"] / r
            cells.append(Cell(cfg.model.family, n, cfg.theta, a, test, p,
                              proportion_se(p, r), {"count": tot[f"{key}{k}"],
                                                    "threshold": thresholds[k]["SWT".index(key)]}))
    return _finish(cfg, cells, t0, st.notes)


def run_equivalence(cfg: SimulationConfig) -> ExperimentReport:
    """Mean squared distance between classical and smoothed standardized statistics."""
    if cfg.experiment != "equivalence":
        raise ValueError("config is not an equivalence experiment")
    t0 = time.perf_counter()
    st = _Statistics(cfg)
    n = cfg.n
    ms, vs = classical_null_moments("sign", n)
    mw, vw = classical_null_moments("wilcoxon", n)

    def fn(x):
        zs = (np.count_nonzero(x >= 0.0, axis=1) - ms) / math.sqrt(vs)
        zw = (_backend.walsh_count_rows(x) - mw) / math.sqrt(vw)
        ds = (zs - st.z_sign(st.smoothed_sign(x))) ** 2
        dw = (zw - st.z_wilcoxon(st.smoothed_wilcoxon(x))) ** 2
        return {"s1": float(ds.sum()), "s2": float((ds * ds).sum()),
                "w1": float(dw.sum()), "w2": float((dw * dw).sum())}

    tot = _run_blocks(cfg, fn)
    r = cfg.replications
    cells = []
    for key, test in (("s", "S-S~"), ("w", "W-W~")):
        mean = tot[f"{key}1"] / r
        var = max(tot[f"{key}2"] / r - mean * mean, 0.0)
        se = math.sqrt(var / (r - 1)) if r > 1 else None
        cells.append(Cell(cfg.model.family, n, cfg.theta, None, test, mean, se))
    return _finish(cfg, cells, t0, st.notes)


_RUNNERS = {"tail_comparison": run_tail_comparison,
            "edgeworth_accuracy": run_edgeworth_accuracy,
            "power": run_power_study,
            "equivalence": run_equivalence}


def run(cfg: SimulationConfig) -> ExperimentReport:
    return _RUNNERS[cfg.experiment](cfg)


def run_grid(base: SimulationConfig, models=None, ns=None, thetas=None) -> ExperimentReport:
    """Run ``base`` over every combination of the given models, sizes and shifts."""
    reports = []
    for m in models or [base.model]:
        for n in ns or [base.n]:
            for th in thetas if thetas is not None else [base.theta]:
                reports.append(run(replace(base, model=m, n=n, theta=th)))
    return merge_reports(reports)
