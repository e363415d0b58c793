"""NumPy implementations of the hot loops; same API as the compiled ``_core``."""

from __future__ import annotations

import numpy as np


def kernel_cdf(t, breaks, coefs):
    t = np.asarray(t, dtype=float)
    m = breaks.size - 1
    cell = np.clip(np.searchsorted(breaks, t, side="right") - 1, 0, m - 1)
    c = coefs[cell]
    acc = np.zeros_like(t)
    for d in range(coefs.shape[1] - 1, -1, -1):
        acc = acc * t + c[..., d]
    acc = np.where(t <= breaks[0], 0.0, acc)
    return np.where(t >= breaks[-1], 1.0, acc)


def sign_sum_rows(x, theta, h, breaks, coefs):
    x = np.asarray(x, dtype=float)
    return kernel_cdf((theta - x) / h, breaks, coefs).sum(axis=1)


def _walsh_sum_sorted(y, theta, h, breaks, coefs):
    n = y.size
    rad = breaks[-1]
    lower = 2.0 * theta - 2.0 * h * rad
    upper = 2.0 * theta + 2.0 * h * rad
    idx = np.arange(n)
    # first j with y_i + y_j > lower, and first j with y_i + y_j >= upper
    p_lo = np.searchsorted(y, lower - y, side="right")
    p_hi = np.searchsorted(y, upper - y, side="left")
    ones = np.maximum(p_lo - idx, 0).sum()
    start = np.maximum(p_lo, idx)
    stop = np.maximum(p_hi, idx)
    counts = stop - start
    total = float(ones)
    if counts.sum() > 0:
        rows = np.repeat(idx, counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        cols = np.repeat(start, counts) + offs
        total += kernel_cdf((2.0 * theta - y[rows] - y[cols]) / (2.0 * h), breaks, coefs).sum()
    return total


def walsh_sum_rows(x, theta, h, breaks, coefs):
    x = np.asarray(x, dtype=float)
    ys = np.sort(x, axis=1)
    return np.array([_walsh_sum_sorted(y, theta, h, breaks, coefs) for y in ys])


def walsh_sum_direct(x, theta, h, breaks, coefs):
    x = np.asarray(x, dtype=float)
    i, j = np.triu_indices(x.size)
    return float(kernel_cdf((2.0 * theta - x[i] - x[j]) / (2.0 * h), breaks, coefs).sum())


def walsh_count_rows(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[1]
    idx = np.arange(n)
    out = np.empty(x.shape[0], dtype=np.int64)
    for r, y in enumerate(np.sort(x, axis=1)):
        q = np.searchsorted(y, -y, side="left")
        out[r] = (n - np.maximum(q, idx)).sum()
    return out
