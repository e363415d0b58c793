"""Compactly supported symmetric kernels, their moment functionals and
bandwidth rules.

A kernel is stored as a piecewise polynomial density on a finite set of
breakpoints. The integrated kernel K is derived exactly from it, which lets
the compiled core evaluate K with Horner's rule and lets moments
``A[i, j] = int K(u)**i k(u) u**j du`` be integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

_SYMMETRY_TOL = 1e-12
_MASS_TOL = 1e-10


@dataclass(frozen=True)
class Kernel:
    """Symmetric kernel density k with integrated kernel K.

    Parameters
    ----------
    name : str
    breaks : tuple of float
        Ascending breakpoints; the support is ``[breaks[0], breaks[-1]]``.
    pieces : tuple of Polynomial
        Density on each cell between consecutive breakpoints.
    order : int
        2 for ordinary kernels, 4 when the second moment vanishes.
    """

    name: str
    breaks: tuple
    pieces: tuple
    order: int = 2
    cdf_pieces: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        if len(breaks) != len(self.pieces) + 1 or any(
            b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])
        ):
            raise ValueError("breaks must be ascending with one more entry than pieces")
        if not math.isclose(breaks[0], -breaks[-1], abs_tol=1e-14):
            raise ValueError("kernel support must be symmetric about 0")
        object.__setattr__(self, "breaks", breaks)
        pieces = tuple(Polynomial(p.coef) for p in self.pieces)
        object.__setattr__(self, "pieces", pieces)

        cdf_pieces = []
        acc = 0.0
        for b0, b1, p in zip(breaks, breaks[1:], pieces):
            P = p.integ(lbnd=b0) + acc
            cdf_pieces.append(P)
            acc = float(P(b1))
        object.__setattr__(self, "cdf_pieces", tuple(cdf_pieces))

        if abs(acc - 1.0) > _MASS_TOL:
            raise ValueError(f"kernel {self.name!r} integrates to {acc!r}, not 1")
        grid = np.linspace(0.0, breaks[-1], 257)
        if np.max(np.abs(self.density(grid) - self.density(-grid))) > _SYMMETRY_TOL:
            raise ValueError(f"kernel {self.name!r} is not symmetric")
        if self.order not in (2, 4):
            raise ValueError("order must be 2 or 4")

    @property
    def support(self) -> tuple[float, float]:
        return self.breaks[0], self.breaks[-1]

    @property
    def radius(self) -> float:
        return self.breaks[-1]

    def _cell(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breaks, u, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def density(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        inside = (u >= self.breaks[0]) & (u <= self.breaks[-1])
        cells = self._cell(u)
        for c, p in enumerate(self.pieces):
            m = inside & (cells == c)
            out[m] = p(u[m])
        return float(out) if out.ndim == 0 else out

    def cdf(self, t):
        """K(t), exactly 0 left of the support and exactly 1 right of it."""
        t = np.asarray(t, dtype=float)
        out = np.where(t >= self.breaks[-1], 1.0, 0.0)
        inside = (t > self.breaks[0]) & (t < self.breaks[-1])
        cells = self._cell(t)
        for c, P in enumerate(self.cdf_pieces):
            m = inside & (cells == c)
            out[m] = P(t[m])
        return float(out) if out.ndim == 0 else out

    def cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Breakpoints and a dense (cells x degree+1) table of K's coefficients,
        ascending powers of t, for the compiled evaluators."""
        deg = max(len(P.coef) for P in self.cdf_pieces)
        coefs = np.zeros((len(self.cdf_pieces), deg))
        for c, P in enumerate(self.cdf_pieces):
            coefs[c, : len(P.coef)] = P.coef
        return np.asarray(self.breaks, dtype=float), coefs

    def is_nonnegative(self) -> bool:
        grid = np.linspace(self.breaks[0], self.breaks[-1], 4001)
        return bool(np.min(self.density(grid)) >= -1e-14)

    def moment(self, i: int, j: int) -> float:
        return kernel_moment(self, i, j)

    def moment_table(self, max_i: int = 2, max_j: int = 4) -> dict[str, float]:
        return {f"A_{i}_{j}": kernel_moment(self, i, j)
                for i in range(max_i + 1) for j in range(max_j + 1)}


def _check_index(i: int, j: int) -> None:
    if not (0 <= i <= 6 and 0 <= j <= 6):
        raise ValueError("moment indices must lie in 0..6")


def _exact_moment(kernel: Kernel, i: int, j: int) -> float:
    x = Polynomial([0.0, 1.0])
    total = 0.0
    for b0, b1, p, P in zip(kernel.breaks, kernel.breaks[1:], kernel.pieces, kernel.cdf_pieces):
        integrand = (P ** i) * p * (x ** j)
        anti = integrand.integ()
        total += float(anti(b1) - anti(b0))
    return total


def _quad_moment(kernel: Kernel, i: int, j: int) -> float:
    total = 0.0
    for b0, b1, p, P in zip(kernel.breaks, kernel.breaks[1:], kernel.pieces, kernel.cdf_pieces):
        val, _ = integrate.quad(lambda u: P(u) ** i * p(u) * u ** j, b0, b1,
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return total


def kernel_moment(kernel: Kernel, i: int, j: int, method: str = "exact") -> float:
    """``A[i, j] = int K(u)**i k(u) u**j du``.

    ``method="exact"`` integrates the piecewise polynomial in closed form;
    ``method="quadrature"`` uses adaptive Gauss-Kronrod on each cell.
    """
    _check_index(i, j)
    if method == "exact":
        return _exact_moment(kernel, i, j)
    if method == "quadrature":
        return _quad_moment(kernel, i, j)
    raise ValueError(f"unknown method {method!r}")


def epanechnikov() -> Kernel:
    """k(u) = 3/4 (1 - u^2) on [-1, 1]; K(t) = (2 + 3t - t^3) / 4."""
    p = Polynomial([0.75, 0.0, -0.75])
    return Kernel("epanechnikov", (-1.0, 0.0, 1.0), (p, p), order=2)


def a11_zero_kernel() -> Kernel:
    """Piecewise-linear kernel with A[1,1] = 0.

    k(u) = (sqrt(105) - 3)/4 + (5 - sqrt(105))/2 |u| on [-1, 1]. It is
    negative near the ends of the support, so K is not monotone.
    """
    r = math.sqrt(105.0)
    a = 0.25 * (r - 3.0)
    b = 0.5 * (5.0 - r)
    return Kernel("a11zero", (-1.0, 0.0, 1.0),
                  (Polynomial([a, -b]), Polynomial([a, b])), order=2)


def fourth_order_transform(base: Kernel) -> Kernel:
    """k*(u) = k(u) (s4 - s2 u^2) / (s4 - s2^2), a symmetric fourth-order kernel."""
    if base.order != 2:
        raise ValueError("fourth_order_transform needs a second-order kernel")
    s2 = kernel_moment(base, 0, 2)
    s4 = kernel_moment(base, 0, 4)
    denom = s4 - s2 * s2
    if abs(denom) < 1e-14:
        raise ValueError("degenerate kernel: s4 == s2**2")
    factor = Polynomial([s4, 0.0, -s2]) / denom
    pieces = tuple(p * factor for p in base.pieces)
    out = Kernel(base.name + "4", base.breaks, pieces, order=4)
    for j in (1, 2, 3):
        if abs(kernel_moment(out, 0, j)) > 1e-10:
            raise ValueError(f"transform failed: A[0,{j}] != 0")
    if abs(kernel_moment(out, 0, 4)) < 1e-12:
        raise ValueError("transform failed: fourth moment vanishes")
    return out


def tabulated_kernel(name: str, grid, density, order: int = 2) -> Kernel:
    """Kernel from density values on a symmetric grid, linearly interpolated.

    The invariants (unit mass, symmetry, and vanishing low moments when
    ``order=4``) are validated on construction.
    """
    grid = np.asarray(grid, dtype=float)
    density = np.asarray(density, dtype=float)
    if grid.shape != density.shape or grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid and density must be 1-D arrays of equal length >= 2")
    pieces = []
    for x0, x1, y0, y1 in zip(grid, grid[1:], density, density[1:]):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append(Polynomial([y0 - slope * x0, slope]))
    k = Kernel(name, tuple(grid), tuple(pieces), order=order)
    if order == 4:
        for j in (1, 2, 3):
            if abs(kernel_moment(k, 0, j)) > 1e-8:
                raise ValueError(f"tabulated kernel is not fourth order: A[0,{j}] != 0")
    return k


def get_kernel(name: str) -> Kernel:
    """Built-in kernels by name: epanechnikov, a11zero, epanechnikov4."""
    return _builtin(name.lower().replace("_", "").replace("-", ""))


@lru_cache(maxsize=None)
def _builtin(key: str) -> Kernel:
    if key == "epanechnikov":
        return epanechnikov()
    if key in ("a11zero", "a11zerokernel"):
        return a11_zero_kernel()
    if key == "epanechnikov4":
        return fourth_order_transform(epanechnikov())
    raise ValueError(f"unknown kernel {key!r}; expected epanechnikov, a11zero or epanechnikov4")


KERNEL_NAMES = ("epanechnikov", "a11zero", "epanechnikov4")


@dataclass(frozen=True)
class BandwidthRule:
    """One of ``azzalini_log`` (n^-1/3 / log n), ``power_law`` (c n^-d) or ``fixed``."""

    kind: str = "azzalini_log"
    c: float = 1.0
    d: float = 1.0 / 3.0
    h: float | None = None

    def __post_init__(self):
        if self.kind == "power_law":
            if not self.c > 0:
                raise ValueError("power_law needs c > 0")
            if not 0.25 < self.d < 0.5:
                raise ValueError("power_law needs 1/4 < d < 1/2")
        elif self.kind == "fixed":
            if self.h is None or not self.h > 0:
                raise ValueError("fixed bandwidth must be positive")
        elif self.kind != "azzalini_log":
            raise ValueError(f"unknown bandwidth rule {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "BandwidthRule":
        """Parse ``azzalini-log``, ``fixed:0.1`` or ``power:1,0.3333``."""
        text = text.strip().lower()
        if text in ("azzalini-log", "azzalini_log", "azzalini"):
            return cls("azzalini_log")
        if text.startswith("fixed:"):
            return cls("fixed", h=float(text.split(":", 1)[1]))
        if text.startswith("power:"):
            c, d = (float(v) for v in text.split(":", 1)[1].split(","))
            return cls("power_law", c=c, d=d)
        try:
            return cls("fixed", h=float(text))
        except ValueError:
            raise ValueError(f"cannot parse bandwidth rule {text!r}") from None

    def describe(self) -> str:
        if self.kind == "azzalini_log":
            return "azzalini-log"
        if self.kind == "fixed":
            return f"fixed:{self.h!r}"
        return f"power:{self.c!r},{self.d!r}"


def bandwidth(rule: BandwidthRule, n: int) -> float:
    if rule.kind == "fixed":
        return float(rule.h)
    if rule.kind == "power_law":
        if n < 1:
            raise ValueError("n must be >= 1")
        return rule.c * n ** (-rule.d)
    if n < 2:
        raise ValueError("azzalini_log bandwidth needs n >= 2")
    return n ** (-1.0 / 3.0) / math.log(n)
